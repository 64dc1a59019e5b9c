"""
Numpy CNN layers with explicit forward/backward passes.

Activations are N x C x H x W. Convolutions use im2col through strided
window views; the gradient goes back through col2im by strided-slice
accumulation over kernel offsets. Every operation has a fixed reduction
order, so a given input and parameter set always yields the same bits.
"""

import math
from typing import Any, Dict, List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeMismatchError
from .spec import LayerSpec, ModelSpec

Params = Dict[str, np.ndarray]
Cache = Any


class Layer:
    """Base layer: stateless apart from the parameters it names."""

    name: str = ""

    def param_shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {}

    def forward(self, x: np.ndarray, params: Params) -> Tuple[np.ndarray, Cache]:
        raise NotImplementedError

    def backward(self, dout: np.ndarray, cache: Cache, params: Params) -> Tuple[np.ndarray, Params]:
        raise NotImplementedError


class Conv2D(Layer):
    def __init__(self, name: str, in_channels: int, spec: LayerSpec):
        self.name = name
        self.in_channels = in_channels
        self.out_channels = spec.out_channels
        self.kernel = spec.kernel
        self.stride = spec.stride
        self.padding = spec.padding

    def param_shapes(self) -> Dict[str, Tuple[int, ...]]:
        k = self.kernel
        return {
            f"{self.name}.weight": (self.out_channels, self.in_channels, k, k),
            f"{self.name}.bias": (self.out_channels,),
        }

    def _columns(self, x: np.ndarray) -> np.ndarray:
        p, k, s = self.padding, self.kernel, self.stride
        if p:
            x = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
        windows = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::s, ::s]
        # N, C, Ho, Wo, k, k -> N, Ho, Wo, C*k*k
        n, c, ho, wo = windows.shape[:4]
        return windows.transpose(0, 2, 3, 1, 4, 5).reshape(n, ho, wo, c * k * k)

    def forward(self, x: np.ndarray, params: Params) -> Tuple[np.ndarray, Cache]:
        weight = params[f"{self.name}.weight"]
        bias = params[f"{self.name}.bias"]
        cols = self._columns(x)
        out = cols @ weight.reshape(self.out_channels, -1).T + bias
        return np.ascontiguousarray(out.transpose(0, 3, 1, 2)), (x.shape, cols)

    def backward(self, dout: np.ndarray, cache: Cache, params: Params) -> Tuple[np.ndarray, Params]:
        x_shape, cols = cache
        weight = params[f"{self.name}.weight"]
        n, c, h, w = x_shape
        k, s, p = self.kernel, self.stride, self.padding
        ho, wo = dout.shape[2], dout.shape[3]

        dflat = dout.transpose(0, 2, 3, 1)  # N, Ho, Wo, F
        dweight = np.tensordot(dflat, cols, axes=([0, 1, 2], [0, 1, 2])).reshape(weight.shape)
        dbias = dflat.sum(axis=(0, 1, 2))

        dcols = (dflat @ weight.reshape(self.out_channels, -1)).reshape(n, ho, wo, c, k, k)
        dxp = np.zeros((n, c, h + 2 * p, w + 2 * p), dtype=dout.dtype)
        for i in range(k):
            for j in range(k):
                dxp[:, :, i:i + s * ho:s, j:j + s * wo:s] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        dx = dxp[:, :, p:p + h, p:p + w] if p else dxp
        return dx, {f"{self.name}.weight": dweight, f"{self.name}.bias": dbias}


class ReLU(Layer):
    def __init__(self, name: str):
        self.name = name

    def forward(self, x: np.ndarray, params: Params) -> Tuple[np.ndarray, Cache]:
        mask = x > 0
        return x * mask, mask

    def backward(self, dout: np.ndarray, cache: Cache, params: Params) -> Tuple[np.ndarray, Params]:
        return dout * cache, {}


class MaxPool2D(Layer):
    """Max pooling; the gradient goes to the first maximum of each window."""

    def __init__(self, name: str, spec: LayerSpec):
        self.name = name
        self.kernel = spec.kernel
        self.stride = spec.stride

    def forward(self, x: np.ndarray, params: Params) -> Tuple[np.ndarray, Cache]:
        k, s = self.kernel, self.stride
        windows = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::s, ::s]
        flat = windows.reshape(windows.shape[:4] + (k * k,))
        argmax = flat.argmax(axis=-1)
        out = np.take_along_axis(flat, argmax[..., None], axis=-1)[..., 0]
        return out, (x.shape, argmax)

    def backward(self, dout: np.ndarray, cache: Cache, params: Params) -> Tuple[np.ndarray, Params]:
        x_shape, argmax = cache
        k, s = self.kernel, self.stride
        n, c, ho, wo = dout.shape
        di, dj = np.divmod(argmax, k)
        rows = np.arange(ho)[None, None, :, None] * s + di
        cols = np.arange(wo)[None, None, None, :] * s + dj
        nn = np.arange(n)[:, None, None, None]
        cc = np.arange(c)[None, :, None, None]
        dx = np.zeros(x_shape, dtype=dout.dtype)
        np.add.at(dx, (nn, cc, rows, cols), dout)
        return dx, {}


class Dense(Layer):
    def __init__(self, name: str, in_dim: int, spec: LayerSpec):
        self.name = name
        self.in_dim = in_dim
        self.out_dim = spec.out_dim

    def param_shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {
            f"{self.name}.weight": (self.out_dim, self.in_dim),
            f"{self.name}.bias": (self.out_dim,),
        }

    def forward(self, x: np.ndarray, params: Params) -> Tuple[np.ndarray, Cache]:
        flat = x.reshape(x.shape[0], -1)
        out = flat @ params[f"{self.name}.weight"].T + params[f"{self.name}.bias"]
        return out, (x.shape, flat)

    def backward(self, dout: np.ndarray, cache: Cache, params: Params) -> Tuple[np.ndarray, Params]:
        x_shape, flat = cache
        weight = params[f"{self.name}.weight"]
        grads = {
            f"{self.name}.weight": dout.T @ flat,
            f"{self.name}.bias": dout.sum(axis=0),
        }
        return (dout @ weight).reshape(x_shape), grads


def build_layers(spec: ModelSpec) -> List[Layer]:
    """Instantiate the layers of spec; the final softmax is folded into the loss."""
    shapes = spec.shapes()
    layers: List[Layer] = []
    for index, (layer, shape) in enumerate(zip(spec.layers, shapes)):
        name = f"{layer.kind}{index}"
        if layer.kind == "conv":
            layers.append(Conv2D(name, shape[0], layer))
        elif layer.kind == "relu":
            layers.append(ReLU(name))
        elif layer.kind == "maxpool":
            layers.append(MaxPool2D(name, layer))
        elif layer.kind == "fc":
            layers.append(Dense(name, int(np.prod(shape)), layer))
    return layers


def init_params(spec: ModelSpec, rng: np.random.Generator, dtype: Any = np.float32) -> Params:
    """Kaiming-uniform weights, zero biases, drawn in layer order."""
    params: Params = {}
    for layer in build_layers(spec):
        for name, shape in layer.param_shapes().items():
            if name.endswith(".bias"):
                params[name] = np.zeros(shape, dtype=dtype)
                continue
            fan_in = int(np.prod(shape[1:]))
            bound = math.sqrt(6.0 / fan_in)
            params[name] = rng.uniform(-bound, bound, size=shape).astype(dtype)
    return params


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Summed softmax cross-entropy and its gradient w.r.t. the logits.

    Log-sum-exp keeps the loss finite for logits of any magnitude.
    """
    logp = log_softmax(logits)
    n = logits.shape[0]
    loss = float(-logp[np.arange(n), labels].sum())
    grad = np.exp(logp)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad.astype(logits.dtype)


class Network:
    """Layer stack bound to a parameter dict."""

    def __init__(self, spec: ModelSpec, params: Params):
        self.spec = spec
        self.layers = build_layers(spec)
        expected = {n: s for layer in self.layers for n, s in layer.param_shapes().items()}
        if set(expected) != set(params):
            raise ShapeMismatchError(
                f"parameter names {sorted(params)} do not match spec {sorted(expected)}"
            )
        for name, shape in expected.items():
            if tuple(params[name].shape) != shape:
                raise ShapeMismatchError(f"tensor '{name}' has shape {params[name].shape}, expected {shape}")
        self.params = params

    def _check_input(self, x: np.ndarray) -> None:
        expected = self.spec.input_shape()
        if tuple(x.shape[1:]) != expected:
            raise ShapeMismatchError(f"input shape {tuple(x.shape[1:])} does not match {expected}")

    def logits(self, x: np.ndarray) -> np.ndarray:
        self._check_input(x)
        for layer in self.layers:
            x, _ = layer.forward(x, self.params)
        return x

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray) -> Tuple[float, Params, int]:
        """Summed loss, summed gradients and number of correct argmax predictions."""
        self._check_input(x)
        caches: List[Cache] = []
        for layer in self.layers:
            x, cache = layer.forward(x, self.params)
            caches.append(cache)
        loss, dout = cross_entropy(x, labels)
        correct = int((x.argmax(axis=1) == labels).sum())

        grads: Params = {}
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dout, layer_grads = layer.backward(dout, cache, self.params)
            grads.update(layer_grads)
        return loss, grads, correct

    def astype(self, dtype: Any) -> "Network":
        return Network(self.spec, {k: v.astype(dtype) for k, v in self.params.items()})


def tree_sum(parts: List[Params]) -> Params:
    """Pairwise sum over a fixed binary tree of part indices."""
    if not parts:
        raise ValueError("nothing to sum")
    level = list(parts)
    while len(level) > 1:
        nxt: List[Params] = []
        for i in range(0, len(level) - 1, 2):
            a, b = level[i], level[i + 1]
            nxt.append({k: a[k] + b[k] for k in a})
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def empty_grads(params: Params) -> Params:
    return {k: np.zeros_like(v) for k, v in params.items()}

