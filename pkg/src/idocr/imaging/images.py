"""
Raster primitives shared by every pipeline stage.

Images are thin dataclasses around numpy arrays: GrayImage holds uint8
intensities (0 = black ink, 255 = white) and BinaryImage holds booleans with
ink = foreground = True. All operations are pure functions.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import cv2
import numpy as np

from ..errors import ImageError

PATCH_SIDE = 64


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel raster, row-major."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.size == 0:
            raise ImageError("empty input")
        if self.data.dtype != np.uint8:
            object.__setattr__(self, "data", np.ascontiguousarray(self.data, dtype=np.uint8))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @classmethod
    def filled(cls, width: int, height: int, value: int = 255) -> "GrayImage":
        return cls(np.full((height, width), value, dtype=np.uint8))

    def crop(self, x: int, y: int, w: int, h: int) -> "GrayImage":
        return GrayImage(self.data[y:y + h, x:x + w].copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))


@dataclass(frozen=True)
class BinaryImage:
    """Thresholded raster; True marks ink."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 2:
            raise ImageError("binary image must be two-dimensional")
        if self.data.dtype != np.bool_:
            object.__setattr__(self, "data", self.data.astype(bool))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.data))

    def crop(self, x: int, y: int, w: int, h: int) -> "BinaryImage":
        return BinaryImage(self.data[y:y + h, x:x + w].copy())

    def to_gray(self) -> GrayImage:
        """Render ink black on white, for debugging dumps."""
        return GrayImage(np.where(self.data, 0, 255).astype(np.uint8))


@dataclass(frozen=True)
class AffineTransform:
    """
    2x3 matrix (a, b, tx; c, d, ty) mapping OUTPUT coordinates to SOURCE coordinates.

    The builders take the intuitive forward description (move content right,
    rotate content counter-clockwise) and store its inverse.
    """

    a: float
    b: float
    tx: float
    c: float
    d: float
    ty: float

    def __post_init__(self) -> None:
        if abs(self.determinant) < 1e-12:
            raise ImageError("degenerate transform")

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b, self.tx], [self.c, self.d, self.ty], [0.0, 0.0, 1.0]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "AffineTransform":
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[0, 2]),
                   float(m[1, 0]), float(m[1, 1]), float(m[1, 2]))

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)

    @classmethod
    def translation(cls, dx: float, dy: float) -> "AffineTransform":
        """Content moves by (dx, dy)."""
        return cls(1.0, 0.0, -dx, 0.0, 1.0, -dy)

    @classmethod
    def similarity(
        cls,
        angle_deg: float = 0.0,
        scale: float = 1.0,
        dx: float = 0.0,
        dy: float = 0.0,
        center: Tuple[float, float] = (0.0, 0.0),
    ) -> "AffineTransform":
        """Rotate by angle_deg and scale about center, then translate by (dx, dy)."""
        return cls.affine(angle_deg=angle_deg, scale=scale, dx=dx, dy=dy, center=center)

    @classmethod
    def affine(
        cls,
        angle_deg: float = 0.0,
        scale: float = 1.0,
        shear_deg: float = 0.0,
        dx: float = 0.0,
        dy: float = 0.0,
        center: Tuple[float, float] = (0.0, 0.0),
    ) -> "AffineTransform":
        """
        Slant horizontally by shear_deg (positive leans the top right), then
        rotate and scale about center, then translate by (dx, dy).
        """
        if scale <= 0 or not -45.0 < shear_deg < 45.0:
            raise ImageError("degenerate transform")
        theta = math.radians(angle_deg)
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        slant = -math.tan(math.radians(shear_deg))
        cx, cy = center
        # forward: p' = s * R * H * (p - c) + c + t, with y pointing down
        forward = np.array([
            [scale * cos_t, scale * (cos_t * slant + sin_t), 0.0],
            [-scale * sin_t, scale * (cos_t - sin_t * slant), 0.0],
            [0.0, 0.0, 1.0],
        ])
        forward[0, 2] = cx + dx - forward[0, 0] * cx - forward[0, 1] * cy
        forward[1, 2] = cy + dy - forward[1, 0] * cx - forward[1, 1] * cy
        return cls.from_matrix(np.linalg.inv(forward))

    @classmethod
    def rotation(cls, angle_deg: float, center: Tuple[float, float]) -> "AffineTransform":
        return cls.similarity(angle_deg=angle_deg, center=center)

    def inverse(self) -> "AffineTransform":
        return AffineTransform.from_matrix(np.linalg.inv(self.as_matrix()))

    def apply(self, x: float, y: float) -> Tuple[float, float]:
        """Map an output point to its source point."""
        return (self.a * x + self.b * y + self.tx, self.c * x + self.d * y + self.ty)


def binarize_adaptive(img: GrayImage, window: int = 25, offset: int = 10) -> BinaryImage:
    """
    Local-mean threshold with windows truncated at the image border.

    Pixel p is ink iff intensity(p) < mean(window centred at p) - offset.
    The comparison is done on integer sums so no rounding is involved.
    """
    if img.data.size == 0:
        raise ImageError("empty input")
    if window < 1 or window % 2 == 0:
        raise ImageError(f"window must be a positive odd pixel count, got {window}")
    if not -128 <= offset <= 127:
        raise ImageError(f"offset must lie in [-128, 127], got {offset}")

    data = img.data.astype(np.int64)
    h, w = data.shape
    integral = np.zeros((h + 1, w + 1), dtype=np.int64)
    integral[1:, 1:] = data.cumsum(axis=0).cumsum(axis=1)

    r = window // 2
    ys = np.arange(h)
    xs = np.arange(w)
    y0 = np.clip(ys - r, 0, h)[:, None]
    y1 = np.clip(ys + r + 1, 0, h)[:, None]
    x0 = np.clip(xs - r, 0, w)[None, :]
    x1 = np.clip(xs + r + 1, 0, w)[None, :]

    sums = integral[y1, x1] - integral[y0, x1] - integral[y1, x0] + integral[y0, x0]
    counts = (y1 - y0) * (x1 - x0)
    # intensity < sum / count - offset  <=>  intensity * count < sum - offset * count
    return BinaryImage(data * counts < sums - offset * counts)


def h_projection(img: BinaryImage) -> np.ndarray:
    """Foreground count per row."""
    return np.count_nonzero(img.data, axis=1).astype(np.int64)


def v_projection(img: BinaryImage) -> np.ndarray:
    """Foreground count per column."""
    return np.count_nonzero(img.data, axis=0).astype(np.int64)


def warp_affine(img: GrayImage, t: AffineTransform, fill: int = 255) -> GrayImage:
    """Nearest-neighbour warp; output has the input size, uncovered pixels get `fill`."""
    h, w = img.data.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    src_x = t.a * xs + t.b * ys + t.tx
    src_y = t.c * xs + t.d * ys + t.ty
    # round half up; keeps integer shifts exact
    sx = np.floor(src_x + 0.5).astype(np.int64)
    sy = np.floor(src_y + 0.5).astype(np.int64)
    inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)

    out = np.full((h, w), fill, dtype=np.uint8)
    out[inside] = img.data[sy[inside], sx[inside]]
    return GrayImage(out)


def border_median(img: GrayImage) -> int:
    """Median intensity of the outermost ring of pixels."""
    d = img.data
    ring = np.concatenate([d[0, :], d[-1, :], d[:, 0], d[:, -1]])
    return int(np.median(ring))


def normalize_patch(img: GrayImage, side: int = PATCH_SIDE) -> GrayImage:
    """
    Scale so the longer side equals `side` (aspect preserved) and centre the
    result on a canvas filled with the border-median background.
    """
    background = border_median(img)
    h, w = img.data.shape
    scale = side / max(h, w)
    new_w = min(side, max(1, int(round(w * scale))))
    new_h = min(side, max(1, int(round(h * scale))))

    if (new_w, new_h) == (w, h):
        scaled = img.data
    else:
        interpolation = cv2.INTER_AREA if scale < 1.0 else cv2.INTER_LINEAR
        scaled = cv2.resize(img.data, (new_w, new_h), interpolation=interpolation)

    canvas = np.full((side, side), background, dtype=np.uint8)
    x0 = (side - new_w) // 2
    y0 = (side - new_h) // 2
    canvas[y0:y0 + new_h, x0:x0 + new_w] = scaled
    return GrayImage(canvas)


def crop_padded(img: GrayImage, x: int, y: int, w: int, h: int, fill: int) -> GrayImage:
    """Crop a window that may extend past the image; outside pixels get `fill`."""
    out = np.full((h, w), fill, dtype=np.uint8)
    sx0, sy0 = max(x, 0), max(y, 0)
    sx1, sy1 = min(x + w, img.width), min(y + h, img.height)
    if sx1 > sx0 and sy1 > sy0:
        out[sy0 - y:sy1 - y, sx0 - x:sx1 - x] = img.data[sy0:sy1, sx0:sx1]
    return GrayImage(out)
