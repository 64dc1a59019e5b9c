"""
Raster primitives: image types, adaptive binarization, projections, warps,
patch normalization and image file I/O.
"""

from .images import (
    PATCH_SIDE,
    AffineTransform,
    BinaryImage,
    GrayImage,
    binarize_adaptive,
    border_median,
    crop_padded,
    h_projection,
    normalize_patch,
    v_projection,
    warp_affine,
)
from .io import encode_png, read_image, read_pgm, read_png, write_pgm, write_png

__all__ = [
    "PATCH_SIDE",
    "AffineTransform",
    "BinaryImage",
    "GrayImage",
    "binarize_adaptive",
    "border_median",
    "crop_padded",
    "h_projection",
    "normalize_patch",
    "v_projection",
    "warp_affine",
    "encode_png",
    "read_image",
    "read_pgm",
    "read_png",
    "write_pgm",
    "write_png",
]
