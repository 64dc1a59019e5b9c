"""
Image file I/O through Pillow: 8-bit grayscale PNG and binary PGM (P5).
"""

import io
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import ImageError
from .images import GrayImage

PathLike = Union[str, Path]


def read_png(path: PathLike) -> GrayImage:
    with Image.open(path) as im:
        return GrayImage(np.asarray(im.convert("L"), dtype=np.uint8).copy())


def encode_png(img: GrayImage) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(img.data).save(buffer, format="PNG", optimize=False)
    return buffer.getvalue()


def write_png(img: GrayImage, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_png(img))


def read_pgm(path: PathLike) -> GrayImage:
    """
    Read an 8-bit PGM; Pillow handles the header, comments included.

    Raises:
        ImageError: if the file is not a readable 8-bit grayscale PGM
    """
    try:
        with Image.open(path, formats=["PPM"]) as im:
            if im.mode != "L":
                raise ImageError(f"not an 8-bit grayscale PGM: mode {im.mode}")
            im.load()
            return GrayImage(np.asarray(im, dtype=np.uint8).copy())
    except (UnidentifiedImageError, OSError, ValueError) as e:
        raise ImageError(f"cannot read PGM {path}: {e}") from e


def write_pgm(img: GrayImage, path: PathLike) -> None:
    """Write binary P5; Pillow's PPM encoder picks P5 for an L-mode image."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img.data).save(path, format="PPM")


def read_image(path: PathLike) -> GrayImage:
    """Dispatch on suffix: .pgm must be a PGM, anything else goes through Pillow as is."""
    if Path(path).suffix.lower() == ".pgm":
        return read_pgm(path)
    return read_png(path)
