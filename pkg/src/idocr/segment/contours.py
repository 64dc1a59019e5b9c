"""
Connected components by border following.

OpenCV's findContours implements Suzuki-Abe border following; in two-level
(CCOMP) mode every outer border has no parent, including borders of
components nested inside another component's hole.
"""

from dataclasses import dataclass, field
from typing import List

import cv2
import numpy as np

from ..imaging import BinaryImage
from .box import Box

_FILL_FLAGS = 8 | cv2.FLOODFILL_MASK_ONLY | (1 << 8)


@dataclass(frozen=True)
class Component:
    """
    One 8-connected foreground component.

    mask covers the outer-border box and holds the component's own pixels;
    components nested inside its holes are not part of it.
    """

    box: Box
    area: int
    mask: np.ndarray = field(repr=False, compare=False)


def trace_contours(img: BinaryImage) -> List[Component]:
    """Components of img ordered by (x, y) of their boxes."""
    if not img.data.any():
        return []
    # one-pixel zero frame so components touching the image edge are traced fully
    padded = np.ascontiguousarray(np.pad(img.data, 1).astype(np.uint8))
    found = cv2.findContours(padded, cv2.RETR_CCOMP, cv2.CHAIN_APPROX_NONE)
    contours, hierarchy = found[-2], found[-1]
    if hierarchy is None:
        return []

    components: List[Component] = []
    for contour, links in zip(contours, hierarchy[0]):
        if links[3] != -1:
            continue  # hole border
        px, py, w, h = (int(v) for v in cv2.boundingRect(contour))
        x, y = px - 1, py - 1

        # the component's pixels are those 8-connected to its border
        local = np.ascontiguousarray(img.data[y:y + h, x:x + w].astype(np.uint8))
        fill = np.zeros((h + 2, w + 2), dtype=np.uint8)
        seed = (int(contour[0][0][0]) - px, int(contour[0][0][1]) - py)
        cv2.floodFill(local, fill, seed, 1, flags=_FILL_FLAGS)
        own = fill[1:-1, 1:-1].astype(bool)

        components.append(Component(box=Box(x, y, w, h), area=int(np.count_nonzero(own)), mask=own))

    components.sort(key=lambda c: (c.box.x, c.box.y, c.box.w, c.box.h))
    return components
