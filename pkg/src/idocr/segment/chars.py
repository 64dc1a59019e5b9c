"""
Character extraction from a string image.

Contour components are grouped into characters (diacritics merged with their
body), speckle and stray marks off the baseline are dropped, touching glyphs
are split at a thin valley of the vertical projection, and each character is
cut out as a square context window around it, the composition the synthetic
generator produces.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..imaging import BinaryImage, GrayImage, border_median, crop_padded, normalize_patch
from .box import Box
from .config import SegmentConfig
from .contours import Component, trace_contours
from .noise import suppress_noise


@dataclass(frozen=True)
class CharPatch:
    """Tight character box and its normalized 64x64 patch."""

    box: Box
    patch: GrayImage


@dataclass(frozen=True)
class _Group:
    box: Box
    area: int
    parts: int


@dataclass(frozen=True)
class LineReference:
    """Glyph scale of a line: cap-like height and baseline row."""

    height: float
    baseline: float


def _merge_overlapping(components: Sequence[Component], ratio: float) -> List[_Group]:
    n = len(components)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            a, b = components[i].box, components[j].box
            if b.x >= a.x2:
                break  # sorted by x: no later component overlaps a
            narrower = min(a.w, b.w)
            if a.horizontal_overlap(b) >= ratio * narrower:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict = {}
    for i, comp in enumerate(components):
        root = find(i)
        if root in groups:
            g = groups[root]
            groups[root] = _Group(g.box.union(comp.box), g.area + comp.area, g.parts + 1)
        else:
            groups[root] = _Group(comp.box, comp.area, 1)
    return [groups[k] for k in sorted(groups)]


def _local_baseline(box: Box, full: Sequence[Box], k: int = 3) -> float:
    cx = box.center[0]
    nearest = sorted(full, key=lambda b: (abs(b.center[0] - cx), b.x))[:k]
    return float(np.median([b.y2 for b in nearest]))


def _keep_small(box: Box, full: Sequence[Box], median_h: float) -> bool:
    """A short character survives if it is a '.' on the baseline or a mid-height '-'."""
    baseline = _local_baseline(box, full)
    tolerance = max(2.0, 0.15 * median_h)
    if abs(box.y2 - baseline) <= tolerance and box.w <= 0.6 * median_h:
        return True
    middle = baseline - median_h / 2.0
    elongated = box.w >= 1.5 * box.h and box.w >= 0.2 * median_h
    return elongated and abs(box.center[1] - middle) <= 0.3 * median_h


def _ink_box(img: BinaryImage, x0: int, x1: int, y0: int, y1: int) -> Optional[Box]:
    region = img.data[y0:y1, x0:x1]
    rows = np.flatnonzero(region.any(axis=1))
    cols = np.flatnonzero(region.any(axis=0))
    if rows.size == 0:
        return None
    return Box.from_corners(x0 + int(cols[0]), y0 + int(rows[0]),
                            x0 + int(cols[-1]) + 1, y0 + int(rows[-1]) + 1)


def _split_oversize(img: BinaryImage, box: Box, median_w: float,
                    config: SegmentConfig, depth: int = 0) -> List[Box]:
    """Split a too-wide character at its thinnest interior column (ties: leftmost)."""
    if depth > 4 or box.w <= config.oversize_ratio * median_w:
        return [box]
    profile = img.data[box.y:box.y2, box.x:box.x2].sum(axis=0)
    lo = max(1, int(box.w * 0.2))
    hi = min(box.w - 1, int(np.ceil(box.w * 0.8)))
    if hi <= lo:
        return [box]
    interior = profile[lo:hi]
    cut = lo + int(np.argmin(interior))
    if profile[cut] > config.valley_ratio * box.h:
        return [box]

    pieces: List[Box] = []
    for x0, x1 in ((box.x, box.x + cut), (box.x + cut + 1, box.x2)):
        if x1 <= x0:
            continue
        part = _ink_box(img, x0, x1, box.y, box.y2)
        if part is not None:
            pieces.extend(_split_oversize(img, part, median_w, config, depth + 1))
    return pieces or [box]


def locate_chars(string_img: BinaryImage, config: Optional[SegmentConfig] = None) -> List[Box]:
    """Tight character boxes of a string image, ordered by x."""
    config = config or SegmentConfig()
    components = trace_contours(string_img)
    if not components:
        return []

    groups = _merge_overlapping(components, config.merge_overlap)
    groups = [g for g in groups if not (g.parts == 1 and g.area < config.speckle_area)]
    if not groups:
        return []

    median_h = float(np.median([g.box.h for g in groups]))
    full = [g.box for g in groups if g.box.h >= config.small_height_ratio * median_h]
    if full:
        full_h = float(np.median([b.h for b in full]))
        kept = [g.box for g in groups
                if g.box.h >= config.small_height_ratio * median_h
                or _keep_small(g.box, full, full_h)]
    else:
        kept = [g.box for g in groups]

    widths = [b.w for b in kept if b.h >= config.small_height_ratio * median_h] or [b.w for b in kept]
    median_w = float(np.median(widths))
    boxes: List[Box] = []
    for box in kept:
        boxes.extend(_split_oversize(string_img, box, median_w, config))
    return sorted(boxes, key=lambda b: (b.x, b.y))


def line_reference(boxes: Sequence[Box], config: Optional[SegmentConfig] = None) -> Optional[LineReference]:
    """
    Glyph scale from the character boxes of one line.

    The height is the 80th percentile of full-size character heights, which
    lands on capitals and ascenders even in mostly lowercase text; the
    baseline is the median bottom edge.
    """
    if not boxes:
        return None
    config = config or SegmentConfig()
    median_h = float(np.median([b.h for b in boxes]))
    full = [b for b in boxes if b.h >= config.small_height_ratio * median_h] or list(boxes)
    height = float(np.percentile([b.h for b in full], 80))
    baseline = float(np.median([b.y2 for b in full]))
    return LineReference(height=max(1.0, height), baseline=baseline)


def cut_patches(boxes: Sequence[Box], gray: GrayImage, reference: LineReference,
                config: Optional[SegmentConfig] = None,
                background: Optional[int] = None) -> List[CharPatch]:
    """Square context windows centred on each box and on the line's cap band."""
    config = config or SegmentConfig()
    if background is None:
        background = border_median(gray)
    side = max(1, int(round(config.context_scale * reference.height)))
    cy = reference.baseline - reference.height / 2.0
    patches: List[CharPatch] = []
    for box in boxes:
        cx = box.center[0]
        x0 = int(np.floor(cx - side / 2.0 + 0.5))
        y0 = int(np.floor(cy - side / 2.0 + 0.5))
        window = crop_padded(gray, x0, y0, side, side, fill=background)
        patches.append(CharPatch(box=box, patch=normalize_patch(window)))
    return patches


def extract_chars(string_img: BinaryImage, gray: GrayImage,
                  config: Optional[SegmentConfig] = None) -> List[Tuple[Box, GrayImage]]:
    """
    Characters of one string image as (tight box, 64x64 patch), ordered by x.

    Raises:
        ValueError: if the binary and gray images differ in size
    """
    if (string_img.width, string_img.height) != (gray.width, gray.height):
        raise ValueError("string image and gray image must share dimensions")
    config = config or SegmentConfig()
    boxes = locate_chars(suppress_noise(string_img, gray, config), config)
    reference = line_reference(boxes, config)
    if reference is None:
        return []
    return [(c.box, c.patch) for c in cut_patches(boxes, gray, reference, config)]
