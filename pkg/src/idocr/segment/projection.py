"""
Projection-profile line and string separation.
"""

from typing import List, Tuple

import numpy as np

from ..imaging import BinaryImage, h_projection, v_projection
from .box import Box

Run = Tuple[int, int]


def runs(mask: np.ndarray) -> List[Run]:
    """Maximal runs of True as half-open [start, end) intervals."""
    if mask.size == 0:
        return []
    padded = np.concatenate([[False], mask.astype(bool), [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return [(int(s), int(e)) for s, e in zip(edges[0::2], edges[1::2])]


def _merge_close(bands: List[Run], min_gap: int) -> List[Run]:
    merged: List[Run] = []
    for start, end in bands:
        if merged and start - merged[-1][1] < min_gap:
            merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return merged


def _attach_short(bands: List[Run], min_line_ratio: float) -> List[Run]:
    """
    Fold bands shorter than min_line_ratio x the tallest band into the nearest
    tall neighbour when it is close (umlaut dots above a lowercase line);
    bands far from any line are dropped.
    """
    if not bands:
        return []
    tallest = max(e - s for s, e in bands)
    limit = min_line_ratio * tallest
    tall = [b for b in bands if b[1] - b[0] >= limit]
    out = [list(b) for b in tall]
    for start, end in bands:
        if end - start >= limit:
            continue
        best, best_gap = None, None
        for i, (ts, te) in enumerate(out):
            gap = max(ts - end, start - te, 0)
            if best_gap is None or gap < best_gap:
                best, best_gap = i, gap
        if best is not None and best_gap is not None and best_gap <= tallest // 2:
            out[best][0] = min(out[best][0], start)
            out[best][1] = max(out[best][1], end)
    return [(s, e) for s, e in out]


def split_lines(field: BinaryImage, min_gap: int = 2, noise_floor: float = 0.02,
                min_line_ratio: float = 0.4) -> List[Box]:
    """
    Line boxes of a field, top to bottom.

    A line is a run of rows whose foreground count exceeds noise_floor x width;
    runs closer than min_gap empty rows are joined. Boxes are tight to the ink
    of their rows.
    """
    profile = h_projection(field)
    active = profile > noise_floor * field.width
    bands = _attach_short(_merge_close(runs(active), min_gap), min_line_ratio)

    boxes: List[Box] = []
    for start, end in bands:
        columns = np.flatnonzero(field.data[start:end].any(axis=0))
        if columns.size == 0:
            continue
        boxes.append(Box.from_corners(int(columns[0]), start, int(columns[-1]) + 1, end))
    return boxes


def split_strings(line: BinaryImage, gap_factor: float = 2.5,
                  min_word_gap_ratio: float = 0.45) -> List[Box]:
    """
    String boxes of one line image, left to right, spanning the full line height.

    Column gaps wider than max(gap_factor x median gap, min_word_gap_ratio x
    line height) separate strings.
    """
    ink = runs(v_projection(line) > 0)
    if not ink:
        return []
    gaps = [ink[i + 1][0] - ink[i][1] for i in range(len(ink) - 1)]
    threshold = min_word_gap_ratio * line.height
    if gaps:
        threshold = max(gap_factor * float(np.median(gaps)), threshold)

    boxes: List[Box] = []
    start, end = ink[0]
    for (next_start, next_end), gap in zip(ink[1:], gaps):
        if gap > threshold:
            boxes.append(Box.from_corners(start, 0, end, line.height))
            start = next_start
        end = next_end
    boxes.append(Box.from_corners(start, 0, end, line.height))
    return boxes
