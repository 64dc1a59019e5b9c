"""
Synthetic character and text-field renderer.

A character sample is built in four steps: a random gray background with
noise blotches, the requested glyph rendered centrally between two random
neighbours, gray-value compositing, and a joint rotation/translation of the
whole patch. Text fields reuse the same noise and affine model, applied once
to the whole field, and return the ink box of every glyph.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from PIL import Image, ImageDraw, ImageFilter, ImageFont

from ..errors import ConfigError, FieldTextError, GlyphUnavailableError
from ..imaging import PATCH_SIDE, AffineTransform, GrayImage, warp_affine
from ..segment.box import Box
from .charset import CHARSET, Charset
from .fonts import FontPool, has_glyph, load_font
from .params import GenParams
from .rng import make_rng, randint, uniform

PROVENANCES = ("synthetic", "mined", "augmented")


@dataclass(frozen=True)
class CharSample:
    """Labeled 64x64 character patch; field_seed names the field a mined patch came from."""

    image: GrayImage
    label: int
    provenance: str = "synthetic"
    seed: int = 0
    neighbors: Tuple[int, int] = (-1, -1)
    field_seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.image.width != PATCH_SIDE or self.image.height != PATCH_SIDE:
            raise ValueError(f"character patches are {PATCH_SIDE}x{PATCH_SIDE}, got "
                             f"{self.image.width}x{self.image.height}")
        if not 0 <= self.label < len(CHARSET):
            raise ValueError(f"label {self.label} outside the charset")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance '{self.provenance}'")


@dataclass(frozen=True)
class TextFieldSample:
    """Rendered field with the ink box of every non-space character."""

    image: GrayImage
    text: str
    boxes: List[Box]
    style: GenParams
    seed: int
    font: str = ""
    font_size: int = 0
    lines: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class _Layout:
    """Per-render choices shared by char and field rendering."""

    background: int
    ink: int
    font_path: str
    font: ImageFont.FreeTypeFont
    font_size: int


class SyntheticGenerator:
    """
    Renders character patches and text fields from named font pools.

    All outputs are pure functions of (inputs, params, seed).
    """

    def __init__(self, pools: Dict[str, FontPool], charset: Charset = CHARSET):
        self.pools = pools
        self.charset = charset

    def pool(self, name: str) -> FontPool:
        if name not in self.pools:
            raise ConfigError([f"unknown font pool '{name}' (known: {sorted(self.pools)})"])
        return self.pools[name]

    # ------------------------------------------------------------------ chars

    def render_char_sample(self, class_id: int, params: GenParams, seed: int) -> CharSample:
        """
        Render one 64x64 training patch of class_id.

        Raises:
            GlyphUnavailableError: if the drawn font lacks one of the three glyphs
        """
        if not 0 <= class_id < len(self.charset):
            raise ValueError(f"class id {class_id} outside the charset")
        rng = make_rng(seed)
        side = PATCH_SIDE

        layout = self._choose_layout(params, rng)
        canvas = self._background(side, side, layout.background, params, rng)

        left = int(rng.integers(len(self.charset)))
        right = int(rng.integers(len(self.charset)))
        symbols = [self.charset.symbol(c) for c in (left, class_id, right)]
        for symbol in symbols:
            self._require_glyph(layout.font_path, symbol)

        mask = Image.new("L", (side, side), 0)
        draw = ImageDraw.Draw(mask)
        font = layout.font
        center = symbols[1]
        baseline = int(round(side / 2 + _cap_height(font) / 2))
        cl, _, cr, _ = font.getbbox(center, anchor="ls")
        x_center = int(round(side / 2 - (cl + cr) / 2))
        gap_left = randint(rng, *params.neighbor_gap_range)
        gap_right = randint(rng, *params.neighbor_gap_range)
        x_left = x_center - int(round(font.getlength(symbols[0]))) - gap_left
        x_right = x_center + int(round(font.getlength(center))) + gap_right

        draw.text((x_left, baseline), symbols[0], font=font, anchor="ls", fill=255)
        draw.text((x_center, baseline), center, font=font, anchor="ls", fill=255)
        draw.text((x_right, baseline), symbols[2], font=font, anchor="ls", fill=255)

        image = _composite(canvas, mask, layout.ink)
        image = _blur(image, params, rng)

        angle = uniform(rng, *params.rotation_range)
        dx = uniform(rng, *params.translation_range)
        dy = uniform(rng, *params.translation_range)
        transform = AffineTransform.similarity(angle_deg=angle, dx=dx, dy=dy,
                                               center=(side / 2, side / 2))
        warped = warp_affine(GrayImage(image), transform, fill=layout.background)

        return CharSample(image=warped, label=class_id, provenance="synthetic",
                          seed=seed, neighbors=(left, right))

    # ----------------------------------------------------------------- fields

    def render_text_field(self, text: str, params: GenParams, seed: int) -> TextFieldSample:
        """
        Render a single- or multi-line field ('\\n' separates lines).

        Raises:
            FieldTextError: empty text or a symbol outside the charset
            GlyphUnavailableError: the drawn font lacks a glyph
        """
        if not text.replace("\n", "").strip():
            raise FieldTextError("empty field text")
        unknown = sorted({ch for ch in text if ch not in " \n" and ch not in self.charset})
        if unknown:
            raise FieldTextError(f"field text contains symbols outside the charset: {unknown}")

        rng = make_rng(seed)
        layout = self._choose_layout(params, rng)
        font = layout.font
        for symbol in sorted(set(text) - {" ", "\n"}):
            self._require_glyph(layout.font_path, symbol)

        lines = [line.strip(" ") for line in text.split("\n")]
        lines = [line for line in lines if line]
        ascent, descent = font.getmetrics()
        line_gap = randint(rng, *params.line_gap_range)
        pitch = ascent + descent + line_gap
        margin = params.field_margin

        # glyph origins and ink boxes, before the field-level transform
        placements: List[Tuple[int, int, str]] = []
        ink_boxes: List[Tuple[int, int, int, int]] = []
        line_widths: List[int] = []
        for i, line in enumerate(lines):
            baseline = margin + ascent + i * pitch
            cursor = margin
            for symbol in line:
                if symbol == " ":
                    cursor += randint(rng, *params.word_gap_range)
                    continue
                gl, gt, gr, gb = font.getbbox(symbol, anchor="ls")
                placements.append((cursor, baseline, symbol))
                ink_boxes.append((cursor + gl, baseline + gt, cursor + gr, baseline + gb))
                cursor += int(round(font.getlength(symbol))) + randint(rng, *params.tracking_range)
            line_widths.append(cursor)

        width = max(max(line_widths) + margin, max(b[2] for b in ink_boxes) + margin)
        height = margin * 2 + len(lines) * pitch - line_gap

        canvas = self._background(width, height, layout.background, params, rng)
        mask = Image.new("L", (width, height), 0)
        draw = ImageDraw.Draw(mask)
        for x, baseline, symbol in placements:
            draw.text((x, baseline), symbol, font=font, anchor="ls", fill=255)

        image = _composite(canvas, mask, layout.ink)
        image = _blur(image, params, rng)

        angle = uniform(rng, *params.field_rotation_range)
        dx = uniform(rng, *params.translation_range)
        dy = uniform(rng, *params.translation_range)
        transform = AffineTransform.similarity(angle_deg=angle, dx=dx, dy=dy,
                                               center=(width / 2, height / 2))
        warped = warp_affine(GrayImage(image), transform, fill=layout.background)

        forward = transform.inverse()
        boxes = [_transform_box(forward, b, width, height) for b in ink_boxes]

        return TextFieldSample(
            image=warped,
            text=text,
            boxes=boxes,
            style=params,
            seed=seed,
            font=layout.font_path.rsplit("/", 1)[-1],
            font_size=layout.font_size,
            lines=lines,
        )

    # ---------------------------------------------------------------- helpers

    def _choose_layout(self, params: GenParams, rng: np.random.Generator) -> _Layout:
        pool = self.pool(params.font_pool)
        background = randint(rng, *params.background_range)
        ink = randint(rng, *params.ink_range)
        font_path = str(pool.files[int(rng.integers(len(pool.files)))])
        font_size = randint(rng, *params.font_size_range)
        return _Layout(background=background, ink=ink, font_path=font_path,
                       font=load_font(font_path, font_size), font_size=font_size)

    def _background(self, width: int, height: int, background: int,
                    params: GenParams, rng: np.random.Generator) -> Image.Image:
        canvas = Image.new("L", (width, height), background)
        draw = ImageDraw.Draw(canvas)
        for _ in range(randint(rng, *params.blotch_count_range)):
            cx = uniform(rng, 0, width)
            cy = uniform(rng, 0, height)
            rx = randint(rng, *params.blotch_radius_range)
            ry = randint(rng, *params.blotch_radius_range)
            delta = randint(rng, -params.blotch_delta, params.blotch_delta)
            value = int(np.clip(background + delta, 0, 255))
            draw.ellipse([cx - rx, cy - ry, cx + rx, cy + ry], fill=value)
        return canvas

    def _require_glyph(self, font_path: str, symbol: str) -> None:
        if not has_glyph(font_path, symbol):
            raise GlyphUnavailableError(font_path.rsplit("/", 1)[-1], symbol)


def _cap_height(font: ImageFont.FreeTypeFont) -> int:
    _, top, _, _ = font.getbbox("H", anchor="ls")
    return -top


def _composite(canvas: Image.Image, mask: Image.Image, ink: int) -> np.ndarray:
    background = np.asarray(canvas, dtype=np.float64)
    alpha = np.asarray(mask, dtype=np.float64) / 255.0
    mixed = background * (1.0 - alpha) + ink * alpha
    return np.clip(np.floor(mixed + 0.5), 0, 255).astype(np.uint8)


def _blur(image: np.ndarray, params: GenParams, rng: np.random.Generator) -> np.ndarray:
    sigma = uniform(rng, *params.blur_range)
    if sigma <= 0.05:
        return image
    blurred = Image.fromarray(image).filter(ImageFilter.GaussianBlur(radius=sigma))
    return np.asarray(blurred, dtype=np.uint8).copy()


def _transform_box(forward: AffineTransform, box: Tuple[int, int, int, int],
                   width: int, height: int) -> Box:
    """Map an ink box through the forward transform and clip it to the image."""
    x0, y0, x1, y1 = box
    corners = [forward.apply(x, y) for x, y in ((x0, y0), (x1, y0), (x0, y1), (x1, y1))]
    xs = [c[0] for c in corners]
    ys = [c[1] for c in corners]
    bx0 = int(np.clip(math.floor(min(xs)), 0, width - 1))
    by0 = int(np.clip(math.floor(min(ys)), 0, height - 1))
    bx1 = int(np.clip(math.ceil(max(xs)), bx0 + 1, width))
    by1 = int(np.clip(math.ceil(max(ys)), by0 + 1, height))
    return Box.from_corners(bx0, by0, bx1, by1)
