"""
Font pools listed in fonts.toml.

A pool is a named list of TrueType/OpenType files. Loaded FreeType faces are
cached per (file, size) since the generator asks for the same few sizes
thousands of times.
"""

import hashlib
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Tuple, Union

from PIL import Image, ImageDraw, ImageFont

from ..errors import ConfigError, GlyphUnavailableError
from ..utils.tomlio import load_toml

# Codepoint no pool font maps; its rendering is the .notdef box
_MISSING_CODEPOINT = "\U0010fffd"


@dataclass(frozen=True)
class FontPool:
    """Named set of font files."""

    name: str
    files: Tuple[Path, ...]

    def __post_init__(self) -> None:
        if not self.files:
            raise ConfigError([f"font pool '{self.name}' is empty"])

    def file_hashes(self) -> Dict[str, str]:
        return {path.name: _file_sha256(str(path)) for path in self.files}

    def check_glyphs(self, symbols: str) -> None:
        """Raise GlyphUnavailableError for the first symbol some pool font cannot draw."""
        for path in self.files:
            for symbol in symbols:
                if not has_glyph(str(path), symbol):
                    raise GlyphUnavailableError(path.name, symbol)


def load_font_pools(fonts_file: Union[str, Path]) -> Dict[str, FontPool]:
    """
    Parse fonts.toml into pools; file paths are relative to the TOML file.

    Raises:
        ConfigError: listing every missing file and empty pool
    """
    fonts_file = Path(fonts_file)
    data = load_toml(fonts_file)
    problems: List[str] = []
    pools: Dict[str, FontPool] = {}

    for name, entry in sorted(data.get("pools", {}).items()):
        files = tuple(fonts_file.parent / f for f in entry.get("files", []))
        missing = [str(f) for f in files if not f.is_file()]
        problems.extend(f"font pool '{name}': missing file {m}" for m in missing)
        if not files:
            problems.append(f"font pool '{name}' is empty")
        if files and not missing:
            pools[name] = FontPool(name=name, files=files)

    if problems:
        raise ConfigError(problems)
    return pools


def assert_disjoint(a: FontPool, b: FontPool) -> None:
    """The source and pseudo-real pools must not share a font, compared by content hash."""
    shared = set(a.file_hashes().values()) & set(b.file_hashes().values())
    if shared:
        raise ConfigError([f"font pools '{a.name}' and '{b.name}' share {len(shared)} font file(s)"])


@lru_cache(maxsize=None)
def _file_sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


_thread_fonts = threading.local()


def load_font(path: str, size: int) -> ImageFont.FreeTypeFont:
    """FreeType faces are not shared between threads; each worker keeps its own cache."""
    cache = getattr(_thread_fonts, "cache", None)
    if cache is None:
        cache = _thread_fonts.cache = {}
    key = (path, size)
    if key not in cache:
        cache[key] = ImageFont.truetype(path, size=size)
    return cache[key]


def _mask_bytes(font: ImageFont.FreeTypeFont, symbol: str) -> Tuple[Tuple[int, int], bytes]:
    left, top, right, bottom = font.getbbox(symbol)
    if right <= left or bottom <= top:
        return (0, 0), b""
    img = Image.new("L", (right - left, bottom - top), 0)
    ImageDraw.Draw(img).text((-left, -top), symbol, font=font, fill=255)
    return img.size, img.tobytes()


@lru_cache(maxsize=None)
def has_glyph(path: str, symbol: str) -> bool:
    """True when the font draws something other than its .notdef box for symbol."""
    font = load_font(path, 32)
    drawn = _mask_bytes(font, symbol)
    if drawn[0][0] == 0 or drawn[0][1] == 0:
        return False
    return drawn != _mask_bytes(font, _MISSING_CODEPOINT)
