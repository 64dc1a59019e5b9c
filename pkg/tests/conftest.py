"""
Shared fixtures: the bundled font pools and a generator built from them.
"""

import pytest
from pathlib import Path

# Add src to path for imports
import sys
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.synthgen import GenParams, SyntheticGenerator, load_font_pools

REPO_ROOT = Path(__file__).parent.parent
FONTS_FILE = REPO_ROOT / "fonts" / "fonts.toml"
RULES_FILE = REPO_ROOT / "config" / "rules.toml"


@pytest.fixture(scope="session")
def font_pools():
    """Font pools shipped with the repository."""
    return load_font_pools(FONTS_FILE)


@pytest.fixture(scope="session")
def generator(font_pools):
    """Synthetic generator over the bundled pools."""
    return SyntheticGenerator(font_pools)


@pytest.fixture(scope="session")
def source_params():
    return GenParams.source()


@pytest.fixture(scope="session")
def clean_params():
    """Source style without noise, blur or geometric jitter."""
    return GenParams(
        blotch_count_range=(0, 0),
        rotation_range=(0.0, 0.0),
        translation_range=(0.0, 0.0),
        field_rotation_range=(0.0, 0.0),
        background_range=(230, 240),
        ink_range=(0, 20),
    )


@pytest.fixture(scope="session")
def pseudo_real_params():
    return GenParams.pseudo_real()
