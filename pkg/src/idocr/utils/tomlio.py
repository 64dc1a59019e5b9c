"""
TOML loading with the stdlib parser where available.
"""

import sys
from pathlib import Path
from typing import Any, Dict, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def load_toml(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "rb") as f:
        return tomllib.load(f)


def loads_toml(text: str) -> Dict[str, Any]:
    return tomllib.loads(text)
