"""
Run configuration.

One RunConfig describes a whole experiment. Values come, in increasing
precedence, from the built-in defaults, a TOML file, IDOCR_* environment
variables (a .env file is honoured; nested keys are joined with "__", e.g.
IDOCR_TRAIN__EPOCHS=3) and explicit command-line overrides. Validation
reports every problem at once.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .bootstrap.dataset_builder import StageConfig
from .classify.hog import LinearConfig
from .classify.spec import PRESETS
from .classify.trainer import TrainConfig
from .errors import ConfigError
from .segment.config import SegmentConfig
from .synthgen.charset import CLASS_SETS
from .synthgen.params import GenParams
from .utils import load_toml, write_json

PathLike = Union[str, Path]

ENV_PREFIX = "IDOCR_"
RESOLVED_CONFIG_FILE = "config.resolved.json"


class PathsConfig(BaseModel):
    """Input files and output roots; relative paths are taken from the working directory."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fonts: Path = Path("fonts/fonts.toml")
    rules: Path = Path("config/rules.toml")
    corpora: Path = Path("data")
    models: Path = Path("models")
    run_dir: Path = Path("run")
    log_file: Optional[Path] = None


class CorpusCounts(BaseModel):
    """Sizes of the generated corpora."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    chars: Dict[str, int] = Field(default_factory=lambda: {"train": 2000, "test": 200})
    fields_mine: int = 500
    fields_holdout: int = 200
    fields_eval: int = 320

    @field_validator("chars")
    @classmethod
    def _positive_splits(cls, value: Dict[str, int]) -> Dict[str, int]:
        if not value or any(n < 1 for n in value.values()):
            raise ValueError("every character split needs a positive per-class count")
        return value

    @field_validator("fields_mine", "fields_holdout", "fields_eval")
    @classmethod
    def _positive_fields(cls, value: int) -> int:
        if value < 1:
            raise ValueError("field corpus sizes must be positive")
        return value


class RunConfig(BaseModel):
    """Complete, validated experiment configuration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = 0
    threads: int = 0
    class_set: str = "all"
    model: str = "cifarnet-like"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    paths: PathsConfig = Field(default_factory=PathsConfig)
    gen: GenParams = Field(default_factory=GenParams.source)
    gen_pseudo_real: GenParams = Field(default_factory=GenParams.pseudo_real)
    corpus: CorpusCounts = Field(default_factory=CorpusCounts)
    segment: SegmentConfig = Field(default_factory=SegmentConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    baseline: LinearConfig = Field(default_factory=LinearConfig)
    bootstrap: StageConfig = Field(default_factory=StageConfig)

    @field_validator("class_set")
    @classmethod
    def _known_class_set(cls, value: str) -> str:
        if value not in CLASS_SETS:
            raise ValueError(f"unknown class set '{value}', expected one of {list(CLASS_SETS)}")
        return value

    @field_validator("model")
    @classmethod
    def _known_preset(cls, value: str) -> str:
        if value not in PRESETS:
            raise ValueError(f"unknown model preset '{value}', expected one of {sorted(PRESETS)}")
        return value

    @field_validator("threads")
    @classmethod
    def _threads(cls, value: int) -> int:
        if value < 0:
            raise ValueError("threads must be 0 (all cores) or positive")
        return value

    def corpus_dir(self, name: str) -> Path:
        return self.paths.corpora / name

    def write_resolved(self, directory: PathLike) -> Path:
        """Store the effective configuration beside a command's output."""
        path = Path(directory) / RESOLVED_CONFIG_FILE
        write_json(self.model_dump(mode="json"), path)
        return path


def _parse_env_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except ValueError:
        return raw


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Nested override dict from IDOCR_* variables."""
    environ = os.environ if environ is None else environ
    overrides: Dict[str, Any] = {}
    for key, raw in sorted(environ.items()):
        if not key.startswith(ENV_PREFIX) or key == ENV_PREFIX:
            continue
        parts = [p.lower() for p in key[len(ENV_PREFIX):].split("__") if p]
        node = overrides
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                break
        else:
            node[parts[-1]] = _parse_env_value(raw)
    return overrides


def deep_merge(base: Dict[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _validation_problems(error: ValidationError) -> List[str]:
    problems = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        problems.append(f"{location}: {item['msg']}")
    return problems


def _path_problems(paths: PathsConfig) -> List[str]:
    problems = []
    if not paths.fonts.is_file():
        problems.append(f"paths.fonts: file not found: {paths.fonts}")
    if not paths.rules.is_file():
        problems.append(f"paths.rules: file not found: {paths.rules}")
    return problems


def load_config(
    path: Optional[PathLike] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
    check_paths: bool = True,
) -> RunConfig:
    """
    Resolve a RunConfig from file, environment and explicit overrides.

    Raises:
        ConfigError: every validation and path problem found
    """
    if environ is None:
        load_dotenv()
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = load_toml(path)
        except OSError as e:
            raise ConfigError([f"{path}: {e}"], "cannot read configuration") from e
        except ValueError as e:
            raise ConfigError([f"{path}: invalid TOML: {e}"], "cannot read configuration") from e
    data = deep_merge(data, env_overrides(environ))
    data = deep_merge(data, {k: v for k, v in (overrides or {}).items() if v is not None})

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        problems = _validation_problems(e)
        if check_paths:
            try:
                problems += _path_problems(PathsConfig.model_validate(data.get("paths", {})))
            except ValidationError:
                pass
        raise ConfigError(problems, "invalid configuration") from e

    if check_paths:
        problems = _path_problems(config.paths)
        if problems:
            raise ConfigError(problems, "invalid configuration")
    return config
