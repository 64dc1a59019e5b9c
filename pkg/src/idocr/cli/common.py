"""
Shared CLI plumbing: global options, configuration loading, output and error reporting.

Human-facing output (rich tables, progress bars, logs) goes to stderr; JSON
results go to stdout or files.
"""

import functools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TypeVar

import typer
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from ..classify.model import Model, load_model
from ..config import RunConfig, load_config
from ..errors import ConfigError
from ..synthgen import SyntheticGenerator, assert_disjoint, load_font_pools
from ..synthgen.charset import CHARSET
from ..utils import dumps, resolve_threads, setup_logger
from ..utils.logger import ROOT_LOGGER

CHARS_SOURCE = "chars-source"
CHARS_PSEUDO_REAL = "chars-pseudo-real"
FIELDS_MINE = "fields-mine"
FIELDS_HOLDOUT = "fields-holdout"
FIELDS_EVAL = "fields-eval"

# Rich console for pretty output, kept off stdout
console = Console(stderr=True)

F = TypeVar("F", bound=Callable[..., Any])


@dataclass
class CliState:
    """Global options shared by every subcommand."""

    config_path: Optional[Path] = None
    seed: Optional[int] = None
    threads: Optional[int] = None
    verbose: bool = False
    debug: bool = False
    _config: Optional[RunConfig] = None
    logger: Optional[logging.Logger] = None

    def config(self) -> RunConfig:
        if self._config is None:
            self._config = load_config(self.config_path, {"seed": self.seed, "threads": self.threads})
            self.logger = setup_logger(
                name=ROOT_LOGGER,
                log_level=self._config.log_level,
                log_file=str(self._config.paths.log_file) if self._config.paths.log_file else None,
                verbose=self.verbose,
                debug=self.debug,
            )
        return self._config

    @property
    def threads_resolved(self) -> int:
        return resolve_threads(self.config().threads)

    def class_ids(self) -> List[int]:
        return CHARSET.class_ids(self.config().class_set)

    def generator(self) -> SyntheticGenerator:
        pools = load_font_pools(self.config().paths.fonts)
        missing = [name for name in ("source", "pseudo_real") if name not in pools]
        if missing:
            raise ConfigError([f"fonts file defines no pool '{name}'" for name in missing])
        assert_disjoint(pools["source"], pools["pseudo_real"])
        return SyntheticGenerator(pools)

    def model_path(self, name: str) -> Path:
        return self.config().paths.models / f"{name}.ocrm"

    def load_model(self, path: Optional[Path]) -> Model:
        return load_model(path if path is not None else self.model_path(self.config().model))


def state_of(ctx: typer.Context) -> CliState:
    if not isinstance(ctx.obj, CliState):
        ctx.obj = CliState()
    return ctx.obj


def emit_json(data: Any) -> None:
    """Single JSON document on stdout."""
    typer.echo(dumps(data))


def error_payload(error: BaseException) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"error": type(error).__name__, "message": str(error)}
    if isinstance(error, ConfigError):
        payload["problems"] = list(error.problems)
    return payload


def handle_errors(fn: F) -> F:
    """Turn any failure into one JSON line on stderr and exit code 1."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        ctx = kwargs.get("ctx")
        debug = isinstance(ctx, typer.Context) and isinstance(ctx.obj, CliState) and \
            (ctx.obj.debug or ctx.obj.verbose)
        try:
            return fn(*args, **kwargs)
        except typer.Exit:
            raise
        except KeyboardInterrupt:
            typer.echo(dumps({"error": "KeyboardInterrupt", "message": "cancelled by user"}), err=True)
            raise typer.Exit(1)
        except Exception as e:
            typer.echo(dumps(error_payload(e)), err=True)
            if debug:
                console.print_exception()
            raise typer.Exit(1)

    return wrapper  # type: ignore[return-value]


def progress_bar() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        transient=True,
    )


def key_value_table(title: str, rows: Dict[str, Any]) -> Table:
    """Two-column statistics table."""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    for key, value in rows.items():
        table.add_row(key, f"{value:.4f}" if isinstance(value, float) else str(value))
    return table
