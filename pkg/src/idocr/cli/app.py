"""
Command-line interface for the ID-document OCR pipeline.

Subcommands run the pipeline end to end: generate corpora, train, bootstrap,
recognize, evaluate and benchmark. Every command is deterministic for a given
configuration and seed, and reports failures as one JSON line on stderr.
"""

from pathlib import Path
from typing import Optional

import typer

from .common import CliState
from .pipeline_cli import bootstrap_cmd, compare, gen, train_cmd
from .recognize_cli import bench, eval_cmd, ocr, segment

app = typer.Typer(
    name="idocr",
    help="Self-bootstrapping OCR for identity-document text fields.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main_options(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None,
        "--config", "-c",
        help="Run configuration TOML (default: built-in defaults)",
    ),
    seed: Optional[int] = typer.Option(
        None,
        "--seed",
        help="Master seed, overrides the configuration",
    ),
    threads: Optional[int] = typer.Option(
        None,
        "--threads", "-t",
        help="Worker threads, 0 for all cores (overrides the configuration)",
    ),
    verbose: bool = typer.Option(
        False,
        "--verbose", "-v",
        help="Enable verbose logging",
    ),
    debug: bool = typer.Option(
        False,
        "--debug",
        help="Enable debug logging and tracebacks",
    ),
):
    """Global options; the configuration is loaded by the first command that needs it."""
    ctx.obj = CliState(config_path=config, seed=seed, threads=threads, verbose=verbose, debug=debug)


app.command("gen")(gen)
app.command("train")(train_cmd)
app.command("bootstrap")(bootstrap_cmd)
app.command("compare")(compare)
app.command("ocr")(ocr)
app.command("eval")(eval_cmd)
app.command("bench")(bench)
app.command("segment")(segment)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
