#!/usr/bin/env python3
"""
Byte-compares the artifacts of two pipeline runs made with the same seed.

Corpus manifests, field records, dataset files, model files and reports
must be identical; resolved configs are skipped since they record the
thread count.
"""

import filecmp
import sys
from pathlib import Path

import typer

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()

COMPARED = ("manifest.jsonl", "fields.jsonl", "corpus.json", "dataset.jsonl", "patches.npy",
            "*.ocrm", "*.train.json", "report.json", "summary.json")


def artifacts(root: Path):
    found = set()
    for pattern in COMPARED:
        found.update(p.relative_to(root) for p in root.rglob(pattern))
    return found


def main(
    first: Path = typer.Argument(..., help="Output root of the first run"),
    second: Path = typer.Argument(..., help="Output root of the second run"),
):
    """Compare every deterministic artifact below two output roots."""
    console.print(Panel.fit(
        "[bold blue]Determinism Check[/bold blue]\n"
        f"[dim]{first} vs {second}[/dim]",
        border_style="blue"
    ))

    left, right = artifacts(first), artifacts(second)
    only = sorted(left ^ right)
    differing = sorted(p for p in left & right if not filecmp.cmp(first / p, second / p, shallow=False))

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Artifacts compared", style="cyan")
    table.add_column("Missing on one side", style="yellow")
    table.add_column("Differing", style="red")
    table.add_row(str(len(left & right)), str(len(only)), str(len(differing)))
    console.print(table)

    for path in only[:20]:
        console.print(f"[yellow]only in one run:[/yellow] {path}")
    for path in differing[:20]:
        console.print(f"[red]differs:[/red] {path}")

    if not left:
        console.print("[red]Error:[/red] no artifacts found")
        sys.exit(1)
    if only or differing:
        sys.exit(1)
    console.print("[green]✓[/green] Runs are byte-identical")


if __name__ == "__main__":
    typer.run(main)
