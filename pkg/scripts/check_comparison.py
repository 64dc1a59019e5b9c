#!/usr/bin/env python3
"""
Checks the classifier comparison written by 'idocr compare'.

Run the comparison single-threaded so the latency column is meaningful:

    OMP_NUM_THREADS=1 OPENBLAS_NUM_THREADS=1 MKL_NUM_THREADS=1 \\
        python3 main.py -c config/desk36-full.toml compare
"""

import sys
from pathlib import Path

import typer

# Add src to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.idocr.utils import read_json

console = Console()


def main(
    comparison: Path = typer.Argument(Path("models/desk36-full/comparison.json"),
                                      help="Comparison JSON"),
    min_cifarnet: float = typer.Option(0.90, "--min-cifarnet"),
    min_lenet: float = typer.Option(0.80, "--min-lenet"),
    max_latency_ms: float = typer.Option(50.0, "--max-latency-ms",
                                         help="Mean latency budget per character"),
):
    """Verify accuracy floors, the model ordering and the latency budget."""
    console.print(Panel.fit(
        "[bold blue]Classifier Comparison Check[/bold blue]\n"
        f"[dim]{comparison}[/dim]",
        border_style="blue"
    ))

    if not comparison.exists():
        console.print(f"[red]Error:[/red] {comparison} not found. Run 'idocr compare' first.")
        sys.exit(1)

    rows = {row["model"]: row for row in read_json(comparison)["models"]}
    missing = [m for m in ("lenet-like", "cifarnet-like", "hog-linear") if m not in rows]
    if missing:
        console.print(f"[red]Error:[/red] comparison lacks {missing}")
        sys.exit(1)

    cifarnet = rows["cifarnet-like"]
    checks = [
        (f"cifarnet-like accuracy >= {min_cifarnet}", cifarnet["accuracy"] >= min_cifarnet),
        (f"lenet-like accuracy >= {min_lenet}", rows["lenet-like"]["accuracy"] >= min_lenet),
        ("hog-linear below cifarnet-like", rows["hog-linear"]["accuracy"] < cifarnet["accuracy"]),
        (f"cifarnet-like mean latency < {max_latency_ms} ms", cifarnet["mean_ms"] < max_latency_ms),
    ]

    table = Table(title="Models", show_header=True, header_style="bold magenta")
    table.add_column("Model", style="cyan")
    table.add_column("Accuracy", style="green")
    table.add_column("Mean ms", style="yellow")
    table.add_column("p95 ms", style="yellow")
    for name, row in rows.items():
        table.add_row(name, f"{row['accuracy']:.4f}", f"{row['mean_ms']:.2f}", f"{row['p95_ms']:.2f}")
    console.print(table)

    for name, ok in checks:
        console.print(f"{'[green]✓[/green]' if ok else '[red]✗[/red]'} {name}")

    if not all(ok for _, ok in checks):
        sys.exit(1)


if __name__ == "__main__":
    typer.run(main)
