#!/usr/bin/env python3
"""
Checks the outcome of a bootstrap run.

Reads summary.json from the run directory and, when present, the field
evaluation reports written by run-desk-pipeline.sh:

- frozen-test accuracy increases strictly from stage to stage
- the final stage gains at least --min-gain over the synthetic-only model
- mined character counts never decrease
- the final model's exact-field rate reaches --min-field-rate and beats
  the synthetic-only model
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


def status(ok: bool) -> str:
    return "[green]✓[/green]" if ok else "[red]✗[/red]"


def main(
    run_dir: Path = typer.Argument(..., help="Bootstrap run directory"),
    min_gain: float = typer.Option(0.15, "--min-gain", help="Required frozen-test gain"),
    min_field_rate: float = typer.Option(0.80, "--min-field-rate",
                                         help="Required exact-field rate of the final model"),
):
    """Verify the bootstrap learning curve and the end-to-end field accuracy."""
    console.print(Panel.fit(
        "[bold blue]Bootstrap Check[/bold blue]\n"
        f"[dim]{run_dir}[/dim]",
        border_style="blue"
    ))

    summary_path = run_dir / "summary.json"
    if not summary_path.exists():
        console.print(f"[red]Error:[/red] {summary_path} not found. Run 'idocr bootstrap' first.")
        sys.exit(1)

    summary = read_json(summary_path)
    stages = summary["stages"]
    if not stages:
        console.print("[red]Error:[/red] the run has no completed stage")
        sys.exit(1)

    table = Table(title="Stages", show_header=True, header_style="bold magenta")
    table.add_column("Stage", style="cyan")
    table.add_column("Mined", style="green")
    table.add_column("Synthetic share", style="yellow")
    table.add_column("Frozen test", style="green")
    table.add_row("initial", "-", "1", f"{summary['initial_accuracy']:.4f}")
    for s in stages:
        table.add_row(str(s["stage"]), str(s["mined_count"]), f"{s['synthetic_share']:g}",
                      f"{s['frozen_test_accuracy']:.4f}")
    console.print(table)

    curve = [summary["initial_accuracy"]] + [s["frozen_test_accuracy"] for s in stages]
    mined = [s["mined_count"] for s in stages]
    checks = [
        ("Frozen-test accuracy strictly increasing", all(b > a for a, b in zip(curve, curve[1:]))),
        (f"Final gain >= {min_gain:.0%}", curve[-1] >= curve[0] + min_gain),
        ("Mined counts non-decreasing", all(b >= a for a, b in zip(mined, mined[1:]))),
    ]

    synthetic_eval = run_dir / "eval-synthetic.json"
    bootstrap_eval = run_dir / "eval-bootstrap.json"
    if synthetic_eval.exists() and bootstrap_eval.exists():
        before = read_json(synthetic_eval)["correct_rate"]
        after = read_json(bootstrap_eval)["correct_rate"]
        console.print(f"\nExact-field rate: synthetic-only {before:.4f}, bootstrapped {after:.4f}")
        checks.append((f"Field rate >= {min_field_rate:.0%}", after >= min_field_rate))
        checks.append(("Field rate above synthetic-only", after > before))
    else:
        console.print("\n[yellow]⚠[/yellow] No field evaluation reports; skipping field accuracy")

    results = Table(title="Checks", show_header=True, header_style="bold magenta")
    results.add_column("Check", style="cyan")
    results.add_column("Status")
    for name, ok in checks:
        results.add_row(name, status(ok))
    console.print(results)

    if not all(ok for _, ok in checks):
        sys.exit(1)


if __name__ == "__main__":
    typer.run(main)
