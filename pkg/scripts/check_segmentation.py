#!/usr/bin/env python3
"""
Segmentation round-trip check on freshly generated pseudo-real fields.

Renders single-line fields at default parameters, segments them and counts
how often the extracted character count equals the ground-truth length.
Contour tracing is compared against a flood-fill labelling on random masks.
"""

import sys
from pathlib import Path

import numpy as np
import typer
from scipy import ndimage

# Add src to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn
from rich.table import Table

from src.idocr.imaging import BinaryImage
from src.idocr.segment import SegmentConfig, segment_field, trace_contours
from src.idocr.synthgen import GenParams, SyntheticGenerator, load_font_pools, rng_for, sample_field

console = Console()

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def field_round_trip(fields: int, seed: int, fonts: Path, class_set: str):
    pools = load_font_pools(fonts)
    generator = SyntheticGenerator(pools)
    params = GenParams.pseudo_real()
    config = SegmentConfig()
    hits = 0
    misses = []

    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                  BarColumn(), TaskProgressColumn(), console=console) as progress:
        task = progress.add_task("Segmenting fields...", total=fields)
        index = 0
        done = 0
        while done < fields:
            rng = rng_for(seed, "segmentation-check", index)
            kind, text, _ = sample_field(class_set, rng)
            index += 1
            if "\n" in text:
                continue
            sample = generator.render_text_field(text, params, int(rng.integers(2**63)))
            expected = sum(1 for c in text if not c.isspace())
            found = segment_field(sample.image, config).char_count
            if found == expected:
                hits += 1
            else:
                misses.append((kind, text, expected, found))
            done += 1
            progress.update(task, advance=1)
    return hits, misses


def contour_agreement(masks: int, seed: int) -> int:
    """Number of random masks whose component count differs from flood fill."""
    rng = rng_for(seed, "contour-check")
    disagreements = 0
    for _ in range(masks):
        h, w = (int(v) for v in rng.integers(4, 48, size=2))
        density = float(rng.uniform(0.1, 0.6))
        mask = rng.random((h, w)) < density
        _, expected = ndimage.label(mask, structure=EIGHT_CONNECTED)
        if len(trace_contours(BinaryImage(mask))) != expected:
            disagreements += 1
    return disagreements


def main(
    fields: int = typer.Option(500, "--fields", help="Fields to render and segment"),
    masks: int = typer.Option(1000, "--masks", help="Random masks for the contour check"),
    seed: int = typer.Option(0, "--seed", help="Master seed"),
    fonts: Path = typer.Option(Path("fonts/fonts.toml"), "--fonts", help="Font pools file"),
    class_set: str = typer.Option("all", "--class-set", help="all or desk36"),
    min_rate: float = typer.Option(0.95, "--min-rate", help="Required share of exact counts"),
):
    """Run the segmentation round-trip and contour checks."""
    console.print(Panel.fit(
        "[bold blue]Segmentation Check[/bold blue]\n"
        f"[dim]{fields} pseudo-real fields, {masks} random masks, seed {seed}[/dim]",
        border_style="blue"
    ))

    try:
        hits, misses = field_round_trip(fields, seed, fonts, class_set)
        disagreements = contour_agreement(masks, seed)
    except Exception as e:
        console.print(f"[red]Error:[/red] {e}")
        sys.exit(1)

    rate = hits / fields if fields else 0.0
    table = Table(title="Results", show_header=True, header_style="bold magenta")
    table.add_column("Check", style="cyan")
    table.add_column("Value", style="green")
    table.add_column("Status")
    table.add_row("Exact character count", f"{hits}/{fields} ({rate:.1%})",
                  "[green]✓[/green]" if rate >= min_rate else "[red]✗[/red]")
    table.add_row("Contour vs flood fill", f"{masks - disagreements}/{masks}",
                  "[green]✓[/green]" if disagreements == 0 else "[red]✗[/red]")
    console.print(table)

    if misses:
        console.print("\n[yellow]First mismatches:[/yellow]")
        for kind, text, expected, found in misses[:10]:
            console.print(f"  {kind}: {text!r} expected {expected}, found {found}")

    if rate < min_rate or disagreements:
        sys.exit(1)


if __name__ == "__main__":
    typer.run(main)
