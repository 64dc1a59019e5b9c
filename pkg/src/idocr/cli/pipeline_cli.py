"""
Artifact-producing commands: corpus generation, training, bootstrapping and
the classifier comparison.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from rich.panel import Panel
from rich.table import Table

from ..bootstrap import BootstrapManager
from ..classify import (
    CharDataset,
    EpochRecord,
    Model,
    evaluate,
    preset,
    save_model,
    train,
    train_linear_baseline,
)
from ..metrics import benchmark_latency
from ..synthgen import CorpusSpec, derive_seed, generate_corpus, generate_field_corpus, load_field_corpus
from ..imaging import GrayImage
from ..utils import write_json
from .common import (
    CHARS_PSEUDO_REAL,
    CHARS_SOURCE,
    FIELDS_EVAL,
    FIELDS_HOLDOUT,
    FIELDS_MINE,
    CliState,
    console,
    emit_json,
    handle_errors,
    key_value_table,
    progress_bar,
    state_of,
)

HOG_LINEAR = "hog-linear"
COMPARE_MODELS = ("lenet-like", "cifarnet-like", HOG_LINEAR)


@handle_errors
def gen(
    ctx: typer.Context,
    what: str = typer.Option(
        "all",
        "--what", "-w",
        help="Which corpora to generate: all, chars or fields",
    ),
):
    """
    Generate the character and field corpora.

    Characters are rendered in the source style (plus a pseudo-real test
    split); the mining, holdout and evaluation field corpora use the
    pseudo-real style and font pool.
    """
    state = state_of(ctx)
    config = state.config()
    if what not in ("all", "chars", "fields"):
        raise typer.BadParameter(f"--what must be all, chars or fields, got '{what}'")
    generator = state.generator()
    threads = state.threads_resolved
    logger = state.logger
    written: Dict[str, Any] = {}

    console.print(Panel.fit(
        "[bold blue]Corpus generation[/bold blue]\n"
        f"[dim]class set {config.class_set}, seed {config.seed}, {threads} threads[/dim]",
        border_style="blue",
    ))

    if what in ("all", "chars"):
        spec = CorpusSpec(class_set=config.class_set, splits=config.corpus.chars)
        root = config.corpus_dir(CHARS_SOURCE)
        entries = generate_corpus(spec, config.gen, config.seed, root, generator, threads, logger)
        config.write_resolved(root)
        written[CHARS_SOURCE] = len(entries)

        test_count = config.corpus.chars.get("test", min(config.corpus.chars.values()))
        pseudo_spec = CorpusSpec(class_set=config.class_set, splits={"test": test_count})
        root = config.corpus_dir(CHARS_PSEUDO_REAL)
        entries = generate_corpus(pseudo_spec, config.gen_pseudo_real,
                                  derive_seed(config.seed, CHARS_PSEUDO_REAL), root, generator,
                                  threads, logger)
        config.write_resolved(root)
        written[CHARS_PSEUDO_REAL] = len(entries)

    if what in ("all", "fields"):
        for name, count in (
            (FIELDS_MINE, config.corpus.fields_mine),
            (FIELDS_HOLDOUT, config.corpus.fields_holdout),
            (FIELDS_EVAL, config.corpus.fields_eval),
        ):
            root = config.corpus_dir(name)
            records = generate_field_corpus(name, count, config.gen_pseudo_real, config.seed, root,
                                            generator, config.class_set, threads, logger)
            config.write_resolved(root)
            written[name] = len(records)

    console.print(key_value_table("Generated Corpora", written))
    emit_json({"corpora": {k: str(config.corpus_dir(k)) for k in written}, "samples": written})


def _char_splits(state: CliState) -> tuple:
    config = state.config()
    root = config.corpus_dir(CHARS_SOURCE)
    class_ids = state.class_ids()
    threads = state.threads_resolved
    train_set = CharDataset.from_manifest(root, "train", class_ids, threads)
    test_set = CharDataset.from_manifest(root, "test", class_ids, threads)
    return train_set, test_set


def _train_one(state: CliState, name: str, train_set: CharDataset,
               test_set: CharDataset) -> "tuple[Model, List[EpochRecord]]":
    config = state.config()
    threads = state.threads_resolved
    if name == HOG_LINEAR:
        baseline = config.baseline.model_copy(update={"seed": derive_seed(config.seed, "train", name)})
        return train_linear_baseline(train_set, baseline, threads, state.logger), []
    train_config = config.train.model_copy(update={"seed": derive_seed(config.seed, "train", name)})
    model, history = train(preset(name), train_set, train_config, test_set, threads, state.logger)
    return model.with_lineage(f"synthetic:{name}"), history


@handle_errors
def train_cmd(
    ctx: typer.Context,
    model_name: Optional[str] = typer.Option(
        None,
        "--model", "-m",
        help="Preset to train (lenet-like, cifarnet-like) or hog-linear (default: config model)",
    ),
    out: Optional[Path] = typer.Option(
        None,
        "--out", "-o",
        help="Model file to write (default: <models>/<name>.ocrm)",
    ),
):
    """Train a classifier on the synthetic source corpus."""
    state = state_of(ctx)
    config = state.config()
    name = model_name or config.model
    if name != HOG_LINEAR:
        preset(name)
    out = out or state.model_path(name)

    train_set, test_set = _char_splits(state)
    console.print(f"[dim]Training[/dim] {name} [dim]on[/dim] {len(train_set)} "
                  f"[dim]samples ({len(train_set.classes())} classes)[/dim]")
    model, history = _train_one(state, name, train_set, test_set)
    result = evaluate(model, test_set)

    save_model(model, out)
    write_json({
        "model": name,
        "history": [h.to_dict() for h in history],
        "test": result.to_dict(),
        "lineage": model.lineage,
    }, out.with_suffix(".train.json"))
    config.write_resolved(out.parent)

    console.print(key_value_table("Training", {
        "Model": name,
        "Test accuracy": result.accuracy,
        "Class-wise accuracy": result.class_wise_accuracy,
        "Model file": str(out),
    }))
    emit_json({"model": str(out), "name": name, "test_accuracy": result.accuracy,
               "class_wise_accuracy": result.class_wise_accuracy})


@handle_errors
def bootstrap_cmd(
    ctx: typer.Context,
    model_path: Optional[Path] = typer.Option(
        None,
        "--model", "-m",
        help="Synthetic-only start model (default: <models>/<config model>.ocrm)",
    ),
    run_dir: Optional[Path] = typer.Option(
        None,
        "--run-dir", "-r",
        help="Run directory (default: paths.run_dir); completed stages are resumed",
    ),
):
    """Run the bootstrap stages: mine, merge, fine-tune, evaluate."""
    state = state_of(ctx)
    config = state.config()
    run_dir = run_dir or config.paths.run_dir
    initial = state.load_model(model_path)
    mine_root = config.corpus_dir(FIELDS_MINE)
    holdout_root = config.corpus_dir(FIELDS_HOLDOUT)
    records = load_field_corpus(mine_root)
    holdout = load_field_corpus(holdout_root)

    console.print(Panel.fit(
        "[bold blue]Character bootstrapping[/bold blue]\n"
        f"[dim]{config.bootstrap.stages} stages, quota {config.bootstrap.quota}, "
        f"{len(records)} mining fields[/dim]",
        border_style="blue",
    ))

    manager = BootstrapManager(config.bootstrap, state.generator(), config.gen, state.class_ids(),
                               config.seed, config.segment, state.threads_resolved, state.logger)
    run_dir.mkdir(parents=True, exist_ok=True)
    config.write_resolved(run_dir)
    frozen = manager.frozen_test_set(initial, holdout, holdout_root, run_dir)

    with progress_bar() as progress:
        task = progress.add_task("Bootstrapping...", total=config.bootstrap.stages)

        def update_progress(phase: str, completed: int, total: int) -> None:
            progress.update(task, description=f"{phase}: stage {completed}/{total}",
                            completed=completed, total=total)

        result = manager.run_bootstrap(initial, records, mine_root, run_dir, frozen, update_progress)

    table = Table(title="Bootstrap Stages", show_header=True, header_style="bold magenta")
    for column in ("Stage", "Mined", "Corrected", "Synthetic share", "Stage test", "Frozen test"):
        table.add_column(column, style="cyan" if column == "Stage" else "green")
    for r in result.reports:
        table.add_row(str(r.stage), str(r.mined_count), str(r.corrected_count),
                      f"{r.synthetic_share:g}", f"{r.stage_test_accuracy:.4f}",
                      f"{r.frozen_test_accuracy:.4f}")
    console.print(f"[dim]Initial frozen-test accuracy:[/dim] {result.initial_accuracy:.4f}")
    console.print(table)
    emit_json({
        "run_dir": str(run_dir),
        "initial_accuracy": result.initial_accuracy,
        "stages": [r.to_dict() for r in result.reports],
    })


@handle_errors
def compare(
    ctx: typer.Context,
    bench_n: int = typer.Option(
        1000,
        "--bench-n",
        help="Forward calls per latency measurement (at least 100)",
    ),
    out: Optional[Path] = typer.Option(
        None,
        "--out", "-o",
        help="Comparison JSON (default: <models>/comparison.json)",
    ),
):
    """Train every classifier on the same synthetic corpus; report accuracy and latency."""
    state = state_of(ctx)
    config = state.config()
    out = out or config.paths.models / "comparison.json"
    train_set, test_set = _char_splits(state)
    patches = [GrayImage(img) for img in test_set.images[:256]]

    rows: List[Dict[str, Any]] = []
    for name in COMPARE_MODELS:
        console.print(f"[dim]Training[/dim] {name}")
        model, _ = _train_one(state, name, train_set, test_set)
        save_model(model, config.paths.models / f"compare-{name}.ocrm")
        latency = benchmark_latency(model, patches, bench_n)
        rows.append({
            "model": name,
            "accuracy": evaluate(model, test_set).accuracy,
            "mean_ms": latency.mean_ms,
            "p95_ms": latency.p95_ms,
        })

    write_json({"models": rows}, out)
    config.write_resolved(out.parent)
    table = Table(title="Classifier Comparison", show_header=True, header_style="bold magenta")
    table.add_column("Model", style="cyan")
    table.add_column("Accuracy", style="green")
    table.add_column("Mean ms", style="yellow")
    table.add_column("p95 ms", style="yellow")
    for row in rows:
        table.add_row(row["model"], f"{row['accuracy']:.4f}", f"{row['mean_ms']:.2f}", f"{row['p95_ms']:.2f}")
    console.print(table)
    emit_json({"comparison": str(out), "models": rows})
