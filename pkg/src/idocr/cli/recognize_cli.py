"""
Consumer-side commands: recognition, evaluation, latency and segmentation dumps.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

import typer

from ..classify import CharDataset
from ..imaging import GrayImage, read_image, write_png
from ..metrics import benchmark_latency, evaluate_fields, export_confusion_csv, write_report
from ..ocr import load_rules, recognize_corpus, recognize_field
from ..segment import segment_field
from ..synthgen import load_field_corpus
from ..utils import read_jsonl, write_json, write_jsonl
from .common import CHARS_SOURCE, console, emit_json, handle_errors, key_value_table, state_of


@handle_errors
def ocr(
    ctx: typer.Context,
    model_path: Path = typer.Argument(..., help="Model file (.ocrm)"),
    image: Optional[Path] = typer.Option(None, "--image", "-i", help="Single field image (PNG/PGM)"),
    corpus: Optional[Path] = typer.Option(None, "--corpus", help="Field corpus directory"),
    rule: Optional[str] = typer.Option(None, "--rule", help="Format rule for --image"),
    rules_path: Optional[Path] = typer.Option(None, "--rules", help="Rules TOML (default: paths.rules)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="JSONL results for --corpus"),
):
    """
    Recognize a single field image or every field of a corpus.

    With --corpus each record's own rule is applied and one JSON line per
    field is written to --out (or stdout).
    """
    state = state_of(ctx)
    config = state.config()
    if (image is None) == (corpus is None):
        raise typer.BadParameter("give exactly one of --image or --corpus")
    model = state.load_model(model_path)
    rules = load_rules(rules_path or config.paths.rules)

    if image is not None:
        selected = None
        if rule is not None:
            if rule not in rules:
                raise typer.BadParameter(f"unknown rule '{rule}', known: {sorted(rules)}")
            selected = rules[rule]
        result = recognize_field(model, read_image(image), selected, config.segment, state.logger)
        emit_json({"path": str(image), **result.to_dict()})
        return

    records = load_field_corpus(corpus)
    results = recognize_corpus(model, records, corpus, rules, config.segment,
                               state.threads_resolved, state.logger)
    lines = [{"path": record.path, **result.to_dict()} for record, result in results]
    if out is None:
        for line in lines:
            emit_json(line)
    else:
        write_jsonl(lines, out)
        console.print(f"[green]Recognized[/green] {len(lines)} fields -> {out}")


@handle_errors
def eval_cmd(
    ctx: typer.Context,
    results_path: Path = typer.Argument(..., help="JSONL output of 'ocr --corpus'"),
    corpus: Path = typer.Option(..., "--corpus", help="Field corpus with the ground truth"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Report JSON"),
    confusion_csv: Optional[Path] = typer.Option(None, "--confusion-csv", help="Confusion matrix CSV"),
    latency_model: Optional[Path] = typer.Option(
        None, "--latency",
        help="Model to benchmark on the source test characters; adds latency to the report",
    ),
    bench_n: int = typer.Option(1000, "--bench-n", help="Forward calls for --latency"),
):
    """Score recognition results against the corpus ground truth."""
    state = state_of(ctx)
    config = state.config()
    truth = {record.path: record.text for record in load_field_corpus(corpus)}
    predicted = {row["path"]: row["text"] for row in read_jsonl(results_path)}

    missing = sorted(set(truth) - set(predicted))
    if missing:
        state.logger.warning(f"{len(missing)} fields have no result and count as empty: {missing[:5]}")
    paths = sorted(truth)
    report = evaluate_fields([predicted.get(p, "") for p in paths], [truth[p] for p in paths])

    if latency_model is not None:
        report = report.with_latency(benchmark_latency(state.load_model(latency_model),
                                                       _source_test_patches(config), bench_n))
    if out is not None:
        write_report(report, out)
    if confusion_csv is not None:
        export_confusion_csv(report, confusion_csv)

    rows: Dict[str, Any] = {
        "Fields": report.field_count,
        "Correct fields": report.correct_count,
        "Field accuracy": report.correct_rate,
        "Mean edit distance": report.mean_distance,
        "Character accuracy": report.char_accuracy,
        "Class-wise accuracy": report.class_wise_accuracy,
        "Unaligned fields": report.unaligned_fields,
    }
    if report.latency is not None:
        rows["Latency mean ms"] = report.latency.mean_ms
    console.print(key_value_table("Evaluation", rows))
    summary = report.to_dict()
    summary.pop("confusion")
    emit_json(summary)


def _source_test_patches(config: Any) -> List[GrayImage]:
    dataset = CharDataset.from_manifest(config.corpus_dir(CHARS_SOURCE), "test")
    return [GrayImage(img) for img in dataset.images]


@handle_errors
def bench(
    ctx: typer.Context,
    model_path: Optional[Path] = typer.Argument(None, help="Model file (default: configured model)"),
    n: int = typer.Option(1000, "--n", "-n", help="Timed forward calls, at least 100"),
):
    """Measure single-patch classification latency on the calling thread."""
    state = state_of(ctx)
    config = state.config()
    stats = benchmark_latency(state.load_model(model_path), _source_test_patches(config), n)
    console.print(key_value_table("Latency (ms)", {
        "Calls": stats.count,
        "Mean": stats.mean_ms,
        "p95": stats.p95_ms,
        "Min": stats.min_ms,
        "Max": stats.max_ms,
    }))
    emit_json(stats.to_dict())


@handle_errors
def segment(
    ctx: typer.Context,
    image: Path = typer.Argument(..., help="Field image (PNG/PGM)"),
    out: Path = typer.Option(..., "--out", "-o", help="Directory for segmentation.json and patches"),
):
    """Dump the line, string and character decomposition of one field."""
    state = state_of(ctx)
    config = state.config()
    result = segment_field(read_image(image), config.segment)
    out.mkdir(parents=True, exist_ok=True)
    patches = []
    for index, char in enumerate(result.flat_chars()):
        name = f"char-{index:04d}.png"
        write_png(char.patch, out / name)
        patches.append(name)
    data = {"image": str(image), **result.to_dict(), "patches": patches}
    write_json(data, out / "segmentation.json")
    console.print(f"[green]Segmented[/green] {result.char_count} characters "
                  f"in {len(result.lines)} lines -> {out}")
    emit_json({"out": str(out), "lines": len(result.lines), "chars": result.char_count,
               "string_lengths": result.string_lengths()})
