"""
Bootstrap orchestration.

This module runs the mine -> augment/merge -> fine-tune -> evaluate cycle
stage by stage, persisting every stage under a run directory so an
interrupted run resumes after its last completed stage.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from ..classify.dataset import RECORDS_FILE, CharDataset
from ..classify.model import Model, load_model, save_model
from ..classify.trainer import evaluate, fine_tune
from ..errors import ConfigError, CorpusError, StageFailedError
from ..segment import SegmentConfig
from ..synthgen.corpus import FieldRecord
from ..synthgen.generator import SyntheticGenerator
from ..synthgen.params import GenParams
from ..synthgen.rng import derive_seed
from ..utils import ProgressLogger, get_logger, read_json, write_json
from .dataset_builder import StageConfig, build_stage_dataset, merged
from .miner import mine_patches

PathLike = Union[str, Path]

REPORT_FILE = "report.json"
MODEL_FILE = "model.ocrm"
SUMMARY_FILE = "summary.json"
FROZEN_TEST_DIR = "frozen-test"


def field_seeds(dataset: CharDataset) -> Set[int]:
    """Seeds of the fields a dataset's mined or augmented samples came from."""
    return {int(r["field"]) for r in dataset.records if r.get("field") is not None}


def check_disjoint(frozen_fields: Iterable[int], records: Sequence[FieldRecord]) -> None:
    """
    Raises:
        ConfigError: a frozen-test field is also a mining field
    """
    shared = sorted(set(frozen_fields) & {r.seed for r in records})
    if shared:
        raise ConfigError(
            [f"{len(shared)} field(s) are both held out and mined, first seed {shared[0]}"],
            "frozen test set overlaps the mining corpus",
        )


@dataclass
class StageReport:
    """Everything measured in one bootstrap stage."""

    stage: int
    mined_count: int
    per_class_mined: Dict[int, int]
    composition: Dict[str, int]
    synthetic_share: float
    stage_test_accuracy: float
    frozen_test_accuracy: float
    frozen_class_wise_accuracy: float
    skipped_fields: Dict[str, int] = field(default_factory=dict)
    corrected_count: int = 0
    field_count: int = 0
    lineage: List[str] = field(default_factory=list)

    @property
    def dataset_size(self) -> int:
        return sum(self.composition.values())

    @property
    def synthetic_fraction(self) -> float:
        size = self.dataset_size
        return self.composition.get("synthetic", 0) / size if size else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "mined_count": self.mined_count,
            "per_class_mined": {str(k): v for k, v in sorted(self.per_class_mined.items())},
            "composition": dict(self.composition),
            "dataset_size": self.dataset_size,
            "synthetic_share": self.synthetic_share,
            "synthetic_fraction": self.synthetic_fraction,
            "stage_test_accuracy": self.stage_test_accuracy,
            "frozen_test_accuracy": self.frozen_test_accuracy,
            "frozen_class_wise_accuracy": self.frozen_class_wise_accuracy,
            "skipped_fields": dict(self.skipped_fields),
            "skipped_count": sum(self.skipped_fields.values()),
            "corrected_count": self.corrected_count,
            "field_count": self.field_count,
            "lineage": list(self.lineage),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StageReport":
        return cls(
            stage=int(data["stage"]),
            mined_count=int(data["mined_count"]),
            per_class_mined={int(k): int(v) for k, v in data["per_class_mined"].items()},
            composition={k: int(v) for k, v in data["composition"].items()},
            synthetic_share=float(data["synthetic_share"]),
            stage_test_accuracy=float(data["stage_test_accuracy"]),
            frozen_test_accuracy=float(data["frozen_test_accuracy"]),
            frozen_class_wise_accuracy=float(data["frozen_class_wise_accuracy"]),
            skipped_fields={k: int(v) for k, v in data.get("skipped_fields", {}).items()},
            corrected_count=int(data.get("corrected_count", 0)),
            field_count=int(data.get("field_count", 0)),
            lineage=list(data.get("lineage", [])),
        )


@dataclass
class BootstrapResult:
    reports: List[StageReport]
    model: Model
    initial_accuracy: float
    run_dir: Path


def stage_dir(run_dir: PathLike, stage: int) -> Path:
    return Path(run_dir) / f"stage-{stage}"


class BootstrapManager:
    """
    Main bootstrap orchestration class.

    Owns the stage schedule, the synthetic generator that tops up every class
    and the frozen pseudo-real test set used to compare stages.
    """

    def __init__(
        self,
        config: StageConfig,
        generator: SyntheticGenerator,
        synthetic_params: GenParams,
        class_ids: Sequence[int],
        seed: int,
        segment_config: Optional[SegmentConfig] = None,
        threads: int = 1,
        logger: Optional[logging.Logger] = None,
    ):
        """
        Initialize bootstrap manager.

        Args:
            config: Stage schedule, quota and fine-tuning settings
            generator: Renderer for the synthetic share of each stage
            synthetic_params: Style of the synthetic share
            class_ids: Classes every stage dataset is filled for
            seed: Master seed; every stage input derives from it
            segment_config: Segmentation settings used while mining
            threads: Worker count for mining, rendering and gradients
            logger: Logger instance (creates default if None)
        """
        self.config = config
        self.generator = generator
        self.synthetic_params = synthetic_params
        self.class_ids = sorted(class_ids)
        self.seed = seed
        self.segment_config = segment_config or SegmentConfig()
        self.threads = threads
        self.logger = logger or get_logger("bootstrap")
        self.progress_logger = ProgressLogger(self.logger)

    def frozen_test_set(self, model: Model, records: Sequence[FieldRecord], root: PathLike,
                        run_dir: PathLike) -> CharDataset:
        """
        Mine the held-out fields once and store them under the run directory.

        A stored set is reused as is, so a resumed run compares against the
        same characters.
        """
        directory = Path(run_dir) / FROZEN_TEST_DIR
        if (directory / RECORDS_FILE).is_file():
            self.logger.info(f"Reusing frozen test set from {directory}")
            return CharDataset.load(directory)
        result = mine_patches(model, records, root, self.segment_config, self.threads, self.logger)
        wanted = set(self.class_ids)
        dataset = CharDataset.from_samples([s for s in result.samples if s.label in wanted],
                                           split="frozen-test")
        if not len(dataset):
            raise CorpusError("no characters could be mined from the held-out fields")
        dataset.save(directory)
        self.logger.info(f"Frozen test set: {len(dataset)} characters from {len(records)} fields")
        return dataset

    def run_bootstrap(
        self,
        initial_model: Model,
        records: Sequence[FieldRecord],
        root: PathLike,
        run_dir: PathLike,
        frozen_test: CharDataset,
        progress_callback: Optional[Callable[[str, int, int], None]] = None,
    ) -> BootstrapResult:
        """
        Run every stage, resuming after the last completed one.

        Args:
            initial_model: Synthetic-only model the run starts from
            records: Mining field corpus with ground truth
            root: Directory the field records are relative to
            run_dir: Output directory, one sub-directory per stage
            frozen_test: Fixed pseudo-real characters for cross-stage accuracy
            progress_callback: Optional callback (operation, completed, total)

        Returns:
            Stage reports in order plus the final model

        Raises:
            ConfigError: the frozen test set was mined from fields in records
            StageFailedError: a stage failed; completed stages stay on disk
        """
        check_disjoint(field_seeds(frozen_test), records)
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        initial = evaluate(initial_model, frozen_test)
        self.logger.info(f"Initial frozen-test accuracy: {initial.accuracy:.4f}")

        reports: List[StageReport] = []
        model = initial_model
        stages = self.config.stages
        self.progress_logger.start_operation("bootstrap", stages)

        for stage in range(stages):
            directory = stage_dir(run_dir, stage)
            if (directory / REPORT_FILE).is_file() and (directory / MODEL_FILE).is_file():
                self.logger.info(f"Stage {stage} already complete, resuming from {directory}")
                reports.append(StageReport.from_dict(read_json(directory / REPORT_FILE)))
                model = load_model(directory / MODEL_FILE)
            else:
                try:
                    report, model = self._run_stage(stage, model, records, root, directory, frozen_test)
                except Exception as e:
                    self.logger.error(f"Bootstrap stage {stage} failed: {e}")
                    self.logger.warning(f"Completed stages preserved at: {run_dir}")
                    raise StageFailedError(stage, e) from e
                reports.append(report)
            self._write_summary(run_dir, initial.accuracy, initial.class_wise_accuracy, reports)
            self.progress_logger.advance("bootstrap", stages, f"stage {stage}")
            if progress_callback:
                progress_callback("Bootstrap", stage + 1, stages)

        self.progress_logger.complete_operation("bootstrap", stages, len(reports), run_dir=str(run_dir))
        return BootstrapResult(reports=reports, model=model, initial_accuracy=initial.accuracy,
                               run_dir=run_dir)

    def _run_stage(self, stage: int, model: Model, records: Sequence[FieldRecord],
                   root: PathLike, directory: Path,
                   frozen_test: CharDataset) -> Tuple[StageReport, Model]:
        self.logger.info(f"Bootstrap stage {stage}: mining {len(records)} fields")
        mining = mine_patches(model, records, root, self.segment_config, self.threads, self.logger)
        wanted = set(self.class_ids)
        mined = [s for s in mining.samples if s.label in wanted]
        self.logger.info(
            f"Stage {stage}: mined {len(mined)} characters "
            f"({len({s.label for s in mined})} of {len(self.class_ids)} classes), "
            f"{mining.corrected_count} labels corrected, skipped {mining.skipped}"
        )

        dataset = build_stage_dataset(mined, stage, self.config, self.generator,
                                      self.synthetic_params, self.class_ids,
                                      self.seed, self.threads, self.logger)
        train_config = self.config.fine_tune.model_copy(
            update={"seed": derive_seed(self.seed, "stage", stage, "fine-tune")}
        )
        tuned, _ = fine_tune(model, dataset.train, train_config, stage_id=f"bootstrap-stage-{stage}",
                             threads=self.threads, logger=self.logger)

        stage_eval = evaluate(tuned, dataset.test)
        frozen_eval = evaluate(tuned, frozen_test)
        report = StageReport(
            stage=stage,
            mined_count=len(mined),
            per_class_mined=dict(sorted(Counter(s.label for s in mined).items())),
            composition=dataset.composition,
            synthetic_share=dataset.synthetic_share,
            stage_test_accuracy=stage_eval.accuracy,
            frozen_test_accuracy=frozen_eval.accuracy,
            frozen_class_wise_accuracy=frozen_eval.class_wise_accuracy,
            skipped_fields=mining.skipped,
            corrected_count=mining.corrected_count,
            field_count=mining.field_count,
            lineage=list(tuned.lineage),
        )

        # the report is written last and marks the stage complete
        directory.mkdir(parents=True, exist_ok=True)
        merged(dataset).save(directory)
        save_model(tuned, directory / MODEL_FILE)
        write_json(report.to_dict(), directory / REPORT_FILE)
        self.logger.info(
            f"Stage {stage} done: stage-test accuracy {stage_eval.accuracy:.4f}, "
            f"frozen-test accuracy {frozen_eval.accuracy:.4f}"
        )
        return report, tuned

    def _write_summary(self, run_dir: Path, initial_accuracy: float, initial_class_wise: float,
                       reports: List[StageReport]) -> None:
        write_json({
            "initial_accuracy": initial_accuracy,
            "initial_class_wise_accuracy": initial_class_wise,
            "stages": [
                {
                    "stage": r.stage,
                    "mined_count": r.mined_count,
                    "corrected_count": r.corrected_count,
                    "synthetic_share": r.synthetic_share,
                    "stage_test_accuracy": r.stage_test_accuracy,
                    "frozen_test_accuracy": r.frozen_test_accuracy,
                    "frozen_class_wise_accuracy": r.frozen_class_wise_accuracy,
                }
                for r in reports
            ],
        }, run_dir / SUMMARY_FILE)


def run_bootstrap(
    initial_model: Model,
    records: Sequence[FieldRecord],
    root: PathLike,
    run_dir: PathLike,
    config: StageConfig,
    generator: SyntheticGenerator,
    synthetic_params: GenParams,
    class_ids: Sequence[int],
    seed: int,
    holdout: Sequence[FieldRecord],
    holdout_root: PathLike,
    segment_config: Optional[SegmentConfig] = None,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> BootstrapResult:
    """
    Convenience wrapper: build the frozen test set from the holdout fields and
    run every stage on the mining fields.

    Raises:
        ConfigError: the holdout corpus is empty or shares fields with records
        StageFailedError: a stage failed; completed stages stay on disk
    """
    if not holdout:
        raise ConfigError(["holdout: the frozen test set needs at least one held-out field"])
    check_disjoint((r.seed for r in holdout), records)
    manager = BootstrapManager(config, generator, synthetic_params, class_ids, seed,
                               segment_config, threads, logger)
    frozen = manager.frozen_test_set(initial_model, holdout, holdout_root, run_dir)
    return manager.run_bootstrap(initial_model, records, root, run_dir, frozen)
