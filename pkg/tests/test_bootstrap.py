"""
Test suite for self-supervised bootstrapping.

Tests positional label mining, augmentation, stage dataset composition and
the stage loop including resume.
"""

import pytest
import numpy as np
from pathlib import Path

# Add src to path for imports
import sys
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.bootstrap import (
    COUNT_MISMATCH,
    AugmentSpec,
    BootstrapManager,
    StageConfig,
    augment,
    augment_one,
    augment_to,
    apply_augmentation,
    build_stage_dataset,
    draw_augmentation,
    ground_truth_labels,
    mine_patches,
    run_bootstrap,
    stage_dir,
)
from src.idocr.errors import ConfigError
from src.idocr.classify import LayerSpec, Model, ModelSpec, TrainConfig, init_params
from src.idocr.imaging import GrayImage, write_png
from src.idocr.synthgen import CharSample
from src.idocr.synthgen.charset import CHARSET
from src.idocr.synthgen.corpus import FieldRecord, write_field_records
from src.idocr.utils import read_json, read_jsonl


def pooled_model(zero=False):
    """Cheap 64x64 classifier: one 8x8 max-pool feeding the output layer."""
    spec = ModelSpec(name="pooled", layers=[LayerSpec.maxpool(8), LayerSpec.fc(len(CHARSET)),
                                            LayerSpec.softmax()])
    params = init_params(spec, np.random.default_rng(0))
    if zero:
        params = {k: np.zeros_like(v) for k, v in params.items()}
    return Model(spec=spec, tensors=params, lineage=["synthetic:pooled"])


def write_fields(root, generator, params, items):
    """Render (text, seed) pairs under root and return their records."""
    records = []
    for index, (text, seed) in enumerate(items):
        sample = generator.render_text_field(text, params, seed)
        path = f"fields/{index}.png"
        write_png(sample.image, root / path)
        records.append(FieldRecord(path=path, text=text, boxes=sample.boxes, seed=seed,
                                   style="source"))
    write_field_records(records, root)
    return records


def mined_samples(generator, params, class_id, count):
    samples = []
    for i in range(count):
        rendered = generator.render_char_sample(class_id, params, 1000 + i)
        samples.append(CharSample(image=rendered.image, label=class_id, provenance="mined", seed=i))
    return samples


class TestMining:
    """Test positional label correction."""

    def test_ground_truth_labels(self):
        assert ground_truth_labels("A8 C") == CHARSET.ids("A8C")
        assert ground_truth_labels("A#C") is None

    def test_labels_come_from_position(self, tmp_path, generator, clean_params):
        """Test a model predicting '0' everywhere still yields A, 8, C."""
        records = write_fields(tmp_path, generator, clean_params, [("A8C", 0)])
        result = mine_patches(pooled_model(zero=True), records, tmp_path)
        assert [s.label for s in result.samples] == CHARSET.ids("A8C")
        assert all(s.provenance == "mined" for s in result.samples)
        assert result.corrected_count == 3
        assert result.skipped == {}

    def test_count_mismatch_skipped(self, tmp_path, generator, clean_params):
        """Test a field whose ground truth is longer than its segmentation is dropped."""
        records = write_fields(tmp_path, generator, clean_params, [("A8C", 0)])
        wrong = [FieldRecord(path=records[0].path, text="A8CD", boxes=records[0].boxes,
                             seed=0, style="source")]
        result = mine_patches(pooled_model(), wrong, tmp_path)
        assert result.mined_count == 0
        assert result.skipped == {COUNT_MISMATCH: 1}

    def test_unreadable_field_counted(self, tmp_path):
        missing = [FieldRecord(path="fields/none.png", text="A", boxes=[], seed=0, style="source")]
        result = mine_patches(pooled_model(), missing, tmp_path)
        assert result.skipped_count == 1
        assert result.field_count == 1


class TestAugment:
    """Test patch augmentation."""

    @pytest.fixture
    def sample(self, generator, clean_params):
        return generator.render_char_sample(CHARSET.id("K"), clean_params, 3)

    def test_identity_spec(self, sample):
        out = augment_one(sample, AugmentSpec.identity(), seed=9)
        assert out.image == sample.image
        assert out.label == sample.label
        assert out.provenance == "augmented"

    def test_label_and_geometry_preserved(self, sample):
        outs = augment([sample] * 20, AugmentSpec(), seed=4)
        assert len(outs) == 20
        assert all(o.label == sample.label for o in outs)
        assert all((o.image.width, o.image.height) == (64, 64) for o in outs)
        assert any(o.image != sample.image for o in outs)

    def test_deterministic(self, sample):
        a = augment([sample] * 3, AugmentSpec(), seed=5)
        b = augment([sample] * 3, AugmentSpec(), seed=5)
        assert [x.image for x in a] == [x.image for x in b]

    def test_augment_to_count(self, sample):
        assert len(augment_to([sample], 7, AugmentSpec(), seed=1)) == 7
        assert augment_to([], 7, AugmentSpec(), seed=1) == []

    def test_invalid_ranges(self):
        with pytest.raises(ValueError) as exc_info:
            AugmentSpec(scale_range=(1.2, 0.9), gain_range=(0.0, 1.0), shear_range=(-30.0, 0.0))
        assert "scale_range" in str(exc_info.value)
        assert "shear_range" in str(exc_info.value)

    def test_draws_within_ranges(self):
        """Test 10,000 draws respect every range of the default spec."""
        spec = AugmentSpec()
        for seed in range(10_000):
            d = draw_augmentation(spec, seed)
            assert spec.rotation_range[0] <= d.angle <= spec.rotation_range[1]
            assert spec.translation_range[0] <= d.dx <= spec.translation_range[1]
            assert spec.translation_range[0] <= d.dy <= spec.translation_range[1]
            assert spec.scale_range[0] <= d.scale <= spec.scale_range[1]
            assert spec.shear_range[0] <= d.shear <= spec.shear_range[1]
            assert spec.gain_range[0] <= d.gain <= spec.gain_range[1]
            assert spec.bias_range[0] <= d.bias <= spec.bias_range[1]

    @pytest.mark.slow
    def test_content_stays_inside_patch(self):
        """Test a 40x40 centred glyph block never reaches the border over 10,000 draws."""
        data = np.full((64, 64), 200, dtype=np.uint8)
        data[12:52, 12:52] = 30
        patch = GrayImage(data)
        spec = AugmentSpec()
        for seed in range(10_000):
            out = apply_augmentation(patch, draw_augmentation(spec, seed)).data
            assert out.shape == (64, 64) and out.dtype == np.uint8
            ring = np.concatenate([out[0, :], out[-1, :], out[:, 0], out[:, -1]])
            assert ring.min() > 100
            assert out[29:35, 29:35].max() < 100

    def test_shear_leans_top_right(self):
        """Test positive shear moves the top of a vertical bar right and the bottom left."""
        data = np.full((64, 64), 200, dtype=np.uint8)
        data[12:52, 30:34] = 0
        spec = AugmentSpec.identity().model_copy(update={"shear_range": (10.0, 10.0)})
        out = apply_augmentation(GrayImage(data), draw_augmentation(spec, 0)).data
        top = np.flatnonzero(out[14] < 100).mean()
        bottom = np.flatnonzero(out[49] < 100).mean()
        assert top > 33 > 30 > bottom


class TestStageComposition:
    """Test the synthetic share schedule and stage datasets."""

    def test_share_schedule(self):
        config = StageConfig()
        shares = [config.synthetic_share(k) for k in range(6)]
        assert shares == pytest.approx([0.5, 0.25, 0.125, 0.0625, 0.05, 0.05])

    def test_invalid_stage_config(self):
        with pytest.raises(ValueError):
            StageConfig(initial_share=0.01, share_floor=0.05)

    def test_stage_zero_half_synthetic(self, generator, clean_params):
        """Test a mined class gets half its quota synthetic and a missing class all of it."""
        mined = mined_samples(generator, clean_params, 10, 4)
        config = StageConfig(quota=40)
        dataset = build_stage_dataset(mined, 0, config, generator, clean_params, [10, 11], seed=1)
        assert dataset.synthetic_share == 0.5
        assert dataset.composition == {"mined": 4, "augmented": 16, "synthetic": 60}
        assert dataset.train.class_counts() == {10: 36, 11: 36}
        assert dataset.test.class_counts() == {10: 4, 11: 4}
        assert set(dataset.train.where(provenance="synthetic").labels.tolist()) == {10, 11}

    def test_later_stage_smaller_share(self, generator, clean_params):
        mined = mined_samples(generator, clean_params, 10, 4)
        dataset = build_stage_dataset(mined, 2, StageConfig(quota=40), generator, clean_params,
                                      [10], seed=1)
        assert dataset.composition == {"mined": 4, "augmented": 31, "synthetic": 5}

    def test_surplus_mined_subsampled(self, generator, clean_params):
        mined = mined_samples(generator, clean_params, 10, 30)
        dataset = build_stage_dataset(mined, 0, StageConfig(quota=40), generator, clean_params,
                                      [10], seed=1)
        assert dataset.composition == {"mined": 20, "augmented": 0, "synthetic": 20}

    def test_deterministic(self, generator, clean_params):
        mined = mined_samples(generator, clean_params, 10, 3)
        a = build_stage_dataset(mined, 1, StageConfig(quota=12), generator, clean_params, [10, 11], seed=3)
        b = build_stage_dataset(mined, 1, StageConfig(quota=12), generator, clean_params, [10, 11], seed=3)
        assert np.array_equal(a.train.images, b.train.images)
        assert np.array_equal(a.test.labels, b.test.labels)


@pytest.mark.integration
class TestBootstrapRun:
    """Test the stage loop end to end on a handful of fields."""

    @pytest.fixture
    def corpus(self, tmp_path, generator, clean_params):
        root = tmp_path / "fields"
        items = [(text, seed) for text in ("HX4071", "AB 12") for seed in range(3)]
        return root, write_fields(root, generator, clean_params, items)

    @pytest.fixture
    def holdout(self, tmp_path, generator, clean_params):
        root = tmp_path / "holdout"
        return root, write_fields(root, generator, clean_params, [("HX4071", 10), ("AB 12", 11)])

    @pytest.fixture
    def config(self):
        return StageConfig(stages=1, quota=8,
                           fine_tune=TrainConfig(epochs=1, batch_size=8, fine_tune=True))

    def test_single_stage(self, tmp_path, corpus, holdout, config, generator, clean_params):
        root, records = corpus
        holdout_root, held = holdout
        run_dir = tmp_path / "run"
        class_ids = sorted(set(CHARSET.ids("HX4071AB2")))
        initial = pooled_model()
        result = run_bootstrap(initial, records, root, run_dir, config, generator, clean_params,
                               class_ids, seed=7, holdout=held, holdout_root=holdout_root)

        assert len(result.reports) == 1
        report = result.reports[0]
        assert report.mined_count == 30
        assert report.dataset_size == 8 * len(class_ids)
        assert result.model.lineage == [*initial.lineage, "bootstrap-stage-0"]
        assert 0.0 <= report.frozen_test_accuracy <= 1.0

        directory = stage_dir(run_dir, 0)
        for name in ("report.json", "model.ocrm", "patches.npy", "dataset.jsonl"):
            assert (directory / name).is_file()
        summary = read_json(run_dir / "summary.json")
        assert len(summary["stages"]) == 1
        assert (run_dir / "frozen-test" / "dataset.jsonl").is_file()

    def test_resume_skips_completed_stages(self, tmp_path, corpus, holdout, config, generator,
                                           clean_params):
        """Test a second run reuses stage 0 and only runs the new stage."""
        root, records = corpus
        holdout_root, held = holdout
        run_dir = tmp_path / "run"
        class_ids = sorted(set(CHARSET.ids("HX4071AB2")))
        first = run_bootstrap(pooled_model(), records, root, run_dir, config, generator,
                              clean_params, class_ids, seed=7, holdout=held, holdout_root=holdout_root)

        manager = BootstrapManager(config.model_copy(update={"stages": 2}), generator,
                                   clean_params, class_ids, seed=7)
        frozen = manager.frozen_test_set(pooled_model(), held, holdout_root, run_dir)
        second = manager.run_bootstrap(pooled_model(), records, root, run_dir, frozen)

        assert second.reports[0].to_dict() == first.reports[0].to_dict()
        assert second.model.lineage[-2:] == ["bootstrap-stage-0", "bootstrap-stage-1"]
        assert (stage_dir(run_dir, 1) / "report.json").is_file()

    def test_frozen_fields_never_mined(self, tmp_path, corpus, holdout, config, generator,
                                       clean_params):
        """Test frozen-test characters and stage training data come from different fields."""
        root, records = corpus
        holdout_root, held = holdout
        run_dir = tmp_path / "run"
        class_ids = sorted(set(CHARSET.ids("HX4071AB2")))
        run_bootstrap(pooled_model(), records, root, run_dir, config, generator, clean_params,
                      class_ids, seed=7, holdout=held, holdout_root=holdout_root)

        frozen = {r["field"] for r in read_jsonl(run_dir / "frozen-test" / "dataset.jsonl")}
        staged = {r["field"] for r in read_jsonl(stage_dir(run_dir, 0) / "dataset.jsonl")
                  if "field" in r}
        assert frozen == {10, 11}
        assert staged and staged <= {0, 1, 2}
        assert not frozen & staged

    def test_holdout_required(self, tmp_path, corpus, config, generator, clean_params):
        root, records = corpus
        with pytest.raises(ConfigError, match="held-out"):
            run_bootstrap(pooled_model(), records, root, tmp_path / "run", config, generator,
                          clean_params, [CHARSET.id("H")], seed=7, holdout=[], holdout_root=root)

    def test_overlapping_holdout_rejected(self, tmp_path, corpus, config, generator, clean_params):
        """Test reusing mining fields as the holdout corpus fails before any stage runs."""
        root, records = corpus
        run_dir = tmp_path / "run"
        with pytest.raises(ConfigError, match="overlaps the mining corpus"):
            run_bootstrap(pooled_model(), records, root, run_dir, config, generator,
                          clean_params, [CHARSET.id("H")], seed=7, holdout=records[:2],
                          holdout_root=root)
        assert not run_dir.exists()

    def test_stored_frozen_set_checked(self, tmp_path, corpus, config, generator, clean_params):
        """Test a frozen set mined from the mining fields is refused by the stage loop."""
        root, records = corpus
        run_dir = tmp_path / "run"
        class_ids = sorted(set(CHARSET.ids("HX4071AB2")))
        manager = BootstrapManager(config, generator, clean_params, class_ids, seed=7)
        frozen = manager.frozen_test_set(pooled_model(), records, root, run_dir)
        with pytest.raises(ConfigError):
            manager.run_bootstrap(pooled_model(), records, root, run_dir, frozen)
