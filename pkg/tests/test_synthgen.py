"""
Test suite for the synthetic character generator.

Tests the charset, seeded randomness, font pools, character and field
rendering, field texts and on-disk corpora.
"""

import pytest
import numpy as np
from collections import Counter
from pathlib import Path

# Add src to path for imports
import sys
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.errors import ConfigError, CorpusError, FieldTextError
from src.idocr.imaging import read_png
from src.idocr.imaging.io import encode_png
from src.idocr.synthgen import (
    CHARSET,
    NUM_CLASSES,
    Charset,
    CorpusSpec,
    FontPool,
    GenParams,
    assert_disjoint,
    available_kinds,
    derive_seed,
    generate_corpus,
    generate_field_corpus,
    load_field_corpus,
    load_font_pools,
    load_manifest,
    make_rng,
    regenerate_sample,
    sample_field_text,
)
from src.idocr.synthgen.corpus import STATUS_FILE
from src.idocr.synthgen.rng import randint


class TestCharset:
    """Test the label alphabet."""

    def test_74_unique_symbols(self):
        """Test the alphabet size and id bijection."""
        assert NUM_CLASSES == 74
        assert sorted(CHARSET.id(s) for s in CHARSET.symbols) == list(range(74))
        assert all(CHARSET.symbol(CHARSET.id(s)) == s for s in CHARSET.symbols)

    def test_desk36_subset(self):
        """Test the digits + uppercase class set."""
        ids = CHARSET.class_ids("desk36")
        assert len(ids) == 36
        assert CHARSET.subset_symbols("desk36") == "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"

    def test_unknown_class_set(self):
        with pytest.raises(ValueError, match="unknown class set"):
            CHARSET.class_ids("greek")

    def test_duplicates_rejected(self):
        """Test a charset cannot repeat a symbol or contain a space."""
        with pytest.raises(ValueError):
            Charset("AAB")
        with pytest.raises(ValueError):
            Charset("A B")

    def test_hash_depends_on_order(self):
        """Test the fingerprint changes when symbols are reordered."""
        assert Charset("AB").hash != Charset("BA").hash
        assert CHARSET.hash == Charset(CHARSET.symbols).hash


class TestRng:
    """Test seed derivation and the closed-range integer draw."""

    def test_derive_seed_stable_and_distinct(self):
        """Test seeds are stable and separate int from str parts."""
        assert derive_seed(1, "train", 3, 0) == derive_seed(1, "train", 3, 0)
        assert derive_seed(1, "train", 3, 0) != derive_seed(1, "train", 3, 1)
        assert derive_seed(1) != derive_seed("1")
        assert 0 <= derive_seed(7) < 2 ** 64

    def test_make_rng_reproducible(self):
        a = make_rng(42).integers(0, 1000, size=10)
        b = make_rng(42).integers(0, 1000, size=10)
        assert np.array_equal(a, b)

    def test_randint_is_closed(self):
        """Test both ends of the range are reachable."""
        rng = make_rng(0)
        values = {randint(rng, 1, 3) for _ in range(200)}
        assert values == {1, 2, 3}
        assert randint(rng, 5, 5) == 5


class TestFontPools:
    """Test font pool loading and separation."""

    def test_bundled_pools_disjoint(self, font_pools):
        """Test the source and pseudo-real pools share no font file."""
        assert set(font_pools) == {"source", "pseudo_real"}
        assert_disjoint(font_pools["source"], font_pools["pseudo_real"])

    def test_shared_font_rejected(self, font_pools):
        """Test overlapping pools raise ConfigError."""
        source = font_pools["source"]
        other = FontPool(name="other", files=(source.files[0],))
        with pytest.raises(ConfigError, match="share"):
            assert_disjoint(source, other)

    def test_missing_files_all_reported(self, tmp_path):
        """Test every missing file is listed."""
        fonts = tmp_path / "fonts.toml"
        fonts.write_text('[pools.a]\nfiles = ["x.ttf", "y.ttf"]\n[pools.b]\nfiles = []\n')
        with pytest.raises(ConfigError) as exc_info:
            load_font_pools(fonts)
        problems = exc_info.value.problems
        assert any("x.ttf" in p for p in problems)
        assert any("y.ttf" in p for p in problems)
        assert any("'b' is empty" in p for p in problems)

    def test_pools_cover_charset(self, font_pools):
        """Test every bundled font draws every symbol."""
        for pool in font_pools.values():
            pool.check_glyphs("".join(CHARSET.symbols))


class TestGenParams:
    """Test rendering-style validation."""

    def test_presets_differ_in_contrast(self):
        source, pseudo = GenParams.source(), GenParams.pseudo_real()
        assert source.font_pool == "source"
        assert pseudo.font_pool == "pseudo_real"
        assert pseudo.background_range[1] < source.background_range[1]

    def test_every_problem_reported(self):
        """Test validation lists all broken ranges at once."""
        with pytest.raises(ValueError) as exc_info:
            GenParams(rotation_range=(-20.0, 0.0), font_size_range=(40, 30))
        message = str(exc_info.value)
        assert "rotation_range" in message
        assert "font_size_range" in message


class TestRenderCharSample:
    """Test 64x64 character patch rendering."""

    def test_deterministic(self, generator, source_params):
        """Test same class, params and seed give identical pixels."""
        a = generator.render_char_sample(CHARSET.id("A"), source_params, 1234)
        b = generator.render_char_sample(CHARSET.id("A"), source_params, 1234)
        assert a.image == b.image
        assert a.neighbors == b.neighbors

    def test_label_and_shape(self, generator, source_params):
        """Test label passthrough and patch size."""
        sample = generator.render_char_sample(CHARSET.id("A"), source_params, 5)
        assert sample.label == CHARSET.id("A")
        assert (sample.image.width, sample.image.height) == (64, 64)
        assert sample.provenance == "synthetic"

    def test_different_seeds_differ(self, generator, source_params):
        a = generator.render_char_sample(0, source_params, 1)
        b = generator.render_char_sample(0, source_params, 2)
        assert a.image != b.image

    def test_centre_glyph_inside_patch(self, generator, clean_params):
        """Test the centre column carries ink for every class without jitter."""
        for class_id in range(NUM_CLASSES):
            sample = generator.render_char_sample(class_id, clean_params, derive_seed("centre", class_id))
            centre = sample.image.data[8:56, 24:40]
            assert centre.min() < 128, CHARSET.symbol(class_id)

    def test_invalid_class(self, generator, source_params):
        with pytest.raises(ValueError):
            generator.render_char_sample(NUM_CLASSES, source_params, 0)

    def test_unknown_pool(self, generator):
        with pytest.raises(ConfigError, match="unknown font pool"):
            generator.render_char_sample(0, GenParams(font_pool="nope"), 0)

    @pytest.mark.slow
    def test_neighbours_uniform(self, generator, source_params):
        """Test neighbour classes are uniform over the alphabet (chi-square)."""
        from scipy.stats import chisquare

        counts = Counter()
        for i in range(5000):
            sample = generator.render_char_sample(CHARSET.id("E"), source_params,
                                                  derive_seed("neighbours", i))
            counts.update(sample.neighbors)
        observed = [counts[c] for c in range(NUM_CLASSES)]
        assert chisquare(observed).pvalue > 0.001


class TestRenderTextField:
    """Test text field rendering."""

    def test_boxes_left_to_right(self, generator, source_params):
        """Test one ordered box per character."""
        sample = generator.render_text_field("01.01.1990", source_params, 7)
        assert len(sample.boxes) == 10
        xs = [b.x for b in sample.boxes]
        assert xs == sorted(xs)
        assert len(set(xs)) == 10

    def test_spaces_have_no_boxes(self, generator, source_params):
        sample = generator.render_text_field("AB 12", source_params, 3)
        assert len(sample.boxes) == 4

    def test_multi_line(self, generator, source_params):
        """Test a second line is rendered below the first."""
        sample = generator.render_text_field("ABC\nDEF", source_params, 11)
        assert sample.lines == ["ABC", "DEF"]
        assert sample.boxes[3].y > sample.boxes[0].y

    def test_boxes_inside_image(self, generator, pseudo_real_params):
        sample = generator.render_text_field("Müller (Ost)", pseudo_real_params, 9)
        assert all(b.within(sample.image.width, sample.image.height) for b in sample.boxes)

    @pytest.mark.parametrize("text", ["", "   ", "\n"])
    def test_empty_text(self, generator, source_params, text):
        """Test empty field texts are rejected."""
        with pytest.raises(FieldTextError, match="empty field text"):
            generator.render_text_field(text, source_params, 0)

    def test_symbol_outside_charset(self, generator, source_params):
        with pytest.raises(FieldTextError, match="outside the charset"):
            generator.render_text_field("A#B", source_params, 0)

    def test_deterministic(self, generator, pseudo_real_params):
        a = generator.render_text_field("X1234", pseudo_real_params, 77)
        b = generator.render_text_field("X1234", pseudo_real_params, 77)
        assert a.image == b.image
        assert a.boxes == b.boxes


class TestFieldTexts:
    """Test dictionary-free field contents."""

    def test_rule_ids(self):
        """Test fixed-format kinds report their rule."""
        rng = make_rng(0)
        text, rule = sample_field_text("date", "all", rng)
        assert rule == "date"
        assert len(text) == 10 and text[2] == "." and text[5] == "."

        text, rule = sample_field_text("id_number", "all", rng)
        assert rule == "id_number"
        assert text[0].isupper() and text[1:].isdigit()

    def test_desk36_avoids_specials(self):
        """Test the 36-class set only yields digits, uppercase and spaces."""
        kinds = available_kinds("desk36")
        assert "doc_code" not in kinds and "place" not in kinds
        rng = make_rng(1)
        allowed = set(CHARSET.subset_symbols("desk36")) | {" "}
        for kind in kinds:
            for _ in range(20):
                text, rule = sample_field_text(kind, "desk36", rng)
                assert set(text) <= allowed
                if kind == "date":
                    assert rule == "date_spaced"

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown field kind"):
            sample_field_text("passport_photo", "all", make_rng(0))


class TestCorpus:
    """Test character and field corpora on disk."""

    @pytest.fixture
    def small_spec(self):
        return CorpusSpec(classes=[CHARSET.id("A"), CHARSET.id("7")], splits={"train": 3, "test": 1})

    def test_manifest_counts(self, tmp_path, generator, source_params, small_spec):
        """Test two classes, three train and one test sample each."""
        entries = generate_corpus(small_spec, source_params, 5, tmp_path, generator)
        assert len(entries) == 8
        per_class = Counter(e.label for e in entries)
        assert set(per_class.values()) == {4}
        assert load_manifest(tmp_path) == entries
        assert len(load_manifest(tmp_path, "test")) == 2
        assert all((tmp_path / e.path).is_file() for e in entries)

    def test_regenerate_is_byte_identical(self, tmp_path, generator, source_params, small_spec):
        """Test any entry can be re-rendered in isolation."""
        entries = generate_corpus(small_spec, source_params, 5, tmp_path, generator)
        entry = entries[5]
        sample = regenerate_sample(entry, source_params, generator)
        assert encode_png(sample.image) == (tmp_path / entry.path).read_bytes()

    def test_parallel_equals_serial(self, tmp_path, generator, source_params, small_spec):
        """Test the thread count does not change the artifacts."""
        serial = generate_corpus(small_spec, source_params, 9, tmp_path / "a", generator, threads=1)
        parallel = generate_corpus(small_spec, source_params, 9, tmp_path / "b", generator, threads=4)
        assert serial == parallel
        assert (tmp_path / "a" / "manifest.jsonl").read_bytes() == \
            (tmp_path / "b" / "manifest.jsonl").read_bytes()
        for e in serial:
            assert read_png(tmp_path / "a" / e.path) == read_png(tmp_path / "b" / e.path)

    def test_incomplete_corpus_rejected(self, tmp_path):
        """Test a corpus whose status says incomplete is not loaded."""
        (tmp_path / STATUS_FILE).write_text('{"complete": false}')
        with pytest.raises(CorpusError, match="incomplete"):
            load_manifest(tmp_path)

    def test_missing_corpus(self, tmp_path):
        with pytest.raises(CorpusError):
            load_field_corpus(tmp_path / "nothing")

    def test_field_corpus(self, tmp_path, generator, pseudo_real_params):
        """Test field records carry text, boxes and rule ids."""
        records = generate_field_corpus("fields-test", 6, pseudo_real_params, 3, tmp_path,
                                        generator, class_set="desk36")
        assert load_field_corpus(tmp_path) == records
        for record in records:
            assert len(record.boxes) == len(record.text.replace(" ", ""))
            assert record.style == "pseudo_real"
            image = record.load_image(tmp_path)
            assert all(b.within(image.width, image.height) for b in record.boxes)
