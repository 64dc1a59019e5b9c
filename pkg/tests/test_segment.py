"""
Test suite for text-field segmentation.

Tests projection runs, line and string separation, contour components
against a flood-fill oracle, character grouping rules and the whole-field
pipeline on rendered fields.
"""

import pytest
import numpy as np
from pathlib import Path

# Add src to path for imports
import sys
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.imaging import BinaryImage, GrayImage
from src.idocr.segment import (
    Box,
    SegmentConfig,
    extract_chars,
    ink_reference,
    line_reference,
    locate_chars,
    runs,
    segment_field,
    split_lines,
    split_strings,
    suppress_noise,
    trace_contours,
)
from src.idocr.synthgen import rng_for, sample_field


def blocks_mask(height, width, blocks):
    """Binary mask with True rectangles given as (x0, y0, x1, y1)."""
    mask = np.zeros((height, width), dtype=bool)
    for x0, y0, x1, y1 in blocks:
        mask[y0:y1, x0:x1] = True
    return BinaryImage(mask)


class TestBox:
    """Test the pixel box type."""

    def test_positive_size_required(self):
        with pytest.raises(ValueError):
            Box(0, 0, 0, 3)

    def test_from_corners_and_union(self):
        a = Box.from_corners(2, 3, 5, 7)
        assert a.to_list() == [2, 3, 3, 4]
        assert a.union(Box(10, 0, 1, 1)) == Box(2, 0, 9, 7)
        assert Box.from_list(a.to_list()) == a


class TestRuns:
    """Test maximal run extraction."""

    def test_runs(self):
        mask = np.array([0, 1, 1, 0, 0, 1, 0, 1], dtype=bool)
        assert runs(mask) == [(1, 3), (5, 6), (7, 8)]
        assert runs(np.zeros(4, dtype=bool)) == []
        assert runs(np.array([], dtype=bool)) == []


class TestSplitLines:
    """Test line separation by row projection."""

    def test_two_lines(self):
        """Test two glyph rows separated by ten blank rows."""
        field = blocks_mask(50, 60, [(2, 5, 12, 15), (20, 5, 30, 15), (2, 25, 40, 35)])
        lines = split_lines(field, min_gap=3)
        assert len(lines) == 2
        assert lines[0] == Box.from_corners(2, 5, 30, 15)
        assert lines[1] == Box.from_corners(2, 25, 40, 35)

    def test_all_background(self):
        assert split_lines(blocks_mask(20, 20, [])) == []

    def test_close_bands_joined(self):
        """Test bands closer than min_gap form one line."""
        field = blocks_mask(40, 40, [(0, 5, 10, 15), (0, 16, 10, 26)])
        assert len(split_lines(field, min_gap=3)) == 1

    def test_umlaut_dots_attach_to_line(self):
        """Test a short band just above a line joins it."""
        field = blocks_mask(40, 60, [(5, 3, 7, 5), (9, 3, 11, 5), (2, 8, 40, 28)])
        lines = split_lines(field, min_gap=2)
        assert len(lines) == 1
        assert lines[0].y == 3

    def test_isolated_short_band_dropped(self):
        """Test a thin band far from any line is treated as noise."""
        field = blocks_mask(80, 60, [(2, 5, 40, 25), (2, 70, 40, 72)])
        lines = split_lines(field, min_gap=2)
        assert len(lines) == 1
        assert lines[0].y == 5


class TestSplitStrings:
    """Test string separation by column gaps."""

    def test_two_words(self):
        """Test a word gap four times the character gap splits the line."""
        blocks = []
        x = 0
        for i in range(6):
            blocks.append((x, 0, x + 6, 20))
            x += 6 + (12 if i == 2 else 3)
        strings = split_strings(blocks_mask(20, x, blocks))
        assert len(strings) == 2
        assert strings[0] == Box.from_corners(0, 0, 24, 20)

    def test_single_word(self):
        blocks = [(i * 9, 0, i * 9 + 6, 20) for i in range(6)]
        assert len(split_strings(blocks_mask(20, 60, blocks))) == 1

    def test_empty_line(self):
        assert split_strings(blocks_mask(20, 30, [])) == []

    def test_line_height_floor(self):
        """Test uniform wide spacing alone does not split letters."""
        blocks = [(0, 0, 6, 20), (12, 0, 18, 20), (24, 0, 30, 20)]
        assert len(split_strings(blocks_mask(20, 30, blocks))) == 1


class TestTraceContours:
    """Test border following against a flood-fill oracle."""

    def test_solid_block(self):
        comps = trace_contours(blocks_mask(10, 10, [(2, 3, 6, 8)]))
        assert len(comps) == 1
        assert comps[0].box == Box(2, 3, 4, 5)
        assert comps[0].area == 20

    def test_edge_touching_component(self):
        """Test components on the image border are traced fully."""
        comps = trace_contours(blocks_mask(6, 6, [(0, 0, 6, 2)]))
        assert [c.box for c in comps] == [Box(0, 0, 6, 2)]

    def test_component_in_hole(self):
        """Test a component inside another's hole is reported separately."""
        mask = np.zeros((11, 11), dtype=bool)
        mask[0:11, 0:11] = True
        mask[2:9, 2:9] = False
        mask[4:7, 4:7] = True
        comps = trace_contours(BinaryImage(mask))
        assert sorted(c.box.to_list() for c in comps) == [[0, 0, 11, 11], [4, 4, 3, 3]]

    def test_area_excludes_component_in_hole(self):
        """Test the ring's area and mask leave out the block nested in its hole."""
        mask = np.zeros((11, 11), dtype=bool)
        mask[0:11, 0:11] = True
        mask[2:9, 2:9] = False
        mask[4:7, 4:7] = True
        ring, block = sorted(trace_contours(BinaryImage(mask)), key=lambda c: -c.box.w)
        assert ring.area == 121 - 49
        assert block.area == 9
        assert not ring.mask[4:7, 4:7].any()
        assert ring.mask[1, 1:10].all() and ring.mask[9, 1:10].all()

    def test_masks_partition_foreground(self):
        """Test component masks cover every foreground pixel exactly once."""
        rng = np.random.default_rng(11)
        for _ in range(50):
            mask = rng.random((20, 24)) < 0.45
            coverage = np.zeros(mask.shape, dtype=int)
            for comp in trace_contours(BinaryImage(mask)):
                b = comp.box
                coverage[b.y:b.y2, b.x:b.x2] += comp.mask
                assert comp.area == int(comp.mask.sum())
            assert np.array_equal(coverage, mask.astype(int))

    def test_diagonal_pixels_connected(self):
        """Test 8-connectivity."""
        mask = np.eye(5, dtype=bool)
        assert len(trace_contours(BinaryImage(mask))) == 1

    def test_empty(self):
        assert trace_contours(blocks_mask(5, 5, [])) == []

    @pytest.mark.slow
    def test_random_masks_match_flood_fill(self):
        """Test component count and boxes equal scipy's 8-connected labelling."""
        from scipy import ndimage

        rng = np.random.default_rng(2024)
        for _ in range(1000):
            h, w = rng.integers(3, 24, size=2)
            mask = rng.random((h, w)) < rng.uniform(0.1, 0.6)
            labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
            expected = sorted(
                [s[1].start, s[0].start, s[1].stop - s[1].start, s[0].stop - s[0].start]
                for s in ndimage.find_objects(labels)
            )
            comps = trace_contours(BinaryImage(mask))
            assert len(comps) == count
            assert sorted(c.box.to_list() for c in comps) == expected


class TestLocateChars:
    """Test grouping components into characters."""

    def test_diacritics_speckle_and_period(self):
        """Test umlaut dots merge, a speckle drops and a period survives."""
        string = blocks_mask(30, 50, [
            (0, 5, 10, 25),                    # A
            (13, 10, 23, 25),                  # body of an umlaut
            (15, 5, 17, 7), (19, 5, 21, 7),    # its dots
            (27, 15, 28, 16),                  # speckle
            (30, 22, 33, 25),                  # period on the baseline
            (36, 5, 46, 25),                   # B
        ])
        boxes = locate_chars(string)
        assert boxes == [Box(0, 5, 10, 20), Box(13, 5, 10, 20), Box(30, 22, 3, 3), Box(36, 5, 10, 20)]

    def test_floating_blob_dropped(self):
        """Test a small blob neither on the baseline nor dash-like is noise."""
        string = blocks_mask(30, 50, [(0, 5, 10, 25), (14, 2, 17, 5), (22, 5, 32, 25)])
        assert len(locate_chars(string)) == 2

    def test_dash_kept(self):
        string = blocks_mask(30, 50, [(0, 5, 10, 25), (13, 14, 20, 16), (23, 5, 33, 25)])
        assert len(locate_chars(string)) == 3

    def test_touching_glyphs_split_at_valley(self):
        """Test two glyphs joined by one pixel are cut apart."""
        string = blocks_mask(30, 50, [(0, 5, 10, 25), (11, 5, 21, 25), (10, 15, 11, 16),
                                      (24, 5, 34, 25), (37, 5, 47, 25)])
        boxes = locate_chars(string)
        assert boxes[:2] == [Box(0, 5, 10, 20), Box(11, 5, 10, 20)]
        assert len(boxes) == 4

    def test_wide_glyph_without_valley_kept(self):
        string = blocks_mask(30, 50, [(0, 5, 21, 25), (24, 5, 34, 25), (37, 5, 47, 25)])
        assert len(locate_chars(string)) == 3

    def test_line_reference(self):
        ref = line_reference([Box(0, 5, 10, 20), Box(12, 10, 10, 15), Box(30, 22, 3, 3)])
        assert ref.baseline == 25.0
        assert 15.0 <= ref.height <= 20.0
        assert line_reference([]) is None

    def test_extract_chars_shape_check(self):
        with pytest.raises(ValueError):
            extract_chars(blocks_mask(10, 10, []), GrayImage.filled(11, 10))

    def test_extract_chars_patches(self):
        """Test every character yields a 64x64 patch."""
        mask = blocks_mask(30, 40, [(2, 5, 12, 25), (16, 5, 26, 25)])
        gray = GrayImage(np.where(mask.data, 10, 230).astype(np.uint8))
        chars = extract_chars(mask, gray)
        assert len(chars) == 2
        assert all((p.width, p.height) == (64, 64) for _, p in chars)


def paint(mask, levels, background=200):
    """Gray image: background tone, each (x0, y0, x1, y1, level) block painted in."""
    gray = np.full(mask.data.shape, background, dtype=np.uint8)
    for x0, y0, x1, y1, level in levels:
        gray[y0:y1, x0:x1] = level
    return GrayImage(gray)


class TestSuppressNoise:
    """Test removal of faint blotches and speckle relative to the field's ink."""

    GLYPHS = [(2, 5, 12, 25, 40), (16, 5, 26, 25, 40)]

    def test_faint_blotch_cleared(self):
        """Test a blotch far lighter than the ink disappears and glyphs stay whole."""
        blocks = self.GLYPHS + [(32, 8, 38, 14, 175)]
        mask = blocks_mask(30, 44, [b[:4] for b in blocks])
        cleaned = suppress_noise(mask, paint(mask, blocks))
        assert not cleaned.data[8:14, 32:38].any()
        assert np.array_equal(cleaned.data[:, :28], mask.data[:, :28])

    def test_mid_gray_blotch_dropped_as_component(self):
        """Test a blotch passing the pixel gate is still too light as a whole."""
        blocks = self.GLYPHS + [(32, 8, 38, 14, 100)]
        mask = blocks_mask(30, 44, [b[:4] for b in blocks])
        cleaned = suppress_noise(mask, paint(mask, blocks))
        assert not cleaned.data[8:14, 32:38].any()
        assert len(trace_contours(cleaned)) == 2

    def test_speckle_relative_to_glyph_height(self):
        """Test an isolated 2x2 dot drops next to 20 px glyphs unless it sits over one."""
        blocks = self.GLYPHS + [(30, 20, 32, 22, 40), (6, 1, 8, 3, 40)]
        mask = blocks_mask(30, 44, [b[:4] for b in blocks])
        cleaned = suppress_noise(mask, paint(mask, blocks))
        assert not cleaned.data[20:22, 30:32].any()
        assert cleaned.data[1:3, 6:8].all()

    def test_period_kept(self):
        blocks = self.GLYPHS + [(29, 21, 33, 25, 40)]
        mask = blocks_mask(30, 44, [b[:4] for b in blocks])
        assert len(trace_contours(suppress_noise(mask, paint(mask, blocks)))) == 3

    def test_flat_image_unchanged(self):
        mask = blocks_mask(20, 20, [(5, 5, 10, 10)])
        cleaned = suppress_noise(mask, GrayImage.filled(20, 20, 128))
        assert np.array_equal(cleaned.data, mask.data)

    def test_ink_reference(self):
        blocks = self.GLYPHS + [(32, 8, 38, 14, 100)]
        mask = blocks_mask(30, 44, [b[:4] for b in blocks])
        ref = ink_reference(trace_contours(mask), paint(mask, blocks), 200)
        assert ref.darkness == 160.0
        assert ref.height == 20.0

    def test_shape_check(self):
        with pytest.raises(ValueError):
            suppress_noise(blocks_mask(10, 10, []), GrayImage.filled(11, 10))


def ground_truth_count(text):
    return sum(1 for c in text if not c.isspace())


class TestSegmentField:
    """Test the whole-field pipeline on rendered fields."""

    def test_blank_field(self):
        result = segment_field(GrayImage.filled(120, 40, 200))
        assert result.char_count == 0
        assert result.flat_chars() == []

    @pytest.mark.parametrize("text,lengths", [
        ("AB 12", [2, 2]),
        ("01.01.1990", [10]),
        ("HX4071", [6]),
    ])
    def test_rendered_round_trip(self, generator, clean_params, text, lengths):
        """Test clean renders segment into the ground-truth strings."""
        for seed in range(3):
            sample = generator.render_text_field(text, clean_params, seed)
            result = segment_field(sample.image)
            assert result.string_lengths() == lengths
            assert len(result.lines) == 1

    def test_nesting(self, generator, clean_params):
        """Test chars lie within strings and strings within lines."""
        sample = generator.render_text_field("AB 12", clean_params, 4)
        result = segment_field(sample.image)
        for line, strings, chars in zip(result.lines, result.strings, result.chars):
            for string, string_chars in zip(strings, chars):
                assert line.contains(string)
                assert all(string.contains(c.box) for c in string_chars)
                xs = [c.box.x for c in string_chars]
                assert xs == sorted(xs)

    def test_nesting_on_generated_fields(self, generator, source_params, pseudo_real_params):
        """Test strict nesting, x order and determinism on random generated fields."""
        for index in range(60):
            rng = rng_for(7, "nesting", index)
            _, text, _ = sample_field("all", rng)
            params = pseudo_real_params if index % 2 else source_params
            image = generator.render_text_field(text, params, int(rng.integers(2**63))).image
            result = segment_field(image)
            for line, strings, chars in zip(result.lines, result.strings, result.chars):
                assert line.within(image.width, image.height)
                for string, string_chars in zip(strings, chars):
                    assert line.contains(string)
                    assert all(string.contains(c.box) for c in string_chars)
                    xs = [c.box.x for c in string_chars]
                    assert xs == sorted(xs)
            assert segment_field(image).to_dict() == result.to_dict()

    @pytest.mark.parametrize("text", ["ä", "i", "ß", "Ü", "j"])
    @pytest.mark.parametrize("style", ["source", "pseudo_real"])
    def test_single_glyph_fields(self, generator, source_params, pseudo_real_params, text, style):
        """Test a multi-part or dotted glyph comes out as one character at default params."""
        params = source_params if style == "source" else pseudo_real_params
        hits = sum(
            segment_field(generator.render_text_field(text, params, seed).image).char_count == 1
            for seed in range(40)
        )
        assert hits >= 38

    @pytest.mark.parametrize("style", ["source", "pseudo_real"])
    def test_ten_in_order(self, generator, source_params, pseudo_real_params, style):
        """Test '10' yields two characters with the '1' box left of the '0' box."""
        params = source_params if style == "source" else pseudo_real_params
        hits = 0
        for seed in range(40):
            sample = generator.render_text_field("10", params, seed)
            chars = segment_field(sample.image).flat_chars()
            if len(chars) != 2:
                continue
            one, zero = sample.boxes
            assert abs(chars[0].box.center[0] - one.center[0]) < abs(chars[0].box.center[0] - zero.center[0])
            assert abs(chars[1].box.center[0] - zero.center[0]) < abs(chars[1].box.center[0] - one.center[0])
            hits += 1
        assert hits >= 38

    @pytest.mark.slow
    @pytest.mark.parametrize("style", ["source", "pseudo_real"])
    def test_date_field_count(self, generator, source_params, pseudo_real_params, style):
        """Test '01.01.1990' gives ten boxes for at least 95% of seeds."""
        params = source_params if style == "source" else pseudo_real_params
        hits = sum(
            segment_field(generator.render_text_field("01.01.1990", params, seed).image).char_count == 10
            for seed in range(200)
        )
        assert hits >= 190

    @pytest.mark.slow
    @pytest.mark.integration
    def test_pseudo_real_round_trip(self, generator, pseudo_real_params):
        """Test 500 pseudo-real ID fields keep their character count for at least 95%."""
        hits = 0
        for index in range(500):
            rng = rng_for(0, "segmentation-round-trip", index)
            _, text, _ = sample_field("all", rng)
            sample = generator.render_text_field(text, pseudo_real_params, int(rng.integers(2**63)))
            hits += segment_field(sample.image).char_count == ground_truth_count(text)
        assert hits >= 475

    def test_to_dict(self, generator, clean_params):
        sample = generator.render_text_field("AB 12", clean_params, 1)
        data = segment_field(sample.image).to_dict()
        assert data["char_count"] == 4
        assert len(data["lines"][0]["strings"]) == 2

    def test_config_validation(self):
        """Test every bad parameter is named."""
        with pytest.raises(ValueError) as exc_info:
            SegmentConfig(window=4, gap_factor=0)
        assert "window" in str(exc_info.value)
        assert "gap_factor" in str(exc_info.value)
