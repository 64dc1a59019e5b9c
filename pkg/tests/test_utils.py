"""
Test suite for utility functions.

Tests logger setup, the progress logger, the ordered worker pool and the
deterministic JSON and TOML helpers.
"""

import logging
import threading
import time

import pytest
import numpy as np
from pathlib import Path
from unittest.mock import Mock, patch

# Add src to path for imports
import sys
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.utils import (
    ProgressLogger,
    dumps,
    get_logger,
    load_toml,
    loads_toml,
    ordered_map,
    read_json,
    read_jsonl,
    resolve_threads,
    setup_logger,
    write_json,
    write_jsonl,
)


class TestLoggerSetup:
    """Test centralized logging configuration."""

    def test_console_and_file_handlers(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        logger = setup_logger("idocr-test", log_level="WARNING", log_file=str(log_file))
        assert logger.level == logging.WARNING
        assert len(logger.handlers) == 2
        assert not logger.propagate
        logger.warning("written to file")
        for handler in logger.handlers:
            handler.flush()
        assert "written to file" in log_file.read_text(encoding="utf-8")

    def test_debug_overrides_level(self):
        logger = setup_logger("idocr-test-debug", log_level="ERROR", debug=True)
        assert logger.level == logging.DEBUG

    def test_repeated_setup_replaces_handlers(self):
        setup_logger("idocr-test-repeat")
        logger = setup_logger("idocr-test-repeat")
        assert len(logger.handlers) == 1

    def test_get_logger_namespaces(self):
        assert get_logger("segment").name == "idocr.segment"
        assert get_logger("idocr.ocr").name == "idocr.ocr"
        assert get_logger().name == "idocr"


class TestProgressLogger:
    """Test progress reporting."""

    def test_operation_lifecycle(self):
        """Test start, progress and completion records carry structured fields."""
        logger = Mock()
        progress = ProgressLogger(logger)
        progress.start_operation("mine_patches", 3)
        for i in range(3):
            progress.advance("mine_patches", 3, f"field {i}")
        duration = progress.complete_operation("mine_patches", 3, 2, 1, mined=12)

        calls = logger.log.call_args_list
        assert [c.kwargs["extra"]["event_type"] for c in calls] == (
            ["operation_start"] + ["progress"] * 3 + ["operation_complete"]
        )
        assert calls[0].kwargs["extra"]["total_items"] == 3
        assert calls[1].args[0] == logging.INFO

        level, message = calls[-1].args
        assert level == logging.WARNING
        assert "2/3 ok, 1 failed" in message
        assert calls[-1].kwargs["extra"]["mined"] == 12
        assert duration is not None and duration >= 0

    def test_every_n_updates(self):
        """Test only every n-th update and the final one are logged."""
        logger = Mock()
        progress = ProgressLogger(logger, every=4)
        for _ in range(10):
            progress.advance("render", 10)
        completed = [c.kwargs["extra"]["completed"] for c in logger.log.call_args_list]
        assert completed == [4, 8, 10]

    def test_advance_is_thread_safe(self):
        progress = ProgressLogger(Mock(), every=1000)
        threads = [threading.Thread(target=lambda: [progress.advance("x", 4000) for _ in range(1000)])
                   for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert progress.completed == 4000

    def test_complete_without_start(self):
        logger = Mock()
        assert ProgressLogger(logger).complete_operation("x", 1, 1) is None
        assert logger.log.call_args.args[0] == logging.INFO


class TestOrderedMap:
    """Test the ordered worker pool."""

    def test_order_preserved_under_uneven_work(self):
        def slow_for_small(x):
            time.sleep(0.001 * (10 - x))
            return x * x

        assert ordered_map(slow_for_small, range(10), threads=4) == [x * x for x in range(10)]

    def test_serial_equals_parallel(self):
        items = list(range(50))
        assert ordered_map(str, items, 1) == ordered_map(str, items, 8)

    def test_empty(self):
        assert ordered_map(str, [], 4) == []

    def test_exceptions_propagate(self):
        def fail(x):
            raise ValueError(f"bad {x}")

        with pytest.raises(ValueError):
            ordered_map(fail, [1, 2], threads=2)

    def test_resolve_threads(self):
        with patch("os.cpu_count", return_value=6):
            assert resolve_threads(0) == 6
            assert resolve_threads(None) == 6
        assert resolve_threads(3) == 3


class TestJsonIO:
    """Test deterministic serialization."""

    def test_sorted_compact(self):
        assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_numpy_and_paths(self):
        data = {"n": np.int64(3), "f": np.float32(0.5), "arr": np.arange(3), "p": Path("a/b"),
                "s": {3, 1}}
        assert dumps(data) == '{"arr":[0,1,2],"f":0.5,"n":3,"p":"a/b","s":[1,3]}'

    def test_unsupported_type(self):
        with pytest.raises(TypeError):
            dumps({"x": object()})

    def test_json_files(self, tmp_path):
        write_json({"b": "ü", "a": 1}, tmp_path / "d" / "x.json")
        text = (tmp_path / "d" / "x.json").read_text(encoding="utf-8")
        assert text == '{\n  "a": 1,\n  "b": "ü"\n}\n'
        assert read_json(tmp_path / "d" / "x.json") == {"a": 1, "b": "ü"}

    def test_jsonl_files(self, tmp_path):
        rows = [{"i": i} for i in range(3)]
        assert write_jsonl(rows, tmp_path / "rows.jsonl") == 3
        (tmp_path / "rows.jsonl").write_text(
            (tmp_path / "rows.jsonl").read_text(encoding="utf-8") + "\n\n", encoding="utf-8")
        assert read_jsonl(tmp_path / "rows.jsonl") == rows


class TestToml:
    """Test TOML loading."""

    def test_load(self, tmp_path):
        path = tmp_path / "x.toml"
        path.write_text('seed = 3\n[train]\nepochs = 2\n', encoding="utf-8")
        assert load_toml(path) == {"seed": 3, "train": {"epochs": 2}}

    def test_invalid(self):
        with pytest.raises(ValueError):
            loads_toml("seed = = 1")
