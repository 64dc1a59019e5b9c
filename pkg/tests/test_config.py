"""
Test suite for run configuration.

Tests defaults, the file < environment < override precedence, problem
collection and the resolved-config record.
"""

import pytest
from pathlib import Path

# Add src to path for imports
import sys
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.config import RunConfig, deep_merge, env_overrides, load_config
from src.idocr.errors import ConfigError
from src.idocr.utils import read_json

REPO_ROOT = Path(__file__).parent.parent


@pytest.fixture
def toml_file(tmp_path):
    def write(text):
        path = tmp_path / "run.toml"
        path.write_text(text, encoding="utf-8")
        return path
    return write


class TestDefaults:
    """Test the built-in configuration."""

    def test_defaults(self):
        config = load_config(environ={}, check_paths=False)
        assert config.seed == 0
        assert config.model == "cifarnet-like"
        assert config.class_set == "all"
        assert config.train.epochs == 10
        assert config.bootstrap.synthetic_share(0) == 0.5
        assert config.gen.style == "source"
        assert config.gen_pseudo_real.style == "pseudo_real"

    def test_repository_configs_valid(self, monkeypatch):
        monkeypatch.chdir(REPO_ROOT)
        default = load_config(REPO_ROOT / "config" / "default.toml", environ={})
        desk = load_config(REPO_ROOT / "config" / "desk36.toml", environ={})
        assert default.class_set == "all"
        assert desk.class_set == "desk36"
        assert desk.model == "lenet-like"
        assert desk.bootstrap.fine_tune.fine_tune

    def test_full_desk_config(self, monkeypatch):
        """Test the full desk configuration carries the experiment's sizes."""
        monkeypatch.chdir(REPO_ROOT)
        full = load_config(REPO_ROOT / "config" / "desk36-full.toml", environ={})
        assert full.class_set == "desk36"
        assert full.model == "cifarnet-like"
        assert full.corpus.chars == {"train": 2000, "test": 200}
        assert (full.bootstrap.stages, full.bootstrap.quota) == (4, 2000)
        assert full.train.epochs == 10

    def test_corpus_dir(self):
        config = load_config(environ={}, check_paths=False, overrides={"paths": {"corpora": "/tmp/c"}})
        assert config.corpus_dir("chars-source") == Path("/tmp/c/chars-source")


class TestPrecedence:
    """Test file, environment and override layering."""

    def test_file_then_env_then_overrides(self, toml_file):
        path = toml_file("seed = 1\n[train]\nepochs = 5\nbatch_size = 16\n")
        env = {"IDOCR_SEED": "2", "IDOCR_TRAIN__EPOCHS": "7"}

        from_file = load_config(path, environ={}, check_paths=False)
        assert (from_file.seed, from_file.train.epochs) == (1, 5)

        from_env = load_config(path, environ=env, check_paths=False)
        assert (from_env.seed, from_env.train.epochs) == (2, 7)
        assert from_env.train.batch_size == 16

        overridden = load_config(path, environ=env, overrides={"seed": 3, "threads": None},
                                 check_paths=False)
        assert overridden.seed == 3
        assert overridden.threads == 0

    def test_env_values_parsed(self):
        overrides = env_overrides({
            "IDOCR_TRAIN__EPOCHS": "3",
            "IDOCR_CLASS_SET": "desk36",
            "IDOCR_TRAIN__LR_DECAY_AT": "[0.3, 0.6]",
            "HOME": "/root",
        })
        assert overrides == {
            "train": {"epochs": 3, "lr_decay_at": [0.3, 0.6]},
            "class_set": "desk36",
        }

    def test_deep_merge(self):
        base = {"a": 1, "b": {"c": 2, "d": 3}}
        assert deep_merge(base, {"b": {"c": 9}, "e": 4}) == {"a": 1, "b": {"c": 9, "d": 3}, "e": 4}
        assert base["b"]["c"] == 2


class TestValidation:
    """Test problem reporting."""

    def test_all_problems_collected(self, toml_file):
        path = toml_file('model = "vgg"\nclass_set = "greek"\nthreads = -1\n[train]\nepochs = -2\n')
        with pytest.raises(ConfigError) as exc_info:
            load_config(path, environ={}, check_paths=False)
        problems = " ".join(exc_info.value.problems)
        assert len(exc_info.value.problems) >= 4
        for name in ("model", "class_set", "threads", "train"):
            assert name in problems

    def test_unknown_key_rejected(self, toml_file):
        with pytest.raises(ConfigError, match="epoch"):
            load_config(toml_file("[train]\nepoch = 3\n"), environ={}, check_paths=False)

    def test_missing_input_files(self, tmp_path, toml_file):
        path = toml_file(f'[paths]\nfonts = "{tmp_path / "none.toml"}"\nrules = "{tmp_path / "no.toml"}"\n')
        with pytest.raises(ConfigError) as exc_info:
            load_config(path, environ={})
        assert [p.split(":")[0] for p in exc_info.value.problems] == ["paths.fonts", "paths.rules"]

        config = load_config(path, environ={}, check_paths=False)
        assert config.paths.fonts == tmp_path / "none.toml"

    def test_path_problems_join_validation_problems(self, tmp_path, toml_file):
        path = toml_file(f'seed = "x"\n[paths]\nfonts = "{tmp_path / "none.toml"}"\n')
        with pytest.raises(ConfigError) as exc_info:
            load_config(path, environ={})
        problems = exc_info.value.problems
        assert any(p.startswith("seed") for p in problems)
        assert any(p.startswith("paths.fonts") for p in problems)

    def test_invalid_toml(self, toml_file):
        with pytest.raises(ConfigError, match="invalid TOML"):
            load_config(toml_file("seed = = 1\n"), environ={})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read configuration"):
            load_config(tmp_path / "nothing.toml", environ={})


class TestResolvedConfig:
    """Test the record written beside outputs."""

    def test_write_resolved(self, tmp_path):
        config = load_config(environ={"IDOCR_SEED": "42"}, check_paths=False)
        path = config.write_resolved(tmp_path / "out")
        assert path.name == "config.resolved.json"
        data = read_json(path)
        assert data["seed"] == 42
        assert RunConfig.model_validate(data).model_dump() == config.model_dump()
