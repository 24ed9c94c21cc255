"""配置模組測試。"""

import pytest

from tailbound.bounds.levels import LevelSpec
from tailbound.config.constants import EngineVariant, IndexKind, SearchMode, VectorFormat
from tailbound.config.settings import (
    EngineConfig,
    IndexConfig,
    LevelConfig,
    Settings,
    TrainConfig,
    parse_key_value,
)
from tailbound.exceptions import ConfigError


class TestConstants:
    def test_enum_values(self):
        assert EngineVariant.BATCH_UB.value == "batch_ub"
        assert SearchMode.PROGRESSIVE.value == "progressive"
        assert IndexKind("hnsw") == IndexKind.HNSW
        assert VectorFormat("bvecs") == VectorFormat.BVECS


class TestSettingsDefaults:
    def test_defaults(self):
        s = Settings()
        assert s.engine.variant == EngineVariant.BATCH_NOUB
        assert s.engine.batch_size == 256
        assert s.levels.n_levels == 32
        assert s.bench.k == 10
        assert s.train.alpha_target == pytest.approx(8.0)

    def test_level_config_caps_at_dimension(self):
        spec = LevelConfig(n_levels=32).spec(8)
        assert spec == LevelSpec.equal_width(8, 8)
        assert LevelConfig(per_dimension=True).spec(5).n_levels == 5


class TestSettingsLoad:
    def test_yaml(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(
            "engine:\n  variant: batch_ub\n  batch_size: 64\nindex:\n  kind: hnsw\n  ef_search: 20\n",
            encoding="utf-8",
        )
        s = Settings.load(path)
        assert s.engine.variant == EngineVariant.BATCH_UB
        assert s.engine.batch_size == 64
        assert s.index.kind == IndexKind.HNSW
        assert s.index.ef_search == 20

    def test_key_value_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# 註解\nnlist=16\nnprobe=4\nk=5\nseed=9\nengine.prune_slack=0\n", encoding="utf-8")
        s = Settings.load(path)
        assert s.index.n_list == 16
        assert s.index.n_probe == 4
        assert s.bench.k == 5
        assert s.train.seed == s.index.seed == s.bench.seed == 9
        assert s.engine.prune_slack == 0

    def test_missing_explicit_file(self, tmp_path):
        with pytest.raises(ConfigError):
            Settings.load(tmp_path / "nope.yaml")

    def test_point_centric_defaults_batch_one(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text("engine:\n  variant: point_centric\n", encoding="utf-8")
        assert Settings.load(path).engine.batch_size == 1

    def test_env_log_level(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TAILBOUND_LOG_LEVEL", "DEBUG")
        path = tmp_path / "cfg.yaml"
        path.write_text("logging:\n  level: WARNING\n", encoding="utf-8")
        assert Settings.load(path).logging.level == "DEBUG"


class TestParseKeyValue:
    def test_list_values(self):
        cfg = parse_key_value("bench.nprobe_grid=[1, 2, 4]\n")
        assert cfg["bench"]["nprobe_grid"] == [1, 2, 4]

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="未知"):
            parse_key_value("bogus=1")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_key_value("nlist 16")


class TestOverrides:
    def test_flags_override_file(self):
        s = Settings().with_overrides(nlist=128, k=3, levels=8, alpha_target=None)
        assert s.index.n_list == 128
        assert s.bench.k == 3
        assert s.levels.n_levels == 8
        assert s.train.alpha_target == pytest.approx(8.0)

    def test_variant_flag_sets_batch(self):
        s = Settings().with_overrides(variant="point_centric")
        assert s.engine.variant == EngineVariant.POINT_CENTRIC
        assert s.engine.batch_size == 1

    def test_unknown_flag(self):
        with pytest.raises(ConfigError):
            Settings().with_overrides(colour="red")

    def test_invalid_value(self):
        with pytest.raises(ConfigError):
            Settings().with_overrides(nlist=4, nprobe=8)


class TestValidation:
    def test_engine(self):
        with pytest.raises(ConfigError):
            EngineConfig(batch_size=0)
        with pytest.raises(ConfigError):
            EngineConfig(variant=EngineVariant.POINT_CENTRIC, batch_size=8)

    def test_train(self):
        with pytest.raises(ConfigError):
            TrainConfig(alpha_target=0)
        with pytest.raises(ConfigError):
            TrainConfig(train_fraction=0.8, val_fraction=0.3)

    def test_index(self):
        with pytest.raises(ConfigError):
            IndexConfig(n_list=4, n_probe=5)
        with pytest.raises(ConfigError):
            IndexConfig(m=1)

    def test_config_error_is_value_error(self):
        with pytest.raises(ValueError):
            LevelConfig(n_levels=0)
