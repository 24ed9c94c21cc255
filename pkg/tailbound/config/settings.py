"""配置管理：載入 .env 與 config 檔（YAML 或 key=value），合併為型別安全的 dataclass。"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any

import yaml
from dotenv import load_dotenv

from tailbound.config.constants import (
    DEFAULT_ALPHA_TARGET,
    DEFAULT_BATCH_SIZE,
    DEFAULT_GAMMA,
    DEFAULT_MAX_LEVELS,
    DEFAULT_PRUNE_SLACK,
    KMEANS_ITERATIONS,
    EngineVariant,
    IndexKind,
)
from tailbound.exceptions import ConfigError

if TYPE_CHECKING:
    from tailbound.bounds.levels import LevelSpec

# 專案根目錄
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent

# key=value 設定檔與 CLI flag 共用的扁平別名 → (section, key)
FLAT_ALIASES: dict[str, tuple[tuple[str, str], ...]] = {
    "nlist": (("index", "n_list"),),
    "nprobe": (("index", "n_probe"),),
    "efsearch": (("index", "ef_search"),),
    "ef_construction": (("index", "ef_construction"),),
    "m": (("index", "m"),),
    "k": (("bench", "k"),),
    "levels": (("levels", "n_levels"),),
    "batch": (("engine", "batch_size"),),
    "variant": (("engine", "variant"),),
    "alpha_target": (("train", "alpha_target"),),
    "workers": (("bench", "workers"),),
    "repetitions": (("bench", "repetitions"),),
    "n_queries": (("bench", "n_queries"),),
    "log_level": (("logging", "level"),),
    # seed 同時決定訓練、k-means / HNSW 層級與查詢抽樣
    "seed": (("train", "seed"), ("index", "seed"), ("bench", "seed")),
}


@dataclass(frozen=True)
class LoggingConfig:
    level: str = "INFO"
    file_enabled: bool = True
    log_dir: str = "data/logs"


@dataclass(frozen=True)
class LevelConfig:
    """refinement 層級切分。per_dimension=True 時每一維為一層。"""
    n_levels: int = DEFAULT_MAX_LEVELS
    per_dimension: bool = False

    def __post_init__(self) -> None:
        if self.n_levels < 1:
            raise ConfigError(f"levels 必須 >= 1，收到 {self.n_levels}")

    def spec(self, d: int) -> "LevelSpec":
        """依維度 d 產生 LevelSpec（層數上限為 d）。"""
        from tailbound.bounds.levels import LevelSpec

        if self.per_dimension:
            return LevelSpec.per_dimension(d)
        return LevelSpec.equal_width(d, min(d, self.n_levels))


@dataclass(frozen=True)
class TrainConfig:
    """Cayley 轉換訓練配置。"""
    alpha_target: float = DEFAULT_ALPHA_TARGET
    learning_rate: float = 0.001
    max_epochs: int = 100
    patience: int = 10
    lr_decay_factor: float = 0.5
    lr_decay_window: int = 5      # 驗證 loss 連續幾個 epoch 未改善就衰減學習率
    train_fraction: float = 0.30
    val_fraction: float = 0.10
    batch_size: int = 1024
    gamma: float = DEFAULT_GAMMA
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.alpha_target <= 0:
            raise ConfigError(f"alpha_target 必須 > 0，收到 {self.alpha_target}")
        if self.gamma <= 0:
            raise ConfigError(f"gamma 必須 > 0，收到 {self.gamma}")
        for name in ("train_fraction", "val_fraction"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ConfigError(f"{name} 必須落在 (0, 1]，收到 {value}")
        if self.train_fraction + self.val_fraction > 1.0 + 1e-12:
            raise ConfigError("train_fraction + val_fraction 不可超過 1")
        if self.max_epochs < 1 or self.patience < 1 or self.batch_size < 1:
            raise ConfigError("max_epochs / patience / batch_size 必須 >= 1")
        if not 0.0 < self.lr_decay_factor <= 1.0:
            raise ConfigError(f"lr_decay_factor 必須落在 (0, 1]，收到 {self.lr_decay_factor}")


@dataclass(frozen=True)
class EngineConfig:
    """refinement 引擎配置。point_centric 模式批次大小固定為 1。"""
    variant: EngineVariant = EngineVariant.BATCH_NOUB
    batch_size: int = DEFAULT_BATCH_SIZE
    prune_slack: float = DEFAULT_PRUNE_SLACK

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ConfigError(f"batch_size 必須 >= 1，收到 {self.batch_size}")
        if self.variant == EngineVariant.POINT_CENTRIC and self.batch_size != 1:
            raise ConfigError("point_centric 模式的 batch_size 必須為 1")
        if self.prune_slack < 0:
            raise ConfigError(f"prune_slack 不可為負，收到 {self.prune_slack}")


@dataclass(frozen=True)
class IndexConfig:
    kind: IndexKind = IndexKind.IVF
    n_list: int = 64
    n_probe: int = 8
    m: int = 16
    ef_construction: int = 40
    ef_search: int = 64
    kmeans_iterations: int = KMEANS_ITERATIONS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_list < 1 or self.n_probe < 1:
            raise ConfigError("n_list / n_probe 必須 >= 1")
        if self.n_probe > self.n_list:
            raise ConfigError(f"n_probe ({self.n_probe}) 不可大於 n_list ({self.n_list})")
        if self.m < 2 or self.ef_construction < 1 or self.ef_search < 1:
            raise ConfigError("m 必須 >= 2，ef_construction / ef_search 必須 >= 1")


@dataclass(frozen=True)
class BenchConfig:
    """benchmark 配置（查詢數、重複次數、sweep grid）。"""
    k: int = 10
    n_queries: int = 100
    repetitions: int = 5
    workers: int = 1
    seed: int = 0
    nprobe_grid: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64)
    efsearch_grid: tuple[int, ...] = (10, 20, 40, 80, 160)
    denoise_factor: float = 1.2
    speedup_samples: int = 5

    def __post_init__(self) -> None:
        if self.k < 1 or self.n_queries < 1 or self.workers < 1:
            raise ConfigError("k / n_queries / workers 必須 >= 1")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions 必須 >= 1，收到 {self.repetitions}")
        if self.denoise_factor <= 1.0:
            raise ConfigError(f"denoise_factor 必須 > 1，收到 {self.denoise_factor}")


@dataclass(frozen=True)
class Settings:
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    levels: LevelConfig = field(default_factory=LevelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    index: IndexConfig = field(default_factory=IndexConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    @classmethod
    def load(cls, config_path: str | Path | None = None) -> "Settings":
        """載入 .env 環境變數和設定檔（預設為專案根目錄的 config.yaml）。"""
        load_dotenv(PROJECT_ROOT / ".env")

        explicit = config_path is not None
        path = Path(config_path) if explicit else PROJECT_ROOT / "config.yaml"

        if not path.exists():
            if explicit:
                raise ConfigError(f"設定檔不存在: {path}")
            cfg: dict = {}
        else:
            text = path.read_text(encoding="utf-8")
            if path.suffix.lower() in (".yaml", ".yml"):
                cfg = yaml.safe_load(text) or {}
            else:
                cfg = parse_key_value(text)

        return cls.from_dict(cfg)

    @classmethod
    def from_dict(cls, cfg: dict) -> "Settings":
        try:
            return cls(
                logging=cls._load_logging(cfg.get("logging", {}) or {}),
                levels=cls._load_levels(cfg.get("levels", {}) or {}),
                train=cls._load_train(cfg.get("train", {}) or {}),
                engine=cls._load_engine(cfg.get("engine", {}) or {}),
                index=cls._load_index(cfg.get("index", {}) or {}),
                bench=cls._load_bench(cfg.get("bench", {}) or {}),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"設定值無效: {e}") from e

    def with_overrides(self, **flags: Any) -> "Settings":
        """以 CLI flag 覆寫設定（值為 None 的 flag 忽略）。"""
        sections: dict[str, dict[str, Any]] = {}
        for name, value in flags.items():
            if value is None:
                continue
            if name not in FLAT_ALIASES:
                raise ConfigError(f"未知的設定 flag: {name}")
            for section, key in FLAT_ALIASES[name]:
                sections.setdefault(section, {})[key] = value

        engine_over = sections.get("engine", {})
        if "variant" in engine_over:
            engine_over["variant"] = _as_variant(engine_over["variant"])
            if "batch_size" not in engine_over:
                engine_over["batch_size"] = _default_batch(engine_over["variant"], self.engine.batch_size)
        if "kind" in sections.get("index", {}):
            sections["index"]["kind"] = IndexKind(sections["index"]["kind"])

        try:
            updated = {
                section: replace(getattr(self, section), **values)
                for section, values in sections.items()
            }
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"flag 值無效: {e}") from e
        return replace(self, **updated)

    @staticmethod
    def _load_logging(cfg: dict) -> LoggingConfig:
        return LoggingConfig(
            level=os.getenv("TAILBOUND_LOG_LEVEL", cfg.get("level", "INFO")),
            file_enabled=cfg.get("file_enabled", True),
            log_dir=cfg.get("log_dir", "data/logs"),
        )

    @staticmethod
    def _load_levels(cfg: dict) -> LevelConfig:
        return LevelConfig(
            n_levels=int(cfg.get("n_levels", DEFAULT_MAX_LEVELS)),
            per_dimension=bool(cfg.get("per_dimension", False)),
        )

    @staticmethod
    def _load_train(cfg: dict) -> TrainConfig:
        return TrainConfig(
            alpha_target=float(cfg.get("alpha_target", DEFAULT_ALPHA_TARGET)),
            learning_rate=float(cfg.get("learning_rate", 0.001)),
            max_epochs=int(cfg.get("max_epochs", 100)),
            patience=int(cfg.get("patience", 10)),
            lr_decay_factor=float(cfg.get("lr_decay_factor", 0.5)),
            lr_decay_window=int(cfg.get("lr_decay_window", 5)),
            train_fraction=float(cfg.get("train_fraction", 0.30)),
            val_fraction=float(cfg.get("val_fraction", 0.10)),
            batch_size=int(cfg.get("batch_size", 1024)),
            gamma=float(cfg.get("gamma", DEFAULT_GAMMA)),
            seed=int(cfg.get("seed", 0)),
        )

    @staticmethod
    def _load_engine(cfg: dict) -> EngineConfig:
        variant = _as_variant(cfg.get("variant", EngineVariant.BATCH_NOUB.value))
        return EngineConfig(
            variant=variant,
            batch_size=int(cfg.get("batch_size", _default_batch(variant, DEFAULT_BATCH_SIZE))),
            prune_slack=float(cfg.get("prune_slack", DEFAULT_PRUNE_SLACK)),
        )

    @staticmethod
    def _load_index(cfg: dict) -> IndexConfig:
        return IndexConfig(
            kind=IndexKind(cfg.get("kind", IndexKind.IVF.value)),
            n_list=int(cfg.get("n_list", 64)),
            n_probe=int(cfg.get("n_probe", 8)),
            m=int(cfg.get("m", 16)),
            ef_construction=int(cfg.get("ef_construction", 40)),
            ef_search=int(cfg.get("ef_search", 64)),
            kmeans_iterations=int(cfg.get("kmeans_iterations", KMEANS_ITERATIONS)),
            seed=int(cfg.get("seed", 0)),
        )

    @staticmethod
    def _load_bench(cfg: dict) -> BenchConfig:
        return BenchConfig(
            k=int(cfg.get("k", 10)),
            n_queries=int(cfg.get("n_queries", 100)),
            repetitions=int(cfg.get("repetitions", 5)),
            workers=int(cfg.get("workers", 1)),
            seed=int(cfg.get("seed", 0)),
            nprobe_grid=tuple(int(v) for v in cfg.get("nprobe_grid", (1, 2, 4, 8, 16, 32, 64))),
            efsearch_grid=tuple(int(v) for v in cfg.get("efsearch_grid", (10, 20, 40, 80, 160))),
            denoise_factor=float(cfg.get("denoise_factor", 1.2)),
            speedup_samples=int(cfg.get("speedup_samples", 5)),
        )


def parse_key_value(text: str) -> dict:
    """解析 key=value 設定檔為巢狀 dict。

    支援 `section.key=value` 與扁平別名（nlist、nprobe、efsearch、k、levels、batch、
    alpha_target、seed ...）。值以 YAML 純量語法解析，因此 `[1, 2, 4]` 會得到 list。
    `#` 開頭為註解。
    """
    cfg: dict[str, dict[str, Any]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"設定檔第 {lineno} 行缺少 '=': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        parsed = yaml.safe_load(value) if value else None

        if "." in key:
            section, sub = key.split(".", 1)
            cfg.setdefault(section, {})[sub] = parsed
        elif key in FLAT_ALIASES:
            for section, sub in FLAT_ALIASES[key]:
                cfg.setdefault(section, {})[sub] = parsed
        else:
            raise ConfigError(f"設定檔第 {lineno} 行為未知的 key: {key}")
    return cfg


def _as_variant(value: Any) -> EngineVariant:
    try:
        return EngineVariant(value)
    except ValueError as e:
        valid = [v.value for v in EngineVariant]
        raise ConfigError(f"不支援的引擎模式: {value}，有效值: {valid}") from e


def _default_batch(variant: EngineVariant, current: int) -> int:
    if variant == EngineVariant.POINT_CENTRIC:
        return 1
    return current if current > 1 else DEFAULT_BATCH_SIZE
