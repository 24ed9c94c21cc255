"""LevelSpec：將轉換後係數切成連續的 refinement 層級。"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from tailbound.config.constants import DEFAULT_MAX_LEVELS
from tailbound.exceptions import ConfigError


@dataclass(frozen=True)
class LevelSpec:
    """層級門檻 0 = m_0 < m_1 < … < m_L = d。

    第 ℓ 層（1-indexed）涵蓋係數 [m_{ℓ-1}, m_ℓ)。
    """

    thresholds: tuple[int, ...]

    def __post_init__(self) -> None:
        t = tuple(int(v) for v in self.thresholds)
        object.__setattr__(self, "thresholds", t)
        if len(t) < 2:
            raise ConfigError("LevelSpec 至少需要兩個門檻 (0 與 d)")
        if t[0] != 0:
            raise ConfigError(f"LevelSpec 第一個門檻必須為 0，收到 {t[0]}")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ConfigError(f"LevelSpec 門檻必須嚴格遞增: {t}")

    @property
    def d(self) -> int:
        return self.thresholds[-1]

    @property
    def n_levels(self) -> int:
        """L：層數。"""
        return len(self.thresholds) - 1

    @cached_property
    def widths(self) -> np.ndarray:
        """w_ℓ = m_ℓ − m_{ℓ−1}，長度 L（index 0 對應第 1 層）。"""
        return np.diff(np.asarray(self.thresholds, dtype=np.int64))

    def span(self, level: int) -> tuple[int, int]:
        """第 level 層（1..L）的係數區間 [start, stop)。"""
        if not 1 <= level <= self.n_levels:
            raise ConfigError(f"level 必須落在 [1, {self.n_levels}]，收到 {level}")
        return self.thresholds[level - 1], self.thresholds[level]

    @classmethod
    def equal_width(cls, d: int, n_levels: int) -> "LevelSpec":
        """L 個等寬層級，餘數併入最後一層。"""
        if d < 1:
            raise ConfigError(f"維度必須 >= 1，收到 {d}")
        if not 1 <= n_levels <= d:
            raise ConfigError(f"層數必須落在 [1, {d}]，收到 {n_levels}")
        width = d // n_levels
        return cls(tuple(i * width for i in range(n_levels)) + (d,))

    @classmethod
    def per_dimension(cls, d: int) -> "LevelSpec":
        return cls.equal_width(d, d)

    @classmethod
    def default(cls, d: int) -> "LevelSpec":
        """預設 L = min(d, 32) 個等寬層級。"""
        return cls.equal_width(d, min(d, DEFAULT_MAX_LEVELS))
