"""能量壓縮診斷：資料集平均尾部比例曲線與 α 估計。"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd

from tailbound.bounds.tails import TransformedDataset
from tailbound.config.constants import DEFAULT_P_VALUES
from tailbound.exceptions import InvalidParameterError
from tailbound.logging_config import get_logger
from tailbound.transform.loss import usable_rows

logger = get_logger("analytics.compaction")


@dataclass
class CompactionReport:
    """R̄^{(ℓ,d)}（ℓ = 0..d）與各 p 的 α̂_p。"""

    mean_tail_ratio: np.ndarray
    alpha_p: dict[float, float]
    alpha_hat: float
    n_vectors: int
    excluded_p: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return int(self.mean_tail_ratio.shape[0]) - 1

    @property
    def predicted_fraction(self) -> float:
        """1/α̂：預期處理的維度比例。"""
        if self.alpha_hat == math.inf:
            return 0.0
        return 1.0 / max(self.alpha_hat, 1.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "ell": np.arange(self.dim + 1, dtype=np.int64),
            "mean_tail_ratio": self.mean_tail_ratio,
        })

    def summary_line(self) -> str:
        parts = [f"alpha_{p:g}={a:.6g}" for p, a in self.alpha_p.items()]
        parts.append(f"alpha_hat={self.alpha_hat:.6g}")
        parts.append(f"predicted_fraction={self.predicted_fraction:.6g}")
        return "# " + " ".join(parts)

    def to_csv(self, target: str | Path | IO[str]) -> None:
        """寫出 ell,mean_tail_ratio 兩欄 CSV，最後附一行 `#` 開頭的摘要。"""
        body = self.to_frame().to_csv(index=False, lineterminator="\n")
        text = body + self.summary_line() + "\n"
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        else:
            target.write(text)

    def __str__(self) -> str:
        lines = [
            f"\n{'=' * 50}",
            "  能量壓縮報告",
            f"{'=' * 50}",
            f"  向量數:          {self.n_vectors:>10d}",
            f"  維度 d:          {self.dim:>10d}",
        ]
        for p, a in self.alpha_p.items():
            lines.append(f"  α_{p:<5g}         {a:>10.4f}")
        lines.append(f"  α̂:              {self.alpha_hat:>10.4f}")
        lines.append(f"  預期處理比例:    {self.predicted_fraction * 100:>9.2f}%")
        lines.append("=" * 50)
        return "\n".join(lines)


def mean_tail_curve(coeffs) -> np.ndarray:
    """每個向量的 R^{(ℓ,d)}/R^{(0,d)} 先對資料集取平均，長度 d+1。"""
    x = usable_rows(coeffs)
    sq = np.square(x)
    n, d = sq.shape
    suffix = np.zeros((n, d + 1), dtype=np.float64)
    suffix[:, :d] = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]
    ratios = suffix / suffix[:, :1]
    curve = ratios.mean(axis=0)
    curve[0], curve[d] = 1.0, 0.0
    # 浮點累加可能造成極小的非單調
    return np.minimum.accumulate(curve)


def _alpha_at(curve: np.ndarray, p: float) -> float:
    """α_p = −(1/p)·ln R̄(pd)；pd 非整數時在 log 域線性內插。"""
    d = curve.shape[0] - 1
    pos = p * d
    lo = int(math.floor(pos))
    hi = min(lo + 1, d)
    if curve[lo] <= 0.0 or (pos > lo and curve[hi] <= 0.0):
        return math.inf
    frac = pos - lo
    log_r = math.log(curve[lo]) if frac == 0.0 else (1 - frac) * math.log(curve[lo]) + frac * math.log(curve[hi])
    return -log_r / p


def estimate_alpha(data, p_values: Sequence[float] = DEFAULT_P_VALUES) -> CompactionReport:
    """由轉換後係數估計壓縮參數 α。

    data 可為 TransformedDataset 或已轉換的 (N, d) 係數矩陣。
    α_p 為 +∞（該處尾部能量為 0）時回報但不納入平均。
    """
    if len(p_values) == 0:
        raise InvalidParameterError("p_values 不可為空")
    for p in p_values:
        if not 0.0 < p < 1.0:
            raise InvalidParameterError(f"p 必須落在 (0, 1)，收到 {p}")

    coeffs = data.coeffs if isinstance(data, TransformedDataset) else np.asarray(data)
    if coeffs.ndim != 2 or coeffs.shape[0] == 0:
        raise InvalidParameterError("estimate_alpha 需要非空的 (N, d) 資料")

    usable = usable_rows(coeffs)
    curve = mean_tail_curve(usable)
    alpha_p = {float(p): _alpha_at(curve, float(p)) for p in p_values}
    excluded = [p for p, a in alpha_p.items() if not math.isfinite(a)]
    for p in excluded:
        logger.warning("p=%g 處尾部能量為 0（完全壓縮），α_p = +∞，不納入 α̂ 平均", p)

    finite = [a for a in alpha_p.values() if math.isfinite(a)]
    alpha_hat = float(np.mean(finite)) if finite else math.inf
    logger.debug("α 估計: %s → α̂=%.4f", alpha_p, alpha_hat)
    return CompactionReport(
        mean_tail_ratio=curve,
        alpha_p=alpha_p,
        alpha_hat=alpha_hat,
        n_vectors=int(usable.shape[0]),
        excluded_p=excluded,
    )
