"""QPS–recall Pareto 前緣、denoise 與固定 recall 下的加速比。"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from tailbound.exceptions import InvalidParameterError

Point = tuple[float, float]   # (recall, qps)


def _by_recall_desc(points: Sequence[Point]) -> list[Point]:
    # 同 recall 時 QPS 高者優先
    return sorted(((float(r), float(q)) for r, q in points), key=lambda p: (-p[0], -p[1]))


def pareto_frontier(points: Sequence[Point]) -> list[Point]:
    """保留不被支配的點（沒有其他點 recall 與 QPS 皆不差且至少一項更好），依 recall 遞減。"""
    frontier: list[Point] = []
    best_qps = -np.inf
    for recall, qps in _by_recall_desc(points):
        if qps > best_qps:
            frontier.append((recall, qps))
            best_qps = qps
    return frontier


def pareto_denoise(points: Sequence[Point], factor: float = 1.2) -> list[Point]:
    """由高 recall 往低走，QPS 至少為上一個保留點的 factor 倍才保留；第一點必留。"""
    if factor <= 1.0:
        raise InvalidParameterError(f"factor 必須 > 1，收到 {factor}")
    kept: list[Point] = []
    for recall, qps in _by_recall_desc(points):
        if not kept or qps >= factor * kept[-1][1]:
            kept.append((recall, qps))
    return kept


def _curve(points: Sequence[Point], name: str) -> PchipInterpolator:
    by_recall: dict[float, float] = {}
    for recall, qps in points:
        by_recall[float(recall)] = max(float(qps), by_recall.get(float(recall), -np.inf))
    if len(by_recall) < 2:
        raise InvalidParameterError(f"{name} 曲線至少需要兩個不同的 recall 值")
    xs = np.array(sorted(by_recall))
    return PchipInterpolator(xs, np.array([by_recall[x] for x in xs]))


def speedup_at_recall(
    baseline_points: Sequence[Point],
    pruned_points: Sequence[Point],
    n_samples: int = 5,
) -> list[Point]:
    """在兩條曲線共同的 recall 範圍取 n_samples 個等距點，回傳 (recall, QPS 比值)。

    兩條曲線各以 PCHIP（單調分段三次）內插。
    """
    if n_samples < 1:
        raise InvalidParameterError(f"n_samples 必須 >= 1，收到 {n_samples}")
    base = _curve(baseline_points, "baseline")
    pruned = _curve(pruned_points, "pruned")
    lo = max(base.x[0], pruned.x[0])
    hi = min(base.x[-1], pruned.x[-1])
    if lo > hi:
        raise InvalidParameterError(f"兩條曲線沒有共同的 recall 範圍 ({lo:.4f} > {hi:.4f})")
    grid = np.linspace(lo, hi, n_samples)
    ratios = pruned(grid) / base(grid)
    return [(float(r), float(s)) for r, s in zip(grid, ratios)]
