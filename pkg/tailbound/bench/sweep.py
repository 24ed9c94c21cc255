"""參數 grid sweep：兩種模式 × 索引參數 → CSV 列。"""

from __future__ import annotations

import numpy as np
import pandas as pd

from tailbound.analytics.pareto import pareto_denoise, pareto_frontier, speedup_at_recall
from tailbound.bench.runner import run_bench
from tailbound.config.constants import IndexKind, SearchMode
from tailbound.config.settings import BenchConfig
from tailbound.exceptions import InvalidParameterError
from tailbound.index.base import BaseIndex
from tailbound.logging_config import get_logger

logger = get_logger("bench.sweep")

# CSV schema（欄位順序固定）
SWEEP_COLUMNS = [
    "row_type",       # point / speedup
    "index_kind",
    "param",
    "value",
    "mode",
    "k",
    "n_queries",
    "repetitions",
    "seed",
    "recall",
    "qps",
    "phi",
    "terms",
    "candidates",
    "wall_time",
    "on_frontier",    # 通過 Pareto 前緣與 denoise（取決於計時）
    "speedup",
]

MODES = (SearchMode.BASELINE, SearchMode.PROGRESSIVE)


def sweep_grid(index: BaseIndex, bench: BenchConfig) -> tuple[str, tuple[int, ...]]:
    """依索引類型回傳 (參數名, grid)；Flat 沒有參數，grid 只有一點。"""
    if index.kind == IndexKind.IVF:
        name, grid = "n_probe", bench.nprobe_grid
        bad = [v for v in grid if not 1 <= v <= index.n_list]
        limit = f"[1, n_list={index.n_list}]"
    elif index.kind == IndexKind.HNSW:
        name, grid = "ef_search", bench.efsearch_grid
        bad = [v for v in grid if v < bench.k]
        limit = f">= k={bench.k}"
    else:
        return "", (0,)
    if not grid:
        raise InvalidParameterError(f"{name} grid 不可為空")
    if bad:
        raise InvalidParameterError(f"{name} grid 中的 {bad} 超出範圍 {limit}")
    return name, tuple(grid)


def run_sweep(
    index: BaseIndex,
    queries,
    truth: np.ndarray,
    bench: BenchConfig | None = None,
    data_path: str = "",
    query_path: str = "",
) -> pd.DataFrame:
    """對 grid 每一點執行 baseline 與 progressive，附上固定 recall 的加速比列。"""
    bench = bench or BenchConfig()
    name, grid = sweep_grid(index, bench)
    rows: list[dict] = []

    for value in grid:
        params = {name: value} if name else {}
        for mode in MODES:
            run = run_bench(
                index, queries, truth, bench.k, mode, params,
                repetitions=bench.repetitions,
                workers=bench.workers,
                seed=bench.seed,
                data_path=data_path,
                query_path=query_path,
            )
            rows.append({**run.to_row(), "row_type": "point", "param": name, "value": value})
        logger.info("sweep %s=%s 完成", name or "flat", value)

    frontiers: dict[str, list[tuple[float, float]]] = {}
    for mode in MODES:
        points = [(r["recall"], r["qps"]) for r in rows if r["mode"] == mode.value]
        kept = pareto_denoise(pareto_frontier(points), bench.denoise_factor)
        frontiers[mode.value] = kept
        kept_set = set(kept)
        for r in rows:
            if r["mode"] == mode.value:
                r["on_frontier"] = (r["recall"], r["qps"]) in kept_set

    try:
        samples = speedup_at_recall(
            frontiers[SearchMode.BASELINE.value],
            frontiers[SearchMode.PROGRESSIVE.value],
            bench.speedup_samples,
        )
    except InvalidParameterError as e:
        logger.warning("略過 speedup-at-recall: %s", e)
        samples = []
    for recall, speedup in samples:
        rows.append({
            "row_type": "speedup",
            "index_kind": index.kind.value,
            "param": name,
            "mode": SearchMode.PROGRESSIVE.value,
            "k": bench.k,
            "recall": recall,
            "speedup": speedup,
        })

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
