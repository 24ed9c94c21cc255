"""查詢執行與單點 benchmark 紀錄。"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, Field, model_validator

from tailbound.analytics.metrics import recall_at_k
from tailbound.config.constants import IndexKind, SearchMode
from tailbound.exceptions import InvalidParameterError
from tailbound.index.base import BaseIndex, SearchResult
from tailbound.logging_config import get_logger
from tailbound.utils.helpers import as_matrix

logger = get_logger("bench.runner")


class BenchRun(BaseModel):
    """單一 (索引參數, 模式) 的量測結果。QPS 為各次重複的平均。"""

    data_path: str = ""
    query_path: str = ""
    index_kind: IndexKind
    index_params: dict[str, int] = Field(default_factory=dict)
    mode: SearchMode
    k: int = Field(ge=1)
    n_queries: int = Field(ge=1)
    repetitions: int = Field(ge=1)
    seed: int = 0
    recall: float = Field(ge=0.0, le=1.0)
    qps: float = Field(ge=0.0)
    phi: float = Field(ge=0.0)
    terms: int = Field(ge=0)
    candidates: int = Field(ge=0)
    wall_time: float = Field(ge=0.0, description="所有重複的總耗時（秒）")

    @model_validator(mode="after")
    def _phi_range(self) -> "BenchRun":
        if self.phi > 1.0 + 1e-9:
            raise ValueError(f"phi 不可超過 1，收到 {self.phi}")
        return self

    def to_row(self) -> dict:
        """扁平化為 CSV 欄位（enum 轉為字串值）。"""
        row = self.model_dump(exclude={"index_params", "data_path", "query_path"})
        row["index_kind"] = self.index_kind.value
        row["mode"] = self.mode.value
        return row


def sample_queries(queries, n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """依 seed 抽 n 個查詢（不重複，保持原順序），回傳 (查詢, 原始編號)。"""
    qs = as_matrix(queries)
    if n >= qs.shape[0]:
        rows = np.arange(qs.shape[0])
    else:
        rows = np.sort(np.random.default_rng(seed).choice(qs.shape[0], size=n, replace=False))
    return qs[rows], rows


def run_queries(
    index: BaseIndex,
    queries: np.ndarray,
    k: int,
    mode: SearchMode,
    params: dict | None = None,
    workers: int = 1,
) -> list[SearchResult]:
    """執行所有查詢；結果依查詢編號排列，與執行緒數無關。"""
    params = params or {}
    if workers <= 1:
        return [index.search(q, k, mode, **params) for q in queries]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="query") as pool:
        futures = [pool.submit(index.search, q, k, mode, **params) for q in queries]
        return [fut.result() for fut in futures]


def run_bench(
    index: BaseIndex,
    queries,
    truth: np.ndarray,
    k: int,
    mode: SearchMode,
    params: dict | None = None,
    repetitions: int = 1,
    workers: int = 1,
    seed: int = 0,
    data_path: str = "",
    query_path: str = "",
) -> BenchRun:
    """重複 repetitions 次量測 QPS；recall 與工作量取自第一次（各次結果相同）。"""
    qs = as_matrix(queries)
    truth = np.asarray(truth)
    if truth.ndim != 2 or truth.shape[0] != qs.shape[0] or truth.shape[1] < k:
        raise InvalidParameterError(f"真值矩陣 shape {truth.shape} 與查詢數 {qs.shape[0]} / k={k} 不符")
    if repetitions < 1:
        raise InvalidParameterError(f"repetitions 必須 >= 1，收到 {repetitions}")

    qps_runs: list[float] = []
    total = 0.0
    first: list[SearchResult] = []
    for rep in range(repetitions):
        start = time.perf_counter()
        results = run_queries(index, qs, k, mode, params, workers)
        elapsed = time.perf_counter() - start
        total += elapsed
        qps_runs.append(qs.shape[0] / max(elapsed, 1e-9))
        if rep == 0:
            first = results

    terms = sum(r.counter.terms for r in first)
    candidates = sum(r.counter.candidates for r in first)
    run = BenchRun(
        data_path=data_path,
        query_path=query_path,
        index_kind=index.kind,
        index_params={name: int(v) for name, v in (params or {}).items()},
        mode=mode,
        k=k,
        n_queries=qs.shape[0],
        repetitions=repetitions,
        seed=seed,
        recall=float(np.mean([recall_at_k(r.ids, truth[i, :k]) for i, r in enumerate(first)])),
        qps=float(np.mean(qps_runs)),
        phi=terms / (candidates * index.dim) if candidates else 0.0,
        terms=terms,
        candidates=candidates,
        wall_time=total,
    )
    logger.debug("%s %s %s: recall=%.4f φ=%.4f QPS=%.1f", index.kind.value, mode.value, params, run.recall, run.phi, run.qps)
    return run
