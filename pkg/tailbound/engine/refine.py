"""逐層界限剪枝的 kNN refinement。

三種執行模式：
- point_centric：逐一處理候選，只在算出精確距離後更新 heap。
- batch_noub：level-major 批次逐層 bulk pruning，每批結束才更新 heap。
- batch_ub：同上，但 UB < d_k 的候選立即以上界推入 heap 收緊門檻。

前 k 個候選（依串流 / 批次順序）直接算完整距離來建立 heap。
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.refine import RefineState, bounds_from_partial, refine_step
from tailbound.bounds.tails import TransformedVector
from tailbound.config.constants import DEFAULT_PRUNE_SLACK, EngineVariant
from tailbound.config.settings import EngineConfig
from tailbound.engine.counters import WorkCounter
from tailbound.engine.heap import ResultHeap
from tailbound.exceptions import DimensionMismatchError, EmptyCandidateSetError, InvalidParameterError
from tailbound.storage.layout import LevelMajorBatch, level_block, reconstruct

CandidateStream = Iterable[tuple[int, TransformedVector]]


@dataclass
class RefineResult:
    """top-k 結果（依 (距離, id) 遞增）與工作量計數。"""

    ids: np.ndarray
    distances: np.ndarray
    counter: WorkCounter

    @classmethod
    def from_heap(cls, heap: ResultHeap, counter: WorkCounter) -> "RefineResult":
        items = heap.results()
        return cls(
            ids=np.array([i for i, _ in items], dtype=np.int64),
            distances=np.array([d for _, d in items], dtype=np.float64),
            counter=counter,
        )


def work_counter(result: RefineResult) -> tuple[int, float]:
    """回傳 (總處理維度項數 Σρᵢ, φ)。"""
    return result.counter.terms, result.counter.phi


def _exact(partial, norm_q, norm_x):
    return np.maximum(norm_q + norm_x - 2.0 * partial, 0.0)


def _prune_limit(threshold: float, slack: float) -> float:
    return threshold * (1.0 + slack)


# ----------------------------------------------------------------------
# point-centric
# ----------------------------------------------------------------------


def refine_candidate(
    q: TransformedVector,
    x: TransformedVector,
    levels: LevelSpec,
    threshold: float,
    slack: float = DEFAULT_PRUNE_SLACK,
) -> tuple[RefineState, int]:
    """對單一候選逐層 refine，直到被剪枝或走完所有層。

    回傳 (最終狀態, 本次處理的維度數)。最後一層不做剪枝判斷，走完時
    lb = ub = 精確距離。
    """
    limit = _prune_limit(threshold, slack)
    state = RefineState.initial(q, x)
    if state.lb > limit:
        return state.mark_pruned(), 0

    for level in range(state.level + 1, levels.n_levels + 1):
        state = refine_step(state, q, x, level, levels)
        if level < levels.n_levels and state.lb > limit:
            return state.mark_pruned(), levels.thresholds[level]
    return state, levels.d


def refine_point_centric(
    q: TransformedVector,
    candidates: CandidateStream,
    k: int,
    levels: LevelSpec,
    slack: float = DEFAULT_PRUNE_SLACK,
    counter: WorkCounter | None = None,
) -> RefineResult:
    """逐點 refinement；heap 只在算出精確距離後更新。"""
    counter = counter or WorkCounter(dim=levels.d)
    heap = ResultHeap(k)
    seen = 0
    for cand_id, x in candidates:
        if x.dim != levels.d or q.dim != levels.d:
            raise DimensionMismatchError(f"候選維度 {x.dim} / 查詢維度 {q.dim} 與 LevelSpec {levels.d} 不一致")
        seen += 1
        if seen <= k:
            partial = float(np.dot(np.asarray(q.coeffs, dtype=np.float64), np.asarray(x.coeffs, dtype=np.float64)))
            counter.charge(1, levels.d)
            heap.push_exact(cand_id, float(_exact(partial, q.norm_sq, x.norm_sq)))
            continue

        state, consumed = refine_candidate(q, x, levels, heap.threshold, slack)
        counter.charge(1, consumed)
        if state.pruned:
            counter.mark_pruned([cand_id])
        else:
            heap.push_exact(cand_id, max(state.lb, 0.0))

    if seen == 0:
        raise EmptyCandidateSetError("候選集合為空")
    counter.candidates += seen
    return RefineResult.from_heap(heap, counter)


def iter_candidates(batches: Iterable[LevelMajorBatch]) -> Iterator[tuple[int, TransformedVector]]:
    """將批次轉回逐點串流；大小為 1 的批次本身即 row-major，不需拷貝。"""
    for batch in batches:
        coeffs = batch.data.reshape(1, -1) if batch.size == 1 else reconstruct(batch)
        for i in range(batch.size):
            yield int(batch.ids[i]), TransformedVector(coeffs=coeffs[i], tails=batch.tails[i])


# ----------------------------------------------------------------------
# batch（level-major）
# ----------------------------------------------------------------------


def refine_batch(
    q: TransformedVector,
    batch: LevelMajorBatch,
    k: int,
    use_ub: bool,
    heap: ResultHeap,
    counter: WorkCounter | None = None,
    slack: float = DEFAULT_PRUNE_SLACK,
    n_seed: int = 0,
) -> ResultHeap:
    """以 level-major 方式處理一個批次並更新 heap。

    批次前 n_seed 個候選直接算完整距離並推入 heap。其餘候選逐層計算，
    每層對所有存活候選做一次 bulk pruning。
    """
    levels = batch.levels
    if q.dim != levels.d or q.tails.shape[0] != levels.n_levels + 1:
        raise DimensionMismatchError(f"查詢維度 / 層數與批次 LevelSpec 不一致 (d={levels.d}, L={levels.n_levels})")
    if heap.k != k:
        raise InvalidParameterError(f"heap 容量 {heap.k} 與 k={k} 不一致")
    counter = counter or WorkCounter(dim=levels.d)

    qc = np.asarray(q.coeffs, dtype=np.float64)
    nq = q.norm_sq
    norms = batch.tails[:, 0]
    n = batch.size
    n_seed = min(max(n_seed, 0), n)
    partial = np.zeros(n, dtype=np.float64)

    if n_seed:
        for level in range(1, levels.n_levels + 1):
            start, stop = levels.span(level)
            partial[:n_seed] += level_block(batch, level)[:n_seed] @ qc[start:stop]
        counter.charge(n_seed, levels.d)
        for i, dist in enumerate(_exact(partial[:n_seed], nq, norms[:n_seed])):
            heap.push_exact(int(batch.ids[i]), float(dist))

    alive = np.arange(n_seed, n)
    lb0, _ = bounds_from_partial(0.0, nq, norms[alive], q.tails[0], batch.tails[alive, 0])
    dropped = lb0 > _prune_limit(heap.threshold, slack)
    counter.mark_pruned(batch.ids[alive[dropped]])
    alive = alive[~dropped]

    last = levels.n_levels
    for level in range(1, last + 1):
        if alive.size == 0:
            break
        start, stop = levels.span(level)
        partial[alive] += level_block(batch, level)[alive] @ qc[start:stop]
        counter.charge(alive.size, stop - start)
        if level == last:
            break

        lb, ub = bounds_from_partial(
            partial[alive], nq, norms[alive], q.tails[level], batch.tails[alive, level]
        )
        if use_ub:
            for j in np.flatnonzero(ub < heap.threshold):
                heap.push_upper(int(batch.ids[alive[j]]), float(ub[j]))

        dropped = lb > _prune_limit(heap.threshold, slack)
        if np.any(dropped):
            gone = batch.ids[alive[dropped]]
            counter.mark_pruned(gone)
            if use_ub:
                for cand_id in gone:
                    heap.evict(int(cand_id))
            alive = alive[~dropped]

    for i, dist in zip(alive, _exact(partial[alive], nq, norms[alive])):
        heap.push_exact(int(batch.ids[i]), float(dist))
    return heap


def refine_batches(
    q: TransformedVector,
    batches: Sequence[LevelMajorBatch],
    k: int,
    use_ub: bool = False,
    slack: float = DEFAULT_PRUNE_SLACK,
    counter: WorkCounter | None = None,
) -> RefineResult:
    """依序處理所有批次；前 k 個候選（跨批次）作為種子。"""
    total = sum(b.size for b in batches)
    if total == 0:
        raise EmptyCandidateSetError("候選集合為空")
    counter = counter or WorkCounter(dim=batches[0].levels.d)
    heap = ResultHeap(k)
    seen = 0
    for batch in batches:
        refine_batch(q, batch, k, use_ub, heap, counter=counter, slack=slack, n_seed=k - seen)
        seen += batch.size
    counter.candidates += total
    return RefineResult.from_heap(heap, counter)


def refine(
    q: TransformedVector,
    batches: Sequence[LevelMajorBatch],
    k: int,
    config: EngineConfig | None = None,
    record_pruned: bool = False,
) -> RefineResult:
    """依 EngineConfig.variant 分派到對應的 refinement 模式。"""
    config = config or EngineConfig()
    if not batches:
        raise EmptyCandidateSetError("候選集合為空")
    levels = batches[0].levels
    counter = WorkCounter(dim=levels.d, record_pruned=record_pruned)
    if config.variant == EngineVariant.POINT_CENTRIC:
        return refine_point_centric(q, iter_candidates(batches), k, levels, config.prune_slack, counter)
    return refine_batches(
        q, batches, k,
        use_ub=config.variant == EngineVariant.BATCH_UB,
        slack=config.prune_slack,
        counter=counter,
    )
