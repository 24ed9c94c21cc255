from tailbound.engine.counters import WorkCounter
from tailbound.engine.heap import EntryKind, ResultHeap
from tailbound.engine.refine import (
    RefineResult,
    refine,
    refine_batch,
    refine_batches,
    refine_candidate,
    refine_point_centric,
    work_counter,
)

__all__ = [
    "EntryKind",
    "RefineResult",
    "ResultHeap",
    "WorkCounter",
    "refine",
    "refine_batch",
    "refine_batches",
    "refine_candidate",
    "refine_point_centric",
    "work_counter",
]
