from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.refine import RefineState, bounds_from_partial, refine_step
from tailbound.bounds.tails import TransformedDataset, TransformedVector, precompute_tails, transform_query

__all__ = [
    "LevelSpec",
    "RefineState",
    "TransformedDataset",
    "TransformedVector",
    "bounds_from_partial",
    "precompute_tails",
    "refine_step",
    "transform_query",
]
