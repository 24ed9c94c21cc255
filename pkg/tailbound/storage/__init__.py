from tailbound.storage.layout import (
    LevelMajorBatch,
    build_batches,
    level_block,
    level_slice,
    reconstruct,
    reconstruct_batches,
)

__all__ = [
    "LevelMajorBatch",
    "build_batches",
    "level_block",
    "level_slice",
    "reconstruct",
    "reconstruct_batches",
]
