from tailbound.bench.groundtruth import exact_knn, ground_truth
from tailbound.bench.io import infer_format, read_vectors, write_vectors
from tailbound.bench.runner import BenchRun, run_bench, run_queries, sample_queries
from tailbound.bench.sweep import SWEEP_COLUMNS, run_sweep, sweep_grid
from tailbound.bench.synthetic import decay_spectrum, gaussian_blobs, rotated_gaussian, white_gaussian

__all__ = [
    "SWEEP_COLUMNS",
    "BenchRun",
    "decay_spectrum",
    "exact_knn",
    "gaussian_blobs",
    "ground_truth",
    "infer_format",
    "read_vectors",
    "rotated_gaussian",
    "run_bench",
    "run_queries",
    "run_sweep",
    "sample_queries",
    "sweep_grid",
    "white_gaussian",
]
