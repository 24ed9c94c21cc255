"""產生合成資料集（base / query / ground truth）至指定目錄。"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np

from tailbound.bench.groundtruth import ground_truth
from tailbound.bench.io import write_vectors
from tailbound.bench.synthetic import gaussian_blobs, rotated_gaussian, white_gaussian
from tailbound.logging_config.logger import setup_logging

GENERATORS = {
    "rotated": lambda n, d, seed: rotated_gaussian(n, d, seed=seed),
    "white": lambda n, d, seed: white_gaussian(n, d, seed=seed),
    "blobs": lambda n, d, seed: gaussian_blobs(n, d, seed=seed),
}


def main() -> None:
    parser = argparse.ArgumentParser(description="產生合成 fvecs 資料集")
    parser.add_argument("--kind", choices=sorted(GENERATORS), default="rotated", help="資料分佈")
    parser.add_argument("--n", type=int, default=10000, help="base 向量數")
    parser.add_argument("--n-queries", type=int, default=100, help="查詢數")
    parser.add_argument("--d", type=int, default=64, help="維度")
    parser.add_argument("--k", type=int, default=10, help="真值近鄰數（0 表示不計算）")
    parser.add_argument("--seed", type=int, default=0, help="亂數種子")
    parser.add_argument("--out-dir", default="data/synthetic", help="輸出目錄")
    args = parser.parse_args()

    setup_logging(level="INFO", file_enabled=False)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    # 查詢與 base 取自同一分佈，切開後互不重疊
    make = GENERATORS[args.kind]
    full = make(args.n + args.n_queries, args.d, args.seed).astype(np.float32)
    base, queries = full[:args.n], full[args.n:]

    write_vectors(out / "base.fvecs", base)
    write_vectors(out / "query.fvecs", queries)
    print(f"base: {base.shape}  query: {queries.shape} → {out}")

    if args.k > 0:
        gt = ground_truth(base, queries, args.k)
        write_vectors(out / "groundtruth.ivecs", gt.astype(np.int32))
        print(f"groundtruth: {gt.shape}")


if __name__ == "__main__":
    main()
