"""CLI 入口：python -m tailbound [command]"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from tailbound.exceptions import InvalidParameterError, TailboundError


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return 0

    handlers = {
        "train": cmd_train,
        "transform": cmd_transform,
        "build": cmd_build,
        "search": cmd_search,
        "gt": cmd_gt,
        "sweep": cmd_sweep,
        "alpha": cmd_alpha,
    }
    try:
        handlers[args.command](args)
    except (TailboundError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="設定檔路徑（.yaml 或 key=value）")
    common.add_argument("--seed", type=int, default=None, help="亂數種子")
    common.add_argument("--log-level", default=None, help="日誌等級 (DEBUG / INFO / WARNING)")

    parser = argparse.ArgumentParser(
        description="逐層尾部能量界限 kNN refinement 工具",
        prog="python -m tailbound",
    )
    subparsers = parser.add_subparsers(dest="command", help="可用指令")

    # train
    p = subparsers.add_parser("train", parents=[common], help="訓練能量壓縮轉換 (PNRM1)")
    p.add_argument("--data", required=True, help="訓練資料 (fvecs / ivecs / bvecs)")
    p.add_argument("--out", required=True, help="輸出模型檔")
    p.add_argument("--alpha-target", type=float, default=None, help="目標衰減率 α")
    p.add_argument("--history", default=None, help="輸出每個 epoch 的 loss CSV")

    # transform
    p = subparsers.add_parser("transform", parents=[common], help="以模型轉換向量檔")
    p.add_argument("--model", required=True, help="PNRM1 模型檔")
    p.add_argument("--data", required=True, help="輸入向量檔")
    p.add_argument("--out", required=True, help="輸出 fvecs")

    # build
    p = subparsers.add_parser("build", parents=[common], help="建立索引")
    p.add_argument("--data", required=True, help="資料向量檔")
    p.add_argument("--out", required=True, help="輸出索引檔")
    p.add_argument("--kind", choices=["flat", "ivf", "hnsw"], default=None, help="索引類型")
    p.add_argument("--model", default=None, help="PNRM1 模型檔（省略則為 identity）")
    p.add_argument("--nlist", type=int, default=None, help="IVF list 數")
    p.add_argument("--m", type=int, default=None, help="HNSW 每點鄰居數 M")
    p.add_argument("--ef-construction", type=int, default=None, help="HNSW 建圖 ef")
    p.add_argument("--levels", type=int, default=None, help="refinement 層數 L")
    p.add_argument("--batch", type=int, default=None, help="level-major 批次大小 B")
    p.add_argument("--variant", choices=["point_centric", "batch_noub", "batch_ub"], default=None, help="引擎模式")

    # search
    p = subparsers.add_parser("search", parents=[common], help="搜尋並輸出 top-k CSV")
    p.add_argument("--index", required=True, help="索引檔")
    p.add_argument("--queries", required=True, help="查詢向量檔")
    p.add_argument("--k", type=int, default=None, help="近鄰數 k")
    p.add_argument("--mode", choices=["baseline", "progressive"], default="progressive", help="搜尋模式")
    p.add_argument("--nprobe", type=int, default=None, help="IVF 探測 list 數")
    p.add_argument("--efsearch", type=int, default=None, help="HNSW 搜尋 ef")
    p.add_argument("--workers", type=int, default=None, help="查詢執行緒數")
    p.add_argument("--out", default=None, help="輸出 CSV（預設 stdout）")

    # gt
    p = subparsers.add_parser("gt", parents=[common], help="暴力計算真值 (ivecs)")
    p.add_argument("--data", required=True, help="資料向量檔")
    p.add_argument("--queries", required=True, help="查詢向量檔")
    p.add_argument("--k", type=int, default=None, help="近鄰數 k")
    p.add_argument("--out", required=True, help="輸出 ivecs")

    # sweep
    p = subparsers.add_parser("sweep", parents=[common], help="參數 sweep，輸出 recall / QPS / φ CSV")
    p.add_argument("--index", required=True, help="索引檔")
    p.add_argument("--queries", required=True, help="查詢向量檔")
    p.add_argument("--gt", default=None, help="真值 ivecs（對應完整查詢檔）")
    p.add_argument("--data", default=None, help="無 --gt 時用來暴力計算真值的資料檔")
    p.add_argument("--k", type=int, default=None, help="近鄰數 k")
    p.add_argument("--n-queries", type=int, default=None, help="抽樣查詢數")
    p.add_argument("--repetitions", type=int, default=None, help="重複次數")
    p.add_argument("--workers", type=int, default=None, help="查詢執行緒數")
    p.add_argument("--nprobe-grid", default=None, help="IVF n_probe grid，例如 1,2,4,8")
    p.add_argument("--efsearch-grid", default=None, help="HNSW ef_search grid，例如 10,20,40")
    p.add_argument("--out", default=None, help="輸出 CSV（預設 stdout）")

    # alpha
    p = subparsers.add_parser("alpha", parents=[common], help="估計壓縮參數 α")
    p.add_argument("--data", required=True, help="資料向量檔")
    p.add_argument("--model", default=None, help="PNRM1 模型檔（省略則為 identity）")
    p.add_argument("--p", default=None, help="p 值，例如 0.1,0.25,0.5")
    p.add_argument("--out", default=None, help="輸出 CSV（預設 stdout）")

    return parser


def _load_settings(args):
    """載入設定檔並以 CLI flag 覆寫，同時初始化日誌。"""
    from tailbound.config.settings import FLAT_ALIASES, Settings
    from tailbound.logging_config.logger import setup_logging

    flags = {name: getattr(args, name, None) for name in FLAT_ALIASES}
    # 搜尋參數直接對照已建索引驗證，不經 IndexConfig
    flags.pop("nprobe", None)
    flags.pop("efsearch", None)
    base = Settings.load(args.config)
    if flags.get("nlist") is not None and base.index.n_probe > flags["nlist"]:
        flags["nprobe"] = flags["nlist"]
    settings = base.with_overrides(**flags)
    setup_logging(settings.logging.level, settings.logging.file_enabled, settings.logging.log_dir, force=True)
    return settings


def _parse_grid(text: str | None, name: str) -> tuple | None:
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise InvalidParameterError(f"{name} 必須是以逗號分隔的整數: {text!r}") from e


def _emit(frame, out: str | None) -> None:
    if out:
        frame.to_csv(out, index=False, lineterminator="\n")
    else:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")


def cmd_train(args) -> None:
    import pandas as pd

    from tailbound.bench.io import read_vectors
    from tailbound.transform.trainer import train_transform_with_history

    settings = _load_settings(args)
    data = read_vectors(args.data)
    model, history = train_transform_with_history(data, settings.train)
    model.save(args.out)

    if args.history:
        pd.DataFrame({
            "epoch": range(history.epochs_run),
            "train_loss": history.train_loss,
            "val_loss": history.val_loss,
            "learning_rate": history.learning_rate,
        }).to_csv(args.history, index=False, lineterminator="\n")


def cmd_transform(args) -> None:
    from tailbound.bench.io import read_vectors, write_vectors
    from tailbound.config.constants import VectorFormat
    from tailbound.exceptions import DimensionMismatchError
    from tailbound.transform.model import TransformModel

    _load_settings(args)
    model = TransformModel.load(args.model)
    data = read_vectors(args.data)
    if data.shape[1] != model.dim:
        raise DimensionMismatchError(f"資料維度 {data.shape[1]} 與模型維度 {model.dim} 不一致")
    write_vectors(args.out, model.apply(data), VectorFormat.FVECS)


def cmd_build(args) -> None:
    from tailbound.bench.io import read_vectors
    from tailbound.config.constants import IndexKind
    from tailbound.index import build_flat, build_hnsw, build_ivfflat, save_index
    from tailbound.transform.model import TransformModel

    settings = _load_settings(args)
    data = read_vectors(args.data)
    model = TransformModel.load(args.model) if args.model else None
    levels = settings.levels.spec(data.shape[1])
    kind = IndexKind(args.kind) if args.kind else settings.index.kind
    cfg = settings.index

    if kind == IndexKind.FLAT:
        index = build_flat(data, levels, model, settings.engine)
    elif kind == IndexKind.IVF:
        index = build_ivfflat(data, cfg.n_list, cfg.seed, levels, model, settings.engine, cfg.kmeans_iterations)
    else:
        index = build_hnsw(data, cfg.m, cfg.ef_construction, cfg.seed, levels, model, settings.engine)
    save_index(index, args.out)


def _search_params(index, args, settings) -> dict:
    from tailbound.config.constants import IndexKind

    if index.kind == IndexKind.IVF:
        return {"n_probe": args.nprobe if args.nprobe is not None else min(settings.index.n_probe, index.n_list)}
    if index.kind == IndexKind.HNSW:
        ef = args.efsearch if args.efsearch is not None else max(settings.index.ef_search, settings.bench.k)
        return {"ef_search": ef}
    return {}


def cmd_search(args) -> None:
    import pandas as pd

    from tailbound.bench.io import read_vectors
    from tailbound.bench.runner import run_queries
    from tailbound.config.constants import SearchMode
    from tailbound.index import load_index
    from tailbound.logging_config import get_logger

    settings = _load_settings(args)
    index = load_index(args.index)
    queries = read_vectors(args.queries)
    k = settings.bench.k
    mode = SearchMode(args.mode)
    results = run_queries(index, queries, k, mode, _search_params(index, args, settings), settings.bench.workers)

    rows = [
        {"query": qi, "rank": rank, "id": int(i), "distance": float(dist)}
        for qi, res in enumerate(results)
        for rank, (i, dist) in enumerate(zip(res.ids, res.distances))
    ]
    _emit(pd.DataFrame(rows, columns=["query", "rank", "id", "distance"]), args.out)

    terms = sum(r.counter.terms for r in results)
    candidates = sum(r.counter.candidates for r in results)
    phi = terms / (candidates * index.dim) if candidates else 0.0
    get_logger("cli").info("搜尋完成: %d 個查詢，mode=%s，φ=%.4f", len(results), mode.value, phi)


def cmd_gt(args) -> None:
    import numpy as np

    from tailbound.bench.groundtruth import ground_truth
    from tailbound.bench.io import read_vectors, write_vectors
    from tailbound.config.constants import VectorFormat

    settings = _load_settings(args)
    ids = ground_truth(read_vectors(args.data), read_vectors(args.queries), settings.bench.k)
    write_vectors(args.out, ids.astype(np.int32), VectorFormat.IVECS)


def cmd_sweep(args) -> None:
    from tailbound.bench.groundtruth import ground_truth
    from tailbound.bench.io import read_vectors
    from tailbound.bench.runner import sample_queries
    from tailbound.bench.sweep import run_sweep
    from tailbound.index import load_index

    settings = _load_settings(args)
    bench = settings.bench
    grids = {
        "nprobe_grid": _parse_grid(args.nprobe_grid, "--nprobe-grid"),
        "efsearch_grid": _parse_grid(args.efsearch_grid, "--efsearch-grid"),
    }
    bench = replace(bench, **{name: grid for name, grid in grids.items() if grid is not None})

    index = load_index(args.index)
    queries, rows = sample_queries(read_vectors(args.queries), bench.n_queries, bench.seed)
    if args.gt:
        truth = read_vectors(args.gt)[rows]
    elif args.data:
        truth = ground_truth(read_vectors(args.data), queries, bench.k)
    else:
        raise InvalidParameterError("sweep 需要 --gt 或 --data 以取得真值")

    frame = run_sweep(index, queries, truth, bench, data_path=args.data or "", query_path=args.queries)
    _emit(frame, args.out)


def cmd_alpha(args) -> None:
    from tailbound.analytics.compaction import estimate_alpha
    from tailbound.bench.io import read_vectors
    from tailbound.config.constants import DEFAULT_P_VALUES
    from tailbound.logging_config import get_logger
    from tailbound.transform.model import TransformModel

    _load_settings(args)
    data = read_vectors(args.data)
    if args.model:
        data = TransformModel.load(args.model).apply(data)
    try:
        p_values = tuple(float(v) for v in args.p.split(",")) if args.p else DEFAULT_P_VALUES
    except ValueError as e:
        raise InvalidParameterError(f"--p 必須是以逗號分隔的數值: {args.p!r}") from e

    report = estimate_alpha(data, p_values)
    report.to_csv(args.out or sys.stdout)
    get_logger("cli").info("%s", report)


if __name__ == "__main__":
    sys.exit(main())
