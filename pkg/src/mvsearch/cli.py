"""Command-line interface.

Subcommands: extract, index, query, eval, bench, serve.
Exit codes: 0 success, 2 usage error, 3 data error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from .bench import DEFAULT_FUSIONS, format_csv, run_bench
from .errors import DataError
from .eval import PrecisionCurve, QueryCase, emit_csv, precision_curve
from .features import DetectorConfig, extract
from .features.io import load_descriptors, save_descriptors
from .fusion import LATE_KINDS, EARLY_KINDS
from .image import load_image
from .index import (
    FUSION_KINDS,
    FUSION_NONE,
    BuildConfig,
    QuerySpec,
    build_store,
    load_store,
    query,
    query_histograms,
    save_store,
)
from .manifest import load_manifest
from .similarity import KINDS as SIMILARITY_KINDS

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4


def _slug(path: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", path).strip("_")


def _check_kind(value: str, valid, what: str) -> str:
    if value not in valid:
        raise UsageError(f"unknown {what} {value!r}; valid: {', '.join(valid)}")
    return value


class UsageError(Exception):
    pass


def _load_view_sets(store, paths, detector: DetectorConfig):
    sets = []
    for p in paths:
        if p.endswith(".mvds"):
            sets.append(load_descriptors(p))
        else:
            sets.append(extract(load_image(p), detector, image_id=p))
    return sets


def cmd_extract(args) -> int:
    manifest = load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    detector = DetectorConfig()
    written = 0
    for entry in [*manifest.objects, *manifest.queries]:
        for path in entry.views:
            img = load_image(path)
            ds = extract(img, detector, image_id=path)
            save_descriptors(ds, out_dir / (_slug(path) + ".mvds"))
            written += 1
    print(f"wrote {written} descriptor files to {out_dir}")
    return EXIT_OK


def cmd_index(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = BuildConfig(k_corner=args.k, k_blob=args.k, seed=args.seed)
    store = build_store(manifest, cfg)
    save_store(store, args.store)
    print(
        f"objects={len(store.records)} views={store.n_views} bins={store.bins} "
        f"-> {args.store}"
    )
    return EXIT_OK


def cmd_query(args) -> int:
    store = load_store(args.store)
    _check_kind(args.similarity, SIMILARITY_KINDS, "similarity")
    _check_kind(args.fusion, FUSION_KINDS, "fusion")
    sets = _load_view_sets(store, args.views, DetectorConfig())
    hists = query_histograms(store, sets)
    if args.fusion == FUSION_NONE and hists.shape[0] > 1:
        raise UsageError("--fusion none accepts exactly one view")
    spec = QuerySpec(
        hists=hists,
        similarity=args.similarity,
        fusion=args.fusion,
        k=args.k,
        list_depth=args.list_depth,
    )
    results = query(store, spec)
    cats = {rec.object_id: rec.category for rec in store.records}
    print("rank\tobject_id\tcategory\tscore")
    for rank, entry in enumerate(results, start=1):
        print(f"{rank}\t{entry.object_id}\t{cats[entry.object_id]}\t{entry.score:.6f}")
    return EXIT_OK


def _build_query_cases(store, manifest, detector: DetectorConfig, multi_view: bool):
    cases = []
    for q in manifest.queries:
        paths = q.views if multi_view else q.views[:1]
        sets = [extract(load_image(p), detector, image_id=p) for p in paths]
        cases.append(
            QueryCase(query_id=q.query_id, category=q.category, hists=query_histograms(store, sets))
        )
    return cases


def cmd_eval(args) -> int:
    store = load_store(args.store)
    manifest = load_manifest(args.manifest)
    if not manifest.queries:
        raise UsageError("manifest has no queries to evaluate")
    similarities = [
        _check_kind(s, SIMILARITY_KINDS, "similarity")
        for s in args.similarity_set.split(",")
    ]
    fusions = [_check_kind(f, FUSION_KINDS, "fusion") for f in args.fusion_set.split(",")]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    detector = DetectorConfig()
    single_cases = _build_query_cases(store, manifest, detector, multi_view=False)
    multi_cases = _build_query_cases(store, manifest, detector, multi_view=True)
    for sim in similarities:
        for fusion in fusions:
            cases = single_cases if fusion == FUSION_NONE else multi_cases
            template = QuerySpec(
                hists=np.zeros((1, store.bins)),
                similarity=sim,
                fusion=fusion,
                k=args.kmax,
                list_depth=args.list_depth,
            )
            curve: PrecisionCurve = precision_curve(cases, store, template, args.kmax)
            emit_csv(curve, out_dir / f"curve_{sim}_{fusion}.csv")
    print(f"wrote {len(similarities) * len(fusions)} curve files to {out_dir}")
    return EXIT_OK


def cmd_bench(args) -> int:
    store = load_store(args.store)
    _check_kind(args.similarity, SIMILARITY_KINDS, "similarity")
    sets = _load_view_sets(store, args.views, DetectorConfig())
    rows = run_bench(
        store,
        sets,
        similarity=args.similarity,
        fusions=DEFAULT_FUSIONS,
        repeat=args.repeat,
        k=args.k,
        list_depth=args.list_depth,
    )
    sys.stdout.write(format_csv(rows))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = load_store(args.store)
    app = create_app(store)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvsearch",
        description="Multi-view object image search: features, vocabularies, "
        "fused retrieval, evaluation, HTTP service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="batch feature extraction to descriptor files")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("index", help="train vocabularies and build a store file")
    p.add_argument("manifest")
    p.add_argument("store")
    p.add_argument("--k", type=int, default=3000, help="vocabulary size per channel")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="one-shot query, prints a ranked table")
    p.add_argument("store")
    p.add_argument("views", nargs="+", help="query view images (or .mvds files)")
    p.add_argument("--similarity", default="nhi", help=f"one of: {', '.join(SIMILARITY_KINDS)}")
    p.add_argument(
        "--fusion",
        default=FUSION_NONE,
        help=f"none, {', '.join(EARLY_KINDS)}, or {', '.join(LATE_KINDS)}",
    )
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--list-depth", type=int, default=100)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="emit precision-curve CSVs per configuration")
    p.add_argument("store")
    p.add_argument("manifest")
    p.add_argument("out_dir")
    p.add_argument("--similarity-set", default=",".join(SIMILARITY_KINDS))
    p.add_argument("--fusion-set", default=",".join(FUSION_KINDS))
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--list-depth", type=int, default=100)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="report mean matching time per configuration")
    p.add_argument("store")
    p.add_argument("views", nargs="+")
    p.add_argument("--similarity", default="nhi")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--list-depth", type=int, default=100)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("store")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
