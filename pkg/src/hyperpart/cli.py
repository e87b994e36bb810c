"""Command line entry point: ``hyperpart {part,bench,zeta}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .algdist import relax, write_embeddings_csv
from .bench import (
    ExperimentSpec,
    ZETA_BINS,
    compare_baselines,
    compare_schemes,
    histogram,
    import_external_cuts,
    read_records_csv,
    run_experiments,
    summarize,
    write_bench_outputs,
    write_histogram_csv,
    write_zeta_records_csv,
)
from .hypergraph import load
from .multilevel import DEFAULT_OMEGA, MultilevelConfig, kway

log = logging.getLogger("hyperpart")


def _add_partition_options(p):
    p.add_argument("--k", type=int, default=2, help="number of parts")
    p.add_argument("--tol", type=float, default=1.05, help="imbalance bound, e.g. 1.05 for 5%%")
    p.add_argument("--scheme", choices=["ipm", "stable"], default="ipm")
    p.add_argument("--ipm-order", choices=["random", "fv"], default="random")
    p.add_argument("--ipm-metric", choices=["ip", "conn"], default="ip")
    p.add_argument("--Q", type=float, default=0.5, help="strong-connection threshold")
    p.add_argument("--omega", type=float, default=DEFAULT_OMEGA, help="relaxation factor")
    p.add_argument("--vectors", type=int, default=8, help="number of relaxation test vectors")
    p.add_argument("--iterations", type=int, default=20, help="relaxation sweeps per level")
    p.add_argument("--coarsest-size", type=int, default=None)
    p.add_argument("--min-reduction", type=float, default=0.9)
    p.add_argument("--passes", type=int, default=4, help="FM passes per level")
    p.add_argument("--seed", type=int, default=0)


def _config_from_args(args) -> MultilevelConfig:
    return MultilevelConfig(
        k=args.k,
        tolerance=args.tol,
        scheme=args.scheme,
        ipm_order=args.ipm_order,
        ipm_metric=args.ipm_metric,
        Q=args.Q,
        omega=args.omega,
        n_test_vectors=args.vectors,
        n_iterations=args.iterations,
        coarsest_size=args.coarsest_size,
        min_reduction=args.min_reduction,
        max_passes=args.passes,
        rng_seed=args.seed,
    )


def cmd_part(args) -> int:
    hg = load(args.input)
    cfg = _config_from_args(args)
    if args.dump_embeddings:
        emb = relax(hg, cfg.algdist_config(cfg.rng_seed))
        write_embeddings_csv(emb, args.dump_embeddings)
    result = kway(hg, cfg)
    record = {
        "input": Path(args.input).stem,
        "path": str(args.input),
        "k": cfg.k,
        "tolerance": cfg.tolerance,
        "scheme": cfg.scheme,
        "ipm_order": cfg.ipm_order,
        "ipm_metric": cfg.ipm_metric,
        "seed": cfg.rng_seed,
        "config": cfg.as_dict(),
        "n_vertices": hg.n_vertices,
        "n_edges": hg.n_edges,
        **result.as_dict(),
        "feasible": result.imbalance < cfg.tolerance,
    }
    print(
        f"{record['input']}: k={cfg.k} scheme={cfg.scheme} cut={result.cut:g} "
        f"imbalance={result.imbalance:.4f} time={result.wall_time:.2f}s"
    )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(record, fh, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.writelines(f"{p}\n" for p in result.labels.tolist())
    return 0


def cmd_bench(args) -> int:
    spec = ExperimentSpec.from_file(args.spec)
    if args.jobs is not None:
        spec.jobs = args.jobs
    if args.repetitions is not None:
        spec.repetitions = args.repetitions

    def progress(n, total, rec):
        if args.verbose:
            print(f"[{n}/{total}] {rec['instance']} k={rec['k']} tol={rec['tolerance']} "
                  f"{rec['scheme']} rep={rec['repetition']} cut={rec['cut']}", file=sys.stderr)

    started = time.perf_counter()
    records = run_experiments(spec, progress)
    manifest = write_bench_outputs(spec, records, args.out)
    print(f"{len(records)} runs in {time.perf_counter() - started:.1f}s -> {args.out}")
    hist_file = manifest["files"].get("zeta_stable_vs_ipm")
    if hist_file:
        recs = compare_schemes(summarize(records))
        _print_histogram("stable / ipm", recs)
    return 1 if manifest["n_errors"] else 0


def _print_histogram(title, recs):
    counts = histogram(recs)
    print(title)
    for b, c in zip(ZETA_BINS, counts):
        print(f"  {b.label:>12} {c:5d}")


def cmd_zeta(args) -> int:
    rows = read_records_csv(args.ours)
    summary = rows if rows and "best_cut" in rows[0] else summarize(rows)
    use = "best_cut" if args.use == "best" else "median_cut"
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    if args.baseline:
        baselines = {}
        for path in args.baseline:
            for key, cut in import_external_cuts(path).items():
                baselines[key] = min(cut, baselines.get(key, float("inf")))
        groups = compare_baselines(summary, baselines, use)
        if not groups:
            print("no overlapping (instance, k, tolerance) cells between results and baselines", file=sys.stderr)
            return 1
    else:
        groups = {("stable", "ipm"): compare_schemes(summary, "stable", "ipm", use)}
    for (num, den), recs in sorted(groups.items()):
        _print_histogram(f"{num} / {den} ({len(recs)} cells)", recs)
        if out:
            stem = f"zeta_{num}_vs_{den}".replace(":", "-")
            write_histogram_csv(recs, out / f"{stem}.csv")
            write_zeta_records_csv(recs, out / f"{stem}_cells.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperpart", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("part", help="partition one hypergraph")
    p.add_argument("input", help="Matrix Market (.mtx, row-net) or native hypergraph file")
    _add_partition_options(p)
    p.add_argument("--json", help="write the result record to this file")
    p.add_argument("--output", help="write one part id per line to this file")
    p.add_argument("--dump-embeddings", metavar="CSV", help="write finest-level relaxation coordinates")
    p.set_defaults(func=cmd_part)

    b = sub.add_parser("bench", help="run an experiment spec")
    b.add_argument("spec", help="TOML experiment spec")
    b.add_argument("--out", default="bench_out", help="output directory")
    b.add_argument("--jobs", type=int, default=None)
    b.add_argument("--repetitions", type=int, default=None)
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)

    z = sub.add_parser("zeta", help="cut-ratio histograms from result CSVs")
    z.add_argument("--ours", required=True, help="results.csv or summary.csv from 'bench'")
    z.add_argument("--baseline", action="append", help="CSV with instance,k,tolerance,tool,cut")
    z.add_argument("--use", choices=["best", "median"], default="best")
    z.add_argument("--out", help="directory for histogram CSVs")
    z.set_defaults(func=cmd_zeta)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"hyperpart: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
