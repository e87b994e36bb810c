"""Experiment harness: repeated partitioning runs, cut ratios and histograms.

A cut ratio ``zeta`` compares a reference cut (numerator) against ours
(denominator); values above one mean ours is smaller. Ratios are binned
into seven fixed bins centred on the ``(0.95, 1.05)`` tie bin.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import statistics
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict, fields
from pathlib import Path

import numpy as np

from .hypergraph import load
from .multilevel import MultilevelConfig, derive_seed, kway

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZetaBin:
    low: float
    high: float
    low_closed: bool
    high_closed: bool
    label: str

    def contains(self, z):
        above = z >= self.low if self.low_closed else z > self.low
        below = z <= self.high if self.high_closed else z < self.high
        return above and below


ZETA_BINS = (
    ZetaBin(0.0, 0.80, False, True, "<=0.80"),
    ZetaBin(0.80, 0.90, False, True, "(0.80,0.90]"),
    ZetaBin(0.90, 0.95, False, True, "(0.90,0.95]"),
    ZetaBin(0.95, 1.05, False, False, "(0.95,1.05)"),
    ZetaBin(1.05, 1.10, True, False, "[1.05,1.10)"),
    ZetaBin(1.10, 1.20, True, False, "[1.10,1.20)"),
    ZetaBin(1.20, math.inf, True, True, ">=1.20"),
)
MIDDLE_BIN = 3


def zeta_bin(z: float) -> int:
    if z <= 0.0:
        return 0
    for i, b in enumerate(ZETA_BINS):
        if b.contains(z):
            return i
    raise ValueError(f"cannot bin zeta={z!r}")


@dataclass(frozen=True)
class ZetaRecord:
    instance: str
    numerator: str
    denominator: str
    value: float
    bin: int
    k: int | None = None
    tolerance: float | None = None


def zeta(cut_other: float, cut_ours: float, instance="", numerator="other", denominator="ours", k=None, tolerance=None) -> ZetaRecord:
    """Ratio of another cut to ours. Two zero cuts tie at 1; a zero cut of ours
    against a positive one is recorded as ``inf`` in the top bin."""
    if cut_other < 0 or cut_ours < 0:
        raise ValueError("cuts must be non-negative")
    if cut_ours == 0:
        value = 1.0 if cut_other == 0 else math.inf
    else:
        value = cut_other / cut_ours
    return ZetaRecord(instance, numerator, denominator, value, zeta_bin(value), k, tolerance)


def histogram(records) -> list:
    counts = [0] * len(ZETA_BINS)
    for r in records:
        counts[r.bin] += 1
    return counts


def write_histogram_csv(records, path) -> None:
    counts = histogram(records)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin", "label", "low", "high", "count"])
        for i, (b, c) in enumerate(zip(ZETA_BINS, counts)):
            writer.writerow([i, b.label, b.low, b.high, c])


def write_zeta_records_csv(records, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance", "k", "tolerance", "numerator", "denominator", "zeta", "bin"])
        for r in records:
            writer.writerow([r.instance, r.k, r.tolerance, r.numerator, r.denominator, repr(r.value), r.bin])


# --------------------------------------------------------------------------- schemes


def parse_scheme(label: str) -> dict:
    """``"ipm"``, ``"stable"`` or ``"ipm:<order>:<metric>"`` (e.g. ``ipm:fv:conn``)."""
    parts = label.split(":")
    if parts[0] == "stable" and len(parts) == 1:
        return {"scheme": "stable"}
    if parts[0] != "ipm" or len(parts) > 3:
        raise ValueError(f"bad scheme label {label!r}")
    out = {"scheme": "ipm"}
    if len(parts) > 1:
        out["ipm_order"] = parts[1]
    if len(parts) > 2:
        out["ipm_metric"] = parts[2]
    return out


# --------------------------------------------------------------------------- experiments


@dataclass
class ExperimentSpec:
    inputs: list
    k: list = field(default_factory=lambda: [2])
    tolerances: list = field(default_factory=lambda: [1.03, 1.05, 1.10])
    repetitions: int = 20
    schemes: list = field(default_factory=lambda: ["ipm", "stable"])
    seed: int = 0
    baselines: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    jobs: int = 1
    name: str = "bench"

    def __post_init__(self):
        self.inputs = [str(p) for p in self.inputs]
        self.k = [int(k) for k in self.k]
        self.tolerances = [float(t) for t in self.tolerances]
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if any(t <= 1.0 for t in self.tolerances):
            raise ValueError("tolerances must exceed 1")
        for s in self.schemes:
            parse_scheme(s)

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        """Read a TOML key/value spec; relative paths resolve against the spec's directory."""
        path = Path(path)
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
        if "inputs" not in raw:
            raise ValueError(f"{path}: 'inputs' is required")
        base = path.parent
        raw["inputs"] = [str((base / p)) if not Path(p).is_absolute() else p for p in raw["inputs"]]
        raw["baselines"] = [str((base / p)) if not Path(p).is_absolute() else p for p in raw.get("baselines", [])]
        return cls(**raw)


RESULT_FIELDS = [
    "instance", "k", "tolerance", "scheme", "repetition", "seed", "status",
    "cut", "imbalance", "feasible", "n_vertices", "n_edges", "levels", "wall_time",
]
#: Columns that legitimately differ between identical runs.
VOLATILE_FIELDS = ("wall_time",)


def instance_id(path) -> str:
    return Path(path).stem


def _run_cell(task):
    path, k, tol, label, rep, seed, options = task
    rec = {
        "instance": instance_id(path),
        "k": k,
        "tolerance": tol,
        "scheme": label,
        "repetition": rep,
        "seed": seed,
    }
    started = time.perf_counter()
    try:
        hg = load(path)
        cfg = MultilevelConfig(k=k, tolerance=tol, rng_seed=seed, **{**options, **parse_scheme(label)})
        res = kway(hg, cfg)
        rec.update(
            status="ok",
            cut=res.cut,
            imbalance=res.imbalance,
            feasible=res.imbalance < tol,
            n_vertices=hg.n_vertices,
            n_edges=hg.n_edges,
            levels="-".join(map(str, res.level_sizes[0])) if res.level_sizes else str(hg.n_vertices),
        )
    except Exception as exc:  # recorded per cell; the run carries on
        rec.update(status=f"error: {type(exc).__name__}: {exc}", cut=None, imbalance=None, feasible=None,
                   n_vertices=None, n_edges=None, levels="")
    rec["wall_time"] = time.perf_counter() - started
    return rec


def experiment_tasks(spec: ExperimentSpec):
    tasks = []
    for i, path in enumerate(spec.inputs):
        for k in spec.k:
            for t_idx, tol in enumerate(spec.tolerances):
                for s_idx, label in enumerate(spec.schemes):
                    for rep in range(spec.repetitions):
                        seed = derive_seed(spec.seed, i, k, t_idx, s_idx, rep)
                        tasks.append((path, k, tol, label, rep, seed, dict(spec.options)))
    return tasks


def run_experiments(spec: ExperimentSpec, progress=None) -> list:
    """One record per (input, k, tolerance, scheme, repetition), in that order."""
    tasks = experiment_tasks(spec)
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            records = list(pool.map(_run_cell, tasks, chunksize=4))
    else:
        records = []
        for n, task in enumerate(tasks, 1):
            records.append(_run_cell(task))
            if progress:
                progress(n, len(tasks), records[-1])
    for rec in records:
        if rec["status"] != "ok":
            logger.warning("%s k=%s tol=%s %s rep %s: %s", rec["instance"], rec["k"], rec["tolerance"],
                           rec["scheme"], rec["repetition"], rec["status"])
    return records


def summarize(records) -> list:
    """Best and median cut per (instance, k, tolerance, scheme) cell over successful runs."""
    cells = {}
    for rec in records:
        key = (rec["instance"], rec["k"], rec["tolerance"], rec["scheme"])
        cells.setdefault(key, []).append(rec)
    out = []
    for (instance, k, tol, scheme), recs in cells.items():
        ok = [r for r in recs if r["status"] == "ok"]
        cuts = [float(r["cut"]) for r in ok]
        out.append({
            "instance": instance,
            "k": k,
            "tolerance": tol,
            "scheme": scheme,
            "runs": len(recs),
            "ok": len(ok),
            "best_cut": min(cuts) if cuts else None,
            "median_cut": statistics.median(cuts) if cuts else None,
            "feasible_runs": sum(1 for r in ok if _truthy(r["feasible"])),
        })
    return out


def _truthy(v):
    return v is True or str(v).lower() == "true"


def compare_schemes(results, numerator="stable", denominator="ipm", use="best_cut") -> list:
    """Per-cell ratio of one scheme's cut to another's.

    ``results`` may be raw run records or :func:`summarize` rows. Cells lacking
    either scheme are skipped with a warning.
    """
    rows = results if results and "best_cut" in results[0] else summarize(results)
    table = {}
    for r in rows:
        table[(r["instance"], int(r["k"]), float(r["tolerance"]), r["scheme"])] = r
    cells = sorted({key[:3] for key in table})
    out = []
    for instance, k, tol in cells:
        a = table.get((instance, k, tol, numerator))
        b = table.get((instance, k, tol, denominator))
        if a is None or b is None or a[use] in (None, "") or b[use] in (None, ""):
            warnings.warn(f"skipping {instance} k={k} tol={tol}: missing {numerator} or {denominator}")
            continue
        out.append(zeta(float(a[use]), float(b[use]), instance, numerator, denominator, k, tol))
    return out


class ExternalCutsError(ValueError):
    pass


def import_external_cuts(path) -> dict:
    """Read ``instance,k,tolerance,tool,cut`` rows into ``{(instance, k, tolerance, tool): cut}``.

    Malformed rows raise :class:`ExternalCutsError` naming their line numbers.
    Duplicate keys keep the smallest cut and emit a warning.
    """
    path = Path(path)
    required = ["instance", "k", "tolerance", "tool", "cut"]
    table = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return table
        header = [h.strip() for h in header]
        missing = [c for c in required if c not in header]
        if missing:
            raise ExternalCutsError(f"{path}:1: missing columns {missing}")
        idx = {c: header.index(c) for c in required}
        errors = []
        for line in reader:
            lineno = reader.line_num
            if not line or all(not c.strip() for c in line):
                continue
            try:
                if len(line) != len(header):
                    raise ValueError(f"expected {len(header)} fields, got {len(line)}")
                instance = line[idx["instance"]].strip()
                tool = line[idx["tool"]].strip()
                if not instance or not tool:
                    raise ValueError("empty instance or tool")
                k = int(line[idx["k"]])
                tol = float(line[idx["tolerance"]])
                cut = float(line[idx["cut"]])
                if k < 1 or tol <= 1.0 or cut < 0 or not math.isfinite(cut):
                    raise ValueError("k must be >= 1, tolerance > 1 and cut finite and >= 0")
            except ValueError as exc:
                errors.append(f"{path}:{lineno}: {exc}")
                continue
            key = (instance, k, round(tol, 9), tool)
            if key in table:
                warnings.warn(f"{path}:{lineno}: duplicate baseline {key}, keeping the smaller cut")
                cut = min(cut, table[key])
            table[key] = cut
        if errors:
            raise ExternalCutsError("malformed rows:\n" + "\n".join(errors))
    return table


def compare_baselines(summary, baselines: dict, use="best_cut") -> dict:
    """``{(tool, scheme): [ZetaRecord]}`` with the baseline cut over ours."""
    ours = {}
    for r in summary:
        if r[use] not in (None, ""):
            ours[(r["instance"], int(r["k"]), round(float(r["tolerance"]), 9), r["scheme"])] = float(r[use])
    schemes = sorted({key[3] for key in ours})
    out = {}
    for (instance, k, tol, tool), cut in sorted(baselines.items()):
        for scheme in schemes:
            mine = ours.get((instance, k, tol, scheme))
            if mine is None:
                continue
            out.setdefault((tool, scheme), []).append(zeta(cut, mine, instance, tool, scheme, k, tol))
    return out


# --------------------------------------------------------------------------- files


def _fmt(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else v


def write_records_csv(records, path, columns=RESULT_FIELDS) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for r in records:
            writer.writerow([_fmt(r.get(c)) for c in columns])


def read_records_csv(path) -> list:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["k"] = int(r["k"])
        r["tolerance"] = float(r["tolerance"])
        if "cut" in r and r["cut"] not in ("", None):
            r["cut"] = float(r["cut"])
    return rows


SUMMARY_FIELDS = ["instance", "k", "tolerance", "scheme", "runs", "ok", "best_cut", "median_cut", "feasible_runs"]


def write_bench_outputs(spec: ExperimentSpec, records, out_dir) -> dict:
    """Write results, per-cell summary, scheme-vs-scheme and baseline histograms, and a manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    write_records_csv(records, out_dir / "results.csv")
    files["results"] = "results.csv"
    summary = summarize(records)
    write_records_csv(summary, out_dir / "summary.csv", SUMMARY_FIELDS)
    files["summary"] = "summary.csv"

    labels = [s for s in spec.schemes]
    if "stable" in labels and "ipm" in labels:
        recs = compare_schemes(summary, "stable", "ipm")
        write_histogram_csv(recs, out_dir / "zeta_stable_vs_ipm.csv")
        write_zeta_records_csv(recs, out_dir / "zeta_stable_vs_ipm_cells.csv")
        files["zeta_stable_vs_ipm"] = "zeta_stable_vs_ipm.csv"
    baselines = {}
    for b in spec.baselines:
        for key, cut in import_external_cuts(b).items():
            baselines[key] = min(cut, baselines.get(key, math.inf))
    for (tool, scheme), recs in compare_baselines(summary, baselines).items():
        name = f"zeta_{tool}_vs_{scheme.replace(':', '-')}.csv"
        write_histogram_csv(recs, out_dir / name)
        files[f"zeta_{tool}_vs_{scheme}"] = name

    manifest = {
        "spec": asdict(spec),
        "defaults": MultilevelConfig(**spec.options).as_dict(),
        "zeta_bins": [asdict(b) for b in ZETA_BINS],
        "volatile_columns": list(VOLATILE_FIELDS),
        "files": files,
        "n_records": len(records),
        "n_errors": sum(1 for r in records if r["status"] != "ok"),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    manifest["zeta_bins"][-1]["high"] = "inf"
    with (out_dir / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest


def strip_volatile(path) -> list:
    """CSV rows of ``path`` with the volatile columns removed, for reproducibility checks."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return rows
    keep = [i for i, c in enumerate(rows[0]) if c not in VOLATILE_FIELDS]
    return [[row[i] for i in keep] for row in rows]


__all__ = [
    "ZETA_BINS", "MIDDLE_BIN", "ZetaRecord", "ExperimentSpec", "zeta", "zeta_bin", "histogram",
    "run_experiments", "summarize", "compare_schemes", "import_external_cuts", "compare_baselines",
    "write_bench_outputs", "read_records_csv", "strip_volatile", "parse_scheme",
]
