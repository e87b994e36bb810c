import json
import math
import statistics
import warnings

import pytest

from hyperpart.bench import (
    MIDDLE_BIN,
    ZETA_BINS,
    ExperimentSpec,
    ExternalCutsError,
    compare_baselines,
    compare_schemes,
    histogram,
    import_external_cuts,
    parse_scheme,
    read_records_csv,
    run_experiments,
    strip_volatile,
    summarize,
    write_bench_outputs,
    zeta,
    zeta_bin,
)

from .conftest import DATA

SMALL = str(DATA / "stencil9_14x14.mtx")


def test_zeta_examples():
    z = zeta(100, 100)
    assert z.value == 1.0 and z.bin == MIDDLE_BIN
    z = zeta(130, 100)
    assert z.value == pytest.approx(1.3) and z.bin == len(ZETA_BINS) - 1
    z = zeta(100, 130)
    assert z.value == pytest.approx(0.769, abs=1e-3) and z.bin == 0


def test_zero_cuts():
    assert zeta(0, 0).value == 1.0
    assert zeta(5, 0).value == math.inf and zeta(5, 0).bin == len(ZETA_BINS) - 1
    assert zeta(0, 5).bin == 0
    with pytest.raises(ValueError):
        zeta(-1, 2)


@pytest.mark.parametrize(
    "z, expected",
    [
        (0.5, 0), (0.80, 0), (0.8000001, 1), (0.90, 1), (0.9000001, 2), (0.95, 2),
        (0.9500001, 3), (1.0, 3), (1.0499999, 3), (1.05, 4), (1.0999999, 4), (1.10, 5),
        (1.1999999, 5), (1.20, 6), (50.0, 6),
    ],
)
def test_bin_boundaries(z, expected):
    assert zeta_bin(z) == expected


def test_every_value_lands_in_exactly_one_bin():
    values = [i / 1000 for i in range(1, 3000)] + [b.low for b in ZETA_BINS[1:]] + [b.high for b in ZETA_BINS[:-1]]
    for z in values:
        assert sum(b.contains(z) for b in ZETA_BINS) == 1


def cell(instance, scheme, best, median=None, k=2, tol=1.05):
    return {
        "instance": instance, "k": k, "tolerance": tol, "scheme": scheme, "runs": 1, "ok": 1,
        "best_cut": best, "median_cut": best if median is None else median, "feasible_runs": 1,
    }


HAND = {"a": (130, 100), "b": (107, 100), "c": (115, 100), "d": (100, 100), "e": (100, 100)}


def hand_summary():
    rows = []
    for name, (s, i) in HAND.items():
        rows += [cell(name, "stable", s), cell(name, "ipm", i)]
    return rows


def test_identical_cuts_all_middle():
    rows = [cell("x", "stable", 7), cell("x", "ipm", 7), cell("y", "stable", 3), cell("y", "ipm", 3)]
    assert histogram(compare_schemes(rows)) == [0, 0, 0, 2, 0, 0, 0]


def test_hand_built_counts_and_mirror():
    forward = compare_schemes(hand_summary(), "stable", "ipm")
    assert histogram(forward) == [0, 0, 0, 2, 1, 1, 1]
    backward = compare_schemes(hand_summary(), "ipm", "stable")
    assert histogram(backward) == [1, 1, 1, 2, 0, 0, 0]
    for f, b in zip(forward, backward):
        assert b.bin == len(ZETA_BINS) - 1 - f.bin


def test_missing_cell_warns():
    rows = [cell("x", "stable", 7)]
    with pytest.warns(UserWarning):
        assert compare_schemes(rows) == []


def write_csv(tmp_path, text):
    path = tmp_path / "cuts.csv"
    path.write_text(text)
    return path


def test_import_empty(tmp_path):
    assert import_external_cuts(write_csv(tmp_path, "")) == {}
    assert import_external_cuts(write_csv(tmp_path, "instance,k,tolerance,tool,cut\n")) == {}


def test_import_one_row(tmp_path):
    table = import_external_cuts(write_csv(tmp_path, "instance,k,tolerance,tool,cut\ng,2,1.05,patoh,12\n"))
    assert table == {("g", 2, 1.05, "patoh"): 12.0}


def test_import_duplicate_keeps_minimum(tmp_path):
    text = "tool,instance,k,tolerance,cut\npatoh,g,2,1.05,12\npatoh,g,2,1.05,9\n"
    with pytest.warns(UserWarning, match="duplicate"):
        table = import_external_cuts(write_csv(tmp_path, text))
    assert table == {("g", 2, 1.05, "patoh"): 9.0}


@pytest.mark.parametrize(
    "text, needle",
    [
        ("instance,k,tool,cut\n", "missing columns"),
        ("instance,k,tolerance,tool,cut\ng,two,1.05,patoh,3\n", ":2:"),
        ("instance,k,tolerance,tool,cut\ng,2,1.05,patoh,3\ng,2,1.05,patoh\n", ":3:"),
        ("instance,k,tolerance,tool,cut\ng,2,1.05,patoh,-3\n", ":2:"),
    ],
)
def test_import_malformed(tmp_path, text, needle):
    with pytest.raises(ExternalCutsError, match=needle):
        import_external_cuts(write_csv(tmp_path, text))


def test_compare_baselines():
    summary = [cell("g", "ipm", 10), cell("g", "stable", 8)]
    groups = compare_baselines(summary, {("g", 2, 1.05, "patoh"): 12.0, ("h", 2, 1.05, "patoh"): 1.0})
    assert {k: [r.value for r in v] for k, v in groups.items()} == {
        ("patoh", "ipm"): [1.2],
        ("patoh", "stable"): [1.5],
    }


def test_parse_scheme():
    assert parse_scheme("stable") == {"scheme": "stable"}
    assert parse_scheme("ipm:fv:conn") == {"scheme": "ipm", "ipm_order": "fv", "ipm_metric": "conn"}
    with pytest.raises(ValueError):
        parse_scheme("hem")


def small_spec(**kw):
    base = dict(inputs=[SMALL], k=[2], tolerances=[1.05], repetitions=20, schemes=["ipm", "stable"], seed=3)
    base.update(kw)
    return ExperimentSpec(**base)


@pytest.fixture(scope="module")
def forty_records():
    return run_experiments(small_spec())


def test_cardinality(forty_records):
    assert len(forty_records) == 40
    assert all(r["status"] == "ok" for r in forty_records)
    assert len({r["seed"] for r in forty_records}) == 40


def test_summary_matches_records(forty_records):
    summary = {r["scheme"]: r for r in summarize(forty_records)}
    for scheme in ("ipm", "stable"):
        cuts = sorted(r["cut"] for r in forty_records if r["scheme"] == scheme)
        assert summary[scheme]["best_cut"] == cuts[0]
        assert summary[scheme]["median_cut"] == statistics.median(cuts)
        assert summary[scheme]["runs"] == 20


def test_identical_seeds_identical_records():
    spec = small_spec(repetitions=2)
    strip = lambda recs: [{k: v for k, v in r.items() if k != "wall_time"} for r in recs]
    assert strip(run_experiments(spec)) == strip(run_experiments(spec))


def test_outputs_and_reproducibility(tmp_path):
    spec = small_spec(repetitions=2, k=[2, 4])
    baseline = tmp_path / "base.csv"
    baseline.write_text("instance,k,tolerance,tool,cut\nstencil9_14x14,2,1.05,hmetis,30\n")
    spec.baselines = [str(baseline)]
    write_bench_outputs(spec, run_experiments(spec), tmp_path / "a")
    manifest = write_bench_outputs(spec, run_experiments(spec), tmp_path / "b")
    for name in ("results.csv", "summary.csv", "zeta_stable_vs_ipm.csv", "zeta_stable_vs_ipm_cells.csv"):
        assert strip_volatile(tmp_path / "a" / name) == strip_volatile(tmp_path / "b" / name)
    assert (tmp_path / "a" / "zeta_hmetis_vs_ipm.csv").exists()
    data = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert data["n_records"] == 8 and len(data["zeta_bins"]) == 7
    assert data["defaults"]["omega"] == manifest["defaults"]["omega"]
    rows = read_records_csv(tmp_path / "a" / "results.csv")
    assert all(isinstance(r["cut"], float) for r in rows)


def test_spec_from_file(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text('inputs = ["g.mtx"]\nk = [2, 4]\nrepetitions = 3\n[options]\nomega = 0.7\n')
    spec = ExperimentSpec.from_file(path)
    assert spec.inputs == [str(tmp_path / "g.mtx")] and spec.k == [2, 4]
    assert spec.options == {"omega": 0.7}
    path.write_text('inputs = ["g.mtx"]\nbogus = 1\n')
    with pytest.raises(ValueError, match="bogus"):
        ExperimentSpec.from_file(path)


def test_bundled_spec_is_complete():
    spec = ExperimentSpec.from_file(DATA / "bench_suite.toml")
    assert len(spec.inputs) >= 10 and spec.k == [2, 4, 8] and spec.tolerances == [1.03, 1.05, 1.10]


def test_errors_are_recorded_not_raised(tmp_path):
    spec = small_spec(inputs=[str(tmp_path / "missing.mtx")], repetitions=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        recs = run_experiments(spec)
    assert all(r["status"] != "ok" for r in recs)
