from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from hyperpart import Hypergraph

DATA = Path(__file__).resolve().parents[1] / "src" / "hyperpart" / "data"


def random_hypergraph(rng, n_vertices, n_edges, max_size=4, weighted=False):
    edges = []
    for _ in range(n_edges):
        size = int(rng.integers(2, min(max_size, n_vertices) + 1))
        edges.append(sorted(rng.choice(n_vertices, size=size, replace=False).tolist()))
    vw = rng.integers(1, 4, size=n_vertices).astype(float) if weighted else None
    ew = rng.integers(1, 4, size=n_edges).astype(float) if weighted else None
    return Hypergraph(n_vertices, edges, vw, ew)


@st.composite
def hypergraphs(draw, min_vertices=2, max_vertices=12, max_edges=15, weighted=True):
    n = draw(st.integers(min_vertices, max_vertices))
    pin_set = st.lists(st.integers(0, n - 1), min_size=2, max_size=min(n, 5), unique=True)
    edges = draw(st.lists(pin_set, min_size=1, max_size=max_edges))
    if weighted:
        vw = draw(st.lists(st.integers(1, 5), min_size=n, max_size=n))
        ew = draw(st.lists(st.integers(1, 5), min_size=len(edges), max_size=len(edges)))
    else:
        vw, ew = None, None
    return Hypergraph(n, edges, vw, ew)


def brute_force_bisection(hg: Hypergraph, tolerance: float, targets=(0.5, 0.5)):
    """Minimum cut over all bisections with imbalance strictly below ``tolerance``.

    Returns ``(cut, part)`` or ``(inf, None)`` when no bisection is feasible.
    """
    n = hg.n_vertices
    masks = np.arange(2 ** (n - 1), dtype=np.int64)  # vertex n-1 fixed on side 0
    bits = (masks[:, None] >> np.arange(n)[None, :]) & 1
    w = hg.vertex_weight
    total = w.sum()
    side1 = bits @ w
    imb = np.maximum((total - side1) / (targets[0] * total), side1 / (targets[1] * total))
    if targets[0] != targets[1]:
        swapped = np.maximum(side1 / (targets[0] * total), (total - side1) / (targets[1] * total))
        bits = np.vstack([bits, 1 - bits])
        imb = np.concatenate([imb, swapped])
    cut = np.zeros(len(bits))
    for pins, we in zip(hg.pins, hg.edge_weight):
        cols = bits[:, list(pins)]
        cut += we * (cols.min(axis=1) != cols.max(axis=1))
    ok = imb < tolerance
    if not ok.any():
        return float("inf"), None
    idx = np.flatnonzero(ok)
    best = idx[np.argmin(cut[idx])]
    return float(cut[best]), bits[best].copy()


def bridge_hypergraph():
    """Two dense 5-vertex clusters {0..4} and {5..9}; vertices 0 and 5 joined by a weight-2 edge."""
    edges, weights = [], []
    for block in (range(0, 5), range(5, 10)):
        for a, b in itertools.combinations(block, 2):
            edges.append([a, b])
            weights.append(1.0)
    edges.append([0, 5])
    weights.append(2.0)
    return Hypergraph(10, edges, None, weights)


def blocking_pairs(seed_prefs, nonseed_prefs, waitlists, capacity):
    """All (seed, non-seed) pairs that would both rather be matched to each other."""
    holder = {f: s for s, held in waitlists.items() for f in held}
    out = []
    for s, prefs in seed_prefs.items():
        held = waitlists.get(s, [])
        srank = {f: i for i, f in enumerate(prefs)}
        worst = max((srank[f] for f in held), default=-1)
        for f in prefs:
            if f in held or s not in nonseed_prefs.get(f, []):
                continue
            frank = nonseed_prefs[f]
            cur = holder.get(f)
            f_wants = cur is None or frank.index(s) < frank.index(cur)
            s_wants = len(held) < capacity or srank[f] < worst
            if f_wants and s_wants:
                out.append((s, f))
    return out


@pytest.fixture
def data_dir():
    return DATA


#: One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
