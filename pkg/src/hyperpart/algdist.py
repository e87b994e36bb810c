"""Algebraic distances on hypergraphs via stationary relaxation on the star expansion.

Every star-expansion node (vertex or edge) carries a coordinate. One sweep
replaces each coordinate by an under-relaxed weighted average of its
neighbours and then rescales the whole vector affinely onto ``[-1/2, 1/2]``.
Vertices that stay close across several random test vectors are
algebraically close.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .hypergraph import Hypergraph
from .validation import check_scalar_in

#: Distances below this are clamped before inversion, so ``rho <= 1 / DISTANCE_EPS``.
DISTANCE_EPS = 1e-12
#: A rescale is skipped when the smoothed vector's spread falls to this value.
DEGENERATE_SPREAD = 1e-14
PERTURBATION = 1e-9
#: Relaxation weight. Lower values leave symmetric vertex pairs measurably apart after 20 sweeps.
DEFAULT_OMEGA = 0.9


@dataclass(frozen=True)
class AlgdistConfig:
    omega: float = DEFAULT_OMEGA
    n_test_vectors: int = 8
    n_iterations: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        check_scalar_in("omega", self.omega, 0.0, 1.0, low_inclusive=False)
        check_scalar_in("n_test_vectors", self.n_test_vectors, 1, np.inf, kind=int)
        check_scalar_in("n_iterations", self.n_iterations, 1, np.inf, kind=int)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class IterationOperator:
    """``H = omega * D^-1 W + (1 - omega) I`` restricted to non-isolated nodes."""

    H: sp.csr_matrix
    W: sp.csr_matrix
    degree: np.ndarray
    active: np.ndarray
    n_vertices: int
    omega: float

    @property
    def n_nodes(self):
        return self.W.shape[0]


@dataclass(frozen=True)
class Embeddings:
    """Final relaxed test vectors; ``coords`` has one column per test vector and
    one row per star-expansion node (vertices first, then edges)."""

    coords: np.ndarray
    n_vertices: int
    config: AlgdistConfig

    @property
    def vertex_coords(self) -> np.ndarray:
        return self.coords[: self.n_vertices]

    @property
    def n_test_vectors(self):
        return self.coords.shape[1]


def build_operator(hg: Hypergraph, omega: float = DEFAULT_OMEGA) -> IterationOperator:
    """Assemble the star-expansion weight matrix and its Jacobi iteration matrix.

    ``W`` has the vertex-to-edge block ``A^T S_h`` with ``S_h = w(e)/|e|`` and
    the edge-to-vertex block ``A S_v`` with ``S_v = w(v)``. ``D`` holds the row
    sums of ``W``, so ``D^-1 W`` is row-stochastic. Nodes with ``D = 0``
    (vertices in no edge) get a zero row and are reported inactive.
    """
    nv, ne = hg.n_vertices, hg.n_edges
    A = hg.incidence_matrix()
    sizes = hg.edge_sizes().astype(np.float64)
    S_h = sp.diags(hg.edge_weight / np.where(sizes > 0, sizes, 1.0))
    S_v = sp.diags(hg.vertex_weight)
    W = sp.bmat(
        [[sp.csr_matrix((nv, nv)), A.T @ S_h], [A @ S_v, sp.csr_matrix((ne, ne))]],
        format="csr",
    )
    degree = np.asarray(W.sum(axis=1)).ravel()
    active = degree > 0
    inv = np.zeros_like(degree)
    inv[active] = 1.0 / degree[active]
    identity = sp.diags(active.astype(np.float64))
    H = (omega * sp.diags(inv) @ W + (1.0 - omega) * identity).tocsr()
    return IterationOperator(H=H, W=W, degree=degree, active=active, n_vertices=nv, omega=omega)


def _rescale(xstar, active, rng):
    """Map each column of ``xstar`` affinely onto [-1/2, 1/2] over the active rows."""
    out = xstar.copy()
    if not active.any():
        return out
    sub = xstar[active]
    hi = sub.max(axis=0)
    lo = sub.min(axis=0)
    span = hi - lo
    for r in range(xstar.shape[1]):
        col = sub[:, r]
        if span[r] > DEGENERATE_SPREAD:
            # (x - lo)/span lands exactly in [0, 1] in floating point, unlike (x - mid)/span.
            out[active, r] = (col - lo[r]) / span[r] - 0.5
        else:
            noise = rng.uniform(-PERTURBATION, PERTURBATION, size=col.shape[0])
            out[active, r] = np.clip(col + noise, -0.5, 0.5)
    return out


def relax(hg: Hypergraph, config: AlgdistConfig | None = None, *, x0=None, callback=None) -> Embeddings:
    """Run ``n_iterations`` relaxation sweeps on ``n_test_vectors`` random vectors.

    ``x0`` overrides the random start (shape ``(n_vertices + n_edges, R)``).
    ``callback(iteration, coords)`` is invoked after each sweep.
    """
    config = config or AlgdistConfig()
    op = build_operator(hg, config.omega)
    rng = np.random.default_rng(config.rng_seed)
    n = op.n_nodes
    if x0 is None:
        x = rng.random((n, config.n_test_vectors))
    else:
        x = np.array(x0, dtype=np.float64, copy=True)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != n:
            raise ValueError(f"x0 must have {n} rows, got {x.shape[0]}")
    x[~op.active] = 0.0
    for it in range(1, config.n_iterations + 1):
        x = _rescale(op.H @ x, op.active, rng)
        if callback is not None:
            callback(it, x)
    return Embeddings(coords=x, n_vertices=hg.n_vertices, config=config)


def algdist(emb: Embeddings, i: int, j: int) -> float:
    """Largest coordinate gap between vertices ``i`` and ``j`` over all test vectors."""
    xv = emb.vertex_coords
    return float(np.max(np.abs(xv[i] - xv[j])))


def pairwise_algdist(emb: Embeddings, vertices) -> np.ndarray:
    xv = emb.vertex_coords[np.asarray(vertices, dtype=np.int64)]
    return np.max(np.abs(xv[:, None, :] - xv[None, :, :]), axis=2)


def edge_diameters(hg: Hypergraph, emb: Embeddings) -> np.ndarray:
    """Per-edge ``max_{i,j in e} algdist(i, j)``.

    In one dimension the largest pairwise gap is ``max - min``, and the max
    over test vectors commutes with the max over pairs, so this is exact.
    """
    if hg.n_edges == 0:
        return np.zeros(0)
    A = hg.incidence_matrix()
    xv = emb.vertex_coords
    pinned = xv[A.indices]
    starts = A.indptr[:-1]
    hi = np.maximum.reduceat(pinned, starts, axis=0)
    lo = np.minimum.reduceat(pinned, starts, axis=0)
    return (hi - lo).max(axis=1)


def edge_algebraic_weights(hg: Hypergraph, emb: Embeddings) -> np.ndarray:
    """``rho(e)``: inverse algebraic diameter of every edge, capped at ``1/DISTANCE_EPS``."""
    return 1.0 / np.maximum(edge_diameters(hg, emb), DISTANCE_EPS)


def edge_algebraic_weight(hg: Hypergraph, emb: Embeddings, e: int) -> float:
    pins = hg.pins[e]
    xv = emb.vertex_coords[list(pins)]
    diameter = float((xv.max(axis=0) - xv.min(axis=0)).max())
    return 1.0 / max(diameter, DISTANCE_EPS)


def write_embeddings_csv(emb: Embeddings, path) -> None:
    """Dump per-vertex coordinates, one column per test vector."""
    path = Path(path)
    xv = emb.vertex_coords
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex"] + [f"x{r}" for r in range(xv.shape[1])])
        for v, row in enumerate(xv.tolist()):
            writer.writerow([v] + [repr(c) for c in row])
