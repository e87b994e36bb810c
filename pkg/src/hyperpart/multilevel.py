"""V-cycle driver and recursive bisection."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .algdist import DEFAULT_OMEGA, AlgdistConfig, edge_algebraic_weights, relax
from .coarsening import (
    IPM_METRICS,
    IPM_ORDERS,
    SCHEMES,
    CoarseLevel,
    contract,
    inner_product_aggregate,
    select_seeds,
    stable_matching_aggregate,
)
from .hypergraph import Hypergraph, cut_report
from .refine import RefineConfig, bisection_imbalance, fm_refine, initial_bisect, project
from .validation import check_hypergraph, check_scalar_in

_COMPOSE_MARGIN = 1e-9


def derive_seed(base: int, *keys: int) -> int:
    """Deterministic 31-bit child seed for ``base`` and a path of integer keys."""
    ss = np.random.SeedSequence(int(base), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1)[0] & 0x7FFFFFFF)


@dataclass(frozen=True)
class MultilevelConfig:
    k: int = 2
    tolerance: float = 1.05
    scheme: str = "ipm"
    ipm_order: str = "random"
    ipm_metric: str = "ip"
    Q: float = 0.5
    omega: float = DEFAULT_OMEGA
    n_test_vectors: int = 8
    n_iterations: int = 20
    coarsest_size: int | None = None
    min_reduction: float = 0.9
    max_passes: int = 4
    n_initial_trials: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        check_scalar_in("k", self.k, 1, math.inf, kind=int)
        check_scalar_in("tolerance", self.tolerance, 1.0, math.inf)
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.ipm_order not in IPM_ORDERS:
            raise ValueError(f"ipm_order must be one of {IPM_ORDERS}, got {self.ipm_order!r}")
        if self.ipm_metric not in IPM_METRICS:
            raise ValueError(f"ipm_metric must be one of {IPM_METRICS}, got {self.ipm_metric!r}")
        check_scalar_in("Q", self.Q, 0.0, 1.0)
        check_scalar_in("min_reduction", self.min_reduction, 0.0, 1.0, low_inclusive=False, high_inclusive=False)
        if self.coarsest_size is not None:
            check_scalar_in("coarsest_size", self.coarsest_size, self.k, math.inf, kind=int)
        # validates the relaxation parameters
        self.algdist_config(0)

    @property
    def effective_coarsest_size(self) -> int:
        if self.coarsest_size is not None:
            return self.coarsest_size
        return max(100, 20 * self.k)

    def algdist_config(self, seed) -> AlgdistConfig:
        return AlgdistConfig(self.omega, self.n_test_vectors, self.n_iterations, seed)

    def refine_config(self, tolerance, seed) -> RefineConfig:
        return RefineConfig(self.max_passes, max(1.0, tolerance), seed, self.n_initial_trials)

    def as_dict(self):
        d = asdict(self)
        d["coarsest_size"] = self.effective_coarsest_size
        return d


@dataclass(frozen=True)
class Hierarchy:
    """``hypergraphs[0]`` is the input; ``levels[i]`` maps ``hypergraphs[i]`` onto ``hypergraphs[i + 1]``."""

    hypergraphs: tuple
    levels: tuple

    @property
    def coarsest(self) -> Hypergraph:
        return self.hypergraphs[-1]

    def sizes(self) -> list:
        return [h.n_vertices for h in self.hypergraphs]


def coarsen_once(hg: Hypergraph, cfg: MultilevelConfig, seed: int, k: int = 2) -> CoarseLevel:
    emb = relax(hg, cfg.algdist_config(derive_seed(seed, 0)))
    rho = edge_algebraic_weights(hg, emb)
    split = select_seeds(hg, rho, cfg.Q)
    if cfg.scheme == "ipm":
        agg = inner_product_aggregate(
            hg, rho, split, order=cfg.ipm_order, metric=cfg.ipm_metric, rng_seed=derive_seed(seed, 1), k=k
        )
    else:
        agg = stable_matching_aggregate(hg, rho, split, k=k)
    provenance = {
        "scheme": cfg.scheme,
        "n_seeds": int(split.is_seed.sum()),
        "n_orphans": len(agg.orphans),
    }
    if cfg.scheme == "ipm":
        provenance.update(ipm_order=cfg.ipm_order, ipm_metric=cfg.ipm_metric)
    return contract(hg, agg, provenance)


def build_hierarchy(hg: Hypergraph, cfg: MultilevelConfig | None = None, k: int = 2) -> Hierarchy:
    """Coarsen until the hypergraph is small enough or a level stops shrinking.

    Algebraic distances are recomputed on every level. A level is kept only
    if it is strictly smaller; coarsening stops once a level keeps more than
    ``min_reduction`` of its vertices.
    """
    cfg = cfg or MultilevelConfig()
    hgs = [hg]
    levels = []
    limit = cfg.effective_coarsest_size
    current = hg
    while current.n_vertices > limit and current.n_edges > 0:
        level = coarsen_once(current, cfg, derive_seed(cfg.rng_seed, len(levels)), k)
        n_coarse = level.coarse.n_vertices
        if n_coarse >= current.n_vertices:
            break
        levels.append(level)
        hgs.append(level.coarse)
        if n_coarse > cfg.min_reduction * current.n_vertices:
            break
        current = level.coarse
    return Hierarchy(tuple(hgs), tuple(levels))


def bisect(hg: Hypergraph, cfg: MultilevelConfig | None = None, targets=(0.5, 0.5), tolerance=None, hierarchy=None):
    """One V-cycle: coarsen, bisect the coarsest level, then project and refine upward.

    Returns ``(part, hierarchy)``.
    """
    cfg = cfg or MultilevelConfig()
    tolerance = cfg.tolerance if tolerance is None else tolerance
    if hierarchy is None:
        hierarchy = build_hierarchy(hg, cfg)
    depth = len(hierarchy.levels)
    part = initial_bisect(
        hierarchy.coarsest, cfg.refine_config(tolerance, derive_seed(cfg.rng_seed, 1000 + depth)), targets
    )
    for i in range(depth - 1, -1, -1):
        level = hierarchy.levels[i]
        part = project(part, level.mapping)
        part = fm_refine(
            hierarchy.hypergraphs[i], part, cfg.refine_config(tolerance, derive_seed(cfg.rng_seed, 1000 + i)), targets
        )
    return part, hierarchy


def induced_subhypergraph(hg: Hypergraph, vertices) -> Hypergraph:
    """Restrict ``hg`` to ``vertices`` (relabelled in the given order), keeping edges with at least two pins."""
    vertices = np.asarray(vertices, dtype=np.int64)
    local = {int(v): i for i, v in enumerate(vertices.tolist())}
    edges, weights = [], []
    for pins, w in zip(hg.pins, hg.edge_weight.tolist()):
        sub = [local[v] for v in pins if v in local]
        if len(sub) > 1:
            edges.append(sub)
            weights.append(w)
    return Hypergraph(len(vertices), edges, hg.vertex_weight[vertices], weights)


@dataclass
class PartitionResult:
    labels: np.ndarray
    k: int
    cut: float
    imbalance: float
    part_weights: list
    level_sizes: list = field(default_factory=list)
    wall_time: float = 0.0

    def as_dict(self):
        return {
            "k": self.k,
            "cut": self.cut,
            "imbalance": self.imbalance,
            "part_weights": self.part_weights,
            "level_sizes": self.level_sizes,
            "wall_time": self.wall_time,
        }


def kway(hg: Hypergraph, cfg: MultilevelConfig | None = None) -> PartitionResult:
    """Recursive bisection into ``cfg.k`` parts.

    A subproblem with ``k`` parts and tolerance ``t`` is bisected into
    ``ceil(k/2) : floor(k/2)`` weight shares under ``t ** (1/ceil(log2 k))``;
    each side then inherits ``t`` divided by the imbalance it actually got,
    so the composed partition stays within the global tolerance.
    """
    cfg = cfg or MultilevelConfig()
    hg = check_hypergraph(hg)
    k = cfg.k
    if k > hg.n_vertices:
        raise ValueError(f"cannot split {hg.n_vertices} vertices into {k} parts")
    started = time.perf_counter()
    labels = np.zeros(hg.n_vertices, dtype=np.int64)
    level_sizes = []

    def recurse(vertices, k_sub, tol, first, path):
        if k_sub == 1:
            labels[vertices] = first
            return
        sub = hg if len(vertices) == hg.n_vertices and not path else induced_subhypergraph(hg, vertices)
        k0 = (k_sub + 1) // 2
        k1 = k_sub - k0
        targets = (k0 / k_sub, k1 / k_sub)
        depth = math.ceil(math.log2(k_sub))
        step_tol = tol ** (1.0 / depth)
        seed = cfg.rng_seed if not path else derive_seed(cfg.rng_seed, *path)
        sub_cfg = replace(cfg, rng_seed=seed)
        part, hierarchy = bisect(sub, sub_cfg, targets, step_tol)
        level_sizes.append(hierarchy.sizes())
        sides = np.bincount(part, weights=sub.vertex_weight, minlength=2)
        total = float(sides.sum())
        for side, (k_side, first_side) in enumerate(((k0, first), (k1, first + k0))):
            ratio = sides[side] / (targets[side] * total) if total > 0 else 1.0
            # the margin keeps ratio * child imbalance strictly below tol despite rounding
            child_tol = max(1.0, tol / ratio * (1.0 - _COMPOSE_MARGIN)) if ratio > 0 else tol
            recurse(vertices[part == side], k_side, child_tol, first_side, path + (side + 1,))

    recurse(np.arange(hg.n_vertices), k, cfg.tolerance, 0, ())
    report = cut_report(hg, labels, k)
    return PartitionResult(
        labels=labels,
        k=k,
        cut=report.cut_weight,
        imbalance=report.imbalance,
        part_weights=list(report.part_weights),
        level_sizes=level_sizes,
        wall_time=time.perf_counter() - started,
    )


__all__ = [
    "MultilevelConfig",
    "Hierarchy",
    "PartitionResult",
    "build_hierarchy",
    "bisect",
    "kway",
    "coarsen_once",
    "induced_subhypergraph",
    "derive_seed",
    "DEFAULT_OMEGA",
    "bisection_imbalance",
]
