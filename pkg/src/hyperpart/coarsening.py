"""Seed selection, the two aggregation schemes and contraction.

Pairwise quantities between vertices ``i`` and ``j`` are summed over every
edge containing both, so for a weight function ``f`` we write
``f(e_ij) = sum(f(e) for e containing i and j)``. Summing ``f(e_ij)`` over
all ``j != i`` gives ``sum(f(e) * (|e| - 1) for e containing i)``, which
keeps every routine here linear in the number of pins.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .hypergraph import Hypergraph

SCHEMES = ("ipm", "stable")
IPM_ORDERS = ("random", "fv")
IPM_METRICS = ("ip", "conn")


@dataclass(frozen=True)
class SeedSplit:
    is_seed: np.ndarray
    fv: np.ndarray
    Q: float = 0.5

    @property
    def seeds(self) -> np.ndarray:
        return np.flatnonzero(self.is_seed)

    @property
    def non_seeds(self) -> np.ndarray:
        return np.flatnonzero(~self.is_seed)


@dataclass(frozen=True)
class Aggregation:
    """Strict aggregation: ``cluster_of[v]`` is the cluster of ``v`` and
    ``seed_of_cluster[c]`` the seed vertex of cluster ``c``. Non-seeds left
    without a cluster are promoted to the seed of a singleton cluster and
    listed in ``orphans``."""

    cluster_of: np.ndarray
    seed_of_cluster: np.ndarray
    orphans: tuple = ()
    waitlists: dict = field(default_factory=dict)

    @property
    def n_clusters(self):
        return len(self.seed_of_cluster)

    def members(self) -> list:
        out = [[] for _ in range(self.n_clusters)]
        for v, c in enumerate(self.cluster_of.tolist()):
            out[c].append(v)
        return out

    def cluster_weights(self, hg: Hypergraph) -> np.ndarray:
        return np.bincount(self.cluster_of, weights=hg.vertex_weight, minlength=self.n_clusters)


@dataclass(frozen=True)
class CoarseLevel:
    coarse: Hypergraph
    mapping: np.ndarray
    dropped_weight: float = 0.0
    provenance: dict = field(default_factory=dict)


def _finish(n_vertices, owner, orphans=(), waitlists=None):
    """Relabel ``owner`` (vertex -> seed vertex) into dense cluster ids ordered by seed."""
    owner = np.asarray(owner, dtype=np.int64)
    seeds = np.unique(owner)
    cluster_of = np.searchsorted(seeds, owner)
    return Aggregation(
        cluster_of=cluster_of,
        seed_of_cluster=seeds,
        orphans=tuple(sorted(orphans)),
        waitlists=waitlists or {},
    )


def future_volumes(hg: Hypergraph, restrict_to_F=None) -> np.ndarray:
    """``fv(i) = w(i) + sum_j w(j) w(e_ij) / sum_k w(e_jk)`` with raw edge weights.

    With ``restrict_to_F`` (a boolean mask or index collection) only pairs of
    F-vertices contribute; C-vertices keep ``fv = w``.
    """
    n = hg.n_vertices
    in_f = np.ones(n, dtype=bool)
    if restrict_to_F is not None:
        mask = np.asarray(restrict_to_F)
        if mask.dtype == bool:
            in_f = mask.copy()
        else:
            in_f = np.zeros(n, dtype=bool)
            in_f[mask.astype(np.int64)] = True
    fv = hg.vertex_weight.astype(np.float64).copy()
    if hg.n_edges == 0 or not in_f.any():
        return fv
    A = hg.incidence_matrix()
    AF = A.multiply(in_f[None, :].astype(np.float64)).tocsr()
    we = hg.edge_weight
    size_f = np.asarray(AF.sum(axis=1)).ravel()
    # S_j = sum_k w(e_jk) over F-neighbours k.
    strength = AF.T @ (we * np.maximum(size_f - 1.0, 0.0))
    share = np.zeros(n)
    ok = in_f & (strength > 0)
    share[ok] = hg.vertex_weight[ok] / strength[ok]
    per_edge = AF @ share
    contrib = AF.T @ (we * per_edge) - share * (AF.T @ we)
    fv[in_f] += contrib[in_f]
    return fv


def _pair_totals(hg: Hypergraph, rho):
    """``sum_j rho(e_vj)`` for every vertex ``v``."""
    sizes = hg.edge_sizes().astype(np.float64)
    return hg.incidence_matrix().T @ (np.asarray(rho) * np.maximum(sizes - 1.0, 0.0))


def strong_connection_ratio(hg: Hypergraph, rho, v: int, C) -> float:
    """Share of ``v``'s pairwise algebraic weight that goes to vertices of ``C``."""
    in_c = C if isinstance(C, np.ndarray) and C.dtype == bool else None
    if in_c is None:
        in_c = np.zeros(hg.n_vertices, dtype=bool)
        in_c[list(C)] = True
    num = den = 0.0
    for e in hg.incidence[v]:
        pins = hg.pins[e]
        r = rho[e]
        den += r * (len(pins) - 1)
        num += r * sum(1 for u in pins if u != v and in_c[u])
    return num / den if den > 0 else 0.0


def select_seeds(hg: Hypergraph, rho, Q: float = 0.5) -> SeedSplit:
    """Split vertices into seeds and non-seeds so that every non-seed is strongly
    connected (ratio > ``Q``) to the seeds."""
    n = hg.n_vertices
    rho = np.asarray(rho, dtype=np.float64)
    fv = future_volumes(hg)
    threshold = fv.mean() + 2.0 * fv.std() if n else 0.0
    is_seed = fv > threshold
    fv = future_volumes(hg, ~is_seed)

    seeds_in_edge = np.zeros(hg.n_edges)
    for v in np.flatnonzero(is_seed):
        for e in hg.incidence[v]:
            seeds_in_edge[e] += 1
    totals = _pair_totals(hg, rho)
    # Visit order fixed once: decreasing fv, lower id first on ties.
    order = np.lexsort((np.arange(n), -fv))
    incidence = hg.incidence
    for v in order.tolist():
        if is_seed[v]:
            continue
        den = totals[v]
        num = 0.0
        for e in incidence[v]:
            num += rho[e] * seeds_in_edge[e]
        if den <= 0 or num / den <= Q:
            is_seed[v] = True
            for e in incidence[v]:
                seeds_in_edge[e] += 1
    return SeedSplit(is_seed=is_seed, fv=fv, Q=Q)


def _visit_order(split: SeedSplit, order: str, rng):
    non_seeds = split.non_seeds
    if order == "random":
        return rng.permutation(non_seeds)
    if order == "fv":
        fv = split.fv[non_seeds]
        return non_seeds[np.lexsort((non_seeds, -fv))]
    raise ValueError(f"unknown visit order {order!r}; expected one of {IPM_ORDERS}")


def inner_product_aggregate(
    hg: Hypergraph,
    rho,
    split: SeedSplit,
    order: str = "random",
    metric: str = "ip",
    rng_seed=None,
    k: int = 2,
) -> Aggregation:
    """Attach each non-seed to the neighbouring seed with the best affinity.

    ``metric="ip"`` scores a seed ``u`` by the algebraic weight of edges
    containing both ``v`` and ``u``. ``metric="conn"`` scores the cluster of
    ``u`` by the algebraic weight of ``v``'s edges touching it, divided by the
    weight the cluster would have after admitting ``v``. Clusters that would
    exceed ``total_weight / k`` are skipped.
    """
    if metric not in IPM_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {IPM_METRICS}")
    rng = np.random.default_rng(rng_seed)
    rho = np.asarray(rho, dtype=np.float64).tolist()
    w = hg.vertex_weight.tolist()
    cap = hg.total_vertex_weight / k
    is_seed = split.is_seed.tolist()
    owner = [v if s else -1 for v, s in enumerate(is_seed)]
    cweight = [wv if s else 0.0 for wv, s in zip(w, is_seed)]
    orphans = []
    pins, incidence = hg.pins, hg.incidence
    use_conn = metric == "conn"

    for v in _visit_order(split, order, rng).tolist():
        ip = {}
        touch = {}
        for e in incidence[v]:
            r = rho[e]
            seen = set()
            for u in pins[e]:
                if is_seed[u]:
                    ip[u] = ip.get(u, 0.0) + r
                if use_conn:
                    o = owner[u]
                    if o >= 0 and o not in seen:
                        seen.add(o)
                        touch[o] = touch.get(o, 0.0) + r
        best, best_score = -1, -math.inf
        wv = w[v]
        for u in sorted(ip):
            if cweight[u] + wv > cap:
                continue
            score = touch[u] / (cweight[u] + wv) if use_conn else ip[u]
            if score > best_score:
                best, best_score = u, score
        if best < 0:
            owner[v] = v
            cweight[v] = wv
            orphans.append(v)
        else:
            owner[v] = best
            cweight[best] += wv
    return _finish(hg.n_vertices, owner, orphans)


def preference_lists(hg: Hypergraph, rho, is_seed):
    """Mutual preference lists between seeds and adjacent non-seeds.

    Returns ``(seed_prefs, nonseed_prefs, affinity)`` where lists are ordered
    by decreasing shared algebraic weight, lower vertex id first on ties, and
    ``affinity[(s, f)]`` is that shared weight.
    """
    affinity = {}
    for e, members in enumerate(hg.pins):
        r = rho[e]
        seeds = [u for u in members if is_seed[u]]
        if not seeds:
            continue
        others = [u for u in members if not is_seed[u]]
        for s in seeds:
            for f in others:
                affinity[(s, f)] = affinity.get((s, f), 0.0) + r
    seed_prefs = {int(s): [] for s in np.flatnonzero(is_seed)}
    nonseed_prefs = {int(f): [] for f in np.flatnonzero(~is_seed)}
    for (s, f), a in affinity.items():
        seed_prefs[s].append((-a, f))
        nonseed_prefs[f].append((-a, s))
    seed_prefs = {s: [f for _, f in sorted(lst)] for s, lst in seed_prefs.items()}
    nonseed_prefs = {f: [s for _, s in sorted(lst)] for f, lst in nonseed_prefs.items()}
    return seed_prefs, nonseed_prefs, affinity


def waitlist_capacity(max_vertex_weight: float) -> int:
    return int(math.floor(3.0 * max_vertex_weight + 10.0))


def deferred_acceptance(seed_prefs: dict, nonseed_prefs: dict, capacity: int):
    """Seed-proposing deferred acceptance with at most ``capacity`` held offers per seed.

    Returns ``(waitlists, holder)``: the non-seeds held by each seed (in order
    of acceptance) and the seed currently held by each non-seed.
    """
    rank = {f: {s: i for i, s in enumerate(prefs)} for f, prefs in nonseed_prefs.items()}
    waitlists = {s: {} for s in seed_prefs}
    holder = {}
    cursor = {s: 0 for s in seed_prefs}
    queue = deque(sorted(seed_prefs))
    queued = set(queue)
    while queue:
        s = queue.popleft()
        queued.discard(s)
        prefs = seed_prefs[s]
        held = waitlists[s]
        while len(held) < capacity and cursor[s] < len(prefs):
            f = prefs[cursor[s]]
            cursor[s] += 1
            f_rank = rank.get(f, {})
            if s not in f_rank:
                continue
            current = holder.get(f)
            if current is None:
                holder[f] = s
                held[f] = None
            elif f_rank[s] < f_rank[current]:
                holder[f] = s
                held[f] = None
                del waitlists[current][f]
                if current not in queued:
                    queue.append(current)
                    queued.add(current)
    return {s: list(held) for s, held in waitlists.items()}, holder


def stable_matching_aggregate(
    hg: Hypergraph,
    rho,
    split: SeedSplit,
    max_vtx_wgt: float | None = None,
    k: int = 2,
) -> Aggregation:
    """Aggregate non-seeds around seeds through a stable assignment.

    Each seed holds at most ``3 * max_vtx_wgt + 10`` non-seeds. Every seed
    then absorbs its waitlist in preference order while the cluster stays
    within ``total_weight / k``; anything left over becomes a singleton.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if max_vtx_wgt is None:
        max_vtx_wgt = float(hg.vertex_weight.max()) if hg.n_vertices else 1.0
    capacity = waitlist_capacity(max_vtx_wgt)
    is_seed = split.is_seed
    seed_prefs, nonseed_prefs, _ = preference_lists(hg, rho, is_seed)
    waitlists, _ = deferred_acceptance(seed_prefs, nonseed_prefs, capacity)

    w = hg.vertex_weight
    cap = hg.total_vertex_weight / k
    owner = np.where(is_seed, np.arange(hg.n_vertices), -1)
    for s, held in waitlists.items():
        total = w[s]
        position = {f: i for i, f in enumerate(seed_prefs[s])}
        for f in sorted(held, key=position.__getitem__):
            if total + w[f] <= cap:
                owner[f] = s
                total += w[f]
    orphans = np.flatnonzero(owner < 0)
    owner[orphans] = orphans
    return _finish(hg.n_vertices, owner, orphans.tolist(), waitlists)


def contract(hg: Hypergraph, agg: Aggregation, provenance=None) -> CoarseLevel:
    """Collapse every cluster into one vertex.

    Edges collapsing onto a single coarse vertex are dropped (their weight is
    kept in ``dropped_weight``); edges with identical coarse pin sets merge
    with summed weight.
    """
    mapping = np.asarray(agg.cluster_of, dtype=np.int64)
    n_coarse = agg.n_clusters
    vw = np.bincount(mapping, weights=hg.vertex_weight, minlength=n_coarse)
    merged = {}
    dropped = 0.0
    m = mapping.tolist()
    for pins, we in zip(hg.pins, hg.edge_weight.tolist()):
        key = tuple(sorted({m[v] for v in pins}))
        if len(key) < 2:
            dropped += we
            continue
        merged[key] = merged.get(key, 0.0) + we
    coarse = Hypergraph(n_coarse, list(merged), vw, list(merged.values()))
    return CoarseLevel(coarse=coarse, mapping=mapping, dropped_weight=dropped, provenance=dict(provenance or {}))
