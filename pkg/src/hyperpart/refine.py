"""Initial bisection, Fiduccia-Mattheyses refinement and solution projection."""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, asdict

import numpy as np

from .hypergraph import Hypergraph
from .validation import check_scalar_in

#: Edge weights are scaled to integers so gain arithmetic is exact.
GAIN_SCALE = 10**6
#: How many heap entries are inspected per side when looking for an admissible move.
SCAN_LIMIT = 16


@dataclass(frozen=True)
class RefineConfig:
    max_passes: int = 4
    balance_tolerance: float = 1.05
    rng_seed: int = 0
    n_trials: int = 4

    def __post_init__(self):
        check_scalar_in("max_passes", self.max_passes, 1, math.inf, kind=int)
        check_scalar_in("balance_tolerance", self.balance_tolerance, 1.0, math.inf)
        check_scalar_in("n_trials", self.n_trials, 1, math.inf, kind=int)

    def as_dict(self):
        return asdict(self)


def _targets(targets):
    if targets is None:
        return (0.5, 0.5)
    f0, f1 = (float(t) for t in targets)
    s = f0 + f1
    return (f0 / s, f1 / s)


def bisection_imbalance(weights, total, targets=(0.5, 0.5)) -> float:
    """Largest ratio of a side's weight to its target share of ``total``."""
    if total <= 0:
        return 1.0
    return max(weights[0] / (targets[0] * total), weights[1] / (targets[1] * total))


def _state_key(cut, imb, tol):
    # Feasible states compare by cut; infeasible ones by imbalance first.
    return (0.0 if imb < tol else imb, cut, imb)


class _Bisection:
    """Mutable FM state for one bisection of ``hg``."""

    def __init__(self, hg: Hypergraph, part, targets):
        self.hg = hg
        self.part = [int(p) for p in part]
        self.wint = [int(round(w * GAIN_SCALE)) for w in hg.edge_weight.tolist()]
        self.vw = hg.vertex_weight.tolist()
        self.total = float(sum(self.vw))
        self.targets = targets
        self.side_weight = [0.0, 0.0]
        for v, p in enumerate(self.part):
            self.side_weight[p] += self.vw[v]
        self.counts = []
        self.cut = 0
        for e, pins in enumerate(hg.pins):
            c = [0, 0]
            for v in pins:
                c[self.part[v]] += 1
            self.counts.append(c)
            if c[0] and c[1]:
                self.cut += self.wint[e]

    def imbalance(self, weights=None):
        return bisection_imbalance(weights or self.side_weight, self.total, self.targets)

    def initial_gains(self):
        gain = [0] * self.hg.n_vertices
        part = self.part
        for e, pins in enumerate(self.hg.pins):
            if len(pins) < 2:
                continue
            we = self.wint[e]
            c = self.counts[e]
            for u in pins:
                p = part[u]
                if c[p] == 1:
                    gain[u] += we
                if c[1 - p] == 0:
                    gain[u] -= we
        return gain

    def move(self, v, gain=None, locked=None, touched=None):
        """Move ``v`` to the other side, updating counts, cut and (optionally) gains."""
        part, pins_of, counts, wint = self.part, self.hg.pins, self.counts, self.wint
        src = part[v]
        dst = 1 - src
        track = gain is not None
        for e in self.hg.incidence[v]:
            pins = pins_of[e]
            if len(pins) < 2:
                continue
            we = wint[e]
            c = counts[e]
            if track:
                if c[dst] == 0:
                    for u in pins:
                        if not locked[u]:
                            gain[u] += we
                            touched.add(u)
                elif c[dst] == 1:
                    for u in pins:
                        if part[u] == dst and not locked[u]:
                            gain[u] -= we
                            touched.add(u)
            was_cut = c[0] > 0 and c[1] > 0
            c[src] -= 1
            c[dst] += 1
            now_cut = c[0] > 0 and c[1] > 0
            if was_cut != now_cut:
                self.cut += we if now_cut else -we
            if track:
                if c[src] == 0:
                    for u in pins:
                        if not locked[u]:
                            gain[u] -= we
                            touched.add(u)
                elif c[src] == 1:
                    for u in pins:
                        if part[u] == src and u != v and not locked[u]:
                            gain[u] += we
                            touched.add(u)
        part[v] = dst
        self.side_weight[src] -= self.vw[v]
        self.side_weight[dst] += self.vw[v]


def _fm_pass(state: _Bisection, tol, rng):
    """One FM pass; returns True if the state key improved."""
    n = state.hg.n_vertices
    gain = state.initial_gains()
    locked = [False] * n
    order = rng.permutation(n).tolist()
    tiebreak = [0] * n
    for i, v in enumerate(order):
        tiebreak[v] = i
    heaps = ([], [])
    for v in range(n):
        heaps[state.part[v]].append((-gain[v], tiebreak[v], v))
    for h in heaps:
        heapq.heapify(h)

    start_key = _state_key(state.cut, state.imbalance(), tol)
    best_key, best_len = start_key, 0
    moves = []
    vw = state.vw
    max_stall = max(64, n // 4)
    # From a feasible state a move may overshoot the bound by one vertex so
    # that two moves can act as a swap; rollback keeps the best prefix.
    slack = max(vw) if vw else 0.0
    ceiling = [tol * t * state.total + slack for t in state.targets]

    while True:
        current_imb = state.imbalance()
        feasible = current_imb < tol
        choice = None
        for side in (0, 1):
            heap = heaps[side]
            aside = []
            found = None
            while heap and len(aside) < SCAN_LIMIT:
                neg, tb, v = heap[0]
                if locked[v] or state.part[v] != side or -neg != gain[v]:
                    heapq.heappop(heap)
                    continue
                w = state.side_weight[:]
                w[side] -= vw[v]
                w[1 - side] += vw[v]
                new_imb = state.imbalance(w)
                if new_imb < tol or new_imb <= current_imb + 1e-12 or (feasible and w[1 - side] <= ceiling[1 - side]):
                    found = (gain[v], -new_imb, v)
                    break
                aside.append(heapq.heappop(heap))
            for entry in aside:
                heapq.heappush(heap, entry)
            if found and (choice is None or found[:2] > choice[:2]):
                choice = found
        if choice is None:
            break
        v = choice[2]
        locked[v] = True
        touched = set()
        state.move(v, gain, locked, touched)
        moves.append(v)
        for u in touched:
            heapq.heappush(heaps[state.part[u]], (-gain[u], tiebreak[u], u))
        key = _state_key(state.cut, state.imbalance(), tol)
        if key < best_key:
            best_key, best_len = key, len(moves)
        elif len(moves) - best_len > max_stall:
            break

    for v in reversed(moves[best_len:]):
        state.move(v)
    return best_key < start_key


def fm_refine(hg: Hypergraph, part, config: RefineConfig | None = None, targets=None) -> np.ndarray:
    """Improve a bisection with boundary-first FM passes and best-prefix rollback.

    A move is admissible when the resulting imbalance is below the tolerance,
    no worse than the current one, or (from a feasible state) overshoots the
    bound by at most one vertex weight. The returned state is never worse than the input in
    ``(imbalance violation, cut)`` order.
    """
    config = config or RefineConfig()
    targets = _targets(targets)
    part = np.asarray(part, dtype=np.int64)
    if hg.n_vertices == 0:
        return part.copy()
    if part.min() < 0 or part.max() > 1:
        raise ValueError("fm_refine expects a bisection with part ids in {0, 1}")
    state = _Bisection(hg, part, targets)
    rng = np.random.default_rng(config.rng_seed)
    for _ in range(config.max_passes):
        if not _fm_pass(state, config.balance_tolerance, rng):
            break
    return np.asarray(state.part, dtype=np.int64)


def _grow_region(hg: Hypergraph, start, targets, rng):
    n = hg.n_vertices
    w = hg.vertex_weight.tolist()
    target = targets[0] * sum(w)
    part = [1] * n
    visited = [False] * n
    heavy_first = sorted(range(n), key=lambda v: (-w[v], v))
    weight0 = 0.0
    queue = deque([start])
    visited[start] = True
    fallback = iter(heavy_first if rng is None else rng.permutation(n).tolist())
    while weight0 < target:
        if not queue:
            nxt = next((v for v in fallback if not visited[v]), None)
            if nxt is None:
                break
            visited[nxt] = True
            queue.append(nxt)
        u = queue.popleft()
        if weight0 + w[u] - target > target - weight0:
            continue
        part[u] = 0
        weight0 += w[u]
        for e in hg.incidence[u]:
            for x in hg.pins[e]:
                if not visited[x]:
                    visited[x] = True
                    queue.append(x)
    return np.asarray(part, dtype=np.int64)


def initial_bisect(hg: Hypergraph, config: RefineConfig | None = None, targets=None) -> np.ndarray:
    """Greedy BFS region growing followed by FM, keeping the best of several starts.

    The first start is the heaviest vertex; further starts are drawn from the
    seeded generator.
    """
    config = config or RefineConfig()
    targets = _targets(targets)
    n = hg.n_vertices
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rng = np.random.default_rng(config.rng_seed)
    w = hg.vertex_weight
    heaviest = int(np.lexsort((np.arange(n), -w))[0])
    starts = [heaviest] + rng.integers(0, n, size=config.n_trials - 1).tolist()
    best, best_key = None, None
    total = float(w.sum())
    for trial, start in enumerate(starts):
        part = _grow_region(hg, start, targets, None if trial == 0 else rng)
        part = fm_refine(
            hg,
            part,
            RefineConfig(config.max_passes, config.balance_tolerance, int(rng.integers(2**31))),
            targets,
        )
        sides = np.bincount(part, weights=w, minlength=2)
        key = _state_key(
            _cut_bisection(hg, part), bisection_imbalance(sides, total, targets), config.balance_tolerance
        )
        if best_key is None or key < best_key:
            best, best_key = part, key
    return best


def _cut_bisection(hg, part):
    cut = 0.0
    for e, pins in enumerate(hg.pins):
        if len(pins) > 1 and any(part[v] != part[pins[0]] for v in pins):
            cut += hg.edge_weight[e]
    return cut


def project(p_coarse, mapping) -> np.ndarray:
    """Part of every fine vertex is the part of its coarse image."""
    p_coarse = np.asarray(p_coarse, dtype=np.int64)
    mapping = np.asarray(mapping, dtype=np.int64)
    if mapping.size and (mapping.min() < 0 or mapping.max() >= len(p_coarse)):
        bad = int(np.flatnonzero((mapping < 0) | (mapping >= len(p_coarse)))[0])
        raise ValueError(f"fine vertex {bad} is not mapped to a coarse vertex")
    return p_coarse[mapping]
