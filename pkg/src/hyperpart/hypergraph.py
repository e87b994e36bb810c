"""Hypergraph data model, partition metrics and file formats."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class HypergraphFormatError(ValueError):
    """Raised when a hypergraph file cannot be parsed."""

    def __init__(self, message, path=None, lineno=None):
        where = ""
        if path is not None:
            where = f"{path}"
        if lineno is not None:
            where = f"{where}:{lineno}" if where else f"line {lineno}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.lineno = lineno


class Hypergraph:
    """Weighted hypergraph with incidence available in both directions.

    ``pins[e]`` is the sorted tuple of vertices of edge ``e`` and
    ``incidence[v]`` the sorted tuple of edges containing ``v``. Instances are
    treated as immutable once built.

    Construction is lenient: malformed input (out-of-range pins, duplicate
    pins, non-positive weights) is stored as given so that :func:`validate`
    can report it. Algorithms call :func:`hyperpart.validation.check_hypergraph`.
    """

    __slots__ = ("n_vertices", "pins", "vertex_weight", "edge_weight", "incidence", "_csr")

    def __init__(
        self,
        n_vertices: int,
        edges: Iterable[Sequence[int]],
        vertex_weight=None,
        edge_weight=None,
    ):
        self.n_vertices = int(n_vertices)
        self.pins = tuple(tuple(sorted(int(v) for v in e)) for e in edges)
        n_edges = len(self.pins)
        if vertex_weight is None:
            vertex_weight = np.ones(self.n_vertices)
        if edge_weight is None:
            edge_weight = np.ones(n_edges)
        self.vertex_weight = np.array(vertex_weight, dtype=np.float64)
        self.edge_weight = np.array(edge_weight, dtype=np.float64)
        self.vertex_weight.setflags(write=False)
        self.edge_weight.setflags(write=False)

        incidence = [[] for _ in range(max(self.n_vertices, 0))]
        for e, pins in enumerate(self.pins):
            last = None
            for v in pins:
                if 0 <= v < self.n_vertices and v != last:
                    incidence[v].append(e)
                last = v
        self.incidence = tuple(tuple(inc) for inc in incidence)
        self._csr = None

    @property
    def n_edges(self) -> int:
        return len(self.pins)

    @property
    def n_pins(self) -> int:
        return sum(len(p) for p in self.pins)

    @property
    def total_vertex_weight(self) -> float:
        return float(self.vertex_weight.sum())

    def edge_sizes(self) -> np.ndarray:
        return np.fromiter((len(p) for p in self.pins), dtype=np.int64, count=self.n_edges)

    def incidence_matrix(self) -> sp.csr_matrix:
        """Binary ``|E| x |V|`` incidence matrix ``A`` with ``A[e, v] = 1`` iff ``v in e``."""
        if self._csr is None:
            indptr = np.zeros(self.n_edges + 1, dtype=np.int64)
            indptr[1:] = np.cumsum(self.edge_sizes())
            indices = np.fromiter(
                (v for p in self.pins for v in p), dtype=np.int64, count=int(indptr[-1])
            )
            data = np.ones(len(indices))
            self._csr = sp.csr_matrix(
                (data, indices, indptr), shape=(self.n_edges, self.n_vertices)
            )
        return self._csr

    def neighbors(self, v: int) -> set:
        """Vertices sharing at least one edge with ``v`` (excluding ``v``)."""
        out = set()
        for e in self.incidence[v]:
            out.update(self.pins[e])
        out.discard(v)
        return out

    def __repr__(self):
        return f"Hypergraph(n_vertices={self.n_vertices}, n_edges={self.n_edges}, n_pins={self.n_pins})"

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.pins == other.pins
            and np.array_equal(self.vertex_weight, other.vertex_weight)
            and np.array_equal(self.edge_weight, other.edge_weight)
        )

    __hash__ = None

    def canonical_form(self):
        """Sorted multiset of ``(pins, weight)`` plus vertex weights, for isomorphism checks."""
        edges = sorted(zip(self.pins, self.edge_weight.tolist()))
        return edges, self.vertex_weight.tolist()


@dataclass(frozen=True)
class CutReport:
    cut_weight: float
    imbalance: float
    part_weights: tuple

    def as_dict(self):
        return {
            "cut": self.cut_weight,
            "imbalance": self.imbalance,
            "part_weights": list(self.part_weights),
        }


@dataclass(frozen=True)
class StarExpansion:
    """Bipartite graph: nodes ``0..n_vertices-1`` are vertices, then one node per edge."""

    n_vertices: int
    n_edges: int
    links: tuple

    @property
    def n_nodes(self):
        return self.n_vertices + self.n_edges

    def adjacency(self) -> sp.csr_matrix:
        n = self.n_nodes
        if not self.links:
            return sp.csr_matrix((n, n))
        rows, cols = zip(*self.links)
        rows = np.asarray(rows)
        cols = np.asarray(cols) + self.n_vertices
        data = np.ones(len(rows))
        a = sp.coo_matrix((data, (rows, cols)), shape=(n, n))
        return (a + a.T).tocsr()


def _as_parts(hg: Hypergraph, part, k=None):
    part = np.asarray(part, dtype=np.int64)
    if part.shape != (hg.n_vertices,):
        raise ValueError(
            f"partition covers {part.shape[0] if part.ndim else 0} vertices, hypergraph has {hg.n_vertices}"
        )
    if k is None:
        k = int(part.max()) + 1 if part.size else 1
    if k <= 0:
        raise ValueError("number of parts must be positive")
    if part.size and (part.min() < 0 or part.max() >= k):
        raise ValueError(f"part ids must lie in [0, {k})")
    return part, int(k)


def cut_weight(hg: Hypergraph, part, k=None) -> float:
    """Total weight of edges whose pins lie in two or more parts."""
    part, _ = _as_parts(hg, part, k)
    total = 0.0
    for e, pins in enumerate(hg.pins):
        if len(pins) < 2:
            continue
        first = part[pins[0]]
        for v in pins[1:]:
            if part[v] != first:
                total += hg.edge_weight[e]
                break
    return float(total)


def part_weights(hg: Hypergraph, part, k=None) -> np.ndarray:
    part, k = _as_parts(hg, part, k)
    return np.bincount(part, weights=hg.vertex_weight, minlength=k)


def imbalance(hg: Hypergraph, part, k=None) -> float:
    """Heaviest part weight over the average part weight."""
    weights = part_weights(hg, part, k)
    k = len(weights)
    total = weights.sum()
    if total <= 0:
        return 1.0
    return float(weights.max() / (total / k))


def cut_report(hg: Hypergraph, part, k=None) -> CutReport:
    part, k = _as_parts(hg, part, k)
    return CutReport(
        cut_weight=cut_weight(hg, part, k),
        imbalance=imbalance(hg, part, k),
        part_weights=tuple(part_weights(hg, part, k).tolist()),
    )


def star_expansion(hg: Hypergraph) -> StarExpansion:
    links = tuple((v, e) for e, pins in enumerate(hg.pins) for v in pins)
    return StarExpansion(hg.n_vertices, hg.n_edges, links)


def validate(hg: Hypergraph) -> list:
    """Return a list of human-readable invariant violations; empty means valid."""
    findings = []
    if hg.n_vertices < 0:
        findings.append(f"negative vertex count {hg.n_vertices}")
    if hg.vertex_weight.shape != (max(hg.n_vertices, 0),):
        findings.append(
            f"vertex weight vector has length {hg.vertex_weight.shape[0]}, expected {hg.n_vertices}"
        )
    else:
        for v in np.flatnonzero(~(hg.vertex_weight > 0)):
            findings.append(f"vertex {v} has non-positive weight {hg.vertex_weight[v]}")
    if hg.edge_weight.shape != (hg.n_edges,):
        findings.append(
            f"edge weight vector has length {hg.edge_weight.shape[0]}, expected {hg.n_edges}"
        )
    else:
        for e in np.flatnonzero(~(hg.edge_weight > 0)):
            findings.append(f"edge {e} has non-positive weight {hg.edge_weight[e]}")
    for e, pins in enumerate(hg.pins):
        if not pins:
            findings.append(f"edge {e} is empty")
            continue
        bad = [v for v in pins if not 0 <= v < hg.n_vertices]
        if bad:
            findings.append(f"edge {e} has out-of-range pins {bad}")
        if len(set(pins)) != len(pins):
            findings.append(f"edge {e} has duplicate pins")
    return findings


def _edges_from_pattern(rows, cols, n_rows):
    buckets = [set() for _ in range(n_rows)]
    for i, j in zip(rows, cols):
        buckets[i].add(j)
    return [sorted(b) for b in buckets if b]


def load_rownet(path) -> Hypergraph:
    """Read a Matrix Market coordinate file with the row-net model.

    Columns become vertices and every nonempty row becomes an edge holding the
    columns of its nonzeros. Values are ignored except that an explicit
    numeric zero does not create a pin. Symmetric (and skew/hermitian)
    storage mirrors each off-diagonal entry.
    """
    path = Path(path)
    with path.open() as fh:
        header = fh.readline()
        if not header.lower().startswith("%%matrixmarket"):
            raise HypergraphFormatError("missing %%MatrixMarket header", path, 1)
        tokens = header.split()
        if len(tokens) < 5:
            raise HypergraphFormatError("incomplete %%MatrixMarket header", path, 1)
        _, obj, fmt, field, symmetry = (t.lower() for t in tokens[:5])
        if obj != "matrix" or fmt != "coordinate":
            raise HypergraphFormatError(
                f"only 'matrix coordinate' files are supported, got '{obj} {fmt}'", path, 1
            )
        if field not in ("real", "integer", "pattern", "complex"):
            raise HypergraphFormatError(f"unknown field '{field}'", path, 1)
        if symmetry not in ("general", "symmetric", "skew-symmetric", "hermitian"):
            raise HypergraphFormatError(f"unknown symmetry '{symmetry}'", path, 1)
        n_values = {"pattern": 0, "complex": 2}.get(field, 1)

        lineno = 1
        size = None
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            try:
                size = [int(t) for t in stripped.split()]
            except ValueError:
                raise HypergraphFormatError(f"bad size line '{stripped}'", path, lineno) from None
            if len(size) != 3:
                raise HypergraphFormatError("size line must hold 'rows cols nnz'", path, lineno)
            break
        if size is None:
            raise HypergraphFormatError("missing size line", path, lineno)
        n_rows, n_cols, nnz = size
        if n_rows <= 0 or n_cols <= 0:
            raise HypergraphFormatError(f"zero-dimension matrix {n_rows}x{n_cols}", path, lineno)

        rows, cols = [], []
        seen = 0
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            parts = stripped.split()
            if len(parts) != 2 + n_values:
                raise HypergraphFormatError(
                    f"expected {2 + n_values} fields, got {len(parts)}", path, lineno
                )
            try:
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
                values = [float(t) for t in parts[2:]]
            except ValueError:
                raise HypergraphFormatError(f"malformed entry '{stripped}'", path, lineno) from None
            if not (0 <= i < n_rows and 0 <= j < n_cols):
                raise HypergraphFormatError(
                    f"index ({i + 1}, {j + 1}) outside {n_rows}x{n_cols}", path, lineno
                )
            seen += 1
            if values and all(v == 0.0 for v in values):
                continue
            rows.append(i)
            cols.append(j)
            if symmetry != "general" and i != j:
                rows.append(j)
                cols.append(i)
        if seen != nnz:
            raise HypergraphFormatError(f"size line declares {nnz} entries, found {seen}", path, lineno)
    if not rows:
        raise HypergraphFormatError("matrix has zero pins", path)
    return Hypergraph(n_cols, _edges_from_pattern(rows, cols, n_rows))


def write_rownet(hg: Hypergraph, path) -> None:
    """Write the pin pattern as a pattern Matrix Market file (edges are rows)."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write("%%MatrixMarket matrix coordinate pattern general\n")
        fh.write(f"{hg.n_edges} {hg.n_vertices} {hg.n_pins}\n")
        for e, pins in enumerate(hg.pins):
            for v in pins:
                fh.write(f"{e + 1} {v + 1}\n")


def read_native(path) -> Hypergraph:
    """Read the plain text format: ``n_vertices n_edges`` then ``weight v0 v1 ...``
    per edge, then an optional line of vertex weights. Ids are zero-based and
    ``#`` starts a comment."""
    path = Path(path)
    lines = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if stripped:
                lines.append((lineno, stripped))
    if not lines:
        raise HypergraphFormatError("empty file", path)

    def numbers(lineno, text, kind):
        try:
            return [kind(t) for t in text.split()]
        except ValueError:
            raise HypergraphFormatError(f"malformed line '{text}'", path, lineno) from None

    lineno, text = lines[0]
    head = numbers(lineno, text, int)
    if len(head) != 2:
        raise HypergraphFormatError("first line must be 'n_vertices n_edges'", path, lineno)
    n_vertices, n_edges = head
    if len(lines) - 1 < n_edges:
        raise HypergraphFormatError(f"expected {n_edges} edge lines", path, lines[-1][0])
    edges, weights = [], []
    for lineno, text in lines[1 : 1 + n_edges]:
        fields = text.split()
        if len(fields) < 2:
            raise HypergraphFormatError("edge line needs a weight and at least one pin", path, lineno)
        weights.append(numbers(lineno, fields[0], float)[0])
        edges.append(numbers(lineno, " ".join(fields[1:]), int))
    vertex_weight = None
    rest = lines[1 + n_edges :]
    if len(rest) > 1:
        raise HypergraphFormatError("trailing content after vertex weights", path, rest[1][0])
    if rest:
        lineno, text = rest[0]
        vertex_weight = numbers(lineno, text, float)
        if len(vertex_weight) != n_vertices:
            raise HypergraphFormatError(
                f"expected {n_vertices} vertex weights, got {len(vertex_weight)}", path, lineno
            )
    return Hypergraph(n_vertices, edges, vertex_weight, weights)


def write_native(hg: Hypergraph, path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"{hg.n_vertices} {hg.n_edges}\n")
        for pins, w in zip(hg.pins, hg.edge_weight.tolist()):
            fh.write(f"{w!r} {' '.join(map(str, pins))}\n")
        if not np.all(hg.vertex_weight == 1.0):
            fh.write(" ".join(repr(w) for w in hg.vertex_weight.tolist()) + "\n")


def load(path) -> Hypergraph:
    """Load by extension: ``.mtx`` via the row-net model, anything else as native text."""
    path = Path(path)
    if path.suffix.lower() == ".mtx":
        return load_rownet(path)
    return read_native(path)


def from_sparse(matrix) -> Hypergraph:
    """Row-net hypergraph of a scipy sparse (or dense) matrix's nonzero pattern."""
    a = sp.csr_matrix(matrix)
    a.eliminate_zeros()
    edges = [sorted(set(a.indices[a.indptr[i] : a.indptr[i + 1]].tolist())) for i in range(a.shape[0])]
    return Hypergraph(a.shape[1], [e for e in edges if e])
