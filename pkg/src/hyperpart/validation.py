"""Input validation helpers shared by the estimators and the pipeline."""
from __future__ import annotations

import numbers
from os import PathLike

import numpy as np
import scipy.sparse as sp

from .hypergraph import Hypergraph, from_sparse, load, validate


def check_hypergraph(X) -> Hypergraph:
    """Coerce ``X`` to a valid :class:`Hypergraph` or raise ``ValueError``.

    Accepts a hypergraph, a file path, or a (sparse) matrix which is read
    with the row-net model (columns are vertices, rows are edges).
    """
    if isinstance(X, (str, PathLike)):
        X = load(X)
    elif sp.issparse(X) or isinstance(X, np.ndarray):
        X = from_sparse(X)
    if not isinstance(X, Hypergraph):
        raise TypeError(f"expected a Hypergraph, sparse matrix or path, got {type(X).__name__}")
    findings = validate(X)
    if findings:
        shown = "; ".join(findings[:5])
        more = f" (+{len(findings) - 5} more)" if len(findings) > 5 else ""
        raise ValueError(f"invalid hypergraph: {shown}{more}")
    return X


def check_partition(hg: Hypergraph, part, k: int) -> np.ndarray:
    part = np.asarray(part)
    if part.shape != (hg.n_vertices,):
        raise ValueError(f"partition must have shape ({hg.n_vertices},), got {part.shape}")
    if not np.issubdtype(part.dtype, np.integer):
        raise ValueError("part ids must be integers")
    if part.size and (part.min() < 0 or part.max() >= k):
        raise ValueError(f"part ids must lie in [0, {k})")
    return part.astype(np.int64, copy=False)


def check_scalar_in(name, value, low, high, *, low_inclusive=True, high_inclusive=True, kind=numbers.Real):
    if not isinstance(value, kind) or isinstance(value, bool):
        raise TypeError(f"{name} must be {kind.__name__}, got {type(value).__name__}")
    ok_low = value >= low if low_inclusive else value > low
    ok_high = value <= high if high_inclusive else value < high
    if not (ok_low and ok_high):
        lb = "[" if low_inclusive else "("
        rb = "]" if high_inclusive else ")"
        raise ValueError(f"{name}={value!r} must lie in {lb}{low}, {high}{rb}")
    return value
