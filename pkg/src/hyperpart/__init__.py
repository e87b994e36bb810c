"""Multilevel hypergraph partitioning with aggregative coarsening.

Coarsening splits each level into seeds and non-seeds using future volumes
and algebraic distances, then aggregates non-seeds around seeds either by
inner product or by a stable assignment. Refinement is FM on recursive
bisections.
"""

__version__ = "0.1.0"

from .algdist import AlgdistConfig, Embeddings, algdist, edge_algebraic_weights, relax
from .coarsening import (
    Aggregation,
    SeedSplit,
    contract,
    future_volumes,
    inner_product_aggregate,
    select_seeds,
    stable_matching_aggregate,
    strong_connection_ratio,
)
from .estimator import AlgebraicDistance, HypergraphPartitioner
from .hypergraph import (
    CutReport,
    Hypergraph,
    HypergraphFormatError,
    cut_report,
    cut_weight,
    from_sparse,
    imbalance,
    load,
    load_rownet,
    star_expansion,
    validate,
    write_rownet,
)
from .multilevel import MultilevelConfig, bisect, build_hierarchy, kway
from .refine import RefineConfig, fm_refine, initial_bisect, project

__all__ = [
    "AlgdistConfig", "Embeddings", "algdist", "edge_algebraic_weights", "relax",
    "Aggregation", "SeedSplit", "contract", "future_volumes", "inner_product_aggregate",
    "select_seeds", "stable_matching_aggregate", "strong_connection_ratio",
    "AlgebraicDistance", "HypergraphPartitioner",
    "CutReport", "Hypergraph", "HypergraphFormatError", "cut_report", "cut_weight", "imbalance", "load", "load_rownet",
    "from_sparse", "star_expansion", "validate", "write_rownet",
    "MultilevelConfig", "bisect", "build_hierarchy", "kway",
    "RefineConfig", "fm_refine", "initial_bisect", "project",
]
