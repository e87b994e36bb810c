"""scikit-learn compatible front ends.

``X`` is a :class:`~hyperpart.hypergraph.Hypergraph`, a path to a ``.mtx`` or
native hypergraph file, or a (sparse) matrix read with the row-net model.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .algdist import AlgdistConfig, edge_algebraic_weights, relax
from .multilevel import DEFAULT_OMEGA, MultilevelConfig, kway
from .validation import check_hypergraph


def _seed(random_state):
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    return int(check_random_state(random_state).randint(2**31 - 1))


class HypergraphPartitioner(ClusterMixin, BaseEstimator):
    """Multilevel k-way hypergraph partitioner with aggregative coarsening.

    Parameters
    ----------
    n_parts : int
        Number of parts ``k``.
    tolerance : float
        Imbalance bound; a partition is feasible when its heaviest part is
        below ``tolerance`` times the average part weight.
    scheme : {"ipm", "stable"}
        Inner-product aggregation or stable-matching aggregation.
    ipm_order : {"random", "fv"}
        Non-seed visit order for inner-product aggregation.
    ipm_metric : {"ip", "conn"}
        Inner product, or connectivity normalised by cluster weight.
    Q : float
        Strong-connection threshold for seed selection.
    omega, n_test_vectors, n_iterations
        Relaxation parameters for the algebraic distances.
    coarsest_size : int or None
        Stop coarsening at this many vertices; ``None`` means
        ``max(100, 20 * n_parts)``.
    min_reduction : float
        Stop coarsening once a level keeps more than this share of vertices.
    max_passes, n_initial_trials : int
        FM passes per level and region-growing starts at the coarsest level.
    random_state : int, RandomState or None

    Attributes
    ----------
    labels_ : ndarray of shape (n_vertices,)
    cut_ : float
    imbalance_ : float
    part_weights_ : list of float
    level_sizes_ : list of list of int
        Vertex counts of every coarsening hierarchy, one list per bisection.
    """

    def __init__(
        self,
        n_parts=2,
        tolerance=1.05,
        scheme="ipm",
        ipm_order="random",
        ipm_metric="ip",
        Q=0.5,
        omega=DEFAULT_OMEGA,
        n_test_vectors=8,
        n_iterations=20,
        coarsest_size=None,
        min_reduction=0.9,
        max_passes=4,
        n_initial_trials=4,
        random_state=None,
    ):
        self.n_parts = n_parts
        self.tolerance = tolerance
        self.scheme = scheme
        self.ipm_order = ipm_order
        self.ipm_metric = ipm_metric
        self.Q = Q
        self.omega = omega
        self.n_test_vectors = n_test_vectors
        self.n_iterations = n_iterations
        self.coarsest_size = coarsest_size
        self.min_reduction = min_reduction
        self.max_passes = max_passes
        self.n_initial_trials = n_initial_trials
        self.random_state = random_state

    def _config(self) -> MultilevelConfig:
        return MultilevelConfig(
            k=self.n_parts,
            tolerance=self.tolerance,
            scheme=self.scheme,
            ipm_order=self.ipm_order,
            ipm_metric=self.ipm_metric,
            Q=self.Q,
            omega=self.omega,
            n_test_vectors=self.n_test_vectors,
            n_iterations=self.n_iterations,
            coarsest_size=self.coarsest_size,
            min_reduction=self.min_reduction,
            max_passes=self.max_passes,
            n_initial_trials=self.n_initial_trials,
            rng_seed=_seed(self.random_state),
        )

    def fit(self, X, y=None):
        hg = check_hypergraph(X)
        cfg = self._config()
        result = kway(hg, cfg)
        self.config_ = cfg
        self.labels_ = result.labels
        self.cut_ = result.cut
        self.imbalance_ = result.imbalance
        self.part_weights_ = result.part_weights
        self.level_sizes_ = result.level_sizes
        self.n_vertices_ = hg.n_vertices
        self.result_ = result
        return self

    def score(self, X=None, y=None):
        """Negative cut of the fitted partition (larger is better)."""
        check_is_fitted(self, "labels_")
        return -self.cut_


class AlgebraicDistance(TransformerMixin, BaseEstimator):
    """Relaxation-based vertex embedding of a hypergraph.

    ``fit`` stores the relaxed test vectors; ``transform`` returns per-vertex
    coordinates with one column per test vector. The embedding is
    transductive, so ``transform`` relaxes whatever hypergraph it receives
    with the fitted parameters.
    """

    def __init__(self, omega=DEFAULT_OMEGA, n_test_vectors=8, n_iterations=20, random_state=None):
        self.omega = omega
        self.n_test_vectors = n_test_vectors
        self.n_iterations = n_iterations
        self.random_state = random_state

    def _cfg(self):
        return AlgdistConfig(self.omega, self.n_test_vectors, self.n_iterations, _seed(self.random_state))

    def fit(self, X, y=None):
        hg = check_hypergraph(X)
        self.config_ = self._cfg()
        self.embeddings_ = relax(hg, self.config_)
        self.edge_weights_ = edge_algebraic_weights(hg, self.embeddings_)
        self.n_vertices_ = hg.n_vertices
        return self

    def transform(self, X):
        check_is_fitted(self, "embeddings_")
        hg = check_hypergraph(X)
        return relax(hg, self.config_).vertex_coords.copy()

    def fit_transform(self, X, y=None):
        return self.fit(X).embeddings_.vertex_coords.copy()
