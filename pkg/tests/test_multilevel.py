import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from hyperpart import Hypergraph, HypergraphPartitioner, MultilevelConfig, bisect, build_hierarchy, cut_report, kway
from hyperpart.multilevel import derive_seed, induced_subhypergraph

from .conftest import DATA, brute_force_bisection, bridge_hypergraph, hypergraphs, random_hypergraph


def components(n_comp, size):
    edges = []
    for c in range(n_comp):
        base = c * size
        edges += [[base + i, base + i + 1] for i in range(size - 1)] + [[base, base + size - 1]]
    return Hypergraph(n_comp * size, edges)


def test_small_input_is_single_level():
    hg = random_hypergraph(np.random.default_rng(0), 50, 60)
    h = build_hierarchy(hg, MultilevelConfig())
    assert h.sizes() == [50] and h.levels == ()


def test_symmetric_instance_terminates():
    hg = Hypergraph(200, [list(range(200))])
    h = build_hierarchy(hg, MultilevelConfig(coarsest_size=2))
    sizes = h.sizes()
    assert all(a > b for a, b in zip(sizes, sizes[1:]))


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("scheme", ["ipm", "stable"])
def test_levels_shrink_and_conserve_weight(seed, scheme):
    rng = np.random.default_rng(seed)
    hg = random_hypergraph(rng, 300, 400, weighted=True)
    h = build_hierarchy(hg, MultilevelConfig(scheme=scheme, rng_seed=seed, coarsest_size=20))
    sizes = h.sizes()
    assert len(sizes) > 1
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    total = hg.total_vertex_weight
    for coarse in h.hypergraphs[1:]:
        assert abs(coarse.total_vertex_weight - total) <= 1e-9 * total


def test_two_halves_cut_zero():
    hg = components(2, 60)
    part, _ = bisect(hg, MultilevelConfig(coarsest_size=10))
    assert cut_report(hg, part, 2).cut_weight == 0


def test_bridge():
    hg = bridge_hypergraph()
    part, _ = bisect(hg, MultilevelConfig(tolerance=1.10, coarsest_size=4))
    assert cut_report(hg, part, 2).cut_weight == 2 and part[0] != part[5]


def test_path_of_eight_matches_oracle():
    hg = Hypergraph(8, [[i, i + 1] for i in range(7)])
    best, _ = brute_force_bisection(hg, 1.10)
    assert best == 1
    part, _ = bisect(hg, MultilevelConfig(tolerance=1.10, coarsest_size=2))
    assert cut_report(hg, part, 2).cut_weight == best


def test_k_one():
    hg = random_hypergraph(np.random.default_rng(1), 20, 30)
    res = kway(hg, MultilevelConfig(k=1))
    assert res.cut == 0 and np.all(res.labels == 0)


def test_k_two_is_bisect():
    hg = random_hypergraph(np.random.default_rng(2), 150, 200)
    cfg = MultilevelConfig(k=2, rng_seed=5)
    part, _ = bisect(hg, cfg)
    np.testing.assert_array_equal(kway(hg, cfg).labels, part)


def test_four_components():
    hg = components(4, 40)
    res = kway(hg, MultilevelConfig(k=4, coarsest_size=8))
    assert res.cut == 0
    assert sorted(np.bincount(res.labels).tolist()) == [40, 40, 40, 40]


def test_too_many_parts():
    with pytest.raises(ValueError):
        kway(Hypergraph(3, [[0, 1]]), MultilevelConfig(k=4))


@settings(max_examples=25, deadline=None)
@given(hypergraphs(min_vertices=8, max_vertices=16, max_edges=20), st.integers(2, 5), st.integers(0, 100))
def test_kway_cut_matches_recomputation(hg, k, seed):
    res = kway(hg, MultilevelConfig(k=k, rng_seed=seed, coarsest_size=max(k, 4)))
    assert res.labels.min() >= 0 and res.labels.max() < k
    rep = cut_report(hg, res.labels, k)
    assert res.cut == rep.cut_weight and res.imbalance == rep.imbalance


@pytest.mark.parametrize("k", [3, 5, 6])
def test_uneven_k_balanced(k):
    hg = random_hypergraph(np.random.default_rng(k), 240, 300)
    res = kway(hg, MultilevelConfig(k=k, tolerance=1.05))
    assert res.imbalance < 1.05


def test_determinism():
    hg = load_one()
    cfg = MultilevelConfig(k=4, scheme="stable", rng_seed=9)
    a, b = kway(hg, cfg), kway(hg, cfg)
    np.testing.assert_array_equal(a.labels, b.labels)


def load_one():
    from hyperpart import load

    return load(DATA / "grid2d_16x16.mtx")


def test_induced_subhypergraph():
    hg = Hypergraph(5, [[0, 1, 2], [2, 3], [3, 4]], [1, 2, 3, 4, 5], [7, 8, 9])
    sub = induced_subhypergraph(hg, [4, 3, 2])
    assert sub.pins == ((1, 2), (0, 1))
    assert sub.edge_weight.tolist() == [8, 9]
    assert sub.vertex_weight.tolist() == [5, 4, 3]


def test_derive_seed():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert len({derive_seed(0, i) for i in range(100)}) == 100
    assert 0 <= derive_seed(123, 4) < 2**31


@pytest.mark.parametrize(
    "kwargs",
    [{"k": 0}, {"tolerance": 0.99}, {"scheme": "hem"}, {"Q": 1.5}, {"min_reduction": 1.0}, {"omega": 0}, {"k": 4, "coarsest_size": 2}],
)
def test_config_validation(kwargs):
    with pytest.raises((ValueError, TypeError)):
        MultilevelConfig(**kwargs)


def test_estimator_api():
    hg = load_one()
    est = HypergraphPartitioner(n_parts=4, scheme="stable", random_state=3)
    labels = est.fit_predict(hg)
    assert labels.shape == (256,)
    assert est.cut_ == -est.score(hg)
    assert est.imbalance_ < 1.05
    params = est.get_params()
    assert params["n_parts"] == 4 and params["scheme"] == "stable"
    twin = clone(est)
    np.testing.assert_array_equal(twin.fit(hg).labels_, labels)
    est.set_params(n_parts=2)
    assert est.fit(DATA / "grid2d_16x16.mtx").labels_.max() == 1


def test_estimator_accepts_sparse_matrix():
    import scipy.sparse as sp

    a = sp.random(80, 60, density=0.08, random_state=1) + sp.eye(80, 60)
    est = HypergraphPartitioner(random_state=0).fit(a.tocsr())
    assert est.labels_.shape == (60,)


def test_estimator_rejects_garbage():
    with pytest.raises((TypeError, ValueError)):
        HypergraphPartitioner().fit(42)
    with pytest.raises(ValueError):
        HypergraphPartitioner().fit(Hypergraph(3, [[0, 9]]))
