"""Regenerate the bundled desk-scale benchmark matrices under src/hyperpart/data.

The matrices stand in for small SuiteSparse problems: stencil and mesh
discretisations, banded and block systems, LP-style rectangular matrices
and adjacency matrices of random graph models. All generators are seeded.
"""
from pathlib import Path

import networkx as nx
import numpy as np
import scipy.io
import scipy.sparse as sp

OUT = Path(__file__).resolve().parents[1] / "src" / "hyperpart" / "data"


def grid2d(nx_, ny, nine=False):
    def lap1(n):
        return sp.diags([-1, 2, -1], [-1, 0, 1], shape=(n, n))

    a = sp.kron(sp.eye(ny), lap1(nx_)) + sp.kron(lap1(ny), sp.eye(nx_))
    if nine:
        d = sp.diags([1, 1], [-1, 1], shape=(nx_, nx_))
        e = sp.diags([1, 1], [-1, 1], shape=(ny, ny))
        a = a - sp.kron(e, d)
    return a.tocsr()


def grid3d(n1, n2, n3):
    def lap1(n):
        return sp.diags([-1, 2, -1], [-1, 0, 1], shape=(n, n))

    i1, i2, i3 = sp.eye(n1), sp.eye(n2), sp.eye(n3)
    a = sp.kron(sp.kron(i3, i2), lap1(n1)) + sp.kron(sp.kron(i3, lap1(n2)), i1) + sp.kron(sp.kron(lap1(n3), i2), i1)
    return a.tocsr()


def trimesh(n1, n2):
    g = nx.triangular_lattice_graph(n1, n2)
    g = nx.convert_node_labels_to_integers(g, ordering="sorted")
    return (nx.adjacency_matrix(g) + sp.eye(g.number_of_nodes())).tocsr()


def banded(n, rng):
    rows, cols = [], []
    for i in range(n):
        for j in range(max(0, i - rng.integers(1, 4)), min(n, i + rng.integers(2, 6))):
            rows.append(i)
            cols.append(j)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def blocks(n_blocks, size, rng):
    mats = [sp.random(size, size, density=0.08, random_state=rng) + sp.eye(size) for _ in range(n_blocks)]
    a = sp.block_diag(mats).tolil()
    n = n_blocks * size
    for _ in range(n_blocks * 3):
        i, j = rng.integers(0, n, size=2)
        a[i, j] = 1.0
    return a.tocsr()


def lp_rect(m, n, rng):
    rows, cols = [], []
    for i in range(m):
        nnz = rng.integers(3, 9)
        for j in rng.choice(n, size=nnz, replace=False):
            rows.append(i)
            cols.append(j)
    for i in rng.choice(m, size=2, replace=False):
        for j in rng.choice(n, size=n // 5, replace=False):
            rows.append(i)
            cols.append(j)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, n))


def graph_matrix(g):
    g = nx.convert_node_labels_to_integers(g)
    return (nx.adjacency_matrix(g, nodelist=range(g.number_of_nodes())) + sp.eye(g.number_of_nodes())).tocsr()


def circuit(m, n, rng):
    rows, cols = [], []
    for i in range(m):
        size = min(n, 2 + int(rng.pareto(1.5)))
        centre = rng.integers(0, n)
        span = max(size * 3, 8)
        pool = np.arange(max(0, centre - span), min(n, centre + span))
        for j in rng.choice(pool, size=min(size, len(pool)), replace=False):
            rows.append(i)
            cols.append(j)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, n))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20180101)
    suite = {
        "grid2d_16x16": (grid2d(16, 16), "symmetric"),
        "grid2d_12x30": (grid2d(12, 30), "symmetric"),
        "grid3d_6x6x8": (grid3d(6, 6, 8), "symmetric"),
        "stencil9_14x14": (grid2d(14, 14, nine=True), "symmetric"),
        "trimesh_14x30": (trimesh(14, 30), "symmetric"),
        "banded_300": (banded(300, rng), "general"),
        "blocks_4x64": (blocks(4, 64, rng), "general"),
        "lp_rect_200x400": (lp_rect(200, 400, rng), "general"),
        "powerlaw_ba_300": (graph_matrix(nx.barabasi_albert_graph(300, 2, seed=7)), "symmetric"),
        "geometric_320": (graph_matrix(nx.random_geometric_graph(320, 0.09, seed=11)), "symmetric"),
        "smallworld_ws_240": (graph_matrix(nx.watts_strogatz_graph(240, 4, 0.1, seed=5)), "symmetric"),
        "circuit_350x300": (circuit(350, 300, rng), "general"),
    }
    for name, (a, symmetry) in suite.items():
        a = sp.csr_matrix(a)
        a.data[:] = 1.0
        scipy.io.mmwrite(str(OUT / f"{name}.mtx"), a, symmetry=symmetry, field="real")
        print(f"{name}: {a.shape[0]}x{a.shape[1]} nnz={a.nnz}")


if __name__ == "__main__":
    main()
