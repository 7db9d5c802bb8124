"""Planarity tester validated against the networkx LR implementation."""

import itertools

import networkx as nx
import numpy as np
import pytest

from crashlens.errors import DataError
from crashlens.planarity import is_planar


def oracle(n, edges):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return nx.is_planar(g)


def complete_edges(n):
    return list(itertools.combinations(range(n), 2))


def test_trivial_graphs_planar():
    assert is_planar(0, np.empty((0, 2), dtype=int))
    assert is_planar(1, np.empty((0, 2), dtype=int))
    assert is_planar(5, np.array([[0, 1], [1, 2], [2, 3]]))


def test_k5_not_planar_k4_planar():
    assert is_planar(4, np.array(complete_edges(4)))
    assert not is_planar(5, np.array(complete_edges(5)))


def test_k33_not_planar():
    edges = [(a, b) for a in range(3) for b in range(3, 6)]
    assert not is_planar(6, np.array(edges))


def test_k5_minus_edge_planar():
    edges = complete_edges(5)[:-1]
    assert is_planar(5, np.array(edges))


def subdivide(n, edges, times, seed):
    """Subdivide `times` randomly chosen edges, returning (n', edges')."""
    rng = np.random.default_rng(seed)
    edges = [tuple(e) for e in edges]
    for _ in range(times):
        i = int(rng.integers(len(edges)))
        u, v = edges.pop(i)
        edges.extend([(u, n), (n, v)])
        n += 1
    return n, edges


def test_kuratowski_subdivisions_not_planar():
    for seed in range(5):
        n, edges = subdivide(5, complete_edges(5), 6, seed)
        assert not is_planar(n, np.array(edges))
        k33 = [(a, b) for a in range(3) for b in range(3, 6)]
        n, edges = subdivide(6, k33, 6, seed + 100)
        assert not is_planar(n, np.array(edges))


def test_k5_subdivision_plus_isolated_component():
    n, edges = subdivide(5, complete_edges(5), 4, 0)
    # Planar component alongside the subdivision must not mask it.
    edges = edges + [(n, n + 1), (n + 1, n + 2), (n + 2, n)]
    assert not is_planar(n + 3, np.array(edges))


def test_grids_and_wheels_planar():
    for rows, cols in [(3, 3), (4, 5), (2, 10)]:
        g = nx.grid_2d_graph(rows, cols)
        g = nx.convert_node_labels_to_integers(g)
        assert is_planar(g.number_of_nodes(), np.array(g.edges))
    for n in (5, 9, 14):
        g = nx.wheel_graph(n)
        assert is_planar(n, np.array(g.edges))


def test_petersen_not_planar():
    g = nx.petersen_graph()
    assert not is_planar(10, np.array(g.edges))


def test_exhaustive_graphs_up_to_five_vertices():
    # All 1024 labeled simple graphs on 5 vertices against the oracle.
    pairs = complete_edges(5)
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        arr = np.array(edges, dtype=int).reshape(-1, 2)
        assert is_planar(5, arr) == oracle(5, edges), edges


def test_random_graphs_against_oracle():
    rng = np.random.default_rng(2024)
    checked_planar = checked_non = 0
    for _ in range(400):
        n = int(rng.integers(6, 16))
        p = float(rng.uniform(0.15, 0.7))
        g = nx.gnp_random_graph(n, p, seed=int(rng.integers(1 << 30)))
        edges = np.array(g.edges, dtype=int).reshape(-1, 2)
        expect = oracle(n, g.edges)
        assert is_planar(n, edges) == expect
        checked_planar += expect
        checked_non += not expect
    # the sweep must actually exercise both outcomes
    assert checked_planar > 50 and checked_non > 50


def test_random_planar_triangulation_like_graphs():
    # Dense planar instances: delete a few edges from grid + diagonals.
    rng = np.random.default_rng(7)
    for trial in range(30):
        rows, cols = 4, 5
        g = nx.grid_2d_graph(rows, cols)
        for r in range(rows - 1):
            for c in range(cols - 1):
                g.add_edge((r, c), (r + 1, c + 1))  # keeps planarity
        g = nx.convert_node_labels_to_integers(g)
        drop = rng.choice(g.number_of_edges(), size=3, replace=False)
        edges = [e for i, e in enumerate(g.edges) if i not in set(drop.tolist())]
        assert is_planar(g.number_of_nodes(), np.array(edges))


def test_disconnected_mixture_against_oracle():
    rng = np.random.default_rng(99)
    for _ in range(50):
        parts = []
        offset = 0
        for _ in range(int(rng.integers(2, 4))):
            n = int(rng.integers(3, 8))
            g = nx.gnp_random_graph(n, 0.5, seed=int(rng.integers(1 << 30)))
            parts.extend((u + offset, v + offset) for u, v in g.edges)
            offset += n
        arr = np.array(parts, dtype=int).reshape(-1, 2)
        assert is_planar(offset, arr) == oracle(offset, parts)


def test_input_validation():
    with pytest.raises(DataError):
        is_planar(3, np.array([[0, 3]]))
    with pytest.raises(DataError):
        is_planar(3, np.array([[1, 1]]))


def test_euler_bound_shortcut():
    # 20 vertices, 55 > 3*20-6 = 54 edges: rejected without running the DFS.
    edges = complete_edges(11)
    assert len(edges) == 55
    assert not is_planar(20, np.array(edges))
