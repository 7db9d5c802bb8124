"""Market graphs: MST and PMFG construction, shortest paths, closeness
centrality, and deterministic exports.

Edges are stored as (u, v, weight) index triples with u < v; weights are
distances (nonnegative).  PMFG keeps the strongest correlations whose
insertion preserves planarity, capped at 3(m-2) edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .corrnet import CorrelationMatrix, DistanceMatrix
from .errors import DataError, UsageError
from .planarity import is_planar

__all__ = [
    "MarketGraph",
    "mst",
    "pmfg",
    "build_pmfg",
    "shortest_path_distances",
    "closeness_centrality",
    "export_graph",
    "EXPORT_FORMATS",
]

EXPORT_FORMATS = ("dot", "graphml", "json")


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class MarketGraph:
    """Weighted undirected graph over labeled vertices."""

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    kind: str = "CUSTOM"

    def __post_init__(self) -> None:
        m = len(self.labels)
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < m and 0 <= v < m):
                raise DataError(f"edge ({u}, {v}) endpoint out of range")
            if u == v:
                raise DataError(f"self-loop at vertex {u}")
            if u > v:
                raise DataError(f"edge ({u}, {v}) not normalized to u < v")
            if (u, v) in seen:
                raise DataError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            if not (math.isfinite(w) and w >= 0.0):
                raise DataError(f"edge ({u}, {v}) weight {w} invalid")
        if self.kind not in ("MST", "PMFG", "CUSTOM"):
            raise DataError(f"unknown graph kind {self.kind!r}")
        if self.kind == "MST":
            if len(self.edges) != m - 1 or not self._connected():
                raise DataError("MST must be a connected tree on all vertices")
        elif self.kind == "PMFG":
            if m >= 3 and len(self.edges) != 3 * (m - 2):
                raise DataError(f"PMFG on {m} vertices must have {3 * (m - 2)} edges")
            if not self._connected():
                raise DataError("PMFG must be connected")
            if not is_planar(m, self._edge_array()):
                raise DataError("PMFG failed the planarity certificate")

    def _edge_array(self) -> np.ndarray:
        return np.array([(u, v) for u, v, _ in self.edges], dtype=np.int64).reshape(-1, 2)

    def _connected(self) -> bool:
        uf = _UnionFind(len(self.labels))
        parts = len(self.labels)
        for u, v, _ in self.edges:
            if uf.union(u, v):
                parts -= 1
        return parts == 1

    @property
    def m(self) -> int:
        return len(self.labels)


def _sorted_pairs(weights: np.ndarray) -> list[tuple[int, int]]:
    """Index pairs of a symmetric matrix, sorted by (weight, u, v)."""
    m = weights.shape[0]
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    pairs.sort(key=lambda p: (weights[p[0], p[1]], p[0], p[1]))
    return pairs


def mst(d: DistanceMatrix) -> MarketGraph:
    """Kruskal minimum spanning tree with (weight, index) tie-break."""
    m = len(d.labels)
    if m < 2:
        raise DataError("MST needs at least 2 vertices")
    uf = _UnionFind(m)
    edges = []
    for u, v in _sorted_pairs(d.values):
        if uf.union(u, v):
            edges.append((u, v, float(d.values[u, v])))
            if len(edges) == m - 1:
                break
    return MarketGraph(d.labels, tuple(edges), "MST")


def build_pmfg(
    similarity: np.ndarray, distance: np.ndarray, labels: tuple[str, ...]
) -> MarketGraph:
    """Greedy planar filter: insert pairs by decreasing similarity, keep the
    edge iff the graph stays planar, stop at 3(m-2) edges.

    Weights come from ``distance`` so MST and PMFG share a metric.
    """
    m = len(labels)
    if m < 3:
        raise DataError(f"PMFG needs at least 3 vertices, got {m}")
    target = 3 * (m - 2)
    pairs = _sorted_pairs(-np.asarray(similarity, dtype=float))
    kept: list[tuple[int, int]] = []
    arr = np.empty((target, 2), dtype=np.int64)
    for u, v in pairs:
        arr[len(kept)] = (u, v)
        if is_planar(m, arr[: len(kept) + 1]):
            kept.append((u, v))
            if len(kept) == target:
                break
    edges = tuple((u, v, float(distance[u, v])) for u, v in kept)
    return MarketGraph(labels, edges, "PMFG")


def pmfg(c: CorrelationMatrix) -> MarketGraph:
    """PMFG of a correlation matrix, weighted by d = sqrt(2(1 - rho))."""
    dist = np.sqrt(np.maximum(2.0 * (1.0 - c.values), 0.0))
    return build_pmfg(c.values, dist, c.labels)


def _adjacency(g: MarketGraph) -> csr_matrix:
    m = g.m
    rows, cols, data = [], [], []
    for u, v, w in g.edges:
        rows += [u, v]
        cols += [v, u]
        data += [w, w]
    return csr_matrix((data, (rows, cols)), shape=(m, m))


def shortest_path_distances(g: MarketGraph) -> np.ndarray:
    """All-pairs weighted shortest-path distances along the graph's edges."""
    if g.m == 0:
        raise DataError("empty graph")
    adj = _adjacency(g)
    n_parts, part = connected_components(adj, directed=False)
    if n_parts > 1:
        groups: dict[int, list[str]] = {}
        for i, p in enumerate(part):
            groups.setdefault(int(p), []).append(g.labels[i])
        raise DataError(
            "graph is disconnected; components: "
            + "; ".join(",".join(ls) for ls in groups.values())
        )
    d = dijkstra(adj, directed=False)
    # kill float asymmetry from per-source runs
    return np.minimum(d, d.T)


def closeness_centrality(g: MarketGraph) -> dict[str, float]:
    """C(k) = 1 / sum_h d(h, k), keyed by vertex label."""
    d = shortest_path_distances(g)
    sums = d.sum(axis=0)
    if np.any(sums <= 0.0):
        raise DataError("zero total distance; closeness undefined")
    inv = 1.0 / sums
    return {label: float(inv[i]) for i, label in enumerate(g.labels)}


def _ordered_for_export(g: MarketGraph):
    """Vertices by label; edges by (label_u, label_v) lexical order."""
    vertices = sorted(g.labels)
    edges = []
    for u, v, w in g.edges:
        a, b = sorted((g.labels[u], g.labels[v]))
        edges.append((a, b, w))
    edges.sort()
    return vertices, edges


def export_graph(g: MarketGraph, fmt: str) -> bytes:
    """Serialize deterministically to DOT, GraphML, or edge-list JSON."""
    fmt = fmt.lower()
    if fmt not in EXPORT_FORMATS:
        raise UsageError(f"unknown export format {fmt!r}; expected one of {EXPORT_FORMATS}")
    vertices, edges = _ordered_for_export(g)
    if fmt == "dot":
        lines = ["graph market {"]
        for name in vertices:
            lines.append(f'  "{name}";')
        for a, b, w in edges:
            lines.append(f'  "{a}" -- "{b}" [weight={w:.9g}];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "graphml":
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
            '  <key id="w" for="edge" attr.name="weight" attr.type="double"/>',
            f'  <graph id="{escape(g.kind)}" edgedefault="undirected">',
        ]
        for name in vertices:
            lines.append(f'    <node id="{escape(name)}"/>')
        for a, b, w in edges:
            lines.append(
                f'    <edge source="{escape(a)}" target="{escape(b)}">'
                f'<data key="w">{w:.9g}</data></edge>'
            )
        lines += ["  </graph>", "</graphml>"]
        return ("\n".join(lines) + "\n").encode()
    payload = {
        "kind": g.kind,
        "vertices": vertices,
        "edges": [[a, b, float(f"{w:.9g}")] for a, b, w in edges],
    }
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()
