"""Simple undirected graphs and their path / clustering measurements."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels as K


class GraphError(ValueError):
    """Raised for malformed graphs, illegal edits or unreadable edge lists."""


class Graph:
    """Simple undirected graph on nodes ``0..n_nodes-1``.

    Neighbours are kept in a padded ``(n, cap)`` int32 table whose first
    ``deg[v]`` entries of row ``v`` are sorted. Measurement methods never
    mutate; :meth:`add_edge` and :meth:`remove_edge` edit in place.
    """

    def __init__(self, n_nodes: int, capacity: int = 4):
        if n_nodes < 0:
            raise GraphError("n_nodes must be non-negative")
        self.n_nodes = int(n_nodes)
        self.nbr = np.full((self.n_nodes, max(int(capacity), 1)), -1, dtype=np.int32)
        self.deg = np.zeros(self.n_nodes, dtype=np.int32)
        self.n_edges = 0

    # -- construction ------------------------------------------------------

    def copy(self) -> Graph:
        g = Graph.__new__(Graph)
        g.n_nodes = self.n_nodes
        g.nbr = self.nbr.copy()
        g.deg = self.deg.copy()
        g.n_edges = self.n_edges
        return g

    def _check_node(self, u) -> int:
        u = int(u)
        if not 0 <= u < self.n_nodes:
            raise GraphError(f"node id {u} out of range [0, {self.n_nodes})")
        return u

    def _grow(self):
        cap = self.nbr.shape[1]
        wider = np.full((self.n_nodes, 2 * cap), -1, dtype=np.int32)
        wider[:, :cap] = self.nbr
        self.nbr = wider

    def has_edge(self, u, v) -> bool:
        u, v = self._check_node(u), self._check_node(v)
        return bool(K.has_edge(self.nbr, self.deg, u, v))

    def add_edge(self, u, v) -> None:
        u, v = self._check_node(u), self._check_node(v)
        if u == v:
            raise GraphError(f"self-loop ({u}, {v}) not allowed")
        if K.has_edge(self.nbr, self.deg, u, v):
            raise GraphError(f"edge ({u}, {v}) already present")
        if max(self.deg[u], self.deg[v]) >= self.nbr.shape[1]:
            self._grow()
        K.row_insert(self.nbr, self.deg, u, v)
        K.row_insert(self.nbr, self.deg, v, u)
        self.n_edges += 1

    def remove_edge(self, u, v) -> None:
        u, v = self._check_node(u), self._check_node(v)
        if u == v or not K.has_edge(self.nbr, self.deg, u, v):
            raise GraphError(f"edge ({u}, {v}) not present")
        K.row_delete(self.nbr, self.deg, u, v)
        K.row_delete(self.nbr, self.deg, v, u)
        self.n_edges -= 1

    # -- views -------------------------------------------------------------

    def neighbors(self, u) -> np.ndarray:
        u = self._check_node(u)
        return self.nbr[u, : self.deg[u]].copy()

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.nbr[u, : self.deg[u]].tolist() for u in range(self.n_nodes)]

    @property
    def degrees(self) -> np.ndarray:
        return self.deg.copy()

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, lexicographically sorted."""
        out = []
        for u in range(self.n_nodes):
            for v in self.nbr[u, : self.deg[u]].tolist():
                if v > u:
                    out.append((u, v))
        return out

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and self.edges() == other.edges()

    def __repr__(self):
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    def check(self) -> None:
        """Verify every structural invariant; raise :class:`GraphError` if broken."""
        total = 0
        for u in range(self.n_nodes):
            row = self.nbr[u, : self.deg[u]]
            if np.any(row == u):
                raise GraphError(f"self-loop at {u}")
            if np.any(np.diff(row) <= 0):
                raise GraphError(f"row {u} unsorted or has duplicates")
            for v in row.tolist():
                if not K.has_edge(self.nbr, self.deg, v, u):
                    raise GraphError(f"asymmetric edge ({u}, {v})")
            total += len(row)
        if total != 2 * self.n_edges:
            raise GraphError("edge counter out of sync with adjacency")


def build_graph(n: int, edges) -> Graph:
    """Build a :class:`Graph`, rejecting self-loops, bad ids and duplicates."""
    pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        raise GraphError("node id out of range")
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise GraphError("self-loop not allowed")
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    keys = lo * n + hi
    if len(np.unique(keys)) != len(keys):
        raise GraphError("duplicate edge")
    deg = np.bincount(np.concatenate([lo, hi]), minlength=n) if len(keys) else np.zeros(n, int)
    g = Graph(n, capacity=int(deg.max()) if n and len(keys) else 1)
    order = np.argsort(keys, kind="stable")
    src = np.concatenate([lo[order], hi[order]])
    dst = np.concatenate([hi[order], lo[order]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    starts = np.concatenate([[0], np.cumsum(deg)[:-1]]) if n else np.zeros(0, int)
    slot = np.arange(len(src)) - starts[src] if len(src) else np.zeros(0, int)
    g.nbr[src, slot] = dst
    g.deg[:] = deg
    g.n_edges = len(keys)
    return g


# -- local structure -------------------------------------------------------


def common_neighbors(g: Graph, u, v) -> set[int]:
    u, v = g._check_node(u), g._check_node(v)
    if u == v:
        raise GraphError("common_neighbors needs two distinct nodes")
    return set(g.neighbors(u).tolist()) & set(g.neighbors(v).tolist())


def edge_in_triangle(g: Graph, u, v) -> bool:
    if not g.has_edge(u, v):
        raise GraphError(f"edge ({u}, {v}) not present")
    return K.count_common(g.nbr, g.deg, int(u), int(v)) > 0


def is_connected(g: Graph) -> bool:
    return bool(K.connected(g.nbr, g.deg))


def shortest_paths_from(g: Graph, source) -> np.ndarray:
    """BFS hop counts from ``source``; unreachable nodes get -1."""
    source = g._check_node(source)
    dist = np.empty(g.n_nodes, np.int32)
    queue = np.empty(g.n_nodes, np.int32)
    K.bfs(g.nbr, g.deg, source, dist, queue)
    return dist


# -- global measurements ---------------------------------------------------


@dataclass(frozen=True)
class PathStats:
    """Average path length, distance distribution P(d) and diameter."""

    apl: float
    histogram: dict[int, float]
    diameter: int
    counts: dict[int, int] = field(default_factory=dict, repr=False)

    @property
    def variance(self) -> float:
        return sum(p * (d - self.apl) ** 2 for d, p in self.histogram.items())


def distance_counts(g: Graph) -> np.ndarray:
    """Ordered-pair counts per distance; raises on a disconnected graph."""
    counts, unreached = K.distance_counts(g.nbr, g.deg)
    if unreached:
        raise GraphError("graph is disconnected; average path length undefined")
    return counts


def average_path_length(g: Graph) -> float:
    counts = distance_counts(g)
    n = g.n_nodes
    return float(np.dot(np.arange(len(counts)), counts)) / (n * (n - 1))


def path_stats(g: Graph) -> PathStats:
    """Exact all-pairs statistics over the N(N-1) ordered pairs."""
    n = g.n_nodes
    if n < 2:
        raise GraphError("path statistics need at least two nodes")
    counts = distance_counts(g)
    pairs = n * (n - 1)
    nz = np.flatnonzero(counts)
    total = int(np.dot(nz, counts[nz]))
    return PathStats(
        apl=total / pairs,
        histogram={int(d): int(counts[d]) / pairs for d in nz},
        diameter=int(nz[-1]),
        counts={int(d): int(counts[d]) for d in nz},
    )


def sampled_apl(g: Graph, sources) -> float:
    """Approximate APL averaged over BFS trees rooted at ``sources``."""
    sources = np.asarray(sources, dtype=np.int64)
    total, pairs = K.sampled_distance_sum(g.nbr, g.deg, sources)
    if pairs != len(sources) * (g.n_nodes - 1):
        raise GraphError("graph is disconnected; average path length undefined")
    return total / pairs


@dataclass(frozen=True)
class ClusteringStats:
    per_node_triangles: np.ndarray
    per_node_coefficient: np.ndarray
    global_coefficient: float


def clustering_stats(g: Graph) -> ClusteringStats:
    """Triangle counts E_i, coefficients c_i (0 when k_i < 2) and their mean."""
    tri = K.triangles_per_node(g.nbr, g.deg)
    k = g.deg.astype(np.float64)
    possible = k * (k - 1)
    c = np.zeros(g.n_nodes)
    mask = g.deg >= 2
    c[mask] = 2.0 * tri[mask] / possible[mask]
    return ClusteringStats(tri, c, float(c.mean()) if g.n_nodes else 0.0)


# -- edge-list files -------------------------------------------------------


def format_edgelist(g: Graph) -> str:
    lines = [f"{g.n_nodes} {g.n_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_bytes(format_edgelist(g).encode("ascii"))


def _parse_int(tok: str, lineno: int) -> int:
    if not tok.isdigit() or (len(tok) > 1 and tok[0] == "0"):
        raise GraphError(f"line {lineno}: malformed integer {tok!r}")
    return int(tok)


def parse_edgelist(text: str) -> Graph:
    """Strict reader for the ``n m`` / ``u v`` edge-list format."""
    if not text.endswith("\n"):
        raise GraphError("edge list must end with a newline")
    if "\r" in text:
        raise GraphError("edge list must use LF line endings")
    lines = text[:-1].split("\n")
    head = lines[0].split(" ")
    if len(head) != 2:
        raise GraphError("line 1: expected '<n_nodes> <n_edges>'")
    n, m = (_parse_int(t, 1) for t in head)
    if len(lines) - 1 != m:
        raise GraphError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    prev = None
    for lineno, line in enumerate(lines[1:], start=2):
        toks = line.split(" ")
        if len(toks) != 2:
            raise GraphError(f"line {lineno}: expected '<u> <v>'")
        u, v = (_parse_int(t, lineno) for t in toks)
        if not u < v:
            raise GraphError(f"line {lineno}: need u < v")
        if v >= n:
            raise GraphError(f"line {lineno}: node id out of range")
        if prev is not None and (u, v) <= prev:
            raise GraphError(f"line {lineno}: edges not strictly sorted")
        prev = (u, v)
        edges.append((u, v))
    return build_graph(n, edges)


def read_edgelist(path) -> Graph:
    data = Path(path).read_bytes()
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise GraphError("edge list is not ASCII") from exc
    return parse_edgelist(text)
