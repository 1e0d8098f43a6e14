"""Ring lattices and Watts-Strogatz small-world graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, build_graph, is_connected
from .seeding import derive_seed


@dataclass(frozen=True)
class WsConfig:
    n: int
    k: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if not (self.k >= 1 and self.n > 4 * self.k):
            raise GraphError(f"WsConfig needs n > 4k >= 4, got n={self.n}, k={self.k}")
        if not 0.0 <= self.p <= 1.0:
            raise GraphError(f"rewiring probability must lie in [0, 1], got {self.p}")


def _check_lattice(n, k):
    # n > 2k is all a simple circulant needs
    if not (k >= 1 and n > 2 * k):
        raise GraphError(f"ring lattice needs n > 2k >= 2, got n={n}, k={k}")


def _lattice_edges(n, k):
    return [(i, (i + m) % n) for i in range(n) for m in range(1, k + 1)]


def ring_lattice(n: int, k: int) -> Graph:
    """Each node joined to its ``k`` nearest neighbours on either side."""
    _check_lattice(n, k)
    return build_graph(n, _lattice_edges(n, k))


def _rewire_once(n, k, p, rng):
    adj = [set() for _ in range(n)]
    for i, j in _lattice_edges(n, k):
        adj[i].add(j)
        adj[j].add(i)
    # fixed order: ascending node, then offset 1..k; the clockwise end moves
    for i, j in _lattice_edges(n, k):
        if rng.random() >= p:
            continue
        while True:
            w = int(rng.integers(n))
            if w != i and w not in adj[i]:
                break
        adj[i].discard(j)
        adj[j].discard(i)
        adj[i].add(w)
        adj[w].add(i)
    return build_graph(n, [(u, v) for u in range(n) for v in adj[u] if v > u])


def watts_strogatz(cfg: WsConfig, max_retries: int = 100) -> Graph:
    """Watts-Strogatz graph, redrawn until connected.

    Attempt ``a`` draws from ``derive_seed(cfg.seed, a)``, so the result is a
    pure function of the config. ``p == 0`` returns the ring lattice itself.
    """
    if cfg.p == 0.0:
        return ring_lattice(cfg.n, cfg.k)
    for attempt in range(max_retries):
        rng = np.random.default_rng(derive_seed(cfg.seed, attempt))
        g = _rewire_once(cfg.n, cfg.k, cfg.p, rng)
        if is_connected(g):
            return g
    raise GraphError(f"no connected sample after {max_retries} attempts for {cfg}")
