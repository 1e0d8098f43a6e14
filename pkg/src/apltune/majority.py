"""Noisy majority-rule dynamics on a graph.

Each node sees its self-inclusive neighbourhood (itself plus its k_i
neighbours) and counts the active members, sigma_i. A strict majority means
2 * sigma_i > k_i + 1. Per update, with noise level eps:

============  =========================  ===============================
state         strict majority active      otherwise
============  =========================  ===============================
inactive      becomes active w.p. 1-eps   active w.p. eps if some
                                          neighbour is active, else stays
active        stays active w.p. 1-eps     stays active w.p. eps
============  =========================  ===============================

Randomness is counter based: the uniform used by node ``v`` at step ``t`` is
``counter_uniform(key, t, v)`` (synchronous) and the ``r``-th asynchronous
update of step ``t`` uses counters ``2r`` (node choice) and ``2r + 1``
(transition). Traces therefore do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _kernels as K
from .graph import Graph
from .seeding import derive_seed
from .validation import check_graph, check_probability

SCHEMES = ("sync", "async")
DENSITY_HEADER = "t,d"


@dataclass(frozen=True)
class StateVector:
    states: np.ndarray

    @property
    def density(self) -> float:
        return float(self.states.sum()) / len(self.states) if len(self.states) else 0.0

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class MajorityConfig:
    epsilon: float = 0.1
    steps: int = 1000
    scheme: str = "sync"
    d0: float = 0.5
    seed: int = 0
    snapshot_every: int = 0

    def __post_init__(self):
        check_probability(self.epsilon, "epsilon", open_interval=True, upper=0.5)
        check_probability(self.d0, "d0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.steps < 0 or self.snapshot_every < 0:
            raise ValueError("steps and snapshot_every must be non-negative")


@dataclass
class DensityTrace:
    t: np.ndarray
    d: np.ndarray
    snapshots: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), np.int8))
    final: StateVector | None = None

    def __len__(self):
        return len(self.t)

    def to_csv(self) -> str:
        rows = [DENSITY_HEADER]
        rows.extend(f"{t},{d!r}" for t, d in zip(self.t.tolist(), self.d.tolist()))
        return "\n".join(rows) + "\n"

    def snapshots_text(self) -> str:
        return "".join("".join("1" if x else "0" for x in row) + "\n" for row in self.snapshots)


def activation_probability(active: bool, sigma: int, k: int, any_active_neighbour: bool, eps: float) -> float:
    """Probability of being active after one update (the rule table above)."""
    return float(K.activation_probability(bool(active), int(sigma), int(k), bool(any_active_neighbour), float(eps)))


def init_states(n: int, d0: float, rng: np.random.Generator) -> StateVector:
    """Exactly ``round(d0 * n)`` active nodes, placed uniformly at random."""
    check_probability(d0, "d0")
    states = np.zeros(n, np.int8)
    m = int(round(d0 * n))
    states[rng.choice(n, size=m, replace=False)] = 1
    return StateVector(states)


def sigma(g: Graph, s: StateVector, i: int) -> int:
    i = g._check_node(i)
    return int(s.states[i]) + int(s.states[g.neighbors(i)].sum())


def _as_states(g, s):
    states = np.ascontiguousarray(s.states if isinstance(s, StateVector) else s, dtype=np.int8)
    if states.shape != (g.n_nodes,) or np.any((states != 0) & (states != 1)):
        raise ValueError("states must be a 0/1 vector with one entry per node")
    return states


def step(g: Graph, s: StateVector, epsilon: float, key: int, t: int = 0, scheme: str = "sync") -> StateVector:
    """One update of every node (sync) or ``n`` random single-node updates (async)."""
    check_probability(epsilon, "epsilon", open_interval=True, upper=0.5)
    states = _as_states(g, s)
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    kernel = K.majority_async_step if scheme == "async" else K.majority_sync_step
    return StateVector(kernel(g.nbr, g.deg, states, float(epsilon), np.uint64(key), t))


def simulate(g: Graph, cfg: MajorityConfig, initial: StateVector | None = None) -> DensityTrace:
    """Run ``cfg.steps`` steps and record d(t) for t = 0..steps.

    Initial states come from ``init_states`` seeded by ``derive(seed, 0)``
    unless given; the dynamics stream key is ``derive(seed, 1)``.
    """
    if initial is None:
        initial = init_states(g.n_nodes, cfg.d0, np.random.default_rng(derive_seed(cfg.seed, 0)))
    states = _as_states(g, initial)
    key = np.uint64(derive_seed(cfg.seed, 1))
    every = cfg.snapshot_every
    n_snaps = cfg.steps // every + 1 if every else 0
    snaps = np.zeros((n_snaps, g.n_nodes), np.int8)
    counts, final = K.majority_run(
        g.nbr, g.deg, states, float(cfg.epsilon), key, cfg.steps, cfg.scheme == "async", every, snaps
    )
    n = max(g.n_nodes, 1)
    return DensityTrace(
        t=np.arange(cfg.steps + 1),
        d=counts / n,
        snapshots=snaps,
        final=StateVector(final),
    )


class MajorityRule(BaseEstimator):
    """Estimator front end: ``fit(G)`` runs the dynamics on ``G``.

    Fitted attributes: ``trace_`` (a :class:`DensityTrace`), ``density_``
    (the d(t) array) and ``states_`` (final 0/1 vector).
    """

    def __init__(self, epsilon=0.1, steps=1000, scheme="sync", d0=0.5, snapshot_every=0, random_state=0):
        self.epsilon = epsilon
        self.steps = steps
        self.scheme = scheme
        self.d0 = d0
        self.snapshot_every = snapshot_every
        self.random_state = random_state

    def fit(self, G, y=None, initial=None):
        check_graph(G)
        cfg = MajorityConfig(
            epsilon=self.epsilon,
            steps=self.steps,
            scheme=self.scheme,
            d0=self.d0,
            seed=int(self.random_state or 0),
            snapshot_every=self.snapshot_every,
        )
        self.trace_ = simulate(G, cfg, initial)
        self.density_ = self.trace_.d
        self.states_ = self.trace_.final.states
        return self

    def steady_state(self, window):
        from .harness import steady_state_of_trace

        check_is_fitted(self, "trace_")
        return steady_state_of_trace(self.trace_, window)
