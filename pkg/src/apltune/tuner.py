"""Average-path-length tuning by constrained rewiring and simulated annealing.

A move takes two edges (i, i1) and (j, j1) that lie in no triangle and
replaces them by (i, j) and (i1, j1). The extra conditions on the four nodes
(no common neighbours of i and j, none of i1 and j1, no existing edge in
either new slot) guarantee that no triangle is destroyed or created, so every
degree and every per-node clustering coefficient is left exactly as it was.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import _kernels as K
from .graph import Graph, GraphError, average_path_length, sampled_apl
from .validation import check_graph

ACCEPTED = "accepted"
REJECTED_METROPOLIS = "rejected-metropolis"
REJECTED_DISCONNECT = "rejected-disconnect"
NO_CANDIDATE = "no-candidate"

TRACE_HEADER = "proposal,L_before,L_after,energy,temp,outcome"


@dataclass(frozen=True)
class RewireMove:
    i: int
    i1: int
    j: int
    j1: int

    def as_tuple(self):
        return (self.i, self.i1, self.j, self.j1)


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing parameters.

    ``apl_mode`` is ``"exact"`` or ``"sampled:S"`` (S random BFS sources,
    redrawn for every proposal and shared by its before/after evaluation).
    """

    target_apl: float
    temp0: float = 10.0
    cool_factor: float = 0.9
    cool_interval: int = 200
    tolerance: float = 0.005
    max_proposals: int = 1_000_000
    plateau_window: int = 5_000
    seed: int = 0
    apl_mode: str = "exact"
    candidate_budget: int | None = None

    def __post_init__(self):
        if not self.temp0 > 0:
            raise ValueError("temp0 must be positive")
        if not 0 < self.cool_factor < 1:
            raise ValueError("cool_factor must lie in (0, 1)")
        if self.cool_interval < 1:
            raise ValueError("cool_interval must be >= 1")
        if not self.tolerance >= 0:
            raise ValueError("tolerance must be non-negative")
        if self.max_proposals < 0 or self.plateau_window < 1:
            raise ValueError("max_proposals must be >= 0 and plateau_window >= 1")
        parse_apl_mode(self.apl_mode)

    def temperature(self, proposal: int) -> float:
        return self.temp0 * self.cool_factor ** (proposal // self.cool_interval)


def parse_apl_mode(mode: str) -> int | None:
    """``None`` for exact evaluation, else the number of sampled sources."""
    if mode == "exact":
        return None
    if mode.startswith("sampled:"):
        try:
            s = int(mode.split(":", 1)[1])
        except ValueError:
            s = 0
        if s >= 1:
            return s
    raise ValueError(f"apl_mode must be 'exact' or 'sampled:S' with S >= 1, got {mode!r}")


@dataclass
class TuneTrace:
    """Per-proposal history, stored column-wise."""

    proposal: list = field(default_factory=list)
    l_before: list = field(default_factory=list)
    l_after: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    temp: list = field(default_factory=list)
    outcome: list = field(default_factory=list)
    stop_reason: str = ""

    def append(self, proposal, l_before, l_after, energy, temp, outcome):
        self.proposal.append(proposal)
        self.l_before.append(l_before)
        self.l_after.append(l_after)
        self.energy.append(energy)
        self.temp.append(temp)
        self.outcome.append(outcome)

    def __len__(self):
        return len(self.proposal)

    @property
    def n_accepted(self) -> int:
        return self.outcome.count(ACCEPTED)

    def records(self):
        return list(zip(self.proposal, self.l_before, self.l_after, self.energy, self.temp, self.outcome))

    def to_csv(self) -> str:
        lines = [TRACE_HEADER]
        for p, lb, la, e, t, o in self.records():
            lines.append(f"{p},{lb!r},{la!r},{e!r},{t!r},{o}")
        return "\n".join(lines) + "\n"


def pseudo_energy(l: float, target: float) -> float:
    return abs(l - target)


def validate_move(g: Graph, m: RewireMove) -> bool:
    ids = m.as_tuple()
    if any(not 0 <= x < g.n_nodes for x in ids):
        return False
    return bool(K.move_is_valid(g.nbr, g.deg, *ids))


def propose_move(g: Graph, rng: np.random.Generator, budget: int | None = None) -> RewireMove | None:
    """Uniform (i, j) draws, then a uniform pick among qualifying (i1, j1).

    Gives up after ``budget`` node-pair draws (default ``50 * n``).
    """
    if budget is None:
        budget = 50 * g.n_nodes
    key = int(rng.integers(0, 2**63 - 1))
    i, i1, j, j1, _ = K.propose(g.nbr, g.deg, key, budget)
    if i < 0:
        return None
    return RewireMove(int(i), int(i1), int(j), int(j1))


def apply_move(g: Graph, m: RewireMove) -> None:
    """Swap (i,i1),(j,j1) for (i,j),(i1,j1) in place.

    Only the structural preconditions are enforced here (four distinct
    nodes, old edges present, new ones absent); the triangle and
    common-neighbour rules belong to :func:`validate_move`.
    """
    i, i1, j, j1 = m.as_tuple()
    if len({i, i1, j, j1}) != 4:
        raise GraphError(f"move {m} repeats a node")
    if not (g.has_edge(i, i1) and g.has_edge(j, j1)) or g.has_edge(i, j) or g.has_edge(i1, j1):
        raise GraphError(f"move {m} does not fit the current edges")
    K.apply_swap(g.nbr, g.deg, i, i1, j, j1)


def revert_move(g: Graph, m: RewireMove) -> None:
    i, i1, j, j1 = m.as_tuple()
    if not (g.has_edge(i, j) and g.has_edge(i1, j1)) or g.has_edge(i, i1) or g.has_edge(j, j1):
        raise GraphError(f"move {m} is not currently applied")
    K.revert_swap(g.nbr, g.deg, i, i1, j, j1)


def metropolis_accept(e_old: float, e_new: float, temp: float, rng: np.random.Generator) -> bool:
    """Downhill (or level) always; uphill with probability exp(-dE / temp).

    Uphill moves consume exactly one uniform draw; downhill ones none.
    """
    if temp <= 0:
        raise ValueError("temperature must be positive")
    if e_new <= e_old:
        return True
    return bool(rng.random() < math.exp(-(e_new - e_old) / temp))


class _Evaluator:
    def __init__(self, g, n_sources, rng):
        self.g = g
        self.n_sources = n_sources
        self.rng = rng
        self.sources = None

    def draw(self):
        if self.n_sources is not None:
            n = self.g.n_nodes
            self.sources = self.rng.choice(n, size=min(self.n_sources, n), replace=False)

    def __call__(self):
        if self.n_sources is None:
            return average_path_length(self.g)
        return sampled_apl(self.g, self.sources)


def tune_apl(g: Graph, cfg: AnnealConfig, rng: np.random.Generator | None = None, on_accept=None):
    """Anneal ``g`` towards ``cfg.target_apl``; returns ``(graph, trace)``.

    The input graph is not modified. Each proposal: draw a valid move, apply
    it, reject (and revert) if it disconnects the graph, otherwise evaluate L
    and run the Metropolis test. The temperature is ``temp0 * cool_factor **
    (proposal // cool_interval)`` where every proposal counts, whatever its
    outcome. Stops when ``|L - target| <= tolerance`` after an accepted move
    (or at the start), when no valid move can be found, after
    ``max_proposals`` proposals, or after ``plateau_window`` consecutive
    proposals without an acceptance.

    ``on_accept(graph, move)``, if given, is called after every accepted move.
    """
    check_graph(g, connected=True)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    g = g.copy()
    trace = TuneTrace()
    evaluate = _Evaluator(g, parse_apl_mode(cfg.apl_mode), rng)
    exact = evaluate.n_sources is None
    target = cfg.target_apl
    budget = cfg.candidate_budget

    evaluate.draw()
    l_cur = evaluate()
    if pseudo_energy(l_cur, target) <= cfg.tolerance:
        trace.stop_reason = "target"
        return g, trace

    since_accept = 0
    for p in range(cfg.max_proposals):
        temp = cfg.temperature(p)
        move = propose_move(g, rng, budget)
        if move is None:
            trace.append(p, l_cur, math.nan, math.nan, temp, NO_CANDIDATE)
            trace.stop_reason = NO_CANDIDATE
            return g, trace
        ids = move.as_tuple()
        if not exact:
            evaluate.draw()
            l_cur = evaluate()
        e_old = pseudo_energy(l_cur, target)
        K.apply_swap(g.nbr, g.deg, *ids)
        if not K.connected(g.nbr, g.deg):
            K.revert_swap(g.nbr, g.deg, *ids)
            trace.append(p, l_cur, math.nan, math.nan, temp, REJECTED_DISCONNECT)
            outcome_ok = False
        else:
            l_new = evaluate()
            e_new = pseudo_energy(l_new, target)
            outcome_ok = metropolis_accept(e_old, e_new, temp, rng)
            if outcome_ok:
                trace.append(p, l_cur, l_new, e_new, temp, ACCEPTED)
                l_cur = l_new
            else:
                K.revert_swap(g.nbr, g.deg, *ids)
                trace.append(p, l_cur, l_new, e_new, temp, REJECTED_METROPOLIS)
        if outcome_ok:
            since_accept = 0
            if on_accept is not None:
                on_accept(g, move)
            if e_new <= cfg.tolerance:
                trace.stop_reason = "target"
                return g, trace
        else:
            since_accept += 1
            if since_accept >= cfg.plateau_window:
                trace.stop_reason = "plateau"
                return g, trace
    trace.stop_reason = "max-proposals"
    return g, trace


class APLTuner(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`tune_apl`.

    ``fit(G)`` tunes a copy of ``G`` and stores ``graph_``, ``trace_``,
    ``apl_`` (exact APL of the result) and ``stop_reason_``.
    ``transform(G)`` returns a tuned copy of ``G`` without touching the
    fitted attributes.
    """

    def __init__(
        self,
        target_apl=None,
        temp0=10.0,
        cool_factor=0.9,
        cool_interval=200,
        tolerance=0.005,
        max_proposals=1_000_000,
        plateau_window=5_000,
        apl_mode="exact",
        random_state=None,
    ):
        self.target_apl = target_apl
        self.temp0 = temp0
        self.cool_factor = cool_factor
        self.cool_interval = cool_interval
        self.tolerance = tolerance
        self.max_proposals = max_proposals
        self.plateau_window = plateau_window
        self.apl_mode = apl_mode
        self.random_state = random_state

    def _config(self):
        if self.target_apl is None:
            raise ValueError("target_apl must be set before fitting")
        seed = self.random_state if isinstance(self.random_state, (int, np.integer)) else 0
        return AnnealConfig(
            target_apl=float(self.target_apl),
            temp0=self.temp0,
            cool_factor=self.cool_factor,
            cool_interval=self.cool_interval,
            tolerance=self.tolerance,
            max_proposals=self.max_proposals,
            plateau_window=self.plateau_window,
            seed=int(seed),
            apl_mode=self.apl_mode,
        )

    def _rng(self):
        if isinstance(self.random_state, np.random.Generator):
            return self.random_state
        return np.random.default_rng(self.random_state)

    def fit(self, G, y=None):
        cfg = self._config()
        self.initial_apl_ = average_path_length(check_graph(G, connected=True))
        self.graph_, self.trace_ = tune_apl(G, cfg, self._rng())
        self.apl_ = average_path_length(self.graph_)
        self.stop_reason_ = self.trace_.stop_reason
        self.n_accepted_ = self.trace_.n_accepted
        return self

    def transform(self, G):
        check_is_fitted(self, "graph_")
        tuned, _ = tune_apl(G, self._config(), self._rng())
        return tuned

    def fit_transform(self, G, y=None):
        return self.fit(G).graph_

    @property
    def attained_(self) -> bool:
        check_is_fitted(self, "graph_")
        return abs(self.apl_ - self.target_apl) <= self.tolerance
