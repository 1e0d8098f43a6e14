import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apltune import GraphError, WsConfig, build_graph, ring_lattice, watts_strogatz
from apltune.graph import clustering_stats, is_connected, path_stats
from apltune.tuner import (
    ACCEPTED,
    NO_CANDIDATE,
    REJECTED_DISCONNECT,
    TRACE_HEADER,
    AnnealConfig,
    APLTuner,
    RewireMove,
    apply_move,
    metropolis_accept,
    parse_apl_mode,
    propose_move,
    pseudo_energy,
    revert_move,
    tune_apl,
    validate_move,
)


def test_pseudo_energy():
    assert pseudo_energy(6.5, 6.7) == pytest.approx(0.2)
    assert pseudo_energy(6.7, 6.7) == 0
    assert pseudo_energy(10, 6) == 4


def test_validate_move_c8(c8, k3):
    assert validate_move(c8, RewireMove(0, 1, 4, 5))
    assert not validate_move(c8, RewireMove(0, 1, 4, 3))
    for quad in [(0, 1, 2, 0), (0, 1, 1, 2), (2, 0, 1, 0)]:
        assert not validate_move(k3, RewireMove(*quad))


def test_validate_move_each_condition():
    # square 0-1-2-3-0 plus a pendant path, triangle-free
    g = build_graph(8, [(0, 1), (2, 3), (4, 5), (6, 7), (1, 2), (3, 4), (5, 6), (7, 0)])
    assert validate_move(g, RewireMove(0, 1, 4, 5))
    assert not validate_move(g, RewireMove(0, 1, 0, 7))  # repeated id
    assert not validate_move(g, RewireMove(0, 2, 4, 5))  # (i, i1) absent
    assert not validate_move(g, RewireMove(0, 1, 7, 6))  # i adjacent to j
    assert not validate_move(g, RewireMove(0, 1, 2, 3))  # i, j share neighbour 1
    assert not validate_move(g, RewireMove(0, 99, 4, 5))  # out of range


def test_validate_rejects_triangle_edge():
    # triangle 0-1-2 hanging off a long cycle
    edges = [(i, i + 1) for i in range(9)] + [(9, 0), (0, 2)]
    g = build_graph(10, edges)
    assert not validate_move(g, RewireMove(1, 0, 5, 6))  # (1, 0) in a triangle
    assert validate_move(g, RewireMove(0, 9, 5, 6))


def test_propose_ring_lattice_none():
    assert propose_move(ring_lattice(30, 2), np.random.default_rng(0)) is None


def test_propose_c8(c8):
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = propose_move(c8, rng)
        assert m is not None and validate_move(c8, m)


def test_propose_covers_pairs_uniformly(c8):
    # every valid quadruple on C8 is reachable
    rng = np.random.default_rng(5)
    seen = {propose_move(c8, rng).as_tuple() for _ in range(3000)}
    valid = {
        (i, i1, j, j1)
        for i in range(8)
        for j in range(8)
        for i1 in c8.neighbors(i).tolist()
        for j1 in c8.neighbors(j).tolist()
        if validate_move(c8, RewireMove(i, i1, j, j1))
    }
    assert seen == valid


def test_apply_revert_c8(c8):
    orig = c8.edges()
    m = RewireMove(0, 1, 4, 5)
    apply_move(c8, m)
    assert c8.edge_set() == {(1, 2), (2, 3), (3, 4), (0, 4), (5, 6), (6, 7), (0, 7), (1, 5)}
    assert is_connected(c8)
    assert set(c8.degrees.tolist()) == {2}
    assert path_stats(c8).apl == pytest.approx(16 / 7)
    c8.check()
    revert_move(c8, m)
    assert c8.edges() == orig


def test_apply_disconnecting_move(c8):
    # structurally applicable, though not a valid move (5 and 7 share 6)
    assert not validate_move(c8, RewireMove(0, 7, 4, 5))
    apply_move(c8, RewireMove(0, 7, 4, 5))
    assert not is_connected(c8)
    assert c8.edge_set() == {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (5, 6), (6, 7), (5, 7)}


def test_apply_invalid_raises(c8):
    with pytest.raises(GraphError):
        apply_move(c8, RewireMove(0, 1, 1, 2))
    with pytest.raises(GraphError):
        apply_move(c8, RewireMove(0, 2, 4, 5))
    with pytest.raises(GraphError):
        revert_move(c8, RewireMove(0, 1, 4, 5))


def test_metropolis_downhill_and_level():
    rng = np.random.default_rng(0)
    assert all(metropolis_accept(1.0, 0.5, t, rng) for t in (1e-9, 1.0, 10.0))
    assert metropolis_accept(1.0, 1.0, 1e-12, rng)
    with pytest.raises(ValueError):
        metropolis_accept(1.0, 2.0, 0.0, rng)


def test_metropolis_frozen():
    rng = np.random.default_rng(0)
    assert not any(metropolis_accept(1.0, 2.0, 1e-3, rng) for _ in range(1000))


def test_metropolis_frequency():
    rng = np.random.default_rng(11)
    trials = 100_000
    p = math.exp(-0.02)
    hits = sum(metropolis_accept(1.0, 1.2, 10.0, rng) for _ in range(trials))
    assert abs(hits / trials - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_metropolis_monotone_in_temperature():
    freqs = []
    for temp in (0.05, 0.2, 1.0, 5.0):
        rng = np.random.default_rng(3)
        freqs.append(sum(metropolis_accept(0.0, 0.3, temp, rng) for _ in range(20_000)))
    assert freqs == sorted(freqs)


def test_apl_mode_parsing():
    assert parse_apl_mode("exact") is None
    assert parse_apl_mode("sampled:16") == 16
    for bad in ("sampled:0", "sampled:x", "fast"):
        with pytest.raises(ValueError):
            parse_apl_mode(bad)


def test_config_validation():
    for kw in ({"temp0": 0}, {"cool_factor": 1.0}, {"tolerance": -1}, {"apl_mode": "x"}):
        with pytest.raises(ValueError):
            AnnealConfig(target_apl=2.0, **kw)
    cfg = AnnealConfig(target_apl=2.0)
    assert cfg.temperature(199) == 10.0
    assert cfg.temperature(200) == pytest.approx(9.0)
    assert cfg.temperature(450) == pytest.approx(8.1)


def test_tune_ring_lattice_no_candidate():
    g = ring_lattice(60, 3)
    h, trace = tune_apl(g, AnnealConfig(target_apl=3.0, seed=1))
    assert trace.outcome == [NO_CANDIDATE]
    assert trace.stop_reason == NO_CANDIDATE
    assert h == g


def test_tune_rejects_bad_input():
    with pytest.raises(GraphError):
        tune_apl(build_graph(4, [(0, 1), (2, 3)]), AnnealConfig(target_apl=2.0))


def _small_ws(seed=0):
    return watts_strogatz(WsConfig(200, 3, 0.2, seed))


def test_tune_invariants_each_accepted_move():
    g = _small_ws()
    base_deg = g.degrees
    base_tri = clustering_stats(g).per_node_triangles
    l0 = path_stats(g).apl
    # replay the chain move by move through the public primitives
    rng = np.random.default_rng(2)
    h = g.copy()
    accepted = 0
    while accepted < 300:
        m = propose_move(h, rng)
        apply_move(h, m)
        if not is_connected(h):
            revert_move(h, m)
            continue
        accepted += 1
        h.check()
        assert (h.degrees == base_deg).all()
        assert (clustering_stats(h).per_node_triangles == base_tri).all()
    assert path_stats(g).apl == l0  # input untouched


def test_tune_reaches_upward_target_and_trace_is_consistent():
    g = _small_ws(1)
    l0 = path_stats(g).apl
    cfg = AnnealConfig(target_apl=1.15 * l0, tolerance=0.01, temp0=0.05, seed=4)
    h, trace = tune_apl(g, cfg)
    assert trace.stop_reason == "target"
    assert abs(path_stats(h).apl - cfg.target_apl) <= cfg.tolerance
    assert (h.degrees == g.degrees).all()
    assert (clustering_stats(h).per_node_triangles == clustering_stats(g).per_node_triangles).all()
    # accepted records chain: L_before of the next proposal is the last accepted L_after
    current = l0
    for p, lb, la, e, t, o in trace.records():
        assert lb == pytest.approx(current, abs=1e-12)
        assert t == pytest.approx(cfg.temperature(p))
        if o == ACCEPTED:
            current = la
            assert e == pytest.approx(abs(la - cfg.target_apl))
        if o == REJECTED_DISCONNECT:
            assert math.isnan(la)
    assert trace.proposal == list(range(len(trace)))


def test_tune_target_already_met():
    g = _small_ws(2)
    l0 = path_stats(g).apl
    h, trace = tune_apl(g, AnnealConfig(target_apl=l0, tolerance=1e-9))
    assert len(trace) == 0 and trace.stop_reason == "target"
    assert h == g


def test_tune_zero_temperature_is_greedy():
    g = _small_ws(3)
    cfg = AnnealConfig(target_apl=100.0, temp0=1e-12, max_proposals=400, seed=0)
    _, trace = tune_apl(g, cfg)
    for _, lb, la, e, _, o in trace.records():
        if o == ACCEPTED:
            assert abs(la - 100.0) <= abs(lb - 100.0)


def test_tune_plateau_and_budget():
    g = _small_ws(4)
    _, trace = tune_apl(g, AnnealConfig(target_apl=1.0, temp0=1e-9, plateau_window=50, seed=1))
    assert trace.stop_reason == "plateau"
    assert trace.outcome[-50:].count(ACCEPTED) == 0
    _, trace = tune_apl(g, AnnealConfig(target_apl=50.0, max_proposals=25, plateau_window=10**6, seed=1))
    assert trace.stop_reason == "max-proposals" and len(trace) == 25


def test_tune_deterministic():
    g = _small_ws(5)
    cfg = AnnealConfig(target_apl=6.0, max_proposals=200, seed=9)
    a, ta = tune_apl(g, cfg)
    b, tb = tune_apl(g, cfg)
    assert a == b and ta.to_csv() == tb.to_csv()


def test_tune_sampled_mode():
    g = _small_ws(6)
    l0 = path_stats(g).apl
    cfg = AnnealConfig(target_apl=1.1 * l0, tolerance=0.02, temp0=0.05, apl_mode="sampled:40", seed=2)
    h, trace = tune_apl(g, cfg)
    assert trace.stop_reason == "target"
    assert abs(path_stats(h).apl - cfg.target_apl) < 0.3
    assert (h.degrees == g.degrees).all()


def test_trace_csv():
    g = _small_ws(7)
    _, trace = tune_apl(g, AnnealConfig(target_apl=9.0, max_proposals=5, seed=0))
    lines = trace.to_csv().splitlines()
    assert lines[0] == TRACE_HEADER
    assert len(lines) == 6
    assert lines[1].split(",")[0] == "0"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.05, 1.0))
def test_move_locality_property(seed, p):
    g = watts_strogatz(WsConfig(60, 2, p, seed))
    rng = np.random.default_rng(seed)
    m = propose_move(g, rng)
    if m is None:
        return
    before = g.edges()
    tri = clustering_stats(g).per_node_triangles
    apply_move(g, m)
    assert (clustering_stats(g).per_node_triangles == tri).all()
    revert_move(g, m)
    assert g.edges() == before


def test_estimator_api():
    g = _small_ws(8)
    l0 = path_stats(g).apl
    est = APLTuner(target_apl=1.1 * l0, tolerance=0.02, temp0=0.05, random_state=3)
    assert est.get_params()["target_apl"] == pytest.approx(1.1 * l0)
    out = est.fit_transform(g)
    assert est.attained_ and est.stop_reason_ == "target"
    assert out is est.graph_
    assert est.initial_apl_ == pytest.approx(l0)
    est2 = APLTuner(**est.get_params())
    assert est2.fit(g).graph_ == est.graph_
    assert est2.transform(g) == est.graph_
    with pytest.raises(ValueError):
        APLTuner().fit(g)
