"""Ensemble sweeps: steady-state density against tuned average path length.

Seed layout (part of the reproducibility contract, see ``seeding``):

* base graph of realization ``r``:       ``derive_seed(master, 0, r)``
* annealing of target ``t`` on ``r``:     ``derive_seed(master, 1, t, r)``
* dynamics of cell ``(t, r, d)``:         ``derive_seed(master, 2, t, r, d)``

An untuned baseline cell uses ``t = 2**32`` in the dynamics seed.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import jsonschema
import numpy as np

from .generators import WsConfig, watts_strogatz
from .graph import average_path_length
from .majority import MajorityConfig, simulate
from .seeding import derive_seed
from .tuner import AnnealConfig, tune_apl

UNTUNED = 2**32

RECORD_HEADER = "target_apl,realized_apl,realization,d0,steady_mean,steady_std,branch,attained"
SUMMARY_HEADER = (
    "target_apl,mean_realized_apl,n_attained,n_unattained,"
    "off_mean,off_std,active_mean,active_std,survival_fraction"
)

SWEEP_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["base", "realizations", "target_apls", "dynamics", "initial_densities", "steady_window", "master_seed"],
    "properties": {
        "base": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "k", "p"],
            "properties": {
                "n": {"type": "integer", "minimum": 5},
                "k": {"type": "integer", "minimum": 1},
                "p": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "realizations": {"type": "integer", "minimum": 1},
        "target_apls": {"type": "array", "items": {"type": "number", "minimum": 1}, "minItems": 1},
        "tune": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "temp0": {"type": "number", "exclusiveMinimum": 0},
                "cool_factor": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "cool_interval": {"type": "integer", "minimum": 1},
                "tolerance": {"type": "number", "minimum": 0},
                "max_proposals": {"type": "integer", "minimum": 0},
                "plateau_window": {"type": "integer", "minimum": 1},
                "apl_mode": {"type": "string", "pattern": "^(exact|sampled:[1-9][0-9]*)$"},
            },
        },
        "dynamics": {
            "type": "object",
            "additionalProperties": False,
            "required": ["epsilon", "steps"],
            "properties": {
                "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
                "steps": {"type": "integer", "minimum": 1},
                "scheme": {"enum": ["sync", "async"]},
            },
        },
        "initial_densities": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
        "steady_window": {"type": "integer", "minimum": 1},
        "off_threshold": {"type": "number", "minimum": 0},
        "master_seed": {"type": "integer", "minimum": 0},
    },
}


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    n: int
    k: int
    p: float
    realizations: int
    target_apls: tuple
    dynamics: MajorityConfig
    initial_densities: tuple
    steady_window: int
    tune: AnnealConfig = field(default_factory=lambda: AnnealConfig(target_apl=1.0))
    off_threshold: float = 0.01
    master_seed: int = 0

    def __post_init__(self):
        if self.steady_window >= self.dynamics.steps:
            raise SpecError("steady_window must be smaller than dynamics.steps")
        if any(t < 1 for t in self.target_apls):
            raise SpecError("every target_apl must be >= 1")
        WsConfig(self.n, self.k, self.p)

    @classmethod
    def from_dict(cls, doc: dict) -> SweepSpec:
        try:
            jsonschema.validate(doc, SWEEP_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SpecError(f"sweep spec: {exc.message}") from exc
        base = doc["base"]
        dyn = doc["dynamics"]
        try:
            return cls(
                n=base["n"],
                k=base["k"],
                p=float(base["p"]),
                realizations=doc["realizations"],
                target_apls=tuple(float(t) for t in doc["target_apls"]),
                tune=AnnealConfig(target_apl=1.0, **doc.get("tune", {})),
                dynamics=MajorityConfig(epsilon=dyn["epsilon"], steps=dyn["steps"], scheme=dyn.get("scheme", "sync")),
                initial_densities=tuple(float(d) for d in doc["initial_densities"]),
                steady_window=doc["steady_window"],
                off_threshold=float(doc.get("off_threshold", 0.01)),
                master_seed=doc["master_seed"],
            )
        except ValueError as exc:
            raise SpecError(f"sweep spec: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> SweepSpec:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"sweep spec is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        tune = asdict(self.tune)
        for key in ("target_apl", "seed", "candidate_budget"):
            tune.pop(key)
        return {
            "base": {"n": self.n, "k": self.k, "p": self.p},
            "realizations": self.realizations,
            "target_apls": list(self.target_apls),
            "tune": tune,
            "dynamics": {"epsilon": self.dynamics.epsilon, "steps": self.dynamics.steps, "scheme": self.dynamics.scheme},
            "initial_densities": list(self.initial_densities),
            "steady_window": self.steady_window,
            "off_threshold": self.off_threshold,
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True)
class SweepRecord:
    target_apl: float
    realized_apl: float
    realization: int
    d0: float
    steady_mean: float
    steady_std: float
    branch: str
    attained: bool = True

    def csv_row(self) -> str:
        return (
            f"{self.target_apl!r},{self.realized_apl!r},{self.realization},{self.d0!r},"
            f"{self.steady_mean!r},{self.steady_std!r},{self.branch},{str(self.attained).lower()}"
        )


@dataclass
class SweepSummary:
    target_apls: list
    mean_realized_apl: list
    n_attained: list
    n_unattained: list
    off_mean: list
    off_std: list
    active_mean: list
    active_std: list
    survival: list
    critical_apl: float | None
    inversions: int = 0
    diagnostics: list = field(default_factory=list)

    def to_csv(self) -> str:
        rows = [SUMMARY_HEADER]
        for cols in zip(
            self.target_apls,
            self.mean_realized_apl,
            self.n_attained,
            self.n_unattained,
            self.off_mean,
            self.off_std,
            self.active_mean,
            self.active_std,
            self.survival,
        ):
            rows.append(",".join(repr(c) for c in cols))
        return "\n".join(rows) + "\n"

    def report(self) -> str:
        lines = ["bifurcation sweep summary", ""]
        lines.append(f"{'target':>10} {'realized':>10} {'ok':>4} {'active d':>10} {'survival':>9}")
        for t, r, n, a, s in zip(self.target_apls, self.mean_realized_apl, self.n_attained, self.active_mean, self.survival):
            lines.append(f"{t:>10.4f} {r:>10.4f} {n:>4d} {a:>10.4f} {s:>9.3f}")
        lines.append("")
        if self.critical_apl is None:
            lines.append("critical APL: none (no survival crossing)")
        else:
            lines.append(f"critical APL: {self.critical_apl:.4f}")
        lines.append(f"survival inversions: {self.inversions}")
        for d in self.diagnostics:
            lines.append(f"diagnostic: {d}")
        return "\n".join(lines) + "\n"


def steady_state_of_trace(trace, w: int):
    """Mean and (population) standard deviation of d over the last ``w`` steps."""
    d = np.asarray(trace.d if hasattr(trace, "d") else trace, dtype=float)
    if not 1 <= w <= len(d):
        raise ValueError(f"window {w} outside 1..{len(d)}")
    tail = d[-w:]
    return float(tail.mean()), float(tail.std())


def base_graph(spec: SweepSpec, realization: int):
    return watts_strogatz(WsConfig(spec.n, spec.k, spec.p, derive_seed(spec.master_seed, 0, realization)))


def tuned_graph(spec: SweepSpec, target_index: int | None, realization: int, base=None):
    """Tuned graph for one (target, realization) pair and whether it hit the target."""
    g = base if base is not None else base_graph(spec, realization)
    if target_index is None:
        return g, True
    target = spec.target_apls[target_index]
    cfg = replace(spec.tune, target_apl=target, seed=derive_seed(spec.master_seed, 1, target_index, realization))
    h, _ = tune_apl(g, cfg)
    return h, abs(average_path_length(h) - target) <= cfg.tolerance


def _dynamics_cell(spec, g, realized, target, target_index, realization, d0_index, attained):
    d0 = spec.initial_densities[d0_index]
    t = UNTUNED if target_index is None else target_index
    cfg = replace(spec.dynamics, d0=d0, seed=derive_seed(spec.master_seed, 2, t, realization, d0_index))
    mean, std = steady_state_of_trace(simulate(g, cfg), spec.steady_window)
    branch = "off" if mean < spec.off_threshold else "active"
    return SweepRecord(target, realized, realization, d0, mean, std, branch, attained)


def run_cell(spec: SweepSpec, target_index: int | None, realization: int, d0_index: int) -> SweepRecord:
    """One (target, realization, d0) cell; ``target_index=None`` skips tuning."""
    g, attained = tuned_graph(spec, target_index, realization)
    realized = average_path_length(g)
    target = realized if target_index is None else spec.target_apls[target_index]
    return _dynamics_cell(spec, g, realized, target, target_index, realization, d0_index, attained)


def run_group(spec: SweepSpec, target_index: int | None, realization: int) -> list[SweepRecord]:
    """All initial densities of one (target, realization) pair, tuning once."""
    g, attained = tuned_graph(spec, target_index, realization)
    realized = average_path_length(g)
    target = realized if target_index is None else spec.target_apls[target_index]
    return [
        _dynamics_cell(spec, g, realized, target, target_index, realization, d, attained)
        for d in range(len(spec.initial_densities))
    ]


def _safe_group(args):
    spec, t, r = args
    try:
        return t, r, run_group(spec, t, r), None
    except Exception as exc:  # noqa: BLE001 - recorded as a diagnostic
        return t, r, [], f"cell target={t} realization={r}: {type(exc).__name__}: {exc}"


def summarize(spec: SweepSpec, records: list[SweepRecord], diagnostics=()) -> SweepSummary:
    """Aggregate records per target.

    A realization counts as surviving at a target when any of its initial
    densities ends on the active branch. Unattained realizations are left out.
    """
    diags = list(diagnostics)
    cols = {k: [] for k in ("mean_realized_apl", "n_attained", "n_unattained", "off_mean", "off_std", "active_mean", "active_std", "survival")}
    nan = math.nan
    for target in spec.target_apls:
        mine = [r for r in records if r.target_apl == target]
        ok = [r for r in mine if r.attained]
        real_ok = sorted({r.realization for r in ok})
        real_bad = {r.realization for r in mine if not r.attained}
        if real_bad:
            diags.append(f"target {target!r}: {len(real_bad)} realization(s) unattained")
        off = [r.steady_mean for r in ok if r.branch == "off"]
        act = [r.steady_mean for r in ok if r.branch == "active"]
        surviving = {r.realization for r in ok if r.branch == "active"}
        cols["mean_realized_apl"].append(float(np.mean([r.realized_apl for r in ok])) if ok else nan)
        cols["n_attained"].append(len(real_ok))
        cols["n_unattained"].append(len(real_bad))
        cols["off_mean"].append(float(np.mean(off)) if off else nan)
        cols["off_std"].append(float(np.std(off)) if off else nan)
        cols["active_mean"].append(float(np.mean(act)) if act else nan)
        cols["active_std"].append(float(np.std(act)) if act else nan)
        cols["survival"].append(len(surviving) / len(real_ok) if real_ok else nan)

    order = np.argsort(spec.target_apls, kind="stable")
    pts = [(spec.target_apls[i], cols["survival"][i]) for i in order if not math.isnan(cols["survival"][i])]
    alive = [t for t, s in pts if s >= 0.5]
    dead = [t for t, s in pts if s < 0.5]
    critical = (max(alive) + min(dead)) / 2 if alive and dead else None
    inversions = sum(1 for (_, a), (_, b) in zip(pts, pts[1:]) if b > a)
    if inversions:
        diags.append(f"survival fraction increases {inversions} time(s) along the APL axis")
    return SweepSummary(list(spec.target_apls), critical_apl=critical, inversions=inversions, diagnostics=diags, **cols)


def bifurcation_sweep(spec: SweepSpec, jobs: int = 1):
    """Run every (target, realization, d0) cell; returns ``(records, summary)``.

    Records come back sorted by (target index, realization, d0 index), so the
    output does not depend on ``jobs``.
    """
    tasks = [(spec, t, r) for t in range(len(spec.target_apls)) for r in range(spec.realizations)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_safe_group, tasks))
    else:
        results = [_safe_group(task) for task in tasks]
    results.sort(key=lambda x: (x[0], x[1]))
    records = [rec for _, _, recs, _ in results for rec in recs]
    diagnostics = [err for _, _, _, err in results if err]
    return records, summarize(spec, records, diagnostics)


def records_to_csv(records) -> str:
    return "\n".join([RECORD_HEADER] + [r.csv_row() for r in records]) + "\n"
