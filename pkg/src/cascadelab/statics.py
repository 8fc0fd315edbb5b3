"""Comparative statics: wedge sweeps, regime jumps, run lengths and early-period values."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .beliefs import PERFECT, History, PeriodRecord, period_state, replay_beliefs
from .core import ModelError, ModelParams, log_odds, posterior_from_llr
from .costs import CostModel, UniformCost
from .decision import Case, early_value_closed_form, value_of_education
from .dynamics import forced_cascade_prefix

TARGETS = ("kappa0", "q1", "q0", "rho", "run_length")


@dataclass(frozen=True)
class SweepSpec:
    target: str
    grid: tuple
    base: ModelParams = field(default_factory=ModelParams)
    history: History = field(default_factory=History)

    def __post_init__(self) -> None:
        t = self.target.lower()
        if t not in TARGETS:
            raise ModelError(f"unknown sweep target {self.target!r}; expected one of {', '.join(TARGETS)}")
        object.__setattr__(self, "target", t)
        grid = tuple(float(g) for g in self.grid)
        if len(grid) == 0:
            raise ModelError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ModelError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class SweepPoint:
    grid_value: float
    delta_v: float
    case_label: Case
    dominance_U: str
    jump_flag: bool = False
    jump: float = 0.0


def _params_at(spec: SweepSpec, g: float) -> ModelParams:
    b = spec.base
    if spec.target == "kappa0":
        qhat0 = posterior_from_llr(b.lam0 + g)
        if not 0.5 < qhat0 < 1.0:
            raise ModelError(f"kappa0={g!r} puts qhat0={qhat0!r} outside (1/2, 1)")
        return b.with_(qhat0=qhat0)
    if spec.target == "q1":
        return b.with_(q1=g)
    if spec.target == "q0":
        return b.with_(q0=g)
    if spec.target == "rho":
        return b.with_(rho=g)
    raise ModelError(f"target {spec.target!r} has no parameter mapping")


def _mark_jumps(points: list) -> list:
    out = []
    for i, pt in enumerate(points):
        if i and pt.dominance_U != points[i - 1].dominance_U:
            pt = SweepPoint(pt.grid_value, pt.delta_v, pt.case_label, pt.dominance_U, True,
                            pt.delta_v - points[i - 1].delta_v)
        out.append(pt)
    return out


def kappa_sweep(
    spec: SweepSpec,
    cost_model: Optional[CostModel] = None,
    hold_educated_llr: bool = True,
) -> list:
    """Value of education along a grid of wedges ``kappa0``, at the end of ``spec.history``.

    ``hold_educated_llr`` keeps ``L_E`` at its base-parameter value so only the
    uneducated regime moves; otherwise the whole history is replayed at each
    grid point. Jumps are flagged where the uneducated dominance label changes.
    """
    if spec.target != "kappa0":
        raise ModelError("kappa_sweep needs target kappa0")
    cm = cost_model or UniformCost()
    base_track = replay_beliefs(spec.history, spec.base, cm)
    L_E_base = base_track.states[-1].L_E
    points = []
    for g in spec.grid:
        p = _params_at(spec, g)
        if hold_educated_llr:
            L_U = p.prior_llr
            for r in spec.history:
                w = p.lamhat1 if r.education else p.lamhat0
                L_U = L_U + (w if r.action else -w)
            L_E = L_E_base
        else:
            last = replay_beliefs(spec.history, p, cm).states[-1]
            L_U, L_E = last.L_U, last.L_E
        vb = value_of_education(L_U, L_E, p)
        points.append(SweepPoint(g, vb.delta_v, vb.case_label, str(vb.dominance_U)))
    return _mark_jumps(points)


def sweep(spec: SweepSpec, cost_model: Optional[CostModel] = None) -> list:
    """Generic sweep: replays ``spec.history`` at each grid value (run lengths build their own)."""
    cm = cost_model or UniformCost()
    if spec.target == "kappa0":
        return kappa_sweep(spec, cm)
    points = []
    for g in spec.grid:
        if spec.target == "run_length":
            r = int(round(g))
            if r != g or r < 1:
                raise ModelError(f"run lengths must be positive integers, got {g!r}")
            p = spec.base
            hist = forced_cascade_prefix(r, 1, p)
        else:
            p = _params_at(spec, g)
            hist = spec.history
        last = replay_beliefs(hist, p, cm).states[-1]
        points.append(SweepPoint(g, last.delta_v, last.value.case_label, str(last.dominance_U)))
    return _mark_jumps(points)


def segments(points: Sequence[SweepPoint]) -> list:
    """Split a sweep into maximal runs between flagged jumps."""
    segs, cur = [], []
    for pt in points:
        if pt.jump_flag and cur:
            segs.append(cur)
            cur = []
        cur.append(pt)
    if cur:
        segs.append(cur)
    return segs


def regime_jump(q0: float, mu_bar_E: float, signs_match: bool) -> float:
    """Change in the value of education when the uneducated regime enters action dominance."""
    if not 0.5 < q0 < 1.0:
        raise ModelError(f"q0 must lie in (1/2, 1), got {q0!r}")
    if not 0.5 <= mu_bar_E < 1.0:
        raise ModelError(f"mu_bar_E must lie in [1/2, 1), got {mu_bar_E!r}")
    return q0 - mu_bar_E if signs_match else q0 + mu_bar_E - 1.0


def run_length_value(r: int, params: ModelParams, direction: int = 1) -> float:
    """Value of education after ``r`` identical uneducated actions, via the general pipeline.

    Requires pure correction (``q1 == q0``); the prior is left free so that
    runs opposing it can be studied.
    """
    if params.q1 != params.q0:
        raise ModelError("run_length_value assumes pure correction (q1 == q0)")
    hist = forced_cascade_prefix(r, direction, params)
    return replay_beliefs(hist, params, UniformCost()).states[-1].delta_v


def run_length_thresholds(mu0: float, lam: float, lamhat: float) -> tuple[float, float]:
    """Run lengths a rational and a naive cascade must strictly exceed."""
    if lam <= 0.0 or lamhat <= 0.0:
        raise ModelError("signal weights must be positive")
    b = abs(log_odds(mu0))
    return b / lam + 1.0, b / lamhat + 1.0


# ---------------------------------------------------------------- early periods


def early_prefixes(params: ModelParams, cost_model: CostModel, max_t: int = 3) -> list:
    """All prefixes of length < ``max_t`` that occur with positive probability.

    A record is feasible when its education choice has positive probability
    at the history so far and its action is possible in the agent's regime.
    """
    out = []
    for n in range(max_t):
        for combo in itertools.product(itertools.product((0, 1), (0, 1)), repeat=n):
            if _on_path(combo, params, cost_model):
                out.append(History(tuple(PeriodRecord(a, e) for a, e in combo), PERFECT))
    return out


def _on_path(pairs, params: ModelParams, cost_model: CostModel) -> bool:
    from .beliefs import advance

    L_U = L_E = params.prior_llr
    for a, e in pairs:
        st = period_state(L_U, L_E, params, cost_model)
        # a cutoff within epsilon of zero is numerically zero
        if e == 1 and (st.p_edu <= 0.0 or st.delta_v + st.subsidy <= params.epsilon):
            return False
        if e == 0 and st.p_edu >= 1.0:
            return False
        dom = st.dominance_E if e else st.dominance_U
        if dom.action_dominant and a != dom.fixed_action:
            return False
        L_U, L_E = advance(st, PeriodRecord(a, e), params, PERFECT)
    return True


@dataclass(frozen=True)
class EarlyRow:
    t: int
    prefix: str
    closed_form: float
    pipeline: float
    p_edu: float

    @property
    def gap(self) -> float:
        return abs(self.closed_form - self.pipeline)


def prefix_label(h: History) -> str:
    return ";".join(f"a{j}={r.action},e{j}={r.education}" for j, r in enumerate(h, start=1)) or "-"


def early_values_table(params: ModelParams, cost_model: Optional[CostModel] = None) -> list:
    if params.mu0 != 0.5:
        raise ModelError("the early-period table assumes mu0 = 1/2")
    cm = cost_model or UniformCost()
    rows = []
    for h in early_prefixes(params, cm):
        t = len(h) + 1
        cf = early_value_closed_form(t, h.records, params)
        last = replay_beliefs(h, params, cm).states[-1]
        rows.append(EarlyRow(t, prefix_label(h), cf, last.delta_v, cm.education_probability(last.delta_v)))
    return rows
