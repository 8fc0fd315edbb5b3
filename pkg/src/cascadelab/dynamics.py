"""Equilibrium path simulation, cascade detection and break-time experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .beliefs import (
    IMPERFECT,
    PERFECT,
    BeliefTrack,
    History,
    PeriodRecord,
    advance,
    check_mode,
    period_state,
    replay_beliefs,
)
from .core import ModelError, ModelParams, ScenarioInvalid, action_choice, sign
from .costs import CostModel, UniformCost
from .decision import education_choice, is_incorrect_cascade
from .rng import SLOT_COST, SLOT_SIGNAL, SLOT_TAG, SLOT_THETA, PathStream
from .welfare import FlatSubsidy, static_welfare_gain


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams = field(default_factory=ModelParams)
    cost_model: CostModel = field(default_factory=UniformCost)
    horizon: int = 50
    n_reps: int = 1000
    mode: str = PERFECT
    initial_history: Optional[History] = None
    subsidy_rule: object = None
    seed: int = 0
    theta: Optional[int] = None  # pin the state for conditional experiments
    education_enabled: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", check_mode(self.mode))
        if self.horizon < 1:
            raise ModelError(f"horizon must be >= 1, got {self.horizon!r}")
        if self.n_reps < 1:
            raise ModelError(f"n_reps must be >= 1, got {self.n_reps!r}")
        if self.theta not in (None, 0, 1):
            raise ModelError(f"theta must be 0, 1 or unset, got {self.theta!r}")
        if self.initial_history is None:
            object.__setattr__(self, "initial_history", History((), self.mode))
        elif self.initial_history.mode != self.mode:
            raise ModelError(
                f"initial history is {self.initial_history.mode} but the run is {self.mode}"
            )
        if self.subsidy_rule is not None:
            self.subsidy_rule.validate(self.params, self.cost_model)


@dataclass(frozen=True)
class Hypotheses:
    """Maintained conditions of a break experiment; checked each period before the break."""

    delta: float
    p_star: float


@dataclass
class PathResult:
    """One simulated path. Period ``k`` counts simulated periods from 1, after any forced prefix."""

    theta: int
    history: History
    beliefs: BeliefTrack
    prefix_len: int
    costs: list = field(default_factory=list)
    delta_v: list = field(default_factory=list)
    subsidies: list = field(default_factory=list)
    educations: list = field(default_factory=list)
    signals: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    tags: list = field(default_factory=list)
    welfare: list = field(default_factory=list)
    onset: Optional[int] = None
    cascade_action: Optional[int] = None
    break_k: Optional[int] = None
    violation_k: Optional[int] = None
    W: float = 0.0
    W_lb: float = 0.0
    outlay: float = 0.0
    outlay_n: int = 0
    sd_edu_n: int = 0
    sd_edu_correct: int = 0

    @property
    def n_edu(self) -> int:
        return sum(self.educations)


def initial_llrs(config: SimConfig) -> tuple[float, float]:
    track = replay_beliefs(config.initial_history, config.params, config.cost_model, config.subsidy_rule)
    last = track.states[-1]
    return last.L_U, last.L_E


def draw_theta(config: SimConfig, stream: PathStream) -> int:
    if config.theta is not None:
        return config.theta
    return 1 if stream.block(0)[SLOT_THETA] < config.params.mu0 else 0


def simulate_path(
    config: SimConfig,
    stream: PathStream,
    hypotheses: Optional[Hypotheses] = None,
    stop_at_break: bool = False,
) -> PathResult:
    """Reference implementation of one equilibrium path.

    The compiled kernel reproduces this function bit for bit, so any change
    here must be mirrored there.
    """
    p, cm, rule = config.params, config.cost_model, config.subsidy_rule
    theta = draw_theta(config, stream)
    L_U, L_E = initial_llrs(config)
    records = list(config.initial_history.records)
    res = PathResult(theta, config.initial_history, None, len(records))  # type: ignore[arg-type]
    states = []
    beta_pow = 1.0
    for k in range(1, config.horizon + 1):
        st = period_state(L_U, L_E, p, cm, rule)
        states.append(st)
        u = stream.block(k)
        cost = cm.sample(u[SLOT_COST])
        dv, s = st.delta_v, st.subsidy
        e = education_choice(dv, cost, s) if config.education_enabled else 0
        r = p.q1 if e else p.q0
        sig = theta if u[SLOT_SIGNAL] < r else 1 - theta
        if e:
            a = action_choice(L_E, p.lam1, sig, p.epsilon)
        else:
            a = action_choice(L_U, p.lamhat0, sig, p.epsilon)
        y = None
        if config.mode == IMPERFECT:
            y = e if u[SLOT_TAG] < p.rho else 1 - e
        w = (1.0 if a == theta else 0.0) - p.eta * cost * e

        incorrect = is_incorrect_cascade(L_U, L_E, p)
        if res.onset is None and incorrect:
            res.onset = k
            res.cascade_action = st.dominance_U.fixed_action
        broken_before = res.break_k is not None
        if hypotheses is not None and not broken_before and res.violation_k is None:
            ok = incorrect and dv >= hypotheses.delta
            if ok:
                flip = 1.0 if st.dominance_E.action_dominant else p.q1
                ok = flip >= hypotheses.p_star
            if not ok:
                res.violation_k = k
        if not broken_before:
            res.outlay += s * st.p_edu
            res.outlay_n += 1
        if e and st.dominance_E.signal_dominant:
            res.sd_edu_n += 1
            res.sd_edu_correct += 1 if a == theta else 0

        res.costs.append(cost)
        res.delta_v.append(dv)
        res.subsidies.append(s)
        res.educations.append(e)
        res.signals.append(sig)
        res.actions.append(a)
        res.tags.append(y)
        res.welfare.append(w)
        res.W += beta_pow * w
        res.W_lb += beta_pow * static_welfare_gain(dv, dv, p.eta, cm, s)
        beta_pow *= p.beta

        rec = PeriodRecord(a, e, y)
        records.append(rec)
        L_U, L_E = advance(st, rec, p, config.mode)
        if res.onset is not None and not broken_before and a != res.cascade_action:
            res.break_k = k
            if stop_at_break:
                break
    states.append(period_state(L_U, L_E, p, cm, rule))
    res.beliefs = BeliefTrack(tuple(states), config.mode, p.epsilon)
    res.history = History(tuple(records), config.mode)
    return res


def detect_incorrect_cascade(track: BeliefTrack, t: int) -> bool:
    st = track.at(t)
    return (
        st.dominance_U.action_dominant
        and abs(st.L_E) > track.epsilon
        and sign(st.L_U) != sign(st.L_E)
    )


def forced_cascade_prefix(run_length: int, direction: int, params: ModelParams) -> History:
    """A run of ``run_length`` identical uneducated actions in ``direction``."""
    if run_length < 1:
        raise ModelError(f"run_length must be >= 1, got {run_length!r}")
    if direction not in (0, 1):
        raise ModelError(f"direction must be 0 or 1, got {direction!r}")
    return History(tuple(PeriodRecord(direction, 0) for _ in range(run_length)), PERFECT)


# ---------------------------------------------------------------- batch statistics


def summarize(results: list) -> dict:
    """Aggregate statistics shared by both kernel backends."""
    n = len(results)
    W = np.array([r.W for r in results])
    return {
        "n": n,
        "mean_W": float(W.mean()),
        "edu_rate_first": float(np.mean([r.educations[0] for r in results])),
        "mean_n_edu": float(np.mean([r.n_edu for r in results])),
    }


@dataclass(frozen=True)
class BreakReport:
    n: int
    n_broken: int
    n_censored: int
    n_violated: int
    exposure: int
    rate: float
    rate_se: float
    valid_rate: float
    valid_rate_se: float
    mean_break_time: float
    mean_break_time_se: float
    floor: float
    bound: float
    max_survival_excess: float
    first_violation_path: int
    first_violation_period: int

    @property
    def violation_share(self) -> float:
        return self.n_violated / self.n

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["violation_share"] = self.violation_share
        return d


def _geometric_se(rate: float, events: int) -> float:
    if events == 0:
        return math.inf
    return rate * math.sqrt(max(1.0 - rate, 0.0) / events)


def break_time_experiment(
    config: SimConfig, delta: float, p_star: float, strict: bool = True
) -> BreakReport:
    """Break times from a forced incorrect cascade, checked against the geometric bound.

    Each path is validated period by period until it breaks: the cascade must
    still be incorrect, the value of education must be at least ``delta`` and
    the flip probability at least ``p_star``. With ``strict`` any violation
    raises ``ScenarioInvalid``; otherwise violations are counted in the report.
    """
    from .kernel import simulate_batch

    if not delta > 0.0:
        raise ModelError(f"delta must be positive, got {delta!r}")
    if not 0.0 < p_star <= 1.0:
        raise ModelError(f"p_star must lie in (0, 1], got {p_star!r}")
    p = config.params
    L_U, L_E = initial_llrs(config)
    if not is_incorrect_cascade(L_U, L_E, p):
        raise ScenarioInvalid(
            f"forced prefix does not establish an incorrect cascade (L_U={L_U:.6g}, L_E={L_E:.6g})",
            period=len(config.initial_history) + 1,
        )
    batch = simulate_batch(config, hypotheses=Hypotheses(delta, p_star), stop_at_break=True)
    brk, viol = batch["break_k"], batch["violation_k"]
    n = len(brk)
    broken = brk > 0
    violated = viol > 0
    if violated.any():
        i = int(np.argmax(violated))
        first_path, first_period = i, int(viol[i])
        if strict:
            raise ScenarioInvalid(
                f"maintained hypotheses fail on {int(violated.sum())} of {n} paths "
                f"(first: path {first_path}, period {first_period})",
                path=first_path,
                period=first_period,
                count=int(violated.sum()),
            )
    else:
        first_path = first_period = -1

    H = config.horizon
    exposure = int(np.where(broken, brk, H).sum())
    n_broken = int(broken.sum())
    rate = n_broken / exposure
    # censor each path at its first violation
    valid_break = broken & (~violated | (brk < viol))
    valid_exposure = int(np.where(valid_break, brk, np.where(violated, viol - 1, H)).sum())
    n_valid = int(valid_break.sum())
    valid_rate = n_valid / valid_exposure if valid_exposure else math.nan

    times = brk[broken].astype(float)
    mean_T = float(times.mean()) if n_broken else math.nan
    mean_se = float(times.std(ddof=1) / math.sqrt(n_broken)) if n_broken > 1 else math.inf

    s = config.subsidy_rule.s if isinstance(config.subsidy_rule, FlatSubsidy) else 0.0
    floor = config.cost_model.cdf(delta + s) * p_star
    bound = 1.0 / floor if floor > 0.0 else math.inf

    # empirical survival P(T > k) against the geometric envelope
    excess = -math.inf
    T_all = np.where(broken, brk, H + 1)
    for k in range(0, H + 1):
        surv = float(np.mean(T_all > k))
        env = (1.0 - floor) ** k
        se = math.sqrt(max(env * (1.0 - env), 0.0) / n)
        excess = max(excess, surv - env - 3.0 * se)
        if env < 1e-12 and surv == 0.0:
            break
    return BreakReport(
        n, n_broken, int((~broken).sum()), int(violated.sum()), exposure,
        rate, _geometric_se(rate, n_broken),
        valid_rate, _geometric_se(valid_rate, n_valid),
        mean_T, mean_se, floor, bound, excess, first_path, first_period,
    )
