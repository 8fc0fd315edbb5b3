"""Welfare accounting and planner subsidy rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import ModelError, ModelParams, classify_dominance, folded_posterior
from .costs import CAP_QUANTILE, CostModel
from .decision import ValueBreakdown, is_incorrect_cascade


def _clamp(x: float, lo: float, hi: float) -> float:
    return max(lo, min(x, hi))


# ---------------------------------------------------------------- static welfare


def static_welfare_gain(
    delta_v: float, delta_acc: float, eta: float, cost_model: CostModel, subsidy: float = 0.0
) -> float:
    """Expected per-period gain ``F(x) dAcc - eta H(x)`` at the cutoff ``x = dV + s``."""
    x = max(delta_v + subsidy, 0.0)
    return cost_model.cdf(x) * delta_acc - eta * cost_model.truncated_first_moment(x)


def myopic_subsidy(delta_acc: float, delta_v: float, eta: float, fbar_effective: float) -> float:
    if eta <= 0.0:
        raise ModelError("the myopic subsidy needs eta > 0")
    return _clamp(delta_acc / eta - delta_v, 0.0, fbar_effective - delta_v)


def target_break_subsidy(pi_bar: float, p_star: float, delta_v: float, cost_model: CostModel) -> float:
    if not 0.0 < pi_bar <= p_star <= 1.0:
        raise ModelError(f"need 0 < pi_bar <= p_star <= 1, got pi_bar={pi_bar!r}, p_star={p_star!r}")
    cap = cost_model.fbar_effective
    ratio = pi_bar / p_star
    target = cap if ratio >= CAP_QUANTILE else cost_model.quantile(ratio)
    return _clamp(target - delta_v, 0.0, cap - delta_v)


def delta_lower(L_E: float, params: ModelParams) -> float:
    """Accuracy floor after a break minus the accuracy ceiling before it."""
    mu = folded_posterior(L_E)
    w_pre = 1.0 - mu
    if classify_dominance(L_E, params.lam1, params.epsilon).action_dominant:
        w_post = mu
    else:
        w_post = params.q1
    return w_post - w_pre


def dynamic_welfare_bound(
    pi_s: float, beta: float, delta_lower: float, eta: float, expected_subsidy_outlay: float
) -> float:
    if not 0.0 < pi_s <= 1.0:
        raise ModelError(f"pi_s must lie in (0, 1], got {pi_s!r}")
    if not 0.0 <= beta < 1.0:
        raise ModelError(f"beta must lie in [0, 1), got {beta!r}")
    denom = 1.0 - beta * (1.0 - pi_s)
    return pi_s / denom * delta_lower - eta * expected_subsidy_outlay / denom


# ---------------------------------------------------------------- rules


class SubsidyRule:
    """Base class. ``code`` and ``args`` describe the rule to the compiled kernel."""

    kind = "none"
    code = 0

    def amount(
        self, vb: ValueBreakdown, L_U: float, L_E: float, params: ModelParams, cost_model: CostModel
    ) -> float:
        return 0.0

    def validate(self, params: ModelParams, cost_model: CostModel) -> None:
        pass

    def args(self, params: ModelParams) -> tuple[float, float]:
        return (0.0, 0.0)

    def as_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class NoSubsidy(SubsidyRule):
    kind = "none"
    code = 0

    def as_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class FlatSubsidy(SubsidyRule):
    s: float = 0.0

    kind = "flat"
    code = 1

    def __post_init__(self) -> None:
        if self.s < 0.0:
            raise ModelError(f"flat subsidy must be nonnegative, got {self.s!r}")

    def validate(self, params: ModelParams, cost_model: CostModel) -> None:
        if self.s > cost_model.fbar_effective:
            raise ModelError(f"flat subsidy {self.s!r} exceeds the cost cap {cost_model.fbar_effective!r}")

    def amount(self, vb, L_U, L_E, params, cost_model) -> float:
        return self.s

    def args(self, params: ModelParams) -> tuple[float, float]:
        return (self.s, 0.0)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "s": self.s}


@dataclass(frozen=True)
class MyopicSubsidy(SubsidyRule):
    """History-dependent myopic rule; ``eta`` defaults to the model's resource weight."""

    eta: Optional[float] = None

    kind = "myopic"
    code = 2

    def _eta(self, params: ModelParams) -> float:
        return params.eta if self.eta is None else self.eta

    def validate(self, params: ModelParams, cost_model: CostModel) -> None:
        if self._eta(params) <= 0.0:
            raise ModelError("the myopic subsidy needs eta > 0")

    def amount(self, vb, L_U, L_E, params, cost_model) -> float:
        return myopic_subsidy(vb.delta_v, vb.delta_v, self._eta(params), cost_model.fbar_effective)

    def args(self, params: ModelParams) -> tuple[float, float]:
        return (self._eta(params), 0.0)

    def as_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.eta is not None:
            d["eta"] = self.eta
        return d


@dataclass(frozen=True)
class TargetBreakSubsidy(SubsidyRule):
    """Tops up the cutoff at incorrect cascades so the break chance reaches ``pi_bar``."""

    pi_bar: float = 0.5
    p_star: float = 1.0

    kind = "target_break"
    code = 3

    def __post_init__(self) -> None:
        if not 0.0 < self.pi_bar <= self.p_star <= 1.0:
            raise ModelError(
                f"need 0 < pi_bar <= p_star <= 1, got pi_bar={self.pi_bar!r}, p_star={self.p_star!r}"
            )

    def amount(self, vb, L_U, L_E, params, cost_model) -> float:
        if not is_incorrect_cascade(L_U, L_E, params):
            return 0.0
        return target_break_subsidy(self.pi_bar, self.p_star, vb.delta_v, cost_model)

    def args(self, params: ModelParams) -> tuple[float, float]:
        return (self.pi_bar, self.p_star)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "pi_bar": self.pi_bar, "p_star": self.p_star}


def subsidy_rule_from_dict(d: Optional[dict]) -> Optional[SubsidyRule]:
    if d is None:
        return None
    d = dict(d)
    kind = str(d.pop("kind", "none")).lower()
    if kind == "none":
        rule: SubsidyRule = NoSubsidy()
    elif kind == "flat":
        rule = FlatSubsidy(float(d.pop("s", 0.0)))
    elif kind == "myopic":
        eta = d.pop("eta", None)
        rule = MyopicSubsidy(None if eta is None else float(eta))
    elif kind in ("target_break", "targetbreak"):
        rule = TargetBreakSubsidy(float(d.pop("pi_bar", 0.5)), float(d.pop("p_star", 1.0)))
    else:
        raise ModelError(f"unknown subsidy kind {kind!r}")
    if d:
        raise ModelError(f"unknown subsidy key(s) for {kind}: {', '.join(sorted(d))}")
    return rule


# ---------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class WelfareEstimate:
    W: float
    W_se: float
    lower_track: float
    lower_track_se: float
    outlay_per_period: float
    n: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _estimate(batch: dict) -> WelfareEstimate:
    W, lb = batch["W"], batch["W_lb"]
    n = len(W)
    n_out = float(batch["outlay_n"].sum())
    return WelfareEstimate(
        float(W.mean()),
        float(W.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        float(lb.mean()),
        float(lb.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        float(batch["outlay"].sum() / n_out) if n_out else 0.0,
        n,
    )


def discounted_welfare_mc(config, rule: Optional[SubsidyRule] = None) -> WelfareEstimate:
    """Monte Carlo discounted welfare of ``config`` run under ``rule``.

    Estimates for different rules on one config share paths, so comparisons
    use matched random streams.
    """
    from dataclasses import replace

    from .kernel import simulate_batch

    if rule is not None:
        config = replace(config, subsidy_rule=rule)
    return _estimate(simulate_batch(config))


@dataclass(frozen=True)
class WelfareComparison:
    base: WelfareEstimate
    policy: WelfareEstimate
    gain: float
    gain_se: float


def welfare_comparison(config, rule: Optional[SubsidyRule]) -> WelfareComparison:
    """Discounted welfare under ``rule`` against no subsidy, on matched paths."""
    from dataclasses import replace

    from .kernel import simulate_batch

    b0 = simulate_batch(replace(config, subsidy_rule=None))
    b1 = simulate_batch(replace(config, subsidy_rule=rule))
    d = b1["W"] - b0["W"]
    n = len(d)
    se = float(d.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return WelfareComparison(_estimate(b0), _estimate(b1), float(d.mean()), se)
