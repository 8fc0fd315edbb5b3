"""Primitive parameters and the log-odds calculus shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from functools import cached_property
from typing import Optional


class ModelError(ValueError):
    """A parameter or argument lies outside its legal domain."""


class ModeError(ValueError):
    """A record does not match the observability mode it is used in."""


class ScenarioInvalid(RuntimeError):
    """Maintained hypotheses of an experiment failed on a simulated path."""

    def __init__(self, message: str, path: int = -1, period: int = -1, count: int = 0):
        super().__init__(message)
        self.path = path
        self.period = period
        self.count = count


def log_odds(x: float) -> float:
    if not 0.0 < x < 1.0:
        raise ModelError(f"log_odds needs x in (0, 1), got {x!r}")
    return math.log(x / (1.0 - x))


def posterior_from_llr(L: float) -> float:
    # split on sign so exp never overflows
    if L >= 0.0:
        return 1.0 / (1.0 + math.exp(-L))
    z = math.exp(L)
    return z / (1.0 + z)


def folded_posterior(L: float) -> float:
    return posterior_from_llr(abs(L))


def sign(x: float) -> int:
    return (x > 0.0) - (x < 0.0)


@dataclass(frozen=True)
class ModelParams:
    mu0: float = 0.5
    q0: float = 0.6
    q1: float = 0.8
    qhat0: float = 0.75
    qhat1: float = 0.9
    rho: float = 1.0
    eta: float = 1.0
    beta: float = 0.9
    epsilon: float = 1e-9

    def __post_init__(self) -> None:
        checks = [
            ("mu0", 0.0 < self.mu0 < 1.0, "0 < mu0 < 1"),
            ("q0", 0.5 < self.q0 < 1.0, "1/2 < q0 < 1"),
            ("q1", self.q0 <= self.q1 < 1.0, "q0 <= q1 < 1"),
            ("qhat0", 0.5 < self.qhat0 < 1.0, "1/2 < qhat0 < 1"),
            ("qhat1", self.qhat0 < self.qhat1 < 1.0, "qhat0 < qhat1 < 1"),
            ("rho", 0.5 < self.rho <= 1.0, "1/2 < rho <= 1"),
            ("eta", 0.0 <= self.eta <= 1.0, "0 <= eta <= 1"),
            ("beta", 0.0 <= self.beta < 1.0, "0 <= beta < 1"),
            ("epsilon", self.epsilon >= 0.0, "epsilon >= 0"),
        ]
        for name, ok, rule in checks:
            if not ok:
                raise ModelError(f"{name}={getattr(self, name)!r} violates {rule}")

    # log-likelihood weights; cached because the simulators hit them every period
    @cached_property
    def lam0(self) -> float:
        return log_odds(self.q0)

    @cached_property
    def lam1(self) -> float:
        return log_odds(self.q1)

    @cached_property
    def lamhat0(self) -> float:
        return log_odds(self.qhat0)

    @cached_property
    def lamhat1(self) -> float:
        return log_odds(self.qhat1)

    @property
    def kappa0(self) -> float:
        """Misspecification wedge of uneducated decisions, in log-odds units."""
        return self.lamhat0 - self.lam0

    @property
    def prior_llr(self) -> float:
        return log_odds(self.mu0)

    def true_accuracy(self, e: int) -> float:
        return self.q1 if e else self.q0

    def true_weight(self, e: int) -> float:
        return self.lam1 if e else self.lam0

    def perceived_weight(self, e: int) -> float:
        return self.lamhat1 if e else self.lamhat0

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Dominance:
    """Regime at a public LLR: ``fixed_action`` is None when the signal matters."""

    fixed_action: Optional[int] = None

    @property
    def signal_dominant(self) -> bool:
        return self.fixed_action is None

    @property
    def action_dominant(self) -> bool:
        return self.fixed_action is not None

    def __str__(self) -> str:
        if self.fixed_action is None:
            return "SignalDominant"
        return f"ActionDominant({self.fixed_action})"


SIGNAL_DOMINANT = Dominance()


def action_choice(
    L_dec: float,
    Lambda: float,
    s: int,
    epsilon: float = 0.0,
    tie_break_to_one: bool = False,
) -> int:
    """Threshold action rule ``1{L_dec + Lambda*(2s-1) >= 0}``.

    An index within ``epsilon`` of zero is a tie. Ties follow the private
    signal by default, which makes ``|L_dec| == Lambda`` signal-dominant on
    both sides; ``tie_break_to_one`` resolves them toward action 1 instead.
    """
    if Lambda <= 0.0:
        raise ModelError(f"decision weight must be positive, got {Lambda!r}")
    index = L_dec + Lambda * (2 * s - 1)
    if index > epsilon:
        return 1
    if index < -epsilon:
        return 0
    return 1 if tie_break_to_one else s


def classify_dominance(
    L: float,
    Lambda: float,
    epsilon: float = 0.0,
    tie_break_to_one: bool = False,
) -> Dominance:
    a0 = action_choice(L, Lambda, 0, epsilon, tie_break_to_one)
    a1 = action_choice(L, Lambda, 1, epsilon, tie_break_to_one)
    if a0 != a1:
        return SIGNAL_DOMINANT
    return Dominance(a0)
