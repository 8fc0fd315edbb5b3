"""Accuracy functional, value of education, education cutoff and flip probability."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .core import (
    Dominance,
    ModelError,
    ModelParams,
    action_choice,
    classify_dominance,
    posterior_from_llr,
    sign,
)

__all__ = [
    "Case",
    "ValueBreakdown",
    "accuracy",
    "action_choice",
    "value_of_education",
    "education_choice",
    "is_incorrect_cascade",
    "flip_probability",
    "early_value_closed_form",
]


class Case(str, enum.Enum):
    BOTH_SIGNAL = "BothSignal"
    EDUCATED_ACTION_ONLY = "EducatedActionOnly"
    UNEDUCATED_ACTION_ONLY = "UneducatedActionOnly"
    BOTH_ACTION_SAME_SIGN = "BothAction_SameSign"
    BOTH_ACTION_OPPOSITE_SIGN = "BothAction_OppositeSign"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ValueBreakdown:
    acc_educated: float
    acc_uneducated: float
    delta_v: float
    case_label: Case
    dominance_U: Dominance
    dominance_E: Dominance


def accuracy(L_dec: float, Lambda: float, L_true: float, r: float, epsilon: float = 0.0) -> float:
    """Ex-ante probability that the threshold action matches the state.

    Enumerates the state (weighted by the true public belief) and the private
    signal (correct with probability ``r``), applying the tie-broken action
    rule to each branch.
    """
    if Lambda <= 0.0:
        raise ModelError(f"decision weight must be positive, got {Lambda!r}")
    if not 0.5 < r < 1.0:
        raise ModelError(f"signal accuracy must lie in (1/2, 1), got {r!r}")
    a0 = action_choice(L_dec, Lambda, 0, epsilon)
    a1 = action_choice(L_dec, Lambda, 1, epsilon)
    p1 = posterior_from_llr(L_true)
    p0 = 1.0 - p1
    acc = 0.0
    if a1 == 1:
        acc += p1 * r
    if a0 == 1:
        acc += p1 * (1.0 - r)
    if a0 == 0:
        acc += p0 * r
    if a1 == 0:
        acc += p0 * (1.0 - r)
    return acc


def _case(dom_U: Dominance, dom_E: Dominance) -> Case:
    if dom_U.signal_dominant and dom_E.signal_dominant:
        return Case.BOTH_SIGNAL
    if dom_U.signal_dominant:
        return Case.EDUCATED_ACTION_ONLY
    if dom_E.signal_dominant:
        return Case.UNEDUCATED_ACTION_ONLY
    if dom_U.fixed_action == dom_E.fixed_action:
        return Case.BOTH_ACTION_SAME_SIGN
    return Case.BOTH_ACTION_OPPOSITE_SIGN


def value_of_education(L_U: float, L_E: float, params: ModelParams) -> ValueBreakdown:
    eps = params.epsilon
    acc_E = accuracy(L_E, params.lam1, L_E, params.q1, eps)
    acc_U = accuracy(L_U, params.lamhat0, L_E, params.q0, eps)
    dom_U = classify_dominance(L_U, params.lamhat0, eps)
    dom_E = classify_dominance(L_E, params.lam1, eps)
    return ValueBreakdown(acc_E, acc_U, acc_E - acc_U, _case(dom_U, dom_E), dom_U, dom_E)


def education_choice(delta_v: float, cost: float, subsidy: float = 0.0) -> int:
    """Educate iff the cost is strictly below the (subsidised) cutoff."""
    if cost < 0.0 or subsidy < 0.0:
        raise ModelError("cost and subsidy must be nonnegative")
    return int(cost < delta_v + subsidy)


def is_incorrect_cascade(L_U: float, L_E: float, params: ModelParams) -> bool:
    dom_U = classify_dominance(L_U, params.lamhat0, params.epsilon)
    return (
        dom_U.action_dominant
        and abs(L_E) > params.epsilon
        and sign(L_U) != sign(L_E)
    )


def flip_probability(L_U: float, L_E: float, params: ModelParams) -> float:
    """Chance an educated agent leaves an incorrect uneducated cascade."""
    if not is_incorrect_cascade(L_U, L_E, params):
        raise ModelError(f"(L_U={L_U!r}, L_E={L_E!r}) is not an incorrect uneducated cascade")
    if classify_dominance(L_E, params.lam1, params.epsilon).action_dominant:
        return 1.0
    return params.q1


def early_value_closed_form(t: int, prefix: Sequence, params: ModelParams) -> float:
    """Closed-form value of education in the first three periods at mu0 = 1/2.

    ``prefix`` holds the ``t - 1`` earlier records (anything with ``a`` and
    ``e`` attributes or ``(a, e)`` pairs). Serves as an oracle for the
    general pipeline, so it never touches the accuracy enumeration.
    """
    if params.mu0 != 0.5:
        raise ModelError("closed forms assume mu0 = 1/2")
    if t not in (1, 2, 3):
        raise ModelError(f"closed forms cover t in {{1, 2, 3}}, got {t!r}")
    if len(prefix) != t - 1:
        raise ModelError(f"t={t} needs a prefix of length {t - 1}, got {len(prefix)}")
    pairs = [(r.a, r.e) if hasattr(r, "a") else tuple(r) for r in prefix]
    q0, q1 = params.q0, params.q1
    if t == 1:
        return q1 - q0
    if t == 2:
        return q1 - q0 if pairs[0][1] == 0 else 0.0
    (a1, e1), (a2, e2) = pairs
    if a1 != a2:
        return q1 - q0
    if e1 == 0 and e2 == 0:
        if 2.0 * params.lam0 < params.lam1:
            return q1 - q0 * q0 / (q0 * q0 + (1.0 - q0) ** 2)
        return 0.0
    return 0.0
