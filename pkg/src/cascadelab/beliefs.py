"""Public records and the two public LLR recursions (uneducated and educated)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from .core import Dominance, ModeError, ModelError, ModelParams, classify_dominance
from .costs import CostModel
from .decision import ValueBreakdown, value_of_education

PERFECT = "perfect"
IMPERFECT = "imperfect"
MODES = (PERFECT, IMPERFECT)


def check_mode(mode: str) -> str:
    m = str(mode).lower()
    aliases = {"perfect": PERFECT, "perfectobs": PERFECT, "imperfect": IMPERFECT, "imperfectobs": IMPERFECT, "io": IMPERFECT}
    if m not in aliases:
        raise ModeError(f"unknown observability mode {mode!r}")
    return aliases[m]


@dataclass(frozen=True)
class PeriodRecord:
    action: int
    education: int
    tag: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("action", "education"):
            if getattr(self, name) not in (0, 1):
                raise ModelError(f"{name} must be 0 or 1, got {getattr(self, name)!r}")
        if self.tag is not None and self.tag not in (0, 1):
            raise ModelError(f"tag must be 0, 1 or absent, got {self.tag!r}")

    # short aliases matching the usual notation
    @property
    def a(self) -> int:
        return self.action

    @property
    def e(self) -> int:
        return self.education

    @property
    def y(self) -> Optional[int]:
        return self.tag


@dataclass(frozen=True)
class History:
    records: tuple = ()
    mode: str = PERFECT

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", check_mode(self.mode))
        recs = tuple(r if isinstance(r, PeriodRecord) else PeriodRecord(*r) for r in self.records)
        object.__setattr__(self, "records", recs)
        for j, r in enumerate(recs, start=1):
            _check_record(r, self.mode, j)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PeriodRecord]:
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def append(self, record: PeriodRecord) -> "History":
        return History(self.records + (record,), self.mode)

    def flipped(self) -> "History":
        """Mirror image with every action reversed."""
        return History(
            tuple(PeriodRecord(1 - r.action, r.education, r.tag) for r in self.records), self.mode
        )

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]], mode: str = PERFECT) -> "History":
        return cls(tuple(PeriodRecord(*p) for p in pairs), mode)


def _check_record(record: PeriodRecord, mode: str, j: int = 0) -> None:
    if mode == PERFECT and record.tag is not None:
        raise ModeError(f"record {j}: tag present in perfect-observability mode")
    if mode == IMPERFECT and record.tag is None:
        raise ModeError(f"record {j}: tag missing in imperfect-observability mode")


# ---------------------------------------------------------------- increments


def _regime(L_U: float, L_E: float, e: int, params: ModelParams) -> Dominance:
    if e:
        return classify_dominance(L_E, params.lam1, params.epsilon)
    return classify_dominance(L_U, params.lamhat0, params.epsilon)


def _likelihood(dom: Dominance, a: int, theta: int, r: float) -> float:
    """P(a | theta) for an agent in regime ``dom`` with signal accuracy ``r``."""
    if dom.action_dominant:
        return 1.0 if a == dom.fixed_action else 0.0
    return r if a == theta else 1.0 - r


def uneducated_increment(record: PeriodRecord, params: ModelParams) -> float:
    if record.tag is not None:
        raise ModeError("uneducated_increment takes perfect-observability records")
    w = params.lamhat1 if record.education else params.lamhat0
    return w if record.action else -w


def _educated_step(dom_U: Dominance, dom_E: Dominance, a: int, e: int, params: ModelParams) -> float:
    dom = dom_E if e else dom_U
    if dom.action_dominant:
        return 0.0
    w = params.lam1 if e else params.lam0
    return w if a else -w


def educated_increment(L_U_at_j: float, L_E_at_j: float, record: PeriodRecord, params: ModelParams) -> float:
    if record.tag is not None:
        raise ModeError("educated_increment takes perfect-observability records")
    dom = _regime(L_U_at_j, L_E_at_j, record.education, params)
    if dom.action_dominant:
        return 0.0
    w = params.true_weight(record.education)
    return w if record.action else -w


def tag_posterior(p_edu: float, rho: float, y: int) -> float:
    """Posterior probability that the agent educated, given tag ``y``.

    A perfectly accurate tag (rho = 1) reveals the choice outright, even when
    the prior makes the reported choice a zero-probability event.
    """
    if not 0.0 <= p_edu <= 1.0:
        raise ModelError(f"p_edu must lie in [0, 1], got {p_edu!r}")
    if not 0.5 < rho <= 1.0:
        raise ModelError(f"rho must lie in (1/2, 1], got {rho!r}")
    if rho == 1.0:
        return 1.0 if y else 0.0
    if y:
        num = rho * p_edu
        den = num + (1.0 - rho) * (1.0 - p_edu)
    else:
        num = (1.0 - rho) * p_edu
        den = num + rho * (1.0 - p_edu)
    if den == 0.0:
        return p_edu
    return num / den


def mixture_weight(w: float, params: ModelParams) -> float:
    return w * params.lamhat1 + (1.0 - w) * params.lamhat0


def uneducated_increment_io(record: PeriodRecord, p_edu: float, params: ModelParams) -> float:
    if record.tag is None:
        raise ModeError("uneducated_increment_io needs a tagged record")
    lam = mixture_weight(tag_posterior(p_edu, params.rho, record.tag), params)
    return lam if record.action else -lam


def _mixture_step(dom_U: Dominance, dom_E: Dominance, a: int, w: float, params: ModelParams) -> float:
    num = w * _likelihood(dom_E, a, 1, params.q1) + (1.0 - w) * _likelihood(dom_U, a, 1, params.q0)
    den = w * _likelihood(dom_E, a, 0, params.q1) + (1.0 - w) * _likelihood(dom_U, a, 0, params.q0)
    # action-dominant branches do not depend on theta, so num and den vanish together
    if num == den:
        return 0.0
    return math.log(num / den)


def educated_increment_io(
    L_U_at_j: float, L_E_at_j: float, record: PeriodRecord, p_edu: float, params: ModelParams
) -> float:
    if record.tag is None:
        raise ModeError("educated_increment_io needs a tagged record")
    w = tag_posterior(p_edu, params.rho, record.tag)
    dom_U = classify_dominance(L_U_at_j, params.lamhat0, params.epsilon)
    dom_E = classify_dominance(L_E_at_j, params.lam1, params.epsilon)
    return _mixture_step(dom_U, dom_E, record.action, w, params)


# ---------------------------------------------------------------- forward pass


@dataclass(frozen=True)
class PeriodState:
    """Everything public at the start of one period."""

    L_U: float
    L_E: float
    value: ValueBreakdown
    subsidy: float
    p_edu: float

    @property
    def dominance_U(self) -> Dominance:
        return self.value.dominance_U

    @property
    def dominance_E(self) -> Dominance:
        return self.value.dominance_E

    @property
    def delta_v(self) -> float:
        return self.value.delta_v


def period_state(
    L_U: float, L_E: float, params: ModelParams, cost_model: CostModel, subsidy=None
) -> PeriodState:
    vb = value_of_education(L_U, L_E, params)
    s = 0.0 if subsidy is None else subsidy.amount(vb, L_U, L_E, params, cost_model)
    return PeriodState(L_U, L_E, vb, s, cost_model.education_probability(vb.delta_v + s))


def advance(state: PeriodState, record: PeriodRecord, params: ModelParams, mode: str) -> tuple[float, float]:
    """Public LLRs after ``record`` is appended to the history seen in ``state``."""
    a, e = record.action, record.education
    if mode == PERFECT:
        dU = params.lamhat1 if e else params.lamhat0
        L_U = state.L_U + (dU if a else -dU)
        L_E = state.L_E + _educated_step(state.dominance_U, state.dominance_E, a, e, params)
        return L_U, L_E
    w = tag_posterior(state.p_edu, params.rho, record.tag)
    lam = mixture_weight(w, params)
    L_U = state.L_U + (lam if a else -lam)
    L_E = state.L_E + _mixture_step(state.dominance_U, state.dominance_E, a, w, params)
    return L_U, L_E


@dataclass(frozen=True)
class BeliefTrack:
    """Per-period public state; entry ``t - 1`` describes the start of period ``t``."""

    states: tuple
    mode: str = PERFECT
    epsilon: float = 1e-9

    def __len__(self) -> int:
        return len(self.states)

    def at(self, t: int) -> PeriodState:
        if not 1 <= t <= len(self.states):
            raise ModelError(f"period {t} outside track of length {len(self.states)}")
        return self.states[t - 1]

    @property
    def L_U(self) -> list[float]:
        return [s.L_U for s in self.states]

    @property
    def L_E(self) -> list[float]:
        return [s.L_E for s in self.states]

    @property
    def p_edu(self) -> list[float]:
        return [s.p_edu for s in self.states]

    @property
    def delta_v(self) -> list[float]:
        return [s.delta_v for s in self.states]

    @property
    def subsidy(self) -> list[float]:
        return [s.subsidy for s in self.states]

    @property
    def dominance_U(self) -> list[Dominance]:
        return [s.dominance_U for s in self.states]

    @property
    def dominance_E(self) -> list[Dominance]:
        return [s.dominance_E for s in self.states]


def replay_beliefs(
    history: History, params: ModelParams, cost_model: CostModel, subsidy=None
) -> BeliefTrack:
    L_U = L_E = params.prior_llr
    states = []
    for record in history:
        st = period_state(L_U, L_E, params, cost_model, subsidy)
        states.append(st)
        L_U, L_E = advance(st, record, params, history.mode)
    states.append(period_state(L_U, L_E, params, cost_model, subsidy))
    return BeliefTrack(tuple(states), history.mode, params.epsilon)


# ---------------------------------------------------------------- serialization


def write_history_csv(history: History, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        tagged = history.mode == IMPERFECT
        w.writerow(["t", "a", "e", "y"] if tagged else ["t", "a", "e"])
        for t, r in enumerate(history, start=1):
            w.writerow([t, r.action, r.education, r.tag] if tagged else [t, r.action, r.education])


def parse_history_rows(rows: Sequence[Sequence], mode: Optional[str] = None) -> History:
    """Build a history from ``(t, a, e[, y])`` rows; ``t`` must run 1, 2, ..."""
    records = []
    for i, row in enumerate(rows, start=1):
        vals = [int(v) for v in row]
        if len(vals) not in (3, 4):
            raise ModelError(f"history row {i}: expected t,a,e[,y], got {row!r}")
        if vals[0] != i:
            raise ModelError(f"history row {i}: period index {vals[0]} out of order")
        records.append(PeriodRecord(vals[1], vals[2], vals[3] if len(vals) == 4 else None))
    if mode is None:
        mode = IMPERFECT if records and records[0].tag is not None else PERFECT
    return History(tuple(records), mode)


def read_history_csv(path, mode: Optional[str] = None) -> History:
    with open(Path(path), newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if rows and rows[0][0].strip() == "t":
        rows = rows[1:]
    return parse_history_rows(rows, mode)
