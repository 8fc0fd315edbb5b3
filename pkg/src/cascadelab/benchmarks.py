"""Homogeneous-precision baselines: rational versus naive public learning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ModelError, action_choice, classify_dominance, log_odds
from .rng import DOMAIN_BENCHMARK, SLOT_SIGNAL, PathStream, block_uniforms_array

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class BenchmarkPath:
    """Both baselines driven by one signal stream.

    ``L_R[t-1]`` and ``L_N[t-1]`` are the public LLRs at the start of period
    ``t``; ``S[t-1]`` is the signal walk after period ``t``. A stopping time
    of ``None`` means no cascade within the horizon.
    """

    theta: int
    signals: tuple
    actions_R: tuple
    actions_N: tuple
    L_R: tuple
    L_N: tuple
    tau_R: Optional[int]
    tau_N: Optional[int]
    S: tuple


def _check(q: float, qhat: float, mu0: float) -> None:
    for name, v in (("q", q), ("qhat", qhat)):
        if not 0.5 < v < 1.0:
            raise ModelError(f"{name} must lie in (1/2, 1), got {v!r}")
    if not 0.0 < mu0 < 1.0:
        raise ModelError(f"mu0 must lie in (0, 1), got {mu0!r}")


def simulate_benchmark_path(
    theta: int,
    q: float,
    qhat: float,
    mu0: float,
    horizon: int,
    rng: Optional[PathStream] = None,
    signals: Optional[Sequence[int]] = None,
    epsilon: float = BOUNDARY_TOL,
) -> BenchmarkPath:
    """Run the rational and naive recursions side by side.

    Signals come from ``rng`` (period ``t`` uses block ``t``) unless an
    explicit sequence is supplied.
    """
    _check(q, qhat, mu0)
    if signals is None:
        if rng is None:
            raise ModelError("need either rng or explicit signals")
        signals = [theta if rng.block(t)[SLOT_SIGNAL] < q else 1 - theta for t in range(1, horizon + 1)]
    signals = tuple(int(s) for s in signals[:horizon])
    lam, lamhat = log_odds(q), log_odds(qhat)
    L_R = L_N = log_odds(mu0)
    tr, tn, aR, aN, LR, LN, S = [], [], [], [], [], [], []
    tau_R = tau_N = None
    walk = 0
    for t, s in enumerate(signals, start=1):
        LR.append(L_R)
        LN.append(L_N)
        if tau_R is None and classify_dominance(L_R, lam, epsilon).action_dominant:
            tau_R = t
        if tau_N is None and classify_dominance(L_N, lamhat, epsilon).action_dominant:
            tau_N = t
        a_r = action_choice(L_R, lam, s, epsilon)
        a_n = action_choice(L_N, lamhat, s, epsilon)
        if classify_dominance(L_R, lam, epsilon).signal_dominant:
            L_R = L_R + (lam if a_r else -lam)
        L_N = L_N + (lamhat if a_n else -lamhat)
        walk += 2 * s - 1
        aR.append(a_r)
        aN.append(a_n)
        S.append(walk)
    LR.append(L_R)
    LN.append(L_N)
    return BenchmarkPath(theta, signals, tuple(aR), tuple(aN), tuple(LR), tuple(LN), tau_R, tau_N, tuple(S))


def stopping_times(
    S_path: Sequence[int], mu0: float, lam: float, lamhat: float, tol: float = BOUNDARY_TOL
) -> tuple[Optional[int], Optional[int]]:
    """First-passage times of the offset walks ``|psi(mu0)/lambda + S_{t-1}| > 1``.

    ``S_path[i]`` is the walk after period ``i + 1``; the walk before period 1
    is 0, so a prior strong enough to decide alone gives a stop at t = 1.
    """
    if lam <= 0.0 or lamhat <= 0.0:
        raise ModelError("signal weights must be positive")
    prior = log_odds(mu0)
    walk = [0] + list(S_path)

    def first(offset: float, weight: float) -> Optional[int]:
        for t, s in enumerate(walk, start=1):
            if abs(offset + s) > 1.0 + tol / weight:
                return t
        return None

    return first(prior / lam, lam), first(prior / lamhat, lamhat)


def benchmark_stopping_batch(
    theta: int, q: float, qhat: float, mu0: float, horizon: int, n: int, seed: int, path_start: int = 0,
    epsilon: float = BOUNDARY_TOL, full_horizon: bool = False,
) -> dict:
    """Vectorised stopping times over ``n`` paths; entries are 0 when no cascade occurs.

    Uses the same signal stream as ``simulate_benchmark_path`` with
    ``PathStream(seed, path, DOMAIN_BENCHMARK)``. The returned LLRs are
    final only with ``full_horizon``; otherwise the loop stops once every
    path has cascaded.
    """
    _check(q, qhat, mu0)
    lam, lamhat = log_odds(q), log_odds(qhat)
    paths = np.arange(path_start, path_start + n, dtype=np.uint64)
    L_R = np.full(n, log_odds(mu0))
    L_N = L_R.copy()
    tau_R = np.zeros(n, dtype=np.int64)
    tau_N = np.zeros(n, dtype=np.int64)
    for t in range(1, horizon + 1):
        sd_R = np.abs(L_R) <= lam + epsilon
        sd_N = np.abs(L_N) <= lamhat + epsilon
        tau_R[(tau_R == 0) & ~sd_R] = t
        tau_N[(tau_N == 0) & ~sd_N] = t
        if not full_horizon and (tau_R > 0).all() and (tau_N > 0).all():
            break
        u = block_uniforms_array(seed, DOMAIN_BENCHMARK, paths, t)[:, SLOT_SIGNAL]
        s = np.where(u < q, theta, 1 - theta)
        step = 2 * s - 1
        # pre-cascade actions equal signals; post-cascade rational beliefs are frozen
        L_R = np.where(sd_R, L_R + lam * step, L_R)
        a_N = np.where(sd_N, s, (L_N > 0).astype(int))
        L_N = L_N + lamhat * (2 * a_N - 1)
    return {"tau_R": tau_R, "tau_N": tau_N, "L_R": L_R, "L_N": L_N}


@dataclass(frozen=True)
class FosdReport:
    support: np.ndarray
    cdf_N: np.ndarray
    cdf_R: np.ndarray
    max_violation: float
    tolerance: float
    n_used: int
    n_excluded: int
    paired: bool
    pathwise_violations: int

    @property
    def dominates(self) -> bool:
        return self.max_violation <= self.tolerance


def _as_times(x) -> np.ndarray:
    return np.array([0 if v is None else int(v) for v in x], dtype=np.int64)


def fosd_report(samples_N, samples_R, tolerance: float = 0.01, paired: bool = True) -> FosdReport:
    """Check that tau_N is stochastically smaller: ``F_N(t) >= F_R(t)`` for all t.

    Censored entries (None or 0) are dropped; with ``paired`` the pair is
    dropped when either side is censored so both CDFs use the same paths.
    """
    N, R = _as_times(samples_N), _as_times(samples_R)
    if paired:
        if len(N) != len(R):
            raise ModelError("paired samples must have equal length")
        keep = (N > 0) & (R > 0)
        excluded = int((~keep).sum())
        N, R = N[keep], R[keep]
        pathwise = int((N > R).sum())
    else:
        excluded = int((N == 0).sum() + (R == 0).sum())
        N, R = N[N > 0], R[R > 0]
        pathwise = -1
    if len(N) == 0 or len(R) == 0:
        raise ModelError("no uncensored samples to compare")
    support = np.arange(1, max(N.max(), R.max()) + 1)
    cdf_N = np.searchsorted(np.sort(N), support, side="right") / len(N)
    cdf_R = np.searchsorted(np.sort(R), support, side="right") / len(R)
    viol = float(max(0.0, (cdf_R - cdf_N).max()))
    return FosdReport(support, cdf_N, cdf_R, viol, tolerance, int(len(N)), excluded, paired, pathwise)
