import itertools

import numpy as np
import pytest

from cascadelab.benchmarks import (
    benchmark_stopping_batch,
    fosd_report,
    simulate_benchmark_path,
    stopping_times,
)
from cascadelab.core import ModelError, log_odds
from cascadelab.rng import DOMAIN_BENCHMARK, PathStream


def test_rational_frozen_and_naive_keeps_moving():
    bp = simulate_benchmark_path(1, 0.7, 0.8, 0.5, 8, signals=[1, 1, 0, 0, 0, 0, 0, 0])
    assert bp.tau_R == 3 and bp.tau_N == 3
    assert len(set(bp.L_R[2:])) == 1
    lamhat = log_odds(0.8)
    assert all(abs(abs(b - a) - lamhat) < 1e-12 for a, b in zip(bp.L_N, bp.L_N[1:]))
    # herd keeps choosing 1 against contrary signals
    assert bp.actions_R[2:] == (1,) * 6 and bp.actions_N[2:] == (1,) * 6


def test_alternating_signals_never_cascade():
    bp = simulate_benchmark_path(1, 0.7, 0.8, 0.5, 10, signals=[1, 0] * 5)
    assert bp.tau_R is None and bp.tau_N is None
    assert bp.S[-1] == 0


def test_rng_signals_use_period_blocks():
    s = PathStream(4, 2, DOMAIN_BENCHMARK)
    bp = simulate_benchmark_path(0, 0.7, 0.8, 0.5, 20, rng=s)
    expect = tuple(0 if s.block(t)[1] < 0.7 else 1 for t in range(1, 21))
    assert bp.signals == expect


def test_stopping_times_match_simulation():
    lam, lamhat = log_odds(0.7), log_odds(0.8)
    for sig in itertools.product((0, 1), repeat=7):
        for mu0 in (0.5, 0.6, 0.35):
            bp = simulate_benchmark_path(1, 0.7, 0.8, mu0, 7, signals=sig)
            if bp.tau_R is not None:
                # walk is only informative up to the rational onset
                tR, _ = stopping_times(bp.S[: bp.tau_R], mu0, lam, lamhat)
                assert tR == bp.tau_R
            _, tN = stopping_times(bp.S, mu0, lam, lamhat)
            if bp.tau_N is not None and (bp.tau_R is None or bp.tau_N <= bp.tau_R):
                assert tN == bp.tau_N


def test_batch_matches_scalar():
    out = benchmark_stopping_batch(1, 0.7, 0.8, 0.6, 60, 50, seed=3, full_horizon=True)
    for i in range(50):
        bp = simulate_benchmark_path(1, 0.7, 0.8, 0.6, 60, rng=PathStream(3, i, DOMAIN_BENCHMARK))
        assert out["tau_R"][i] == (bp.tau_R or 0)
        assert out["tau_N"][i] == (bp.tau_N or 0)
        assert out["L_R"][i] == pytest.approx(bp.L_R[-1], abs=1e-9)
        assert out["L_N"][i] == pytest.approx(bp.L_N[-1], abs=1e-9)


def test_fosd_report():
    rep = fosd_report([1, 2, 3, None], [2, 3, 4, 5])
    assert rep.dominates and rep.n_used == 3 and rep.n_excluded == 1 and rep.pathwise_violations == 0
    rep2 = fosd_report([5, 5, 5], [1, 1, 1])
    assert rep2.max_violation == 1.0 and not rep2.dominates
    with pytest.raises(ModelError):
        fosd_report([None], [None])


def test_domains():
    with pytest.raises(ModelError):
        simulate_benchmark_path(1, 0.5, 0.8, 0.5, 3, signals=[1, 1, 1])
    with pytest.raises(ModelError):
        simulate_benchmark_path(1, 0.7, 0.8, 0.5, 3)
    with pytest.raises(ModelError):
        stopping_times([1], 0.5, 0.0, 1.0)
