import math

import pytest

from cascadelab.beliefs import IMPERFECT, History, replay_beliefs
from cascadelab.core import ModelError, ModelParams, ScenarioInvalid, log_odds
from cascadelab.costs import UniformCost
from cascadelab.dynamics import (
    SimConfig,
    break_time_experiment,
    detect_incorrect_cascade,
    forced_cascade_prefix,
    initial_llrs,
    simulate_path,
    summarize,
)
from cascadelab.rng import PathStream

# herd on 1 from a strong prior on 0: educated agents stay action dominant
# on the other side, so every educated agent breaks the cascade
VALID_BREAK = dict(
    params=ModelParams(mu0=1 / (1 + math.exp(5.0)), q0=0.55, q1=0.9, qhat0=0.95, qhat1=0.96),
    cost_model=UniformCost(1.0),
    theta=0,
    initial_history=History.from_pairs([(1, 0)] * 3),
    horizon=100,
)


def test_config_validation():
    with pytest.raises(ModelError):
        SimConfig(horizon=0)
    with pytest.raises(ModelError):
        SimConfig(theta=2)
    with pytest.raises(ModelError):
        SimConfig(mode="imperfect", initial_history=History())
    assert SimConfig().initial_history == History()


def test_path_is_deterministic_and_path_local():
    cfg = SimConfig(horizon=40, seed=11)
    a = simulate_path(cfg, PathStream(11, 3))
    b = simulate_path(SimConfig(horizon=40, seed=11, n_reps=7), PathStream(11, 3))
    assert a.actions == b.actions and a.costs == b.costs and a.W == b.W


def test_path_beliefs_match_replay():
    cfg = SimConfig(horizon=25, seed=1, mode="imperfect", params=ModelParams(rho=0.8))
    res = simulate_path(cfg, PathStream(1, 0))
    track = replay_beliefs(res.history, cfg.params, cfg.cost_model)
    assert track.L_U == res.beliefs.L_U
    assert track.L_E == res.beliefs.L_E
    assert res.history.mode == IMPERFECT
    assert all(y in (0, 1) for y in res.tags)


def test_education_disabled():
    res = simulate_path(SimConfig(horizon=30, education_enabled=False), PathStream(0, 0))
    assert res.n_edu == 0


def test_welfare_accounting():
    cfg = SimConfig(horizon=15, seed=4)
    res = simulate_path(cfg, PathStream(4, 2))
    p = cfg.params
    expect = sum(p.beta ** i * w for i, w in enumerate(res.welfare))
    assert res.W == pytest.approx(expect)
    for w, a, e, c in zip(res.welfare, res.actions, res.educations, res.costs):
        assert w == pytest.approx((a == res.theta) - p.eta * c * e)


def test_educated_follow_cutoff():
    res = simulate_path(SimConfig(horizon=40, seed=9), PathStream(9, 1))
    for c, dv, s, e in zip(res.costs, res.delta_v, res.subsidies, res.educations):
        assert e == int(c < dv + s)


def test_forced_prefix_and_detection(params, uniform):
    h = forced_cascade_prefix(3, 1, params)
    assert [(r.a, r.e) for r in h] == [(1, 0)] * 3
    with pytest.raises(ModelError):
        forced_cascade_prefix(0, 1, params)
    p = VALID_BREAK["params"]
    track = replay_beliefs(VALID_BREAK["initial_history"], p, uniform)
    assert detect_incorrect_cascade(track, 4)
    assert not detect_incorrect_cascade(track, 1)


def test_initial_llrs_follow_prefix():
    cfg = SimConfig(**VALID_BREAK)
    L_U, L_E = initial_llrs(cfg)
    p = cfg.params
    assert L_U == pytest.approx(-5.0 + 3 * p.lamhat0)
    assert L_E == pytest.approx(-5.0 + 2 * p.lam0)


def test_strict_break_experiment_on_valid_scenario():
    cfg = SimConfig(n_reps=4000, seed=3, **VALID_BREAK)
    rep = break_time_experiment(cfg, delta=0.5, p_star=1.0, strict=True)
    assert rep.n_violated == 0 and rep.n_censored == 0
    assert rep.bound == pytest.approx(2.0)
    assert rep.mean_break_time <= rep.bound + 3 * rep.mean_break_time_se
    assert rep.rate >= rep.floor - 3 * rep.rate_se
    assert rep.max_survival_excess <= 0.0


def test_strict_mode_raises_on_violation():
    cfg = SimConfig(n_reps=500, seed=3, **VALID_BREAK)
    with pytest.raises(ScenarioInvalid) as err:
        break_time_experiment(cfg, delta=0.999, p_star=1.0, strict=True)
    assert err.value.count > 0 and err.value.period >= 1
    rep = break_time_experiment(cfg, delta=0.999, p_star=1.0, strict=False)
    assert rep.n_violated == err.value.count


def test_break_experiment_needs_incorrect_cascade():
    cfg = SimConfig(n_reps=10)
    with pytest.raises(ScenarioInvalid):
        break_time_experiment(cfg, 0.2, 0.9)
    with pytest.raises(ModelError):
        break_time_experiment(SimConfig(n_reps=10, **VALID_BREAK), 0.0, 0.9)


def test_break_stops_path():
    cfg = SimConfig(**VALID_BREAK)
    from cascadelab.dynamics import Hypotheses

    res = simulate_path(cfg, PathStream(0, 0), Hypotheses(0.5, 1.0), stop_at_break=True)
    assert res.onset == 1 and res.cascade_action == 1
    assert res.break_k == len(res.actions)
    assert res.actions[-1] == 0 and res.educations[-1] == 1


def test_summarize():
    cfg = SimConfig(horizon=5)
    out = summarize([simulate_path(cfg, PathStream(0, i)) for i in range(20)])
    assert out["n"] == 20 and 0.0 <= out["edu_rate_first"] <= 1.0
