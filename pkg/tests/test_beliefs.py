import math

import pytest

from cascadelab.beliefs import (
    IMPERFECT,
    PERFECT,
    History,
    PeriodRecord,
    check_mode,
    educated_increment,
    educated_increment_io,
    mixture_weight,
    read_history_csv,
    replay_beliefs,
    tag_posterior,
    uneducated_increment,
    uneducated_increment_io,
    write_history_csv,
)
from cascadelab.core import ModeError, ModelError, ModelParams


def test_modes():
    assert check_mode("IO") == IMPERFECT
    assert check_mode("PerfectObs") == PERFECT
    with pytest.raises(ModeError):
        check_mode("partial")


def test_record_validation():
    with pytest.raises(ModelError):
        PeriodRecord(2, 0)
    with pytest.raises(ModeError):
        History(((1, 0, 1),), PERFECT)
    with pytest.raises(ModeError):
        History(((1, 0),), IMPERFECT)


def test_uneducated_increment_uses_perceived_weights(params):
    assert uneducated_increment(PeriodRecord(1, 0), params) == params.lamhat0
    assert uneducated_increment(PeriodRecord(0, 1), params) == -params.lamhat1


def test_educated_increment_respects_regimes(params):
    assert educated_increment(0.0, 0.0, PeriodRecord(1, 1), params) == params.lam1
    assert educated_increment(0.0, 0.0, PeriodRecord(0, 0), params) == -params.lam0
    # uneducated agent j herding: its action carries nothing
    assert educated_increment(5.0, 0.0, PeriodRecord(1, 0), params) == 0.0
    # educated agent j herding
    assert educated_increment(0.0, 5.0, PeriodRecord(1, 1), params) == 0.0


def test_tag_posterior():
    assert tag_posterior(0.3, 1.0, 1) == 1.0
    assert tag_posterior(0.0, 1.0, 1) == 1.0
    assert tag_posterior(0.0, 0.8, 1) == 0.0
    assert tag_posterior(1.0, 0.8, 0) == 1.0
    assert tag_posterior(0.5, 0.8, 1) == pytest.approx(0.8)
    with pytest.raises(ModelError):
        tag_posterior(1.2, 0.8, 1)


def test_io_increments(params):
    p = params.with_(rho=0.9)
    w = tag_posterior(0.4, 0.9, 1)
    assert uneducated_increment_io(PeriodRecord(1, 0, 1), 0.4, p) == pytest.approx(mixture_weight(w, p))
    step = educated_increment_io(0.0, 0.0, PeriodRecord(1, 0, 1), 0.4, p)
    expect = math.log((w * p.q1 + (1 - w) * p.q0) / (w * (1 - p.q1) + (1 - w) * (1 - p.q0)))
    assert step == pytest.approx(expect)
    with pytest.raises(ModeError):
        uneducated_increment_io(PeriodRecord(1, 0), 0.4, p)


def test_io_increment_vanishes_when_all_herd(params):
    assert educated_increment_io(5.0, 5.0, PeriodRecord(1, 0, 0), 0.3, params.with_(rho=0.8)) == 0.0


def test_replay_track_lengths_and_values(params, uniform):
    h = History.from_pairs([(1, 0), (1, 1), (0, 0)])
    tr = replay_beliefs(h, params, uniform)
    assert len(tr) == 4
    assert tr.at(1).L_U == 0.0
    assert tr.L_U[1] == pytest.approx(params.lamhat0)
    assert tr.L_E[1] == pytest.approx(params.lam0)
    assert tr.at(1).delta_v == pytest.approx(params.q1 - params.q0)
    assert tr.at(1).p_edu == pytest.approx(params.q1 - params.q0)
    with pytest.raises(ModelError):
        tr.at(5)


def test_flipped_history_mirrors_beliefs(params, uniform):
    h = History.from_pairs([(1, 0), (0, 1), (1, 1), (1, 0)])
    a = replay_beliefs(h, params, uniform)
    b = replay_beliefs(h.flipped(), params, uniform)
    for x, y in zip(a.states, b.states):
        assert x.L_U == -y.L_U and x.L_E == -y.L_E
        assert x.delta_v == pytest.approx(y.delta_v, abs=1e-15)


def test_history_csv_round_trip(tmp_path):
    for h in (History.from_pairs([(1, 0), (0, 1)]), History.from_pairs([(1, 0, 1), (0, 1, 0)], IMPERFECT)):
        path = tmp_path / f"{h.mode}.csv"
        write_history_csv(h, path)
        assert read_history_csv(path) == h
