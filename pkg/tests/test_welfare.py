import math

import pytest

from cascadelab.core import ModelError, ModelParams
from cascadelab.costs import ExponentialCost, LogitCost, UniformCost
from cascadelab.decision import value_of_education
from cascadelab.dynamics import SimConfig
from cascadelab.welfare import (
    FlatSubsidy,
    MyopicSubsidy,
    NoSubsidy,
    TargetBreakSubsidy,
    delta_lower,
    discounted_welfare_mc,
    dynamic_welfare_bound,
    myopic_subsidy,
    static_welfare_gain,
    subsidy_rule_from_dict,
    target_break_subsidy,
    welfare_comparison,
)


def test_static_gain_uniform():
    cm = UniformCost(2.0)
    assert static_welfare_gain(0.4, 0.3, 0.5, cm) == pytest.approx(0.2 * 0.3 - 0.5 * 0.16 / 4)
    # negative cutoffs mean nobody educates
    assert static_welfare_gain(-0.1, 0.3, 0.5, cm) == 0.0


def test_myopic_subsidy_clamps():
    assert myopic_subsidy(0.3, 0.1, 1.0, 1.0) == pytest.approx(0.2)
    assert myopic_subsidy(0.05, 0.1, 1.0, 1.0) == 0.0
    assert myopic_subsidy(0.3, 0.1, 0.1, 1.0) == pytest.approx(0.9)
    with pytest.raises(ModelError):
        myopic_subsidy(0.3, 0.1, 0.0, 1.0)


def test_target_break_subsidy():
    cm = UniformCost(1.0)
    assert target_break_subsidy(0.45, 0.9, 0.2, cm) == pytest.approx(0.3)
    assert target_break_subsidy(0.1, 0.9, 0.2, cm) == 0.0
    assert target_break_subsidy(0.9, 0.9, 0.2, cm) == pytest.approx(0.8)
    with pytest.raises(ModelError):
        target_break_subsidy(0.95, 0.9, 0.2, cm)


def test_delta_lower(params):
    # educated beliefs signal dominant: post-break accuracy is q1
    assert delta_lower(-0.3, params) == pytest.approx(params.q1 - (1 - 0.574442516811659), abs=1e-12)
    big = -3.0
    mu = 1 / (1 + math.exp(-3.0))
    assert delta_lower(big, params) == pytest.approx(mu - (1 - mu))


def test_dynamic_bound():
    b = dynamic_welfare_bound(0.2, 0.9, 0.5, 1.0, 0.1)
    d = 1 - 0.9 * 0.8
    assert b == pytest.approx(0.2 / d * 0.5 - 0.1 / d)
    with pytest.raises(ModelError):
        dynamic_welfare_bound(0.0, 0.9, 0.5, 1.0, 0.1)
    with pytest.raises(ModelError):
        dynamic_welfare_bound(0.2, 1.0, 0.5, 1.0, 0.1)


def test_rule_amounts(params):
    cm = UniformCost(1.0)
    vb = value_of_education(0.0, 0.0, params)
    assert NoSubsidy().amount(vb, 0.0, 0.0, params, cm) == 0.0
    assert FlatSubsidy(0.1).amount(vb, 0.0, 0.0, params, cm) == 0.1
    p = params.with_(eta=0.5)
    assert MyopicSubsidy().amount(vb, 0.0, 0.0, p, cm) == pytest.approx(0.2)
    # target rule is off outside incorrect cascades
    assert TargetBreakSubsidy(0.5, 0.8).amount(vb, 0.0, 0.0, params, cm) == 0.0
    vb2 = value_of_education(3.0, -0.5, params)
    assert TargetBreakSubsidy(0.4, 0.8).amount(vb2, 3.0, -0.5, params, cm) == pytest.approx(0.5 - vb2.delta_v)


def test_rule_validation(params):
    with pytest.raises(ModelError):
        FlatSubsidy(-0.1)
    with pytest.raises(ModelError):
        FlatSubsidy(2.0).validate(params, UniformCost(1.0))
    with pytest.raises(ModelError):
        MyopicSubsidy().validate(params.with_(eta=0.0), UniformCost(1.0))
    with pytest.raises(ModelError):
        TargetBreakSubsidy(0.9, 0.5)


def test_rule_from_dict():
    assert subsidy_rule_from_dict({"kind": "flat", "s": 0.1}) == FlatSubsidy(0.1)
    assert subsidy_rule_from_dict({"kind": "myopic"}) == MyopicSubsidy()
    assert subsidy_rule_from_dict({"kind": "target_break", "pi_bar": 0.3, "p_star": 0.9}) == TargetBreakSubsidy(0.3, 0.9)
    for rule in (FlatSubsidy(0.2), MyopicSubsidy(0.5), TargetBreakSubsidy(0.2, 0.4)):
        assert subsidy_rule_from_dict(rule.as_dict()) == rule
    with pytest.raises(ModelError):
        subsidy_rule_from_dict({"kind": "flat", "eta": 1})
    with pytest.raises(ModelError):
        subsidy_rule_from_dict({"kind": "lump"})


def test_monte_carlo_welfare_is_finite_and_matched():
    cfg = SimConfig(cost_model=UniformCost(1.0), horizon=30, n_reps=400, seed=5)
    base = discounted_welfare_mc(cfg)
    assert base.n == 400 and math.isfinite(base.W) and base.W_se > 0
    cmp_ = welfare_comparison(cfg, FlatSubsidy(0.0))
    assert cmp_.gain == 0.0 and cmp_.base == cmp_.policy == base


def test_flat_subsidy_raises_education_and_outlay():
    cfg = SimConfig(cost_model=UniformCost(1.0), horizon=20, n_reps=300, seed=2)
    a = discounted_welfare_mc(cfg)
    b = discounted_welfare_mc(cfg, FlatSubsidy(0.2))
    assert a.outlay_per_period == 0.0
    assert b.outlay_per_period > 0.0


@pytest.mark.parametrize("cm", [ExponentialCost(2.0), LogitCost(0.0, 0.1)], ids=repr)
def test_static_gain_other_families(cm):
    x = 0.3
    g = static_welfare_gain(x, 0.2, 0.5, cm)
    assert g == pytest.approx(cm.cdf(x) * 0.2 - 0.5 * cm.truncated_first_moment(x))
