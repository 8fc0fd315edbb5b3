import math

import pytest
from scipy import integrate

from cascadelab.costs import (
    CAP_QUANTILE,
    ExponentialCost,
    LogitCost,
    UniformCost,
    cost_model_from_dict,
)
from cascadelab.core import ModelError

MODELS = [UniformCost(1.0), UniformCost(2.5), ExponentialCost(1.0), ExponentialCost(3.0),
          LogitCost(0.0, 0.1), LogitCost(0.4, 0.3)]


@pytest.mark.parametrize("cm", MODELS, ids=repr)
def test_quantile_inverts_cdf(cm):
    for p in (0.05, 0.3, 0.5, 0.9, 0.999):
        assert cm.cdf(cm.quantile(p)) == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("cm", MODELS, ids=repr)
def test_truncated_moment_matches_quadrature(cm):
    for x in (0.05, 0.3, 0.8, 2.0):
        quad, _ = integrate.quad(lambda u: u * cm.pdf(u), 0.0, x, epsabs=1e-13, epsrel=1e-13,
                                 points=[min(x, getattr(cm, "fbar", x))])
        assert cm.truncated_first_moment(x) == pytest.approx(quad, abs=1e-10)


@pytest.mark.parametrize("cm", MODELS, ids=repr)
def test_pdf_integrates_to_cdf_gap(cm):
    a, b = 0.1, 0.6
    mass, _ = integrate.quad(cm.pdf, a, b)
    assert mass == pytest.approx(cm.cdf(b) - cm.cdf(a), abs=1e-10)


def test_uniform_closed_forms():
    cm = UniformCost(2.0)
    assert cm.cdf(-1) == 0.0 and cm.cdf(3) == 1.0
    assert cm.truncated_first_moment(1.0) == 0.25
    assert cm.truncated_first_moment(5.0) == 1.0
    assert cm.fbar_effective == 2.0


def test_exponential_mean_limit():
    cm = ExponentialCost(2.0)
    assert cm.truncated_first_moment(math.inf) == 0.5
    assert cm.truncated_first_moment(60.0) == pytest.approx(0.5)


def test_effective_cap_of_unbounded_families():
    for cm in (ExponentialCost(1.0), LogitCost(0.0, 0.1)):
        assert cm.cdf(cm.fbar_effective) == pytest.approx(CAP_QUANTILE, abs=1e-12)


def test_logit_draws_floored_at_zero():
    cm = LogitCost(0.0, 0.1)
    assert cm.sample(0.2) == 0.0
    assert cm.sample(0.8) > 0.0


def test_education_probability_zero_at_nonpositive_cutoff():
    cm = LogitCost(0.0, 0.1)
    assert cm.education_probability(0.0) == 0.0
    assert cm.education_probability(-1.0) == 0.0
    assert cm.education_probability(0.1) == cm.cdf(0.1)


def test_invalid_parameters():
    with pytest.raises(ModelError):
        UniformCost(0.0)
    with pytest.raises(ModelError):
        ExponentialCost(-1.0)
    with pytest.raises(ModelError):
        LogitCost(0.0, 0.0)
    with pytest.raises(ModelError):
        UniformCost().quantile(1.5)
    with pytest.raises(ModelError):
        UniformCost().truncated_first_moment(-0.1)


def test_from_dict():
    assert cost_model_from_dict({"family": "exponential", "rate": 2}) == ExponentialCost(2.0)
    assert cost_model_from_dict({}) == UniformCost(1.0)
    with pytest.raises(ModelError):
        cost_model_from_dict({"family": "uniform", "rate": 1})
    with pytest.raises(ModelError):
        cost_model_from_dict({"family": "gamma"})
