"""Education-cost distributions: uniform, exponential and logistic ("logit")."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ModelError, posterior_from_llr

# upper quantile used as the support cap of unbounded families
CAP_QUANTILE = 1.0 - 1e-9


def _softplus(z: float) -> float:
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


class CostModel:
    """Common interface; subclasses supply the family-specific formulas."""

    family: str = ""
    code: int = -1

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def pdf(self, x: float) -> float:
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        raise NotImplementedError

    def truncated_first_moment(self, x: float) -> float:
        """``H(x) = integral_0^x u f(u) du``."""
        raise NotImplementedError

    def sample(self, u: float) -> float:
        """Inverse-transform draw from a uniform variate ``u`` in (0, 1)."""
        return self.quantile(u)

    def draw(self, rng) -> float:
        return self.sample(rng.random())

    @property
    def fbar_effective(self) -> float:
        return self.quantile(CAP_QUANTILE)

    def education_probability(self, cutoff: float) -> float:
        """P(cost < cutoff) for the nonnegative realized cost."""
        if cutoff <= 0.0:
            return 0.0
        return self.cdf(cutoff)

    def params(self) -> tuple[float, float]:
        raise NotImplementedError

    def as_dict(self) -> dict:
        raise NotImplementedError

    def _check_p(self, p: float) -> None:
        if not 0.0 <= p <= 1.0:
            raise ModelError(f"quantile needs p in [0, 1], got {p!r}")


@dataclass(frozen=True)
class UniformCost(CostModel):
    fbar: float = 1.0

    family = "uniform"
    code = 0

    def __post_init__(self) -> None:
        if not self.fbar > 0.0:
            raise ModelError(f"uniform fbar must be positive, got {self.fbar!r}")

    def cdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        if x >= self.fbar:
            return 1.0
        return x / self.fbar

    def pdf(self, x: float) -> float:
        return 1.0 / self.fbar if 0.0 <= x <= self.fbar else 0.0

    def quantile(self, p: float) -> float:
        self._check_p(p)
        return p * self.fbar

    def truncated_first_moment(self, x: float) -> float:
        if x < 0.0:
            raise ModelError(f"H needs x >= 0, got {x!r}")
        x = min(x, self.fbar)
        return x * x / (2.0 * self.fbar)

    @property
    def fbar_effective(self) -> float:
        return self.fbar

    def params(self) -> tuple[float, float]:
        return (self.fbar, 0.0)

    def as_dict(self) -> dict:
        return {"family": self.family, "fbar": self.fbar}


@dataclass(frozen=True)
class ExponentialCost(CostModel):
    rate: float = 1.0

    family = "exponential"
    code = 1

    def __post_init__(self) -> None:
        if not self.rate > 0.0:
            raise ModelError(f"exponential rate must be positive, got {self.rate!r}")

    def cdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return -math.expm1(-self.rate * x)

    def pdf(self, x: float) -> float:
        return self.rate * math.exp(-self.rate * x) if x >= 0.0 else 0.0

    def quantile(self, p: float) -> float:
        self._check_p(p)
        if p == 1.0:
            raise ModelError("exponential quantile(1) is unbounded")
        return -math.log1p(-p) / self.rate

    def truncated_first_moment(self, x: float) -> float:
        if x < 0.0:
            raise ModelError(f"H needs x >= 0, got {x!r}")
        if math.isinf(x):
            return 1.0 / self.rate
        y = self.rate * x
        return (-math.expm1(-y) - y * math.exp(-y)) / self.rate

    def params(self) -> tuple[float, float]:
        return (self.rate, 0.0)

    def as_dict(self) -> dict:
        return {"family": self.family, "rate": self.rate}


@dataclass(frozen=True)
class LogitCost(CostModel):
    """Logistic costs on the real line; realized draws are floored at zero."""

    loc: float = 0.0
    scale: float = 1.0

    family = "logit"
    code = 2

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ModelError(f"logit scale must be positive, got {self.scale!r}")

    def cdf(self, x: float) -> float:
        return posterior_from_llr((x - self.loc) / self.scale)

    def pdf(self, x: float) -> float:
        F = self.cdf(x)
        return F * (1.0 - F) / self.scale

    def quantile(self, p: float) -> float:
        self._check_p(p)
        if p == 0.0 or p == 1.0:
            raise ModelError("logit quantile is unbounded at p in {0, 1}")
        return self.loc + self.scale * math.log(p / (1.0 - p))

    def sample(self, u: float) -> float:
        return max(0.0, self.quantile(u))

    def truncated_first_moment(self, x: float) -> float:
        # integrate u f(u) by parts: x F(x) - integral_0^x F(u) du
        if x < 0.0:
            raise ModelError(f"H needs x >= 0, got {x!r}")
        s, m = self.scale, self.loc
        return x * self.cdf(x) - s * (_softplus((x - m) / s) - _softplus(-m / s))

    def params(self) -> tuple[float, float]:
        return (self.loc, self.scale)

    def as_dict(self) -> dict:
        return {"family": self.family, "loc": self.loc, "scale": self.scale}


def cost_model_from_dict(d: dict) -> CostModel:
    d = dict(d)
    family = str(d.pop("family", "uniform")).lower()
    if family == "uniform":
        model = UniformCost(float(d.pop("fbar", 1.0)))
    elif family == "exponential":
        model = ExponentialCost(float(d.pop("rate", 1.0)))
    elif family == "logit":
        model = LogitCost(float(d.pop("loc", 0.0)), float(d.pop("scale", 1.0)))
    else:
        raise ModelError(f"unknown cost family {family!r}")
    if d:
        raise ModelError(f"unknown cost key(s) for {family}: {', '.join(sorted(d))}")
    return model
