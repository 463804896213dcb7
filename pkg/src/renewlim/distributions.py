"""Parametric zoo of positive inter-arrival laws and the skewed stable limit family.

The zoo is closed by design: each law carries exact analytic mean, variance,
tail and truncated second moment, so every Monte Carlo estimate in the
toolkit can be checked against a closed form.  Heavy-tail members cover the
infinite-variance regimes (regularly varying tail of index in (1,2), and the
boundary law with tail x**-2 whose truncated second moment is slowly
varying).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpecParseError

__all__ = [
    "Interarrival",
    "Exponential",
    "Deterministic",
    "Uniform",
    "Pareto",
    "ParetoBoundary",
    "StableParams",
    "parse_interarrival",
    "format_interarrival",
]


class Interarrival(ABC):
    """A positive random variable with exact moment and tail functionals."""

    @abstractmethod
    def mean(self) -> float:
        """Exact E[X] (finite for every zoo member)."""

    @abstractmethod
    def variance(self) -> float:
        """Exact Var X, with math.inf marking a divergent second moment."""

    @abstractmethod
    def tail(self, x: float) -> float:
        """Exact P{X > x}."""

    @abstractmethod
    def truncated_second_moment(self, x: float) -> float:
        """Exact integral of y**2 dF(y) over [0, x]."""

    @abstractmethod
    def truncated_mean(self, k: float) -> float:
        """Exact E[min(X, k)], used for light-tailed sampling checks."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw from the law; scalar for size=None, else an ndarray."""

    @abstractmethod
    def spec_string(self) -> str:
        """Compact spec-grammar form, e.g. ``exp:1.0``."""

    def second_moment(self) -> float:
        v = self.variance()
        return math.inf if math.isinf(v) else v + self.mean() ** 2

    def lattice_span(self) -> float | None:
        """Span d for lattice laws, None for non-lattice laws."""
        return None

    def moment_regime(self) -> str | None:
        """Which convergence case the law belongs to.

        'a1': finite positive variance; 'a2': infinite variance with slowly
        varying truncated second moment; 'a3': regularly varying tail of
        index in (1,2).  None for the degenerate (zero-variance) law.
        """
        v = self.variance()
        if math.isinf(v):
            raise NotImplementedError  # overridden by the heavy-tail members
        return "a1" if v > 0.0 else None


@dataclass(frozen=True)
class Exponential(Interarrival):
    """Exponential law with the given rate: mean 1/rate."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise DomainError(f"Exponential rate must be positive, got {self.rate}")

    def mean(self):
        return 1.0 / self.rate

    def variance(self):
        return 1.0 / self.rate**2

    def tail(self, x):
        return math.exp(-self.rate * x) if x > 0.0 else 1.0

    def truncated_second_moment(self, x):
        if x <= 0.0:
            return 0.0
        lam = self.rate
        return 2.0 / lam**2 - math.exp(-lam * x) * (x * x + 2.0 * x / lam + 2.0 / lam**2)

    def truncated_mean(self, k):
        if k <= 0.0:
            return 0.0
        return -math.expm1(-self.rate * k) / self.rate

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def spec_string(self):
        return f"exp:{self.rate!r}"


@dataclass(frozen=True)
class Deterministic(Interarrival):
    """Point mass at d > 0; the lattice member of the zoo (span d)."""

    d: float

    def __post_init__(self):
        if not self.d > 0.0:
            raise DomainError(f"Deterministic value must be positive, got {self.d}")

    def mean(self):
        return self.d

    def variance(self):
        return 0.0

    def tail(self, x):
        return 1.0 if x < self.d else 0.0

    def truncated_second_moment(self, x):
        return self.d**2 if x >= self.d else 0.0

    def truncated_mean(self, k):
        return min(self.d, k) if k > 0.0 else 0.0

    def sample(self, rng, size=None):
        if size is None:
            return self.d
        return np.full(size, self.d)

    def lattice_span(self):
        return self.d

    def spec_string(self):
        return f"det:{self.d!r}"


@dataclass(frozen=True)
class Uniform(Interarrival):
    """Uniform law on (a, b) with 0 <= a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b):
            raise DomainError(f"Uniform requires 0 <= a < b, got a={self.a}, b={self.b}")

    def mean(self):
        return 0.5 * (self.a + self.b)

    def variance(self):
        return (self.b - self.a) ** 2 / 12.0

    def tail(self, x):
        if x <= self.a:
            return 1.0
        if x >= self.b:
            return 0.0
        return (self.b - x) / (self.b - self.a)

    def truncated_second_moment(self, x):
        if x <= self.a:
            return 0.0
        top = min(x, self.b)
        return (top**3 - self.a**3) / (3.0 * (self.b - self.a))

    def truncated_mean(self, k):
        if k <= self.a:
            return max(k, 0.0)
        if k >= self.b:
            return self.mean()
        w = self.b - self.a
        return (k * k - self.a**2) / (2.0 * w) + k * (self.b - k) / w

    def sample(self, rng, size=None):
        return self.a + (self.b - self.a) * rng.random(size)

    def spec_string(self):
        return f"unif:{self.a!r},{self.b!r}"


@dataclass(frozen=True)
class Pareto(Interarrival):
    """Pareto law on [x_min, inf) with tail (x_min/x)**alpha, alpha in (1, 2].

    The mean is finite, the variance is infinite throughout the allowed
    alpha range.  alpha = 2 coincides with ParetoBoundary.
    """

    alpha: float
    x_min: float

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise DomainError(f"Pareto alpha must lie in (1, 2], got {self.alpha}")
        if not self.x_min > 0.0:
            raise DomainError(f"Pareto x_min must be positive, got {self.x_min}")

    def mean(self):
        return self.alpha * self.x_min / (self.alpha - 1.0)

    def variance(self):
        return math.inf

    def tail(self, x):
        if x <= self.x_min:
            return 1.0
        return (self.x_min / x) ** self.alpha

    def truncated_second_moment(self, x):
        if x <= self.x_min:
            return 0.0
        a, m = self.alpha, self.x_min
        if a == 2.0:
            return 2.0 * m * m * math.log(x / m)
        return a * m**a * (x ** (2.0 - a) - m ** (2.0 - a)) / (2.0 - a)

    def truncated_mean(self, k):
        if k <= self.x_min:
            return max(k, 0.0)
        a, m = self.alpha, self.x_min
        return (a * m - m**a * k ** (1.0 - a)) / (a - 1.0)

    def sample(self, rng, size=None):
        # inversion; 1-U lies in (0, 1] so the power never overflows
        u = rng.random(size)
        return self.x_min * (1.0 - u) ** (-1.0 / self.alpha)

    def moment_regime(self):
        return "a2" if self.alpha == 2.0 else "a3"

    def spec_string(self):
        return f"pareto:{self.alpha!r},{self.x_min!r}"


@dataclass(frozen=True)
class ParetoBoundary(Interarrival):
    """Density 2*x_min**2 * y**-3 on [x_min, inf): tail exactly (x_min/x)**2.

    The boundary law: infinite variance, but the truncated second moment
    2*x_min**2*log(x/x_min) is slowly varying.
    """

    x_min: float

    def __post_init__(self):
        if not self.x_min > 0.0:
            raise DomainError(f"ParetoBoundary x_min must be positive, got {self.x_min}")

    def mean(self):
        return 2.0 * self.x_min

    def variance(self):
        return math.inf

    def tail(self, x):
        if x <= self.x_min:
            return 1.0
        return (self.x_min / x) ** 2

    def truncated_second_moment(self, x):
        if x <= self.x_min:
            return 0.0
        return 2.0 * self.x_min**2 * math.log(x / self.x_min)

    def truncated_mean(self, k):
        if k <= self.x_min:
            return max(k, 0.0)
        return 2.0 * self.x_min - self.x_min**2 / k

    def sample(self, rng, size=None):
        u = rng.random(size)
        return self.x_min * (1.0 - u) ** -0.5

    def moment_regime(self):
        return "a2"

    def spec_string(self):
        return f"pareto2:{self.x_min!r}"


# ---------------------------------------------------------------------------
# Stable limit family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StableParams:
    """The stable law with characteristic function

        t -> exp(-B*|t|**alpha - i*C*|t|**alpha*sgn(t)),

    where B = Gamma(1-alpha)*cos(pi*alpha/2) > 0 and
    C = Gamma(1-alpha)*sin(pi*alpha/2) < 0 for alpha in (1, 2).

    In the standard one-parameter family
    exp(-gamma**alpha*|t|**alpha*(1 - i*beta*tan(pi*alpha/2)*sgn t))
    this is the totally left-skewed member: beta = -1, gamma = B**(1/alpha).
    The match is re-validated numerically at construction rather than
    trusted, because stable parametrization conventions are a classic
    source of sign bugs.
    """

    alpha: float
    B: float
    C: float
    scale: float
    skew: int

    @classmethod
    def from_alpha(cls, alpha: float) -> "StableParams":
        if not (1.0 < alpha < 2.0):
            raise DomainError(f"alpha must lie in the open interval (1, 2), got {alpha}")
        g = math.gamma(1.0 - alpha)  # negative on (1, 2), never at a pole
        half = math.pi * alpha / 2.0
        b = g * math.cos(half)
        c = g * math.sin(half)
        if not (b > 0.0 and c < 0.0):
            raise DomainError(f"sign analysis failed at alpha={alpha}: B={b}, C={c}")
        tan_half = math.tan(half)
        beta = -(c / b) / tan_half
        skew = 1 if beta > 0 else -1
        params = cls(alpha=alpha, B=b, C=c, scale=b ** (1.0 / alpha), skew=skew)
        params._validate_parametrization()
        return params

    def _validate_parametrization(self, tol: float = 1e-12) -> None:
        tan_half = math.tan(math.pi * self.alpha / 2.0)
        ga = self.scale**self.alpha
        for t in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0):
            direct = self.cf(t)
            std = np.exp(
                -ga * abs(t) ** self.alpha
                * (1.0 - 1j * self.skew * tan_half * math.copysign(1.0, t))
            )
            if abs(direct - std) > tol:
                raise DomainError(
                    f"stable parametrization mismatch at t={t}: |diff|={abs(direct - std):.3e}"
                )

    def cf(self, t):
        """Characteristic function; accepts scalars or arrays."""
        t = np.asarray(t, dtype=float)
        mag = np.abs(t) ** self.alpha
        val = np.exp(-self.B * mag) * np.exp(-1j * self.C * mag * np.sign(t))
        return complex(val) if val.ndim == 0 else val

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Exact draws via the Chambers-Mallows-Stuck construction."""
        one = size is None
        n = 1 if one else int(size)
        v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=n)
        w = rng.exponential(1.0, size=n)
        x = _cms_standard(self.alpha, float(self.skew), v, w)
        out = self.scale * x
        return float(out[0]) if one else out


def _cms_standard(alpha: float, beta: float, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Chambers-Mallows-Stuck draw with cf
    exp(-|t|**alpha * (1 - i*beta*tan(pi*alpha/2)*sgn t)), alpha != 1.

    v must be uniform on (-pi/2, pi/2) and w standard exponential.
    """
    tan_half = math.tan(math.pi * alpha / 2.0)
    theta0 = math.atan(beta * tan_half) / alpha
    prefactor = (1.0 + (beta * tan_half) ** 2) ** (1.0 / (2.0 * alpha))
    avt = alpha * (v + theta0)
    w = np.maximum(w, np.finfo(float).tiny)  # w == 0.0 has probability ~2**-53
    core = np.sin(avt) / np.cos(v) ** (1.0 / alpha)
    tail = (np.cos(v - avt) / w) ** ((1.0 - alpha) / alpha)
    return prefactor * core * tail


# ---------------------------------------------------------------------------
# Spec-string grammar
# ---------------------------------------------------------------------------

_ARITY = {"exp": 1, "det": 1, "unif": 2, "pareto": 2, "pareto2": 1}


def parse_interarrival(text: str) -> Interarrival:
    """Parse ``exp:1.0``, ``det:2.0``, ``unif:0,1``, ``pareto:1.5,1.0``,
    ``pareto2:1.0``.  Unknown names and wrong arity are errors."""
    name, sep, argtext = text.strip().partition(":")
    name = name.strip().lower()
    if not sep or name not in _ARITY:
        raise SpecParseError(f"unknown distribution spec {text!r}")
    parts = [p.strip() for p in argtext.split(",")]
    if len(parts) != _ARITY[name] or not all(parts):
        raise SpecParseError(
            f"distribution {name!r} takes {_ARITY[name]} argument(s), got {argtext!r}"
        )
    try:
        args = [float(p) for p in parts]
    except ValueError:
        raise SpecParseError(f"non-numeric argument in distribution spec {text!r}") from None
    try:
        if name == "exp":
            return Exponential(args[0])
        if name == "det":
            return Deterministic(args[0])
        if name == "unif":
            return Uniform(args[0], args[1])
        if name == "pareto":
            return Pareto(args[0], args[1])
        return ParetoBoundary(args[0])
    except DomainError as exc:
        raise SpecParseError(f"invalid distribution spec {text!r}: {exc}") from None


def format_interarrival(spec: Interarrival) -> str:
    return spec.spec_string()
