"""Subordinator paths, first-passage times, and the discrete-skeleton count.

Compound Poisson paths are simulated exactly (jump epochs and sizes), so
the coupling between the first-passage time T(s) and the integer-skeleton
count N*(s) = #{k in N_0 : S(k) <= s} can be checked path by path: it
satisfies N*(s) - T(s) in [0, 1] almost surely.  The gamma subordinator is
approximated on a fixed time grid, which biases T(s) upward by at most one
grid step; it therefore never participates in exact coupling checks.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import exp1

from .distributions import Interarrival, parse_interarrival
from .errors import CaseMismatchError, DomainError, ParameterMismatchError, SpecParseError
from .limits import LimitCase, limit_constant
from .montecarlo import MCEstimate, estimate_from_values, map_replications
from .renewal import ConvergenceRow, _case_denominator
from .scaling import SlowlyVarying

__all__ = [
    "Subordinator",
    "CompoundPoisson",
    "GammaSubordinator",
    "PassageObservation",
    "simulate_passage",
    "mc_passage_abs_deviation",
    "coupling_check",
    "passage_convergence_table",
    "parse_subordinator",
    "format_subordinator",
]

_MAX_JUMPS_PER_PATH = 10**9


class Subordinator(ABC):
    """An increasing Levy process with zero drift and no killing."""

    @abstractmethod
    def mean_rate(self) -> float:
        """m = E S(1), finite for every supported variant."""

    @abstractmethod
    def variance_rate(self) -> float:
        """b**2 = Var S(1) = integral of x**2 over the Levy measure."""

    @abstractmethod
    def levy_tail(self, x: float) -> float:
        """nu(x, inf): the rate of jumps larger than x."""

    @abstractmethod
    def spec_string(self) -> str: ...

    @abstractmethod
    def moment_regime(self) -> str:
        """'b1', 'b2' or 'b3', mirroring the inter-arrival classification."""


@dataclass(frozen=True)
class CompoundPoisson(Subordinator):
    """Poisson jump epochs with i.i.d. positive jump sizes."""

    rate: float
    jump: Interarrival

    def __post_init__(self):
        if not self.rate > 0.0:
            raise DomainError(f"compound Poisson rate must be positive, got {self.rate}")

    def mean_rate(self):
        return self.rate * self.jump.mean()

    def variance_rate(self):
        m2 = self.jump.second_moment()
        return math.inf if math.isinf(m2) else self.rate * m2

    def levy_tail(self, x):
        return self.rate * self.jump.tail(x)

    def moment_regime(self):
        regime = self.jump.moment_regime()
        if regime is None:
            return "b1"  # deterministic jumps: Var S(1) = rate * d**2 > 0
        return "b" + regime[1]

    def spec_string(self):
        return f"cp:rate={self.rate!r},jump={self.jump.spec_string()}"


@dataclass(frozen=True)
class GammaSubordinator(Subordinator):
    """Gamma process: S(t) ~ Gamma(shape*t, rate), simulated on a grid.

    First-passage times are read off the grid, so they carry a recorded
    upward bias of at most grid_step.
    """

    shape: float
    rate: float
    grid_step: float

    def __post_init__(self):
        if not self.shape > 0.0:
            raise DomainError(f"gamma shape must be positive, got {self.shape}")
        if not self.rate > 0.0:
            raise DomainError(f"gamma rate must be positive, got {self.rate}")
        if not 0.0 < self.grid_step <= 1.0:
            raise DomainError(f"grid_step must lie in (0, 1], got {self.grid_step}")

    def mean_rate(self):
        return self.shape / self.rate

    def variance_rate(self):
        return self.shape / self.rate**2

    def levy_tail(self, x):
        # Levy density shape * x**-1 * exp(-rate*x) integrates to shape*E1(rate*x)
        if x <= 0.0:
            return math.inf
        return self.shape * float(exp1(self.rate * x))

    def moment_regime(self):
        return "b1"

    def spec_string(self):
        return f"gamma:shape={self.shape!r},rate={self.rate!r},grid={self.grid_step!r}"


@dataclass(frozen=True)
class PassageObservation:
    """First passage of level s together with the integer-skeleton count.

    For exact (compound Poisson) paths, n_star - t_passage lies in [0, 1]
    and S jumps above s exactly at t_passage.
    """

    t_passage: float
    n_star: int
    s_level: float


def _cross_index(chunk: np.ndarray, carried: float, s: float) -> int | None:
    """Index of the first element of the chunk whose running sum exceeds s,
    or None when the whole chunk stays at or below s."""
    sums = carried + np.cumsum(chunk)
    idx = int(np.searchsorted(sums, s, side="right"))
    return idx if idx < len(chunk) else None


def _simulate_cp_path(
    spec: CompoundPoisson, s: float, rng: np.random.Generator, want_n_star: bool
) -> tuple[float, int]:
    """Exact compound Poisson first passage: (T(s), N*(s)).

    Jump sizes are drawn first (chunked) to locate the crossing jump, then
    exactly that many inter-jump gaps; both use the same per-replication
    stream in a fixed order.  N*(s) is evaluated honestly from the path:
    S(k) is reconstructed at every integer k rather than inferred from T.
    """
    mean_jump = spec.jump.mean()
    chunk = min(int(s / mean_jump * 1.02 + 6.0 * math.sqrt(s / mean_jump + 1.0)) + 16, 2**21)
    chunks: list[np.ndarray] = []
    carried = 0.0
    drawn = 0
    while True:
        chunks.append(spec.jump.sample(rng, size=chunk))
        idx = _cross_index(chunks[-1], carried, s)
        if idx is not None:
            break
        carried += float(np.sum(chunks[-1]))
        drawn += chunk
        if drawn > _MAX_JUMPS_PER_PATH:
            raise RuntimeError(
                f"compound Poisson path exceeded {_MAX_JUMPS_PER_PATH} jumps below s={s}; "
                f"spec={spec.spec_string()}"
            )
        chunk = max(64, chunk // 4)
    sizes = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    n_jumps = sum(len(c) for c in chunks[:-1]) + idx + 1
    sizes = sizes[:n_jumps]

    gaps = rng.exponential(1.0 / spec.rate, size=n_jumps)
    epochs = np.cumsum(gaps)
    t_passage = float(epochs[-1])

    n_star = -1
    if want_n_star:
        mass = np.concatenate(([0.0], np.cumsum(sizes)))
        ks = np.arange(0.0, math.floor(t_passage) + 2.0)
        jumps_by_k = np.searchsorted(epochs, ks, side="right")
        n_star = int(np.count_nonzero(mass[jumps_by_k] <= s))
    return t_passage, n_star


def _simulate_gamma_path(
    spec: GammaSubordinator, s: float, rng: np.random.Generator, want_n_star: bool
) -> tuple[float, int]:
    """Grid-approximated gamma path: T(s) is the first grid time above s."""
    h = spec.grid_step
    inc_shape = spec.shape * h
    expected_steps = s / (spec.mean_rate() * h)
    chunk = min(int(expected_steps * 1.02 + 6.0 * math.sqrt(expected_steps + 1.0)) + 16, 2**21)
    values: list[np.ndarray] = []
    carried = 0.0
    steps_done = 0
    while True:
        inc = rng.gamma(inc_shape, 1.0 / spec.rate, size=chunk)
        sums = carried + np.cumsum(inc)
        idx = int(np.searchsorted(sums, s, side="right"))
        values.append(sums)
        if idx < chunk:
            break
        carried = float(sums[-1])
        steps_done += chunk
        if steps_done * h > 10**9:
            raise RuntimeError(f"gamma path exceeded time horizon below s={s}")
        chunk = max(64, chunk // 4)
    k_star = steps_done + idx + 1  # first grid index with S > s
    t_passage = k_star * h

    n_star = -1
    if want_n_star:
        path = np.concatenate(values) if len(values) > 1 else values[0]
        n_star = 1  # k = 0: S(0) = 0 <= s
        k = 1
        while True:
            gi = int(math.floor(k / h + 0.5)) - 1  # grid index for time k
            if gi >= len(path) or not path[gi] <= s:
                break
            n_star += 1
            k += 1
    return t_passage, n_star


def simulate_passage(
    spec: Subordinator, s: float, rng: np.random.Generator
) -> PassageObservation:
    """First-passage observation of level s, with the skeleton count."""
    if not s > 0.0:
        raise DomainError(f"s must be positive, got {s}")
    if isinstance(spec, CompoundPoisson):
        t_passage, n_star = _simulate_cp_path(spec, s, rng, want_n_star=True)
        coupling = n_star - t_passage
        assert 0.0 <= coupling <= 1.0, f"coupling violated: N*-T = {coupling}"
    else:
        t_passage, n_star = _simulate_gamma_path(spec, s, rng, want_n_star=True)
    return PassageObservation(t_passage=t_passage, n_star=n_star, s_level=s)


def mc_passage_abs_deviation(
    spec: Subordinator,
    s: float,
    n_reps: int,
    master_seed: int,
    threads: int | None = None,
) -> MCEstimate:
    """Monte Carlo estimate of E|T(s) - s/m|."""
    if n_reps < 2:
        raise DomainError(f"n_reps must be >= 2, got {n_reps}")
    if not s > 0.0:
        raise DomainError(f"s must be positive, got {s}")
    center = s / spec.mean_rate()

    if isinstance(spec, CompoundPoisson):
        def one(rng):
            t_passage, _ = _simulate_cp_path(spec, s, rng, want_n_star=False)
            return (abs(t_passage - center),)
    else:
        def one(rng):
            t_passage, _ = _simulate_gamma_path(spec, s, rng, want_n_star=False)
            return (abs(t_passage - center),)

    values = map_replications(one, 1, n_reps, master_seed, threads)[0]
    return estimate_from_values(values, master_seed)


def coupling_check(
    spec: Subordinator,
    s: float,
    n_reps: int,
    master_seed: int,
    threads: int | None = None,
) -> float:
    """Fraction of replications violating N*(s) - T(s) in [0, 1].

    Only exact paths qualify: grid-approximated subordinators are rejected
    because the discretization bias breaks the pathwise identity.
    """
    if not isinstance(spec, CompoundPoisson):
        raise ParameterMismatchError(
            "coupling check requires exact compound Poisson paths, got "
            f"{spec.spec_string()}"
        )
    if n_reps < 1:
        raise DomainError(f"n_reps must be >= 1, got {n_reps}")

    def one(rng):
        t_passage, n_star = _simulate_cp_path(spec, s, rng, want_n_star=True)
        diff = n_star - t_passage
        return (0.0 if 0.0 <= diff <= 1.0 else 1.0,)

    flags = map_replications(one, 1, n_reps, master_seed, threads)[0]
    return float(np.sum(flags)) / n_reps


def _check_passage_case(spec: Subordinator, case: str) -> LimitCase:
    regime = spec.moment_regime()
    if case != regime:
        raise CaseMismatchError(
            f"case {case} requested but {spec.spec_string()} belongs to case {regime}"
        )
    m = spec.mean_rate()
    if case == "b1":
        return LimitCase("b1", m, sigma=math.sqrt(spec.variance_rate()))
    if case == "b2":
        return LimitCase("b2", m)
    return LimitCase("b3", m, alpha=spec.jump.alpha)


def passage_convergence_table(
    spec: Subordinator,
    case: str,
    ell: SlowlyVarying | None,
    s_grid: Sequence[float],
    n_reps: int,
    master_seed: int,
    threads: int | None = None,
) -> list[ConvergenceRow]:
    """Convergence study of E|T(s) - s/m| against its case limit."""
    case = case.strip().lower()
    grid = [float(s) for s in s_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError(f"s_grid must be nonempty and strictly increasing, got {s_grid}")
    lc = _check_passage_case(spec, case)
    limit = limit_constant(lc)
    alpha_for_c = 2.0 if case == "b2" else (lc.alpha if case == "b3" else math.nan)
    rows = []
    for s in grid:
        est = mc_passage_abs_deviation(spec, s, n_reps, master_seed, threads)
        denom = _case_denominator(case, s, alpha_for_c, ell)
        ratio = est.mean / denom
        rows.append(
            ConvergenceRow(
                s=s,
                n_reps=n_reps,
                estimate=est.mean,
                stderr=est.std_error,
                normalizer=denom,
                ratio=ratio,
                limit=limit,
                rel_gap=ratio / limit - 1.0,
            )
        )
    return rows


def parse_subordinator(text: str) -> Subordinator:
    """Parse ``cp:rate=1.0,jump=exp:1.0`` or
    ``gamma:shape=1.0,rate=1.0,grid=0.001``."""
    head, sep, body = text.strip().partition(":")
    head = head.strip().lower()
    if not sep or head not in ("cp", "gamma"):
        raise SpecParseError(f"unknown subordinator spec {text!r}")
    fields = {}
    for part in body.split(",", maxsplit=1 if head == "cp" else 2):
        key, eq, value = part.partition("=")
        if not eq or not value.strip():
            raise SpecParseError(f"malformed field {part!r} in subordinator spec {text!r}")
        fields[key.strip().lower()] = value.strip()
    try:
        if head == "cp":
            if set(fields) != {"rate", "jump"}:
                raise SpecParseError(
                    f"cp spec needs fields rate and jump, got {sorted(fields)}"
                )
            return CompoundPoisson(
                rate=float(fields["rate"]), jump=parse_interarrival(fields["jump"])
            )
        if set(fields) != {"shape", "rate", "grid"}:
            raise SpecParseError(
                f"gamma spec needs fields shape, rate and grid, got {sorted(fields)}"
            )
        return GammaSubordinator(
            shape=float(fields["shape"]),
            rate=float(fields["rate"]),
            grid_step=float(fields["grid"]),
        )
    except ValueError as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(f"invalid subordinator spec {text!r}: {exc}") from None


def format_subordinator(spec: Subordinator) -> str:
    return spec.spec_string()
