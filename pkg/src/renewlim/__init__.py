"""renewlim: simulation and numerical verification of absolute-moment
convergence for renewal counting processes and subordinator first-passage
times, with exact stable-limit constants and independent cross-checks."""

from .distributions import (
    Deterministic,
    Exponential,
    Interarrival,
    Pareto,
    ParetoBoundary,
    StableParams,
    Uniform,
    format_interarrival,
    parse_interarrival,
)
from .errors import (
    CaseMismatchError,
    ConfigError,
    DomainError,
    NoBracketError,
    ParameterMismatchError,
    PoleError,
    RenewlimError,
    SpecParseError,
    ToleranceNotMetError,
)
from .limits import (
    LimitCase,
    gamma_fn,
    limit_constant,
    stable_abs_moment,
    stable_abs_moment_quadrature,
)
from .montecarlo import MCEstimate, replication_rng, stream_base, thread_count
from .renewal import (
    ConvergenceRow,
    RenewalObservation,
    convergence_table,
    exact_abs_deviation_poisson,
    mc_abs_deviation,
    mc_overshoot_mean,
    simulate_renewal,
    wald_residual,
)
from .scaling import (
    Constant,
    LogPower,
    LogShifted,
    ScalingSolution,
    SlowlyVarying,
    format_slowly_varying,
    normalizer,
    parse_slowly_varying,
    regvar_ratio_check,
    solve_c,
)
from .subordinator import (
    CompoundPoisson,
    GammaSubordinator,
    PassageObservation,
    Subordinator,
    coupling_check,
    format_subordinator,
    mc_passage_abs_deviation,
    parse_subordinator,
    passage_convergence_table,
    simulate_passage,
)

__version__ = "0.1.0"
