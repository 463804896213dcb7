"""Reproducible Monte Carlo plumbing: counter-based streams and estimates.

Every replication draws from its own Philox stream keyed by
(master seed, replication index).  Results therefore do not depend on how
replications are distributed over worker threads, and the final reduction
uses exactly rounded summation so merged estimates are bit-identical for
any thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError

THREAD_ENV_VAR = "RL_THREADS"


def thread_count(explicit: int | None = None) -> int:
    """Resolve the worker count: RL_THREADS env var wins, then the explicit
    argument, then the machine's available parallelism."""
    env = os.environ.get(THREAD_ENV_VAR)
    if env is not None and env.strip():
        try:
            k = int(env)
        except ValueError:
            raise ConfigError(f"{THREAD_ENV_VAR}: not an integer: {env!r}") from None
        if k < 1:
            raise ConfigError(f"{THREAD_ENV_VAR}: must be >= 1, got {k}")
        return k
    if explicit is not None:
        if explicit < 1:
            raise ConfigError(f"threads: must be >= 1, got {explicit}")
        return explicit
    return os.cpu_count() or 1


def stream_base(master_seed: int) -> np.uint64:
    """Collapse a non-negative master seed into the 64-bit Philox key base."""
    if master_seed < 0:
        raise ConfigError(f"master_seed: must be >= 0, got {master_seed}")
    return np.random.SeedSequence(master_seed).generate_state(1, dtype=np.uint64)[0]


def replication_rng(base: np.uint64, rep: int) -> np.random.Generator:
    """Stream for one replication: Philox keyed by (seed base, rep index)."""
    key = np.empty(2, dtype=np.uint64)
    key[0] = base
    key[1] = np.uint64(rep)
    return np.random.Generator(np.random.Philox(key=key))


def map_replications(
    fn: Callable[[np.random.Generator], Sequence[float]],
    n_outputs: int,
    n_reps: int,
    master_seed: int,
    threads: int | None = None,
) -> np.ndarray:
    """Run ``fn(rng)`` once per replication and collect its outputs.

    Returns an array of shape (n_outputs, n_reps).  Column ``rep`` is a pure
    function of (master_seed, rep), so the result is identical for every
    thread count.
    """
    if n_reps < 1:
        raise ValueError(f"n_reps must be >= 1, got {n_reps}")
    base = stream_base(master_seed)
    out = np.empty((n_outputs, n_reps))

    def run_block(lo: int, hi: int) -> None:
        for rep in range(lo, hi):
            vals = fn(replication_rng(base, rep))
            for j in range(n_outputs):
                out[j, rep] = vals[j]

    workers = min(thread_count(threads), n_reps)
    if workers == 1:
        run_block(0, n_reps)
    else:
        block = -(-n_reps // (workers * 4))
        bounds = [(lo, min(lo + block, n_reps)) for lo in range(0, n_reps, block)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: run_block(*b), bounds))
    return out


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo point estimate with its standard error.

    ``std_error`` is the sample standard deviation divided by sqrt(n_reps);
    the estimate is reproducible from the inputs plus ``master_seed`` alone.
    """

    mean: float
    std_error: float
    n_reps: int
    master_seed: int


def estimate_from_values(values: np.ndarray, master_seed: int) -> MCEstimate:
    """Exactly rounded mean/SE reduction (order-independent via fsum)."""
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return MCEstimate(mean=mean, std_error=se, n_reps=n, master_seed=master_seed)
