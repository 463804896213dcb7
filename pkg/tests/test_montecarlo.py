import math

import numpy as np
import pytest

from renewlim import ConfigError, MCEstimate
from renewlim.montecarlo import (
    estimate_from_values,
    map_replications,
    replication_rng,
    stream_base,
    thread_count,
)


def test_replication_streams_are_distinct_and_reproducible():
    base = stream_base(123)
    a = replication_rng(base, 0).random(8)
    b = replication_rng(base, 1).random(8)
    a2 = replication_rng(base, 0).random(8)
    assert np.array_equal(a, a2)
    assert not np.array_equal(a, b)
    other = replication_rng(stream_base(124), 0).random(8)
    assert not np.array_equal(a, other)


def test_stream_base_rejects_negative():
    with pytest.raises(ConfigError):
        stream_base(-1)


def test_thread_count_resolution(monkeypatch):
    monkeypatch.delenv("RL_THREADS", raising=False)
    assert thread_count(3) == 3
    monkeypatch.setenv("RL_THREADS", "2")
    assert thread_count(8) == 2  # env wins
    monkeypatch.setenv("RL_THREADS", "zero")
    with pytest.raises(ConfigError):
        thread_count()
    monkeypatch.setenv("RL_THREADS", "0")
    with pytest.raises(ConfigError):
        thread_count()


def test_map_replications_thread_independent(monkeypatch):
    def fn(rng):
        x = rng.random(4)
        return (float(x.sum()), float(x[0]))

    monkeypatch.setenv("RL_THREADS", "1")
    one = map_replications(fn, 2, 500, 42)
    monkeypatch.setenv("RL_THREADS", "3")
    three = map_replications(fn, 2, 500, 42)
    assert np.array_equal(one, three)


def test_estimate_from_values():
    est = estimate_from_values(np.array([1.0, 2.0, 3.0, 4.0]), master_seed=9)
    assert est == MCEstimate(mean=2.5, std_error=math.sqrt((5.0 / 3.0) / 4.0), n_reps=4, master_seed=9)
    single = estimate_from_values(np.array([7.0]), master_seed=0)
    assert single.std_error == 0.0


def test_estimate_exact_for_constant_values():
    est = estimate_from_values(np.full(10_000, 0.5), master_seed=1)
    assert est.mean == 0.5
    assert est.std_error == 0.0
