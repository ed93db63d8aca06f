"""Shared fixtures: expensive ladders and the acceptance sweep are built
once per session and reused by every module that needs them."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from zladder import (ExperimentConfig, build_ladder, expected_lag,
                     mobius_sieve, reverse_iterates, run_metamorphosis,
                     u_of_t_theta)


def ladder_span(t_base: float, k: int, theta: float = 1.0) -> tuple[float, float]:
    u = u_of_t_theta(t_base, theta)
    return t_base - 2.0, t_base + u + k * expected_lag(t_base) * 1.4 + 50.0


@pytest.fixture(scope="session")
def sieve_1e6():
    return mobius_sieve(10 ** 6)


@pytest.fixture(scope="session")
def ladder_factory():
    """Memoized ladder builds keyed by (t_base, k, samples_per_osc)."""
    memo = {}

    def build(t_base: float, k: int, spo: int = 64, tol: float = 1e-6):
        key = (t_base, k, spo)
        if key not in memo:
            lo, hi = ladder_span(t_base, k)
            memo[key] = build_ladder(lo, hi, tol=tol, samples_per_osc=spo)
        return memo[key]

    yield build
    memo.clear()


@pytest.fixture(scope="session")
def chain_factory(ladder_factory):
    def build(t_base: float, k: int, spo: int = 64, theta: float = 1.0):
        table = ladder_factory(t_base, k, spo)
        return table, reverse_iterates(table, t_base, u_of_t_theta(t_base, theta), k)

    return build


@pytest.fixture(scope="session")
def meta_sweep(ladder_factory):
    """The factorization sweep: T in {1e4, 1e5, 1e6}, k in {1, 2}, sigma 1.5.

    Each T shares one ladder (spanning k = 2) between both k runs.  These
    six reports back the trend criteria and every per-run invariant check.
    """
    records = {}
    for t_base in (1e4, 1e5, 1e6):
        table = ladder_factory(t_base, 2)
        for k in (1, 2):
            config = ExperimentConfig(t_base=t_base, theta=1.0, k=k, sigma=1.5)
            records[(t_base, k)] = run_metamorphosis(config, table=table)
    return records


@pytest.fixture(scope="session")
def smoke_run_1e4(ladder_factory):
    """Small k=1 pipeline run used by several unit tests."""
    config = ExperimentConfig(t_base=1e4, theta=1.0, k=1, sigma=1.5)
    return run_metamorphosis(config, table=ladder_factory(1e4, 1))
