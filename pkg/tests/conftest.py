"""Shared fixtures: the expensive reference runs are computed once per session.

Each fixture returns a ``Timed`` pair so the acceptance tests can assert
wall-clock budgets against the same run they inspect numerically.
"""

import time
from collections import namedtuple
from dataclasses import replace

import pytest

from helecell import (
    RunConfig,
    comparison_harness,
    convergence_study,
    epsilon_sweep,
    fig1_experiment,
    run,
)

Timed = namedtuple("Timed", "value seconds")

ACCEPTANCE_LINES = []


def _timed(fn, *args, **kwargs):
    t0 = time.monotonic()
    out = fn(*args, **kwargs)
    return Timed(out, time.monotonic() - t0)


@pytest.fixture(scope="session")
def fig1():
    """Headline dichotomy run: singular and power-law arms, T = 0.5."""
    return _timed(fig1_experiment)


@pytest.fixture(scope="session")
def drift_run():
    """Growth switched off, explicit scheme: pure conservative transport."""
    cfg = RunConfig(
        growth=None, scheme="explicit", t_final=0.5, snapshot_dt=0.05
    )
    return _timed(run, cfg)


@pytest.fixture(scope="session")
def sweep():
    """Default eps ladder against the saturated-patch limit, T = 0.1."""
    return _timed(epsilon_sweep)


@pytest.fixture(scope="session")
def harness():
    """20 seeded ordered pairs stepped with the shared explicit CFL."""
    return _timed(comparison_harness)


@pytest.fixture(scope="session")
def mms():
    """Grid-refinement study on the manufactured solution, both schemes."""
    return _timed(convergence_study)


@pytest.fixture(scope="session")
def fig1_fast_base():
    """Short-horizon variant of the headline config for cheap unit tests."""
    return replace(RunConfig(), t_final=0.02, snapshot_dt=0.01)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
