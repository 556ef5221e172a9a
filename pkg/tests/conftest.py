import math

import numpy as np
import pytest

from fastmdp import dynamics
from fastmdp.dynamics import AircraftState

_REPORT = []


@pytest.fixture(scope="session")
def report():
    """Collects one PASS/FAIL line per acceptance criterion."""

    def add(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _REPORT.append(line)
        print(line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)


def random_states(rng, n, limits, gamma_max=1.4, alt=(2000.0, 9000.0)):
    """In-envelope states with random attitude."""
    return [
        AircraftState(
            x=rng.uniform(0, 25000),
            y=rng.uniform(0, 25000),
            z=-rng.uniform(*alt),
            V=rng.uniform(limits.V_min, limits.V_max),
            gamma=rng.uniform(-gamma_max, gamma_max),
            psi=rng.uniform(-math.pi, math.pi),
            phi=rng.uniform(-math.pi, math.pi),
            alpha=rng.uniform(limits.alpha_min, limits.alpha_max),
        )
        for _ in range(n)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def red_actions():
    return dynamics.enumerate_actions("red")


@pytest.fixture(scope="session")
def blue_actions():
    return dynamics.enumerate_actions("blue")
