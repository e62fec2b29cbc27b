import math

import numpy as np
import pytest

from metricprobe.protocol import MetricSuperposition, ProperTimes, QubitParams

# filled by test_acceptance, printed once at the end of the session
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        name, ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {name}: {detail}")


def random_physics(rng: np.random.Generator):
    """One random draw of (omega0 < omega1, tau_a, tau_b, alpha, beta, delta)."""
    w0 = rng.uniform(-5, 5)
    w1 = w0 + rng.uniform(0.01, 5)
    times = ProperTimes(rng.uniform(0, 10), rng.uniform(0, 10))
    g = MetricSuperposition.from_weights(
        rng.uniform(0, 1),
        rng.uniform(-10, 10),
        beta_phase=rng.uniform(0, 2 * math.pi),
        alpha_phase=rng.uniform(0, 2 * math.pi),
    )
    return QubitParams(w0, w1), times, g


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
