"""Singlet probe of a two-branch metric superposition.

A singlet is shared by Alice and Bob, Alice is transported while the metric is
in ``alpha|g0> + beta|g1>``, and her proper time in the ``g1`` branch exceeds
that in ``g0`` by ``delta``.  Tracing the metric out leaves the pair in a state
whose single off-diagonal coherence is governed by the complex factor ``W``.
After Alice measures in the ``|+->`` basis, Bob's qubit has purity
``(1 + |W|^2) / 2``.

Units are natural (hbar = 1): level energies are angular frequencies
``omega0 < omega1`` and only the products of frequency and time enter.  Every
phase is reduced modulo 2 pi before exponentiation.  For extreme regimes
(``omega ~ 1e43`` with ``delta ~ 1e-43``) pass the dimensionless products
directly, e.g. ``QubitParams(0, 1)`` with ``delta = omega * delta``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    ATOL,
    MINUS,
    PLUS,
    DensityMatrix,
    StateVector,
    partial_trace,
    projector,
    purity,
)

TWO_PI = 2.0 * math.pi
SQRT_HALF = 1.0 / math.sqrt(2.0)

# A (x) B (x) metric
PAIR_LAYOUT = (2, 2)
JOINT_LAYOUT = (2, 2, 2)


def phase(angle: float) -> complex:
    """``exp(i*angle)`` with the angle reduced modulo 2 pi first."""
    return cmath.exp(1j * math.fmod(angle, TWO_PI))


@dataclass(frozen=True)
class QubitParams:
    """Ground and excited level frequencies of each qubit."""

    omega0: float
    omega1: float

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and math.isfinite(self.omega1)):
            raise ValueError("qubit frequencies must be finite")
        if not self.omega1 > self.omega0:
            raise ValueError(
                f"levels must be nondegenerate with omega1 > omega0, got "
                f"omega0={self.omega0!r}, omega1={self.omega1!r}"
            )

    @property
    def omega(self) -> float:
        return self.omega1 - self.omega0


@dataclass(frozen=True)
class ProperTimes:
    """Proper times elapsed for Alice and Bob during transport."""

    tau_a: float
    tau_b: float

    def __post_init__(self):
        for name in ("tau_a", "tau_b"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v!r}")

    @property
    def difference(self) -> float:
        """``tau_b - tau_a``."""
        return self.tau_b - self.tau_a


@dataclass(frozen=True)
class MetricSuperposition:
    """Metric state ``alpha|g0> + beta|g1>`` with Alice's extra proper time ``delta`` in ``g1``."""

    alpha: complex
    beta: complex
    delta: float

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not all(math.isfinite(x) for x in (a.real, a.imag, b.real, b.imag, self.delta)):
            raise ValueError("metric superposition parameters must be finite")
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {norm!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "delta", float(self.delta))

    @classmethod
    def from_weights(cls, alpha_sq: float, delta: float, beta_phase: float = 0.0,
                     alpha_phase: float = 0.0) -> "MetricSuperposition":
        """Build from the branch probability ``|alpha|^2`` and optional phases."""
        if not 0.0 <= alpha_sq <= 1.0:
            raise ValueError(f"alpha_sq must lie in [0, 1], got {alpha_sq!r}")
        return cls(
            math.sqrt(alpha_sq) * phase(alpha_phase),
            math.sqrt(1.0 - alpha_sq) * phase(beta_phase),
            delta,
        )

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def beta_sq(self) -> float:
        return abs(self.beta) ** 2


@dataclass(frozen=True)
class WCoherence:
    """The complex coherence factor multiplying the pair's off-diagonal term."""

    value: complex

    def __post_init__(self):
        if abs(self.value) > 1.0 + ATOL:
            raise ValueError(f"|W| must not exceed 1, got {abs(self.value)!r}")

    @property
    def magnitude_sq(self) -> float:
        return abs(self.value) ** 2


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def alice_state(self) -> StateVector:
        return PLUS if self is Sign.PLUS else MINUS


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    sign: Sign
    probability: float
    post_state: DensityMatrix


def make_singlet() -> StateVector:
    """``(|01> - |10>) / sqrt(2)`` in the A (x) B layout."""
    return StateVector(np.array([0, SQRT_HALF, -SQRT_HALF, 0]), PAIR_LAYOUT)


def evolve_free(params: QubitParams, times: ProperTimes) -> StateVector:
    """Singlet after free evolution for proper times ``tau_a`` (Alice) and ``tau_b`` (Bob)."""
    w0, w1 = params.omega0, params.omega1
    ta, tb = times.tau_a, times.tau_b
    amps = np.zeros(4, dtype=complex)
    amps[0b01] = SQRT_HALF * phase(-(w0 * ta + w1 * tb))
    amps[0b10] = -SQRT_HALF * phase(-(w1 * ta + w0 * tb))
    return StateVector(amps, PAIR_LAYOUT)


def relative_phase_state(params: QubitParams, times: ProperTimes) -> StateVector:
    """``(|01> - e^{i omega (tau_b - tau_a)} |10>) / sqrt(2)``.

    Equal to :func:`evolve_free` up to a global phase.
    """
    amps = np.zeros(4, dtype=complex)
    amps[0b01] = SQRT_HALF
    amps[0b10] = -SQRT_HALF * phase(params.omega * times.difference)
    return StateVector(amps, PAIR_LAYOUT)


def bob_conditional_pure(params: QubitParams, times: ProperTimes) -> StateVector:
    """Bob's pure state after Alice finds ``|+>`` on the freely evolved pair."""
    return StateVector(
        np.array([-SQRT_HALF * phase(params.omega * times.difference), SQRT_HALF])
    )


def joint_state_with_metric(
    params: QubitParams, times: ProperTimes, g: MetricSuperposition
) -> StateVector:
    """Pair plus metric after transport, in the A (x) B (x) metric layout.

    Alice's phases in the ``g1`` branch use ``tau_a + delta``; Bob's proper
    time is the same in both branches.
    """
    w0, w1 = params.omega0, params.omega1
    ta, tb, d = times.tau_a, times.tau_b, g.delta
    amps = np.zeros(8, dtype=complex)
    # |0_A 1_B>
    bob1 = SQRT_HALF * phase(-w1 * tb)
    amps[0b010] = bob1 * phase(-w0 * ta) * g.alpha
    amps[0b011] = bob1 * phase(-w0 * (ta + d)) * g.beta
    # -|1_A 0_B>
    bob0 = -SQRT_HALF * phase(-w0 * tb)
    amps[0b100] = bob0 * phase(-w1 * ta) * g.alpha
    amps[0b101] = bob0 * phase(-w1 * (ta + d)) * g.beta
    return StateVector(amps, JOINT_LAYOUT)


def traced_pair_state(joint: StateVector) -> DensityMatrix:
    """Trace the metric factor out of the joint pair-metric state."""
    if joint.layout.factor_dims != JOINT_LAYOUT:
        raise ValueError(
            f"expected layout {JOINT_LAYOUT} (A, B, metric), got {joint.layout.factor_dims}"
        )
    return partial_trace(projector(joint), JOINT_LAYOUT, keep=(0, 1))


def w_closed_form(params: QubitParams, times: ProperTimes, g: MetricSuperposition) -> WCoherence:
    """``W = e^{i omega (tau_b - tau_a)} (|alpha|^2 + e^{-i omega delta} |beta|^2)``."""
    w = phase(params.omega * times.difference) * (
        g.alpha_sq + phase(-params.omega * g.delta) * g.beta_sq
    )
    return WCoherence(w)


def _check_weights(alpha_sq: float, beta_sq: float) -> None:
    if abs(alpha_sq + beta_sq - 1.0) > ATOL or min(alpha_sq, beta_sq) < 0:
        raise ValueError(f"alpha_sq + beta_sq must be 1, got {alpha_sq!r} + {beta_sq!r}")


def w_magnitude_sq(alpha_sq: float, beta_sq: float, omega: float, delta: float) -> float:
    """Exact ``|W|^2 = 1 - 4 |alpha|^2 |beta|^2 sin^2(omega delta / 2)``."""
    _check_weights(alpha_sq, beta_sq)
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    s = math.sin(math.fmod(omega * delta, TWO_PI) / 2.0)
    return 1.0 - 4.0 * alpha_sq * beta_sq * s * s


def w_magnitude_sq_approx(alpha_sq: float, beta_sq: float, omega: float, delta: float) -> float:
    """Small-angle ``|W|^2 ~ 1 - |alpha|^2 |beta|^2 (omega delta)^2``.

    Agrees with :func:`w_magnitude_sq` up to a remainder of order
    ``(omega delta)^4``; outside ``omega * delta << 1`` the two diverge (at
    ``omega * delta = 1`` with equal weights this gives 0.75 against 0.770151).
    """
    _check_weights(alpha_sq, beta_sq)
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    x = omega * delta
    return 1.0 - alpha_sq * beta_sq * x * x


def measure_alice(rho_ab: DensityMatrix, sign: Sign) -> MeasurementOutcome:
    """Project Alice's qubit onto ``|+>`` or ``|->`` and renormalize."""
    if rho_ab.layout.factor_dims != PAIR_LAYOUT:
        raise ValueError(f"expected a two-qubit state, got layout {rho_ab.layout.factor_dims}")
    sign = Sign(sign)
    p = np.kron(projector(sign.alice_state).data, np.eye(2))
    unnormalized = p @ rho_ab.data @ p
    prob = float(np.real(np.trace(unnormalized)))
    if prob < 1e-15:
        raise ValueError(f"outcome {sign.value} has probability {prob:.3e}; cannot condition on it")
    post = unnormalized / prob
    # exact projector algebra keeps this Hermitian; symmetrize away rounding
    post = 0.5 * (post + post.conj().T)
    return MeasurementOutcome(sign, prob, DensityMatrix(post, PAIR_LAYOUT))


def bob_reduced(outcome: MeasurementOutcome) -> DensityMatrix:
    """Bob's qubit after Alice's measurement, Alice traced out."""
    return partial_trace(outcome.post_state, PAIR_LAYOUT, keep=(1,))


def pipeline_purity(
    params: QubitParams,
    times: ProperTimes,
    g: MetricSuperposition,
    sign: Sign = Sign.PLUS,
) -> float:
    """Purity of Bob's qubit computed through the full density-matrix route."""
    rho_ab = traced_pair_state(joint_state_with_metric(params, times, g))
    return purity(bob_reduced(measure_alice(rho_ab, sign)))


def oracle_purity(params: QubitParams, times: ProperTimes, g: MetricSuperposition) -> float:
    """Closed-form purity ``(1 + |W|^2) / 2``."""
    return 0.5 * (1.0 + w_closed_form(params, times, g).magnitude_sq)


def apply_collective_dephasing(state: StateVector, phi: float) -> StateVector:
    """Apply ``diag(1, e^{i phi})`` to both qubits of a two-qubit state."""
    if state.dim != 4:
        raise ValueError(f"collective dephasing acts on two qubits, got dimension {state.dim}")
    if not state.is_normalized():
        raise ValueError("collective dephasing requires a normalized state")
    u = np.array([1.0, phase(phi)])
    return StateVector(np.kron(u, u) * state.amplitudes, state.layout)


def single_qubit_probe_purity(params: QubitParams, g: MetricSuperposition) -> float:
    """Purity of a lone clock qubit ``|+>`` carried through the metric superposition.

    The ``|1>`` component picks up ``e^{-i omega delta}`` in the ``g1`` branch
    (global phases dropped).  After tracing the metric the purity obeys the
    same ``(1 + |W0|^2) / 2`` law with ``W0 = |alpha|^2 + e^{-i omega delta}|beta|^2``,
    so ``|W0| = |W|``: the singlet is no more sensitive than a single qubit.
    Its advantage lies elsewhere, in immunity to collective dephasing and in
    letting Bob measure far from the region the metric acts on.
    """
    amps = np.array([
        g.alpha,
        g.beta,
        g.alpha,
        g.beta * phase(-params.omega * g.delta),
    ]) * SQRT_HALF
    # qubit (x) metric
    psi = StateVector(amps, (2, 2))
    return purity(partial_trace(projector(psi), None, keep=(0,)))


__all__ = [
    "QubitParams",
    "ProperTimes",
    "MetricSuperposition",
    "WCoherence",
    "Sign",
    "MeasurementOutcome",
    "make_singlet",
    "evolve_free",
    "relative_phase_state",
    "bob_conditional_pure",
    "joint_state_with_metric",
    "traced_pair_state",
    "w_closed_form",
    "w_magnitude_sq",
    "w_magnitude_sq_approx",
    "measure_alice",
    "bob_reduced",
    "pipeline_purity",
    "oracle_purity",
    "apply_collective_dephasing",
    "single_qubit_probe_purity",
    "phase",
]
