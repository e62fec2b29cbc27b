"""Einstein synchronization and proper time in 1+1 dimensions.

Coordinates are ``(t, x)`` with c = 1.  Metrics are constant symmetric 2x2
forms with signature (-, +); observers' four-velocities are normalized to
``g(u, u) = -1``.  Diffeomorphisms are affine maps ``e -> L e + offset``, which
pull a constant metric back to the constant metric ``L^T g L``.

Worldlines are piecewise linear, so every null-ray intersection is the exact
solution of a 2x2 linear system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .protocol import (
    MetricSuperposition,
    ProperTimes,
    QubitParams,
    pipeline_purity,
)


class GeometryError(ValueError):
    """A geometric construction has no solution for the given inputs."""


@dataclass(frozen=True)
class Event:
    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"event coordinates must be finite, got ({self.t}, {self.x})")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", float(self.x))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.t, self.x], dtype=float)

    @classmethod
    def from_vec(cls, v) -> "Event":
        return cls(float(v[0]), float(v[1]))


@dataclass(frozen=True)
class Metric2D:
    """Constant Lorentzian metric ``gtt dt^2 + 2 gtx dt dx + gxx dx^2``."""

    gtt: float
    gtx: float
    gxx: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.gtt, self.gtx, self.gxx)):
            raise ValueError("metric components must be finite")
        if self.det >= 0:
            raise ValueError(f"metric is not Lorentzian: determinant {self.det!r} >= 0")

    @classmethod
    def standard(cls) -> "Metric2D":
        return cls(-1.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m) -> "Metric2D":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(0.5 * (m[0, 1] + m[1, 0])), float(m[1, 1]))

    @property
    def det(self) -> float:
        return self.gtt * self.gxx - self.gtx * self.gtx

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.gtt, self.gtx], [self.gtx, self.gxx]], dtype=float)

    def inner(self, u, v) -> float:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return float(u @ self.matrix @ v)

    def components_close(self, other: "Metric2D", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))


@dataclass(frozen=True, eq=False)
class AffineDiffeo:
    """Affine map ``e -> linear @ e + offset`` on ``(t, x)``."""

    linear: np.ndarray
    offset: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float).reshape(2, 2)
        off = np.array(self.offset, dtype=float).reshape(2)
        if abs(np.linalg.det(lin)) <= 1e-12:
            raise GeometryError("affine map is not invertible (|det| <= 1e-12)")
        lin.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "offset", off)

    @classmethod
    def boost(cls, rapidity: float, offset=(0.0, 0.0)) -> "AffineDiffeo":
        c, s = math.cosh(rapidity), math.sinh(rapidity)
        return cls([[c, s], [s, c]], offset)

    @classmethod
    def scaling(cls, st: float, sx: float = 1.0) -> "AffineDiffeo":
        return cls([[st, 0.0], [0.0, sx]])

    def apply(self, e: Event) -> Event:
        return Event.from_vec(self.linear @ e.vec + self.offset)

    def push_vector(self, v) -> np.ndarray:
        return self.linear @ np.asarray(v, dtype=float)

    def inverse(self) -> "AffineDiffeo":
        inv = np.linalg.inv(self.linear)
        return AffineDiffeo(inv, -inv @ self.offset)


@dataclass(frozen=True)
class Worldline:
    """Piecewise-linear path through events with strictly increasing ``t``."""

    vertices: tuple[Event, ...]

    def __post_init__(self):
        verts = tuple(v if isinstance(v, Event) else Event(*v) for v in self.vertices)
        if len(verts) < 2:
            raise ValueError("a worldline needs at least two vertices")
        for i, (a, b) in enumerate(zip(verts, verts[1:])):
            if not b.t > a.t:
                raise ValueError(f"worldline t must increase strictly; segment {i} goes {a.t} -> {b.t}")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def static(cls, x: float, t_start: float, t_end: float) -> "Worldline":
        return cls((Event(t_start, x), Event(t_end, x)))

    @property
    def t_range(self) -> tuple[float, float]:
        return self.vertices[0].t, self.vertices[-1].t

    def segments(self):
        return list(zip(self.vertices, self.vertices[1:]))

    def segment_index(self, t: float) -> int:
        t0, t1 = self.t_range
        if not t0 <= t <= t1:
            raise GeometryError(f"time {t} outside worldline extent [{t0}, {t1}]")
        ts = [v.t for v in self.vertices]
        i = int(np.searchsorted(ts, t, side="right")) - 1
        return min(max(i, 0), len(ts) - 2)

    def event_at(self, t: float) -> Event:
        i = self.segment_index(t)
        a, b = self.vertices[i], self.vertices[i + 1]
        s = (t - a.t) / (b.t - a.t)
        return Event(t, a.x + s * (b.x - a.x))

    def tangent_at(self, t: float) -> np.ndarray:
        """Coordinate tangent ``(dt, dx)`` of the segment containing ``t``."""
        i = self.segment_index(t)
        a, b = self.vertices[i], self.vertices[i + 1]
        return b.vec - a.vec

    def contains(self, e: Event, atol: float = 1e-9) -> bool:
        try:
            return abs(self.event_at(e.t).x - e.x) <= atol
        except GeometryError:
            return False

    def pushforward(self, phi: AffineDiffeo) -> "Worldline":
        return Worldline(tuple(phi.apply(v) for v in self.vertices))


@dataclass(frozen=True)
class SyncResult:
    t1: float
    t2: float
    t3: float
    reflection_event: Event
    orthogonality_residual: float
    emission_event: Event
    return_event: Event
    alice_t2_event: Event

    @property
    def round_trip(self) -> float:
        return self.t3 - self.t1

    @property
    def bob_clock_offset(self) -> float:
        """Amount Bob adds to his reflection reading so it shows ``t2``."""
        return self.t2 - self.reflection_event.t


def pullback(g: Metric2D, phi: AffineDiffeo) -> Metric2D:
    """Metric ``phi^* g`` with components ``L^a_m L^b_n g_ab``."""
    lin = phi.linear
    return Metric2D.from_matrix(lin.T @ g.matrix @ lin)


def null_slopes(g: Metric2D) -> tuple[float, float]:
    """Velocities ``dx/dt`` of the two light rays, ascending.

    Roots of ``gtt + 2 gtx s + gxx s^2 = 0``.  When ``gxx == 0`` one null
    direction is ``dt = 0`` and is reported as an infinite slope.
    """
    a, b, c = g.gxx, 2.0 * g.gtx, g.gtt
    disc = b * b - 4.0 * a * c  # = -4 det > 0 for Lorentzian g
    root = math.sqrt(disc)
    if a == 0.0:
        s = -c / b
        return tuple(sorted((s, math.copysign(math.inf, -b) if b else math.inf)))
    # numerically stable quadratic roots
    q = -0.5 * (b + math.copysign(root, b if b != 0 else 1.0))
    r1 = q / a
    r2 = c / q if q != 0 else -r1
    return tuple(sorted((r1, r2)))


def simultaneity_residual(g: Metric2D, u, s) -> float:
    """``g(u, s)``; zero when ``s`` lies in the rest space of velocity ``u``."""
    return g.inner(u, s)


def unit_velocity(g: Metric2D, tangent) -> np.ndarray:
    """Future-pointing tangent normalized so that ``g(u, u) = -1``."""
    v = np.asarray(tangent, dtype=float)
    n = g.inner(v, v)
    if not n < 0:
        raise GeometryError(f"tangent {tuple(v)} is not timelike (g(v, v) = {n!r})")
    return v / math.sqrt(-n)


def _ray_hit(origin: np.ndarray, direction: np.ndarray, w: Worldline, what: str,
             eps: float = 1e-12) -> Event:
    """Earliest intersection (ray parameter > eps) of a ray with a worldline."""
    best = None
    for a, b in w.segments():
        seg = b.vec - a.vec
        m = np.column_stack([direction, -seg])
        if abs(np.linalg.det(m)) < 1e-15:
            continue
        lam, mu = np.linalg.solve(m, a.vec - origin)
        if lam > eps and -1e-12 <= mu <= 1.0 + 1e-12:
            if best is None or lam < best:
                best = lam
    if best is None:
        t0, t1 = w.t_range
        raise GeometryError(f"{what} null ray never meets the worldline within t in [{t0}, {t1}]")
    return Event.from_vec(origin + best * direction)


def _null_direction(slope: float) -> np.ndarray:
    if math.isinf(slope):
        raise GeometryError("null direction with dt = 0 cannot carry a signal forward in t")
    return np.array([1.0, slope])


def einstein_sync(g: Metric2D, alice: Worldline, bob: Worldline, t1_event: Event) -> SyncResult:
    """Run one light round trip from Alice to Bob's mirror and back.

    The half-way time ``t2 = t1 + (t3 - t1) / 2`` on Alice's clock is assigned
    to the reflection event.  ``orthogonality_residual`` is ``g(u, S)`` with
    ``u`` Alice's unit velocity at ``t2`` and ``S`` the vector from her ``t2``
    event to the reflection; it vanishes when the assignment agrees with the
    metric's own notion of simultaneity.
    """
    if not alice.contains(t1_event):
        raise GeometryError(f"emission event ({t1_event.t}, {t1_event.x}) is not on Alice's worldline")
    lo, hi = null_slopes(g)
    try:
        bob_x = bob.event_at(t1_event.t).x
    except GeometryError:
        bob_x = bob.vertices[0].x
    toward, back = (hi, lo) if bob_x >= t1_event.x else (lo, hi)

    reflection = _ray_hit(t1_event.vec, _null_direction(toward), bob, "outbound (Alice -> Bob)")
    ret = _ray_hit(reflection.vec, _null_direction(back), alice, "return (Bob -> Alice)")

    t1, t3 = t1_event.t, ret.t
    t2 = t1 + 0.5 * (t3 - t1)
    alice_t2 = alice.event_at(t2)
    u = unit_velocity(g, alice.tangent_at(t2))
    residual = simultaneity_residual(g, u, reflection.vec - alice_t2.vec)
    return SyncResult(
        t1=t1,
        t2=t2,
        t3=t3,
        reflection_event=reflection,
        orthogonality_residual=residual,
        emission_event=t1_event,
        return_event=ret,
        alice_t2_event=alice_t2,
    )


def proper_time(g: Metric2D, w: Worldline) -> float:
    """Sum of ``sqrt(-g(de, de))`` over the worldline's segments."""
    total = 0.0
    for i, (a, b) in enumerate(w.segments()):
        d = b.vec - a.vec
        n = g.inner(d, d)
        if not n < 0:
            kind = "null" if n == 0 else "spacelike"
            raise GeometryError(f"segment {i} from ({a.t}, {a.x}) to ({b.t}, {b.x}) is {kind}")
        total += math.sqrt(-n)
    return total


def branch_delta(g0: Metric2D, g1: Metric2D, transport: Worldline) -> float:
    """Proper-time excess of the transport worldline under ``g1`` over ``g0``."""
    return proper_time(g1, transport) - proper_time(g0, transport)


@dataclass(frozen=True)
class Scenario:
    """Two metric branches plus the qubit and superposition parameters."""

    g0: Metric2D
    g1: Metric2D
    transport: Worldline
    params: QubitParams
    times: ProperTimes
    alpha: complex
    beta: complex

    def superposition(self) -> MetricSuperposition:
        return MetricSuperposition(self.alpha, self.beta, branch_delta(self.g0, self.g1, self.transport))


def end_to_end_purity(scenario: Scenario) -> float:
    """Bob's purity with the branch gap taken from the geometry."""
    return pipeline_purity(scenario.params, scenario.times, scenario.superposition())


def static_pair(d: float, t_start: float, t_end: float) -> tuple[Worldline, Worldline]:
    """Alice at ``x = 0`` and Bob at ``x = d``, both at rest."""
    return Worldline.static(0.0, t_start, t_end), Worldline.static(d, t_start, t_end)


def scaled_time_metric(eps: float) -> Metric2D:
    """``diag(-(1 + eps)^2, 1)``: clocks at rest run ``1 + eps`` times faster."""
    return Metric2D(-(1.0 + eps) ** 2, 0.0, 1.0)


def polyline(points: Sequence[Sequence[float]]) -> Worldline:
    return Worldline(tuple(Event(float(t), float(x)) for t, x in points))
