"""Monte Carlo tomography of Bob's qubit over repeated protocol runs.

Each trial prepares a fresh pair-metric state, samples Alice's ``+/-`` result
from the exact Born probabilities, then measures Bob's qubit in one Pauli
basis.  Bases are cycled in the configured order (trial ``i`` uses
``bases[i % len(bases)]``).

Trials in the ``-`` branch see the transverse Bloch components negated
relative to the ``+`` branch, so their X and Y outcomes are sign-flipped
before pooling; the Z axis is shared.  Pooling therefore uses every trial.

Trials are split into fixed-size chunks, each drawing from its own
``SeedSequence`` child keyed by ``(stream_id, chunk)``.  Chunk results are
integer counts summed in chunk order, so the estimate does not depend on the
number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linalg import bloch_vector
from .protocol import (
    MetricSuperposition,
    ProperTimes,
    QubitParams,
    Sign,
    bob_reduced,
    joint_state_with_metric,
    measure_alice,
    traced_pair_state,
)

GENERATOR_NAME = "PCG64"
CHUNK_SIZE = 1 << 16
BASES = ("X", "Y", "Z")
# outcome sign applied to "-" trials before pooling, per basis
_MINUS_FLIP = {"X": -1, "Y": -1, "Z": 1}


@dataclass(frozen=True)
class ExperimentConfig:
    params: QubitParams
    times: ProperTimes
    g: MetricSuperposition
    trials: int
    seed: int
    bases: tuple[str, ...] = BASES
    stream_id: int = 0

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")
        if int(self.seed) < 0 or int(self.stream_id) < 0:
            raise ValueError("seed and stream_id must be unsigned integers")
        bases = tuple(str(b).upper() for b in self.bases)
        if not bases:
            raise ValueError("at least one measurement basis is required")
        bad = [b for b in bases if b not in BASES]
        if bad:
            raise ValueError(f"unknown bases {bad}; choose from X, Y, Z")
        if len(set(bases)) != len(bases):
            raise ValueError(f"bases must be distinct, got {bases}")
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))


@dataclass(frozen=True, eq=False)
class TomographyEstimate:
    """Pooled Bloch-vector estimate in the ``+`` frame.

    Axes that were not configured are reported as 0 with zero error.  Axes
    that were configured but received fewer than two samples carry ``nan``
    standard errors.
    """

    bloch: np.ndarray
    bloch_stderr: np.ndarray
    purity_estimate: float
    purity_stderr: float
    plus_fraction: float
    trials: int
    counts: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class AnalyticReference:
    bloch: np.ndarray
    purity: float


def seeded_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Reproducible generator for ``(seed, stream_id)``; distinct ids are independent."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream_id),))))


def _chunk_stream(seed: int, stream_id: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id), int(chunk)))
    return np.random.Generator(np.random.PCG64(ss))


def _conditional_states(cfg: ExperimentConfig):
    rho_ab = traced_pair_state(joint_state_with_metric(cfg.params, cfg.times, cfg.g))
    plus = measure_alice(rho_ab, Sign.PLUS)
    minus = measure_alice(rho_ab, Sign.MINUS)
    return plus, bloch_vector(bob_reduced(plus)), bloch_vector(bob_reduced(minus))


def analytic_reference(cfg: ExperimentConfig) -> AnalyticReference:
    """Exact ``+``-frame Bloch vector of Bob's qubit and its purity."""
    _, r_plus, _ = _conditional_states(cfg)
    return AnalyticReference(r_plus, 0.5 * (1.0 + float(r_plus @ r_plus)))


def _run_chunk(cfg, chunk, start, n, p_plus, r_plus, r_minus):
    rng = _chunk_stream(cfg.seed, cfg.stream_id, chunk)
    is_plus = rng.random(n) < p_plus
    basis_idx = (start + np.arange(n)) % len(cfg.bases)
    u = rng.random(n)

    counts = np.zeros(3, dtype=np.int64)
    sums = np.zeros(3, dtype=np.int64)
    for k, b in enumerate(cfg.bases):
        axis = BASES.index(b)
        sel = basis_idx == k
        plus_sel = is_plus[sel]
        # P(outcome = +1) = (1 + r) / 2 in the trial's own frame
        p_up = np.where(plus_sel, 0.5 * (1 + r_plus[axis]), 0.5 * (1 + r_minus[axis]))
        outcome = np.where(u[sel] < p_up, 1, -1)
        outcome = np.where(plus_sel, outcome, _MINUS_FLIP[b] * outcome)
        counts[axis] = outcome.size
        sums[axis] = int(outcome.sum())
    return int(is_plus.sum()), counts, sums


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> TomographyEstimate:
    """Simulate ``cfg.trials`` protocol runs and estimate Bob's Bloch vector and purity.

    Purity uses the unbiased form ``(1 + sum(m_i^2 - s_i^2)) / 2``, where
    ``m_i`` is the sample mean on axis ``i`` and ``s_i^2 = (1 - m_i^2)/(n_i - 1)``
    its estimated variance.  Its standard error keeps the second-order term,
    ``sqrt(sum(4 r_i^2 s_i^2 + 2 s_i^4)) / 2`` with ``r_i^2 = max(m_i^2 - s_i^2, 0)``;
    the ``s_i^4`` part dominates near the maximally mixed state, where the
    first-order term vanishes.
    """
    plus, r_plus, r_minus = _conditional_states(cfg)
    p_plus = plus.probability

    starts = list(range(0, cfg.trials, CHUNK_SIZE))
    jobs = [(cfg, i, s, min(CHUNK_SIZE, cfg.trials - s), p_plus, r_plus, r_minus)
            for i, s in enumerate(starts)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_chunk(*a), jobs))
    else:
        parts = [_run_chunk(*a) for a in jobs]

    n_plus = 0
    counts = np.zeros(3, dtype=np.int64)
    sums = np.zeros(3, dtype=np.int64)
    for np_, c, s in parts:
        n_plus += np_
        counts += c
        sums += s
    return _estimate(cfg, n_plus, counts, sums)


def _estimate(cfg: ExperimentConfig, n_plus: int, counts: np.ndarray, sums: np.ndarray) -> TomographyEstimate:
    bloch = np.zeros(3)
    var = np.zeros(3)
    r_sq_terms = np.zeros(3)
    for axis, b in enumerate(BASES):
        if b not in cfg.bases:
            continue
        n = int(counts[axis])
        if n == 0:
            var[axis] = math.nan
            continue
        m = sums[axis] / n
        bloch[axis] = m
        if n >= 2:
            var[axis] = (1.0 - m * m) / (n - 1)
            r_sq_terms[axis] = m * m - var[axis]
        else:
            var[axis] = math.nan
            r_sq_terms[axis] = m * m

    purity_est = 0.5 * (1.0 + float(r_sq_terms.sum()))
    r_sq_hat = np.maximum(r_sq_terms, 0.0)
    purity_var = 0.25 * float(np.sum(4.0 * r_sq_hat * var + 2.0 * var**2))
    return TomographyEstimate(
        bloch=bloch,
        bloch_stderr=np.sqrt(var),
        purity_estimate=purity_est,
        purity_stderr=math.sqrt(purity_var) if math.isfinite(purity_var) else math.nan,
        plus_fraction=n_plus / cfg.trials,
        trials=cfg.trials,
        counts=counts,
    )


def z_score(estimate: float, reference: float, stderr: float) -> float:
    """``(estimate - reference) / stderr``; 0 for an exact hit with zero error."""
    diff = estimate - reference
    if not math.isfinite(stderr):
        return math.nan
    if stderr == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / stderr
