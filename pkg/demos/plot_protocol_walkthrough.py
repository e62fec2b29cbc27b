"""
Bob's qubit after Alice's measurement
=====================================

Walk through the state chain one step at a time: the singlet, free
evolution, the pair entangled with a two-branch metric, the metric traced
out, Alice's ``+`` result and finally Bob's reduced state.
"""

import math

import numpy as np

from metricprobe.linalg import purity
from metricprobe.protocol import (
    MetricSuperposition,
    ProperTimes,
    QubitParams,
    Sign,
    bob_reduced,
    evolve_free,
    joint_state_with_metric,
    make_singlet,
    measure_alice,
    traced_pair_state,
    w_closed_form,
)

np.set_printoptions(precision=4, suppress=True)

# %%
# The singlet is a dark state: equal proper times leave it unchanged up to
# a global phase.
params = QubitParams(omega0=0.0, omega1=1.0)
print("singlet amplitudes:", make_singlet().amplitudes)
print("after tau_A = tau_B = 3:", evolve_free(params, ProperTimes(3.0, 3.0)).amplitudes)

# %%
# Entangle with a metric superposition whose branches disagree on Alice's
# proper time by ``delta``.  Tracing out the metric leaves a mixed pair.
g = MetricSuperposition.from_weights(alpha_sq=0.5, delta=1.0)
times = ProperTimes(0.0, 0.0)
rho_ab = traced_pair_state(joint_state_with_metric(params, times, g))
print("pair purity:", purity(rho_ab))

# %%
# Alice measures in the ``+/-`` basis.  Either result has probability 1/2
# and leaves Bob with the same purity.
for sign in Sign:
    out = measure_alice(rho_ab, sign)
    bob = bob_reduced(out)
    print(f"{sign.value}: p = {out.probability:.6f}, Bob purity = {purity(bob):.12f}")
    print(bob.data)

# %%
# The off-diagonal element is set by the coherence factor ``W``.
w = w_closed_form(params, times, g)
print("W =", w.value, " (1 + |W|^2)/2 =", 0.5 * (1 + w.magnitude_sq))
print("1 - sin^2(1/2) =", 1 - math.sin(0.5) ** 2)
