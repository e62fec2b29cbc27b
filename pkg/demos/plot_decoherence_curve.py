"""
Purity against the branch phase gap
====================================

Sweep the dimensionless product ``omega * delta`` and compare the exact
coherence ``|W|^2`` with its small-angle expansion.  Only the product
matters, so a Planck-scale and a TeV-scale setting give the same purity.
"""

import math

import numpy as np

from metricprobe.protocol import (
    MetricSuperposition,
    ProperTimes,
    QubitParams,
    pipeline_purity,
    w_magnitude_sq,
    w_magnitude_sq_approx,
)

# %%
# Exact and approximate ``|W|^2`` at equal weights.
for x in np.linspace(0, 2 * math.pi, 9):
    exact = w_magnitude_sq(0.5, 0.5, 1.0, x)
    approx = w_magnitude_sq_approx(0.5, 0.5, 1.0, x)
    print(f"omega*delta = {x:6.3f}  |W|^2 = {exact:.6f}  approx = {approx:+.6f}  purity = {0.5 * (1 + exact):.6f}")

# %%
# Unequal weights cap the loss of coherence: the minimum purity is
# ``(1 + (1 - 2 a^2)^2) / 2``.
for a2 in (0.1, 0.3, 0.5):
    print(f"alpha^2 = {a2}: purity at omega*delta = pi is {0.5 * (1 + w_magnitude_sq(a2, 1 - a2, 1.0, math.pi)):.4f}")

# %%
# Raw values far outside the comfortable range of doubles still land on the
# same product.
still = ProperTimes(0.0, 0.0)
planck = pipeline_purity(QubitParams(0.0, 1e43), still, MetricSuperposition.from_weights(0.5, 1e-43))
tev = pipeline_purity(QubitParams(0.0, 1e27), still, MetricSuperposition.from_weights(0.5, 1e-27))
print("Planck:", planck, " TeV:", tev)

# %%
# The same curve is available from the command line::
#
#     metricprobe sweep --out curve.csv --sweep-steps 101
