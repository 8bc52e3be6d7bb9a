"""
Independent checks: quadrature, Monte Carlo and positive semidefiniteness
=========================================================================

Every closed form in the package can be checked against numbers that never
touch it: direct quadrature of the Born integral, ensemble averages over
sampled realizations, and eigenvalues of Gram matrices.
"""

import numpy as np

from ptscatter import ClassicQuadratic, PtSchellLinear, bochner_model, ctilde, ctilde_quadrature
from ptscatter.oracle import estimate_correlation, gram_psd_check

rng = np.random.default_rng(0)
pt = PtSchellLinear(1.0, 1.0, 1.0, [0.4, -0.3, 0.2], [-0.1, 0.5, 0.3])
cl = ClassicQuadratic(1.0, 1.0, 1.0, 2.0)

###############################################################################
# Quadrature against closed forms. The PT result is real even for K1 != K2;
# the classic one is complex.
K1, K2 = rng.uniform(-2, 2, (5, 3)), rng.uniform(-2, 2, (5, 3))
for name, m in [("PT", pt), ("classic", cl)]:
    q, c = ctilde_quadrature(m, K1, K2), ctilde(m, K1, K2)
    print(f"{name:8s} max rel. error {np.max(np.abs(q - c) / np.abs(c)):.1e}, "
          f"max |Im|/|C| (quadrature) {np.max(np.abs(q.imag) / np.abs(q)):.1e}")

###############################################################################
# Monte Carlo: sample realizations from the Bochner representation and average.
boch = bochner_model(pt, 9)
r1, r2 = rng.uniform(-0.6, 0.6, (8, 3)), rng.uniform(-0.6, 0.6, (8, 3))
est = estimate_correlation(boch, r1, r2, n=20_000, seed=1)
z = np.abs(est.mean - pt.correlation(r1, r2)) / est.stderr
print("ensemble deviations in standard errors:", np.round(z, 2))

###############################################################################
# Genuine correlations give positive semidefinite Gram matrices; a made-up
# function generally does not.
pts = rng.uniform(-2, 2, (50, 3))
print("PT   PSD:", gram_psd_check(pt, pts).passed)
print("CL   PSD:", gram_psd_check(cl, pts).passed)
bad = gram_psd_check(lambda a, b: np.exp(np.sum((a - b) ** 2, -1)), pts[:, :] / 2)
print("exp(+|r1 - r2|^2) PSD:", bad.passed, f"(min eigenvalue {bad.min_eigenvalue:.2e})")
