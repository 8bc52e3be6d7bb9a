"""
Classic and PT-symmetric random media
=====================================

Build the two Gaussian Schell-model media, look at their strength and
anti-strength, and classify their symmetry at the level of the correlation
and of individual realizations.
"""

import numpy as np

from ptscatter import (
    ClassicQuadratic,
    PtSchellLinear,
    anti_strength,
    bochner_model,
    classify_symmetry,
    degree_of_potential_correlation,
    strength,
)
from ptscatter.oracle import realization_evenness_check

###############################################################################
# A PT medium with linear phases on the realizations (alpha) and on the degree
# of correlation (beta); only gamma = alpha + beta enters the correlation.
pt = PtSchellLinear(I0=1.0, a=1.0, d=1.0, alpha=[0.5, 0.0, 0.0], beta=[0.2, 0.0, 0.0])
cl = ClassicQuadratic(I0=1.0, a=1.0, d=1.0, alpha=2.0)
print("gamma =", pt.gamma)

###############################################################################
# Strength I(r) = C(r, r) is real and positive for both. The anti-strength
# N(r) = C(-r, r) picks up the phase exp(-2i gamma.r) in the PT medium.
r = np.array([0.4, -0.2, 0.3])
for name, m in [("PT", pt), ("classic", cl)]:
    print(f"{name:8s} I = {strength(m, r):.6f}   N = {complex(anti_strength(m, r)):.6f}")

###############################################################################
# Degree of potential correlation: mu(r, r) is exactly 1, |mu| <= 1 elsewhere.
print("mu(r, r)  =", complex(degree_of_potential_correlation(pt, r, r)))
print("mu(-r, r) =", complex(degree_of_potential_correlation(pt, -r, r)))

###############################################################################
# Correlation-level symmetry: C(-r1, -r2) = C(r1, r2) for classic media and
# C*(-r1, -r2) = C(r1, r2) for PT media.
x = np.linspace(-1, 1, 3)
grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), -1).reshape(-1, 3)
for name, m in [("PT", pt), ("classic", cl)]:
    rep = classify_symmetry(m, grid, tol=1e-9)
    print(f"{name:8s} correlation symmetry: {rep.symmetry}")

###############################################################################
# Realization-level symmetry needs a sampler. With a Bochner representation
# and real Gaussian deviates every PT realization obeys F*(-r) = F(r). The
# classic Schell kernel does not give even realizations, although its
# correlation is even; the even-cosine kernel does.
for name, m in [
    ("PT Schell", bochner_model(pt, 9)),
    ("classic Schell", bochner_model(cl, 9)),
    ("classic cosine", bochner_model(cl, 9, kernel="even_cosine")),
]:
    ev = realization_evenness_check(m, grid, n=20, seed=0)
    print(f"{name:15s} worst realization violation: {ev.max_violation:.2e}")
