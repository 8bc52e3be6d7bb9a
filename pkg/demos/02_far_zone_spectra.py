"""
Far-zone spectral density of a scattered plane wave
===================================================

The spectral density scattered by a PT medium is shifted off axis by the
phase gradient gamma; the classic medium scatters symmetrically about the
incident direction.
"""

import numpy as np

from ptscatter import ClassicQuadratic, IncidentPlaneWave, PtSchellLinear, spectral_map

wave = IncidentPlaneWave(k=1.0, direction=[0.0, 0.0, 1.0])
theta = np.deg2rad(np.linspace(0, 180, 91))
phi = np.deg2rad(np.arange(0, 360, 4.0))

###############################################################################
# Sweep |a gamma| along x and watch the lobe move away from the axis. The
# maximum sits on the sphere point closest to K = -gamma, so the lobe points
# to phi = 180 degrees for gamma along +x.
for g in (0.0, 0.5, 1.0):
    m = PtSchellLinear(1.0, 1.0, 1.0, [g, 0.0, 0.0])
    smap = spectral_map(m, wave, theta, phi, normalization="position")
    t, p, v = smap.peak()
    print(f"a gamma_x = {g:.1f}: peak theta = {np.rad2deg(t):5.1f} deg, phi = {np.rad2deg(p):5.1f} deg, "
          f"azimuthal max/min = {smap.azimuthal_asymmetry():.3f}")

###############################################################################
# A longer correlation length strengthens the asymmetry at fixed gamma.
for d in (0.1, 0.5, 1.0):
    m = PtSchellLinear(1.0, 1.0, d, [1.0, 1.0, 1.0])
    smap = spectral_map(m, wave, theta, phi, normalization="position")
    print(f"d/a = {d:.1f}: azimuthal max/min = {smap.azimuthal_asymmetry():.4f}")

###############################################################################
# The classic medium depends only on the scattering angle.
smap = spectral_map(ClassicQuadratic(1.0, 1.0, 1.0, 2.0), wave, theta, phi)
print("classic azimuthal max/min =", smap.azimuthal_asymmetry())

###############################################################################
# Opposite phase gradients cancel: beta = -alpha scatters like gamma = 0.
m = PtSchellLinear(1.0, 1.0, 1.0, [0.7, -0.4, 0.9], [-0.7, 0.4, -0.9])
print("beta = -alpha azimuthal max/min =", spectral_map(m, wave, theta, phi).azimuthal_asymmetry())
