"""Far-zone statistics of weakly (first-Born) scattered plane waves.

Fourier convention, used by every closed form and by the quadrature oracle::

    Ct(k1, k2) = int int C(r1, r2) exp(-i (k1.r1 + k2.r2)) d^3r1 d^3r2

Scattering from ``s0`` into ``s1`` and ``s2`` probes ``Ct(-K1, K2)`` with
``Kj = k (sj - s0)``. Functions named ``ctilde_*`` below take ``(K1, K2)`` and
return ``Ct(-K1, K2)``.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .geometry import (
    Z_HAT,
    ScatteringGeometry,
    as_unit,
    as_vec3,
    direction_at_angle,
    momentum_transfer,
    symmetric_pair,
    unit_from_spherical,
)
from .media import BochnerModel, ClassicQuadratic, PtSchellLinear

TWO_PI_CUBED = (2.0 * np.pi) ** 3
NORMALIZATIONS = ("absolute", "peak", "position")


class MismatchedRadius(ValueError):
    """Far-zone points do not lie on the same sphere."""


class ZeroDenominator(ArithmeticError):
    """Spectral density vanishes in the coherence normalization."""


@dataclass(frozen=True)
class IncidentPlaneWave:
    """Monochromatic plane wave of wavenumber ``k`` and spectral density ``S_i``."""

    k: float
    direction: np.ndarray = field(default_factory=lambda: Z_HAT.copy())
    S_i: float = 1.0

    def __post_init__(self):
        if not self.S_i >= 0:
            raise ValueError("incident spectral density must be nonnegative")
        object.__setattr__(self, "direction", as_unit(self.direction))
        self.geometry  # validates k

    @property
    def geometry(self):
        return ScatteringGeometry(self.k, self.direction)


@dataclass(frozen=True)
class FarZonePoint:
    r: float
    s: np.ndarray

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("far-zone radius must be positive")
        object.__setattr__(self, "s", as_unit(self.s))


def _dot(u, v):
    return np.sum(u * v, axis=-1)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def ctilde_pt_closed(m, K1, K2):
    """``Ct_PT(-K1, K2)`` for :class:`PtSchellLinear`; real-valued by construction.

    With ``u = K + gamma`` the result is ``A exp(Q(u1, u2))``, where
    ``Q = [-(a^2+d^2)(u1^2+u2^2)/2 + a^2 u1.u2] / (2 + d^2/a^2)`` and
    ``A = I0^2 (2pi)^3 a^6 d^3 / (2a^2 + d^2)^(3/2)``.
    """
    if m.deterministic:
        return ctilde_pt_deterministic(m, K1, K2)
    a, d = m.a, m.d
    u1 = as_vec3(K1) + m.gamma
    u2 = as_vec3(K2) + m.gamma
    q = (-(a**2 + d**2) * (_dot(u1, u1) + _dot(u2, u2)) / 2 + a**2 * _dot(u1, u2)) / (2 + d**2 / a**2)
    amp = m.I0**2 * TWO_PI_CUBED * a**6 * d**3 / (2 * a**2 + d**2) ** 1.5
    return (amp * np.exp(q)).astype(complex)


def ctilde_pt_deterministic(m, K1, K2):
    """Infinite-correlation-length limit of :func:`ctilde_pt_closed`.

    ``I0^2 (2pi)^3 a^6 exp(-a^2 (|K1 + gamma|^2 + |K2 + gamma|^2) / 2)``; the
    cross term vanishes in the limit.
    """
    a = m.a
    u1 = as_vec3(K1) + m.gamma
    u2 = as_vec3(K2) + m.gamma
    q = -(a**2) * (_dot(u1, u1) + _dot(u2, u2)) / 2
    return (m.I0**2 * TWO_PI_CUBED * a**6 * np.exp(q)).astype(complex)


def ctilde_factored(m, K1, K2):
    """Split ``Ct_PT`` into its ``gamma = 0`` part and a positive non-Hermitian factor.

    Returns ``(hermitian_part, factor)`` with
    ``factor = exp(-gamma.(K1 + K2 + gamma) / (2/d^2 + 1/a^2))``.
    """
    K1, K2 = as_vec3(K1), as_vec3(K2)
    g = m.gamma
    herm = ctilde_pt_closed(m.with_gamma_zero(), K1, K2)
    factor = np.exp(-_dot(g, K1 + K2 + g) / (2 / m.d**2 + 1 / m.a**2))
    return herm, factor


def ctilde_cl_closed(m, K1, K2):
    """``Ct_CL(-K1, K2)`` for :class:`ClassicQuadratic`.

    A complex Gaussian whose phase ``2 alpha a^2 d^2 (K2^2 - K1^2) / D`` is odd
    under ``K1 <-> K2``, with ``D = 4 + 8 alpha^2 a^2 d^2 + 2 d^2/a^2``. The
    amplitude is ``I0^2 (2pi)^3 a^6 d^3 / c0^(3/2)``,
    ``c0 = 2a^2 + d^2 + 4 alpha^2 a^4 d^2``.
    """
    a, d, al = m.a, m.d, m.alpha
    K1, K2 = as_vec3(K1), as_vec3(K2)
    k11, k22, k12 = _dot(K1, K1), _dot(K2, K2), _dot(K1, K2)
    den = 4 + 8 * al**2 * a**2 * d**2 + 2 * d**2 / a**2
    re = (-(a**2 + d**2) * (k11 + k22) + 2 * a**2 * k12) / den
    im = 2 * al * a**2 * d**2 * (k22 - k11) / den
    c0 = 2 * a**2 + d**2 + 4 * al**2 * a**4 * d**2
    amp = m.I0**2 * TWO_PI_CUBED * a**6 * d**3 / c0**1.5
    return amp * np.exp(re) * np.exp(1j * im)


def ctilde(model, K1, K2, **quad_kw):
    """``Ct(-K1, K2)`` for any model; Bochner models go through quadrature."""
    if isinstance(model, PtSchellLinear):
        return ctilde_pt_closed(model, K1, K2)
    if isinstance(model, ClassicQuadratic):
        return ctilde_cl_closed(model, K1, K2)
    if isinstance(model, BochnerModel):
        from .oracle import ctilde_quadrature

        return ctilde_quadrature(model, K1, K2, **quad_kw)
    raise TypeError(f"unsupported model {type(model).__name__}")


def ntilde(model, K):
    """``Nt(K) = Ct(-K, K)``: the diagonal, always real."""
    K = as_vec3(K)
    return np.real(ctilde(model, K, K))


# ---------------------------------------------------------------------------
# Scattered-field statistics
# ---------------------------------------------------------------------------


def ws_far_k(model, S_i, r, K1, K2):
    """Cross-spectral density for explicit momentum-transfer vectors."""
    return S_i / r**2 * ctilde(model, K1, K2)


def ws_far(model, wave, p1, p2):
    """Far-zone cross-spectral density ``W(r s1, r s2) = S_i / r^2 Ct(-K1, K2)``."""
    if p1.r != p2.r:
        raise MismatchedRadius(f"far-zone radii differ: {p1.r} != {p2.r}")
    K1 = momentum_transfer(wave.geometry, p1.s)
    K2 = momentum_transfer(wave.geometry, p2.s)
    return ws_far_k(model, wave.S_i, p1.r, K1, K2)


def spectral_density(model, wave, p):
    """Scattered spectral density ``S_i / r^2 Nt(K)`` in direction ``p.s``."""
    K = momentum_transfer(wave.geometry, p.s)
    return wave.S_i / p.r**2 * ntilde(model, K)


def position_term(model, K):
    """Direction-dependent part of the spectral density, ``Nt(K) / Nt(0)``."""
    return ntilde(model, K) / ntilde(model, np.zeros(3))


@dataclass
class SpectralMap:
    """Spectral density sampled on a ``(theta, phi)`` direction grid."""

    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    normalization: str
    wave: IncidentPlaneWave
    model: Any
    r: float = 1.0

    def __post_init__(self):
        if self.values.shape != (len(self.theta), len(self.phi)):
            raise ValueError("values must have shape (len(theta), len(phi))")

    def peak(self):
        """``(theta, phi, value)`` at the grid maximum."""
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return self.theta[i], self.phi[j], self.values[i, j]

    def azimuthal_asymmetry(self):
        """Largest ``max/min`` ratio over ``phi`` among the rows of fixed ``theta``."""
        v = self.values
        return float(np.max(np.max(v, axis=1) / np.min(v, axis=1)))


def _strictly_increasing(x, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) == 0 or np.any(np.diff(x) <= 0):
        raise ValueError(f"{name} grid must be nonempty and strictly increasing")
    return x


def spectral_map(model, wave, theta, phi, normalization="absolute", r=1.0):
    """Evaluate the spectral density over a direction grid.

    ``normalization`` is ``"absolute"``, ``"peak"`` (grid maximum set to 1) or
    ``"position"`` (divided by the forward-direction value, i.e. only the
    direction-dependent term).
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    theta = _strictly_increasing(theta, "theta")
    phi = _strictly_increasing(phi, "phi")
    s = unit_from_spherical(theta[:, None], phi[None, :])
    # rotate so that the grid's pole sits on the incident direction
    s = s @ _pole_rotation(wave.direction).T
    K = wave.k * (s - wave.direction)
    values = ntilde(model, K.reshape(-1, 3)).reshape(K.shape[:-1])
    if normalization == "absolute":
        values = wave.S_i / r**2 * values
    elif normalization == "peak":
        values = values / np.max(values)
    else:
        values = values / ntilde(model, np.zeros(3))
    return SpectralMap(theta, phi, values, normalization, wave, model, r)


def _pole_rotation(s0):
    """Rotation taking ``z`` to ``s0`` (identity when ``s0 = z``)."""
    s0 = as_unit(s0)
    c = s0[2]
    if c > 1 - 1e-15:
        return np.eye(3)
    if c < -1 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    v = np.cross(Z_HAT, s0)
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1 + c)


def mu_s_k(model, K1, K2):
    """Spectral degree of coherence for explicit momentum-transfer vectors."""
    K1, K2 = as_vec3(K1), as_vec3(K2)
    n1, n2 = ntilde(model, K1), ntilde(model, K2)
    if np.any(n1 <= 0) or np.any(n2 <= 0):
        raise ZeroDenominator("spectral density vanishes at one of the directions")
    den = np.where(n1 == n2, n1, np.sqrt(n1 * n2))
    c = np.asarray(ctilde(model, K1, K2), dtype=complex)
    out = c.real / den + 1j * (c.imag / den)
    return out if out.ndim else out[()]


def mu_s(model, wave, p1, p2):
    """``mu_s = Ct(-K1, K2) / sqrt(Nt(K1) Nt(K2))``."""
    if p1.r != p2.r:
        raise MismatchedRadius(f"far-zone radii differ: {p1.r} != {p2.r}")
    K1 = momentum_transfer(wave.geometry, p1.s)
    K2 = momentum_transfer(wave.geometry, p2.s)
    return mu_s_k(model, K1, K2)


def mu_s_symmetric(model, wave, theta):
    """Degree of coherence between the two directions mirrored about ``s0``.

    Evaluated directly from :func:`mu_s_k` on :func:`symmetric_pair` geometry;
    ``theta`` may be an array.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > np.pi)):
        raise ValueError("theta must lie in [0, pi]")
    out = np.ones(theta.shape, dtype=complex)
    geom = wave.geometry
    for idx, t in np.ndenumerate(theta):
        if np.sin(t) < 1e-12:
            continue
        s1, s2 = symmetric_pair(geom, direction_at_angle(geom.s0, t))
        out[idx] = mu_s_k(model, momentum_transfer(geom, s1), momentum_transfer(geom, s2))
    return out if out.ndim else out[()]


def mu_s_symmetric_closed(model, k, theta):
    """``exp(-a^2 k^2 sin^2(theta) / (1 + d^2/2a^2 + 2 alpha^2 a^2 d^2))``.

    ``alpha`` is the quadratic phase for :class:`ClassicQuadratic` and zero
    for :class:`PtSchellLinear`.
    """
    a, d = model.a, model.d
    al = model.alpha if isinstance(model, ClassicQuadratic) else 0.0
    den = 1 + d**2 / (2 * a**2) + 2 * al**2 * a**2 * d**2
    return np.exp(-(a**2) * k**2 * np.sin(theta) ** 2 / den)
