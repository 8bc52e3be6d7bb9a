"""Directions, spherical angles and momentum-transfer vectors.

Vectors are plain ``numpy`` arrays whose last axis has length 3. Angles are
in radians; ``theta`` is always the angle measured from the incident
direction (the polar angle when the incident direction is ``z``).
"""

from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-12

X_HAT = np.array([1.0, 0.0, 0.0])
Y_HAT = np.array([0.0, 1.0, 0.0])
Z_HAT = np.array([0.0, 0.0, 1.0])


class DegenerateDirection(ValueError):
    """Raised when a direction is (anti)parallel to the incident direction."""


def as_vec3(v):
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def as_unit(v, tol=UNIT_TOL):
    """Validate that ``v`` has unit norm along its last axis."""
    v = as_vec3(v)
    norm = np.linalg.norm(v, axis=-1)
    if np.any(np.abs(norm - 1.0) > tol):
        raise ValueError("direction vectors must have unit norm")
    return v


def normalize(v):
    v = as_vec3(v)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class ScatteringGeometry:
    """Monochromatic plane-wave illumination.

    Parameters
    ----------
    k : float
        Wavenumber of the radiation (inverse length).
    s0 : array_like, shape (3,)
        Unit incident direction.
    frequency_tag : str, optional
        Opaque label for the (fixed) angular frequency.
    """

    k: float
    s0: np.ndarray = field(default_factory=lambda: Z_HAT.copy())
    frequency_tag: str = ""

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("wavenumber k must be positive")
        object.__setattr__(self, "s0", as_unit(self.s0))


def unit_from_spherical(theta, phi):
    """Unit vector ``(sin t cos p, sin t sin p, cos t)``; broadcasts over inputs."""
    theta = np.asarray(theta, dtype=float)
    phi = np.mod(np.asarray(phi, dtype=float), 2.0 * np.pi)
    st = np.sin(theta)
    return np.stack(np.broadcast_arrays(st * np.cos(phi), st * np.sin(phi), np.cos(theta)), axis=-1)


def spherical_from_unit(s):
    """Inverse of :func:`unit_from_spherical`, with ``phi`` in ``[0, 2 pi)``."""
    s = as_vec3(s)
    # atan2 stays accurate near the poles, unlike arccos
    theta = np.arctan2(np.hypot(s[..., 0], s[..., 1]), s[..., 2])
    phi = np.mod(np.arctan2(s[..., 1], s[..., 0]), 2.0 * np.pi)
    return theta, phi


def momentum_transfer(geom, s):
    """Momentum transfer ``K = k (s - s0)`` for outgoing unit direction(s) ``s``."""
    s = as_unit(s)
    return geom.k * (s - geom.s0)


def transverse_unit(s, s0):
    """Unit vector along the part of ``s`` orthogonal to ``s0`` (Gram-Schmidt)."""
    s = as_unit(s)
    s0 = as_unit(s0)
    if np.linalg.norm(np.cross(s, s0)) < UNIT_TOL:
        raise DegenerateDirection("direction is parallel or antiparallel to the incident direction")
    t = s - np.dot(s, s0) * s0
    return t / np.linalg.norm(t)


def symmetric_pair(geom, s):
    """Mirror ``s`` about the incident direction.

    Returns ``(s1, s2)`` with ``s1 = s`` and ``s2 = s - 2 n sin(theta)``, where
    ``theta`` is the angle between ``s`` and ``s0`` and ``n`` the transverse unit
    vector. Both outputs make the same angle with ``s0``.
    """
    s = as_unit(s)
    n = transverse_unit(s, geom.s0)
    sin_theta = np.linalg.norm(np.cross(s, geom.s0))
    s2 = s - 2.0 * n * sin_theta
    # renormalize to remove the O(eps) drift accumulated above
    return s, s2 / np.linalg.norm(s2)


def direction_at_angle(s0, theta, reference=None):
    """Unit vector at angle ``theta`` from ``s0``, tilted toward ``reference``.

    ``reference`` defaults to whichever of ``x`` or ``y`` is less aligned with ``s0``.
    """
    s0 = as_unit(s0)
    if reference is None:
        reference = X_HAT if abs(s0[0]) < 0.9 else Y_HAT
    n = np.asarray(reference, dtype=float) - np.dot(reference, s0) * s0
    n = n / np.linalg.norm(n)
    return np.cos(theta) * s0 + np.sin(theta) * n
