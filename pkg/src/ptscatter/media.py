"""Medium models and real-space correlation algebra.

Three model families are provided:

``PtSchellLinear``
    Gaussian Schell-model medium whose realizations carry a linear phase
    ``exp(-i alpha.r)`` and whose degree of correlation carries a linear phase
    ``exp(-i beta.r_d)``; the correlation is PT-symmetric.
``ClassicQuadratic``
    Gaussian Schell-model medium with an even quadratic phase
    ``exp(-i alpha r^2)`` on the amplitude; the correlation is classic (even).
``BochnerModel``
    Generic ``C(r1, r2) = sum_j w_j H*(r1, v_j) H(r2, v_j)`` built from a
    nonnegative weight ``p(v)`` and a kernel ``H(r, v)``. This representation
    also drives the realization sampler in :mod:`ptscatter.oracle`.

Phase conventions: ``r_d = r2 - r1``; the amplitude ``a(r)`` carries
``exp(-i alpha.r)`` and the degree of correlation ``mu(r_d)`` carries
``exp(-i beta.r_d)``, so that ``C = a*(r1) a(r2) mu(r_d)`` has total phase
``exp(-i gamma.r_d)`` with ``gamma = alpha + beta``.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import roots_hermitenorm

from .geometry import as_vec3

TWO_PI = 2.0 * np.pi
ZERO_STRENGTH = 1e-300
SYMMETRY_TOL = 1e-9


class ZeroStrength(ArithmeticError):
    """Strength of the scattering potential vanishes at a requested point."""


class NonIntegrable(ValueError):
    """A tabulated weight function has no finite, nonnegative mass."""


# ---------------------------------------------------------------------------
# Refractive index and scattering potential
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefractiveIndexSample:
    nr: float
    ni: float
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def n(self):
        return complex(self.nr, self.ni)


def potential_from_index(k, n):
    """Scattering potential ``F = (k^2 / 4 pi^2) (n^2 - 1)``.

    ``n`` may be a :class:`RefractiveIndexSample` or any complex array.
    """
    if not k > 0:
        raise ValueError("wavenumber k must be positive")
    if isinstance(n, RefractiveIndexSample):
        n = n.n
    n = np.asarray(n, dtype=complex)
    return (k**2 / (4.0 * np.pi**2)) * (n**2 - 1.0)


# ---------------------------------------------------------------------------
# Gaussian Schell-model families
# ---------------------------------------------------------------------------


def _sqnorm(r):
    return np.sum(r * r, axis=-1)


@dataclass(frozen=True)
class PtSchellLinear:
    """PT-symmetric Gaussian Schell-model medium with linear phases.

    Parameters
    ----------
    I0 : float
        Amplitude scale of the potential.
    a : float
        Size of the scatterer.
    d : float
        Correlation length. Ignored when ``deterministic`` is set.
    alpha, beta : array_like, shape (3,)
        Phase gradients of the realizations and of the degree of correlation.
    deterministic : bool
        Select the fully correlated (infinite correlation length) branch.
    """

    I0: float = 1.0
    a: float = 1.0
    d: float = 1.0
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(3))
    beta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    deterministic: bool = False

    def __post_init__(self):
        if not (self.I0 > 0 and self.a > 0):
            raise ValueError("I0 and a must be positive")
        if self.deterministic:
            object.__setattr__(self, "d", np.inf)
        elif not (self.d > 0 and np.isfinite(self.d)):
            raise ValueError("d must be positive and finite; use deterministic=True for d -> infinity")
        object.__setattr__(self, "alpha", as_vec3(self.alpha).copy())
        object.__setattr__(self, "beta", as_vec3(self.beta).copy())

    @property
    def gamma(self):
        return self.alpha + self.beta

    @property
    def family(self):
        return "pt_schell_linear"

    def amplitude(self, r):
        r = np.asarray(r, dtype=float)
        return self.I0 * np.exp(-_sqnorm(r) / (2 * self.a**2)) * np.exp(-1j * (r @ self.alpha))

    def correlation(self, r1, r2):
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        rd = r2 - r1
        env = -(_sqnorm(r1) + _sqnorm(r2)) / (2 * self.a**2) - _sqnorm(rd) / (2 * self.d**2)
        return self.I0**2 * np.exp(env) * np.exp(-1j * (rd @ self.gamma))

    def axis_factor(self, x1, x2, axis):
        """One Cartesian factor of the correlation; the product over axes is ``C``."""
        xd = x2 - x1
        env = -(x1**2 + x2**2) / (2 * self.a**2) - xd**2 / (2 * self.d**2)
        return self.I0 ** (2.0 / 3.0) * np.exp(env) * np.exp(-1j * self.gamma[axis] * xd)

    def with_gamma_zero(self):
        return PtSchellLinear(self.I0, self.a, self.d, np.zeros(3), np.zeros(3), self.deterministic)


@dataclass(frozen=True)
class ClassicQuadratic:
    """Classic Gaussian Schell-model medium with a quadratic amplitude phase.

    ``alpha`` has units of inverse length squared.
    """

    I0: float = 1.0
    a: float = 1.0
    d: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.I0 > 0 and self.a > 0 and self.d > 0 and np.isfinite(self.d)):
            raise ValueError("I0, a and d must be positive and finite")
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @property
    def family(self):
        return "classic_quadratic"

    def amplitude(self, r):
        r2 = _sqnorm(np.asarray(r, dtype=float))
        return self.I0 * np.exp(-r2 / (2 * self.a**2)) * np.exp(-1j * self.alpha * r2)

    def correlation(self, r1, r2):
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        q1, q2 = _sqnorm(r1), _sqnorm(r2)
        env = -(q1 + q2) / (2 * self.a**2) - _sqnorm(r2 - r1) / (2 * self.d**2)
        return self.I0**2 * np.exp(env) * np.exp(1j * self.alpha * (q1 - q2))

    def axis_factor(self, x1, x2, axis):
        env = -(x1**2 + x2**2) / (2 * self.a**2) - (x2 - x1) ** 2 / (2 * self.d**2)
        return self.I0 ** (2.0 / 3.0) * np.exp(env) * np.exp(1j * self.alpha * (x1**2 - x2**2))


# ---------------------------------------------------------------------------
# Bochner representation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianWeight:
    """Gaussian weight ``p(v) = mass * N(mean, diag(std^2))`` over v-space."""

    mean: np.ndarray = field(default_factory=lambda: np.zeros(3))
    std: Union[float, np.ndarray] = 1.0
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mean", as_vec3(self.mean).copy())
        std = np.broadcast_to(np.asarray(self.std, dtype=float), (3,)).copy()
        if np.any(std < 0) or not (self.mass >= 0):
            raise ValueError("std and mass must be nonnegative")
        object.__setattr__(self, "std", std)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        z = (v - self.mean) / self.std
        norm = np.prod(np.sqrt(2 * np.pi) * self.std)
        return self.mass * np.exp(-0.5 * np.sum(z * z, axis=-1)) / norm

    def nodes(self, n, rule="hermite", extent=5.0):
        """Product-rule nodes ``v_j`` and weights ``w_j ~ p(v_j) dv``.

        ``rule="hermite"`` integrates Gaussian-weighted polynomials exactly;
        ``rule="trapezoid"`` uses a uniform grid over ``mean +- extent * std``.
        """
        if rule == "hermite":
            x, w = roots_hermitenorm(n)
            w = w / np.sqrt(2 * np.pi)
        elif rule == "trapezoid":
            x = np.linspace(-extent, extent, n)
            w = np.exp(-0.5 * x**2) / np.sqrt(2 * np.pi) * (x[1] - x[0])
            w[[0, -1]] *= 0.5
        else:
            raise ValueError(f"unknown rule {rule!r}")
        axes, weights = [], []
        for m, s in zip(self.mean, self.std):
            if s == 0:
                axes.append(np.array([m]))
                weights.append(np.array([1.0]))
            else:
                axes.append(m + s * x)
                weights.append(w)
        return _product_grid(axes, weights, self.mass)


@dataclass(frozen=True)
class TabulatedWeight:
    """Weight tabulated on a rectilinear v-grid; integrated with the trapezoid rule."""

    axes: tuple
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(ax, dtype=float) for ax in self.axes)
        values = np.asarray(self.values, dtype=float)
        if len(axes) != 3 or values.shape != tuple(len(ax) for ax in axes):
            raise ValueError("values must have shape (len(vx), len(vy), len(vz))")
        if not np.all(np.isfinite(values)):
            raise NonIntegrable("tabulated weight has non-finite entries")
        if np.any(values < 0):
            raise ValueError("weight function must be nonnegative")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)
        if not np.isfinite(self.mass) or self.mass <= 0:
            raise NonIntegrable("tabulated weight has no finite positive mass")

    @cached_property
    def _trapezoid(self):
        ws = []
        for ax in self.axes:
            if len(ax) == 1:
                ws.append(np.ones(1))
                continue
            h = np.diff(ax)
            w = np.zeros_like(ax)
            w[:-1] += h / 2
            w[1:] += h / 2
            ws.append(w)
        return ws

    @property
    def mass(self):
        wx, wy, wz = self._trapezoid
        return float(np.einsum("i,j,k,ijk->", wx, wy, wz, self.values))

    def nodes(self, n=None, rule="trapezoid", extent=None):
        v, w = _product_grid(self.axes, self._trapezoid, 1.0)
        return v, w * self.values.ravel()


def _product_grid(axes, weights, scale):
    grids = np.meshgrid(*axes, indexing="ij")
    v = np.stack([g.ravel() for g in grids], axis=-1)
    wg = np.meshgrid(*weights, indexing="ij")
    w = scale * (wg[0] * wg[1] * wg[2]).ravel()
    return v, w


@dataclass(frozen=True)
class GaussianAmplitude:
    """``a(r) = I0 exp(-r^2/2a^2) exp(-i lin.r) exp(-i quad r^2)``."""

    I0: float = 1.0
    a: float = 1.0
    linear_phase: np.ndarray = field(default_factory=lambda: np.zeros(3))
    quadratic_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "linear_phase", as_vec3(self.linear_phase).copy())

    @property
    def length_scale(self):
        return self.a

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        q = _sqnorm(r)
        phase = r @ self.linear_phase + self.quadratic_phase * q
        return self.I0 * np.exp(-q / (2 * self.a**2)) * np.exp(-1j * phase)

    def axis_value(self, x, axis):
        phase = self.linear_phase[axis] * x + self.quadratic_phase * x**2
        return self.I0 ** (1.0 / 3.0) * np.exp(-(x**2) / (2 * self.a**2)) * np.exp(-1j * phase)


@dataclass(frozen=True)
class SchellKernel:
    """``H(r, v) = a(r) exp(-2 pi i r.v)``."""

    amplitude: Callable

    def __call__(self, r, v):
        r = np.asarray(r, dtype=float)
        return self.amplitude(r)[:, None] * np.exp(-1j * TWO_PI * (r @ np.asarray(v).T))


@dataclass(frozen=True)
class EvenCosineKernel:
    """``H(r, v) = a(r) cos(2 pi r.v)``; realizations are even when ``a`` is."""

    amplitude: Callable

    def __call__(self, r, v):
        r = np.asarray(r, dtype=float)
        return self.amplitude(r)[:, None] * np.cos(TWO_PI * (r @ np.asarray(v).T))


@dataclass(frozen=True)
class SampledKernel:
    """User kernel: ``func(r, v)`` broadcasting over ``r[:, None, :]`` and ``v[None, :, :]``."""

    func: Callable
    length_scale: float = 1.0

    def __call__(self, r, v):
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.asarray(self.func(r[:, None, :], v[None, :, :]), dtype=complex)


SYMMETRY_CLASSES = ("PT", "classic", "generic")


@dataclass(frozen=True)
class BochnerModel:
    """Correlation ``C(r1, r2) = sum_j w_j H*(r1, v_j) H(r2, v_j)`` on a discrete v-grid.

    A ``symmetry_class`` of ``"PT"`` is checked on construction: the kernel
    must satisfy ``H*(-r, v) = H(r, v)`` on the v-grid.
    """

    weight: Union[GaussianWeight, TabulatedWeight]
    kernel: Union[SchellKernel, EvenCosineKernel, SampledKernel]
    symmetry_class: str = "generic"
    nodes_per_axis: int = 17
    rule: str = "hermite"

    def __post_init__(self):
        if self.symmetry_class not in SYMMETRY_CLASSES:
            raise ValueError(f"symmetry_class must be one of {SYMMETRY_CLASSES}")
        _, w = self.grid
        if np.any(w < 0):
            raise ValueError("weight function must be nonnegative on the v-grid")
        if self.symmetry_class == "PT":
            violation = kernel_pt_violation(self)
            if violation > 1e-12:
                raise ValueError(f"kernel is not PT-symmetric (violation {violation:.3g})")

    @property
    def family(self):
        return "bochner"

    @cached_property
    def grid(self):
        return self.weight.nodes(self.nodes_per_axis, rule=self.rule)

    @property
    def length_scale(self):
        amp = getattr(self.kernel, "amplitude", None)
        return getattr(amp, "length_scale", getattr(self.kernel, "length_scale", 1.0))

    def kernel_matrix(self, r):
        """``H(r_m, v_j)`` for flattened points ``r``, shape ``(M, J)``."""
        v, _ = self.grid
        return self.kernel(np.reshape(r, (-1, 3)), v)

    def correlation(self, r1, r2):
        r1, r2 = np.broadcast_arrays(np.asarray(r1, dtype=float), np.asarray(r2, dtype=float))
        _, w = self.grid
        h1 = self.kernel_matrix(r1)
        h2 = self.kernel_matrix(r2)
        c = np.sum(w * (np.conj(h1) * h2), axis=-1)
        return c.reshape(r1.shape[:-1])


def kernel_pt_violation(model, points=None):
    """Max of ``|H*(-r, v) - H(r, v)|`` relative to ``max |H|`` over probe points."""
    if points is None:
        rng = np.random.default_rng(0)
        points = rng.uniform(-2, 2, size=(16, 3)) * model.length_scale
    h = model.kernel_matrix(points)
    hm = model.kernel_matrix(-np.asarray(points))
    scale = max(np.max(np.abs(h)), np.finfo(float).tiny)
    return float(np.max(np.abs(np.conj(hm) - h)) / scale)


def bochner_model(model, nodes_per_axis=17, kernel="schell", rule="hermite"):
    """Bochner representation of a Gaussian Schell-model medium.

    ``kernel="schell"`` reproduces the model's correlation up to the v-grid
    discretization. ``kernel="even_cosine"`` (classic family only) gives a
    different, realization-even classic medium with the same amplitude and weight.
    """
    if isinstance(model, PtSchellLinear):
        if kernel != "schell":
            raise ValueError("PT models use the Schell kernel")
        amp = GaussianAmplitude(model.I0, model.a, linear_phase=model.alpha)
        std = 0.0 if model.deterministic else 1.0 / (TWO_PI * model.d)
        weight = GaussianWeight(mean=model.beta / TWO_PI, std=std)
        return BochnerModel(weight, SchellKernel(amp), "PT", nodes_per_axis, rule)
    if isinstance(model, ClassicQuadratic):
        amp = GaussianAmplitude(model.I0, model.a, quadratic_phase=model.alpha)
        weight = GaussianWeight(std=1.0 / (TWO_PI * model.d))
        kern = {"schell": SchellKernel, "even_cosine": EvenCosineKernel}[kernel](amp)
        return BochnerModel(weight, kern, "classic", nodes_per_axis, rule)
    raise TypeError(f"no Bochner representation for {type(model).__name__}")


# ---------------------------------------------------------------------------
# Correlation algebra
# ---------------------------------------------------------------------------

PROVENANCES = ("closed_form", "quadrature", "ensemble")


@dataclass(frozen=True)
class CorrelationValue:
    value: complex
    provenance: str
    stderr: Optional[float] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        if (self.stderr is not None) != (self.provenance == "ensemble"):
            raise ValueError("stderr is required for, and only for, ensemble values")


def correlation(model, r1, r2):
    """``C(r1, r2) = <F*(r1) F(r2)>`` for any medium model (vectorized)."""
    return model.correlation(r1, r2)


def correlation_value(model, r1, r2):
    """Scalar :class:`CorrelationValue` tagged with how it was obtained."""
    value = complex(model.correlation(r1, r2))
    provenance = "quadrature" if isinstance(model, BochnerModel) else "closed_form"
    return CorrelationValue(value, provenance)


def strength(model, r):
    """``I(r) = C(r, r)``, real and even."""
    return np.real(model.correlation(r, r))


def anti_strength(model, r):
    """``N(r) = C(-r, r) = <F(r)^2>``."""
    r = np.asarray(r, dtype=float)
    return model.correlation(-r, r)


def degree_of_potential_correlation(model, r1, r2):
    """``mu = C(r1, r2) / sqrt(I(r1) I(r2))``."""
    i1 = strength(model, r1)
    i2 = strength(model, r2)
    if np.any(np.abs(i1) < ZERO_STRENGTH) or np.any(np.abs(i2) < ZERO_STRENGTH):
        raise ZeroStrength("strength underflows at a requested point")
    # sqrt(I^2) can differ from I in the last bit; keep mu(r, r) = 1 exact
    den = np.where(i1 == i2, i1, np.sqrt(i1 * i2))
    c = np.asarray(model.correlation(r1, r2), dtype=complex)
    # componentwise: complex-by-complex division is not exact even for real divisors
    return c.real / den + 1j * (c.imag / den)


def g_from_p(weight, r_d):
    """``g(r_d) = integral sqrt(p(v)) exp(-2 pi i v.r_d) d^3v``.

    Analytic for :class:`GaussianWeight`, product trapezoid for tabulated weights.
    The self-convolution ``g * g`` equals :func:`mu_from_p`.
    """
    r_d = as_vec3(r_d)
    if isinstance(weight, GaussianWeight):
        s, m = weight.std, weight.mean
        if np.any(s == 0):
            raise NonIntegrable("square root of a point mass is not integrable")
        per_axis = (2 * np.pi * s**2) ** -0.25 * 2 * s * np.sqrt(np.pi)
        expo = -1j * TWO_PI * (r_d @ m) - 4 * np.pi**2 * ((r_d**2) @ (s**2))
        return np.sqrt(weight.mass) * np.prod(per_axis) * np.exp(expo)
    v, w = _product_grid(weight.axes, weight._trapezoid, 1.0)
    root = np.sqrt(weight.values.ravel())
    if not np.all(np.isfinite(root)):
        raise NonIntegrable("square root of the weight is not finite")
    g = np.exp(-1j * TWO_PI * (np.reshape(r_d, (-1, 3)) @ v.T)) @ (w * root)
    return g.reshape(r_d.shape[:-1])


def mu_from_p(weight, r_d):
    """Fourier transform of the weight, ``mu(r_d) = integral p(v) exp(-2 pi i v.r_d) d^3v``."""
    r_d = as_vec3(r_d)
    if isinstance(weight, GaussianWeight):
        expo = -1j * TWO_PI * (r_d @ weight.mean) - 2 * np.pi**2 * ((r_d**2) @ (weight.std**2))
        return weight.mass * np.exp(expo)
    v, w = weight.nodes()
    mu = np.exp(-1j * TWO_PI * (np.reshape(r_d, (-1, 3)) @ v.T)) @ w
    return mu.reshape(r_d.shape[:-1])


# ---------------------------------------------------------------------------
# Symmetry classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryReport:
    """Symmetry verdicts. Realization-level entries are ``None`` when no sampler was run."""

    correlation_classic: bool
    correlation_pt: bool
    classic_residual: float
    pt_residual: float
    realization_classic: Optional[bool] = None
    realization_pt: Optional[bool] = None

    @property
    def symmetry(self):
        classic = self.correlation_classic or bool(self.realization_classic)
        pt = self.correlation_pt or bool(self.realization_pt)
        if classic and pt:
            return "classic+PT"
        return "classic" if classic else "PT" if pt else "neither"

    @property
    def level(self):
        corr = self.correlation_classic or self.correlation_pt
        real = bool(self.realization_classic) or bool(self.realization_pt)
        if corr and real:
            return "both"
        return "realization" if real else "correlation" if corr else None


def classify_symmetry(model, points, tol=SYMMETRY_TOL, evenness=None):
    """Classify the correlation as classic, PT, both or neither.

    Every ordered pair of ``points`` is probed. ``evenness`` may be a report
    from :func:`ptscatter.oracle.realization_evenness_check` to add the
    realization-level verdict.
    """
    pts = np.reshape(np.asarray(points, dtype=float), (-1, 3))
    if len(pts) == 0:
        raise ValueError("probe grid must be nonempty")
    r1 = np.repeat(pts, len(pts), axis=0)
    r2 = np.tile(pts, (len(pts), 1))
    c = model.correlation(r1, r2)
    cm = model.correlation(-r1, -r2)
    scale = np.maximum(np.abs(c), np.finfo(float).tiny)
    classic_res = float(np.max(np.abs(cm - c) / scale))
    pt_res = float(np.max(np.abs(np.conj(cm) - c) / scale))
    real_classic = real_pt = None
    if evenness is not None:
        ok = evenness.max_violation <= max(tol, 1e-12)
        real_classic = ok if evenness.symmetry == "classic" else None
        real_pt = ok if evenness.symmetry == "PT" else None
    return SymmetryReport(classic_res <= tol, pt_res <= tol, classic_res, pt_res, real_classic, real_pt)
