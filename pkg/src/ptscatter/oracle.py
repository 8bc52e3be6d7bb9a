"""Independent ground truth for the closed forms.

* :func:`ctilde_quadrature` integrates the six-dimensional Born integral
  numerically, never touching the closed-form expressions in :mod:`ptscatter.born`.
* :func:`sample_realization` synthesizes potential realizations from a
  :class:`~ptscatter.media.BochnerModel`::

      F(r) = sum_j sqrt(w_j) xi_j H(r, v_j)

  with independent standard normal **real** deviates ``xi_j``. Real deviates
  are essential: with a PT kernel every realization then satisfies
  ``F*(-r) = F(r)`` exactly, and ``<F^2>`` (the anti-strength) is nonzero.
  Circular complex deviates would make ``<F^2>`` vanish identically. The
  deviates are one valid realization law among many; only the second-order
  statistics are prescribed.
* :func:`estimate_correlation` averages ``F*(r1) F(r2)`` over an ensemble.

Seeding: realization ``i`` of master seed ``s`` draws its deviates from
``SeedSequence(s, spawn_key=(i,))``, so any realization can be regenerated
alone and results do not depend on how batches are scheduled.
"""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy.special import roots_legendre

from .geometry import as_vec3
from .media import (
    BochnerModel,
    ClassicQuadratic,
    EvenCosineKernel,
    GaussianAmplitude,
    PtSchellLinear,
    SchellKernel,
)

TWO_PI = 2.0 * np.pi
CONVERGENCE_LIMIT = 1e-4
TENSOR_NODE_CAP = 2_000_000
GENERIC_NODE_CAP = 130**3


class NotConverged(ArithmeticError):
    """Quadrature refinement changed the result by more than the allowed limit."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature resolution.

    ``extent`` is the half-width of the integration box in units of the
    envelope width along each integration coordinate.
    """

    nodes_per_axis: int = 128
    extent: float = 9.0
    rule: str = "gauss"

    def __post_init__(self):
        if self.nodes_per_axis < 8:
            raise ValueError("nodes_per_axis must be at least 8")
        if self.extent < 5:
            raise ValueError("extent must be at least 5")
        if self.rule not in ("gauss", "trapezoid"):
            raise ValueError("rule must be 'gauss' or 'trapezoid'")

    def refined(self):
        return QuadratureSpec(2 * self.nodes_per_axis, self.extent, self.rule)


def _rule(n, rule):
    """Nodes and weights on [-1, 1]."""
    if rule == "gauss":
        return roots_legendre(n)
    x = np.linspace(-1.0, 1.0, n)
    w = np.full(n, x[1] - x[0])
    w[[0, -1]] *= 0.5
    return x, w


# ---------------------------------------------------------------------------
# Born-integral quadrature
# ---------------------------------------------------------------------------


def _schell_axis_integrals(model, K1, K2, spec):
    """Per-axis 2-D integrals for Schell-factorized Gaussian models.

    Each axis is integrated in rotated coordinates ``s = (x1 + x2)/sqrt 2``,
    ``t = (x2 - x1)/sqrt 2`` where the Gaussian envelope is diagonal with widths
    ``a`` and ``(1/a^2 + 2/d^2)^(-1/2)``.
    """
    a, d = model.a, model.d
    ws = a
    wt = 1.0 / np.sqrt(1.0 / a**2 + 2.0 / d**2)
    x, w = _rule(spec.nodes_per_axis, spec.rule)
    s = spec.extent * ws * x
    t = spec.extent * wt * x
    jac = spec.extent**2 * ws * wt
    x1 = (s[:, None] - t[None, :]) / np.sqrt(2)
    x2 = (s[:, None] + t[None, :]) / np.sqrt(2)
    out = np.ones(K1.shape[0], dtype=complex)
    for axis in range(3):
        f = model.axis_factor(x1, x2, axis) * (jac * w[:, None] * w[None, :])
        # exp(i (K1 x1 - K2 x2)) separates into s- and t-dependent factors
        p = (K1[:, axis] - K2[:, axis]) / np.sqrt(2)
        q = (K1[:, axis] + K2[:, axis]) / np.sqrt(2)
        es = np.exp(1j * p[:, None] * s[None, :])
        et = np.exp(-1j * q[:, None] * t[None, :])
        out *= np.einsum("ps,st,pt->p", es, f, et)
    return out


def _kernel_exponentials(kernel):
    """Write ``H = a(r) sum_c coef_c exp(i sign_c 2 pi r.v)``, or ``None``."""
    if not isinstance(getattr(kernel, "amplitude", None), GaussianAmplitude):
        return None
    if isinstance(kernel, SchellKernel):
        return [(1.0, -1.0)]
    if isinstance(kernel, EvenCosineKernel):
        return [(0.5, -1.0), (0.5, 1.0)]
    return None


def _bochner_separable(model, K1, K2, spec, terms, chunk=4):
    amp = model.kernel.amplitude
    v, w = model.grid
    x, wx = _rule(spec.nodes_per_axis, spec.rule)
    xs = spec.extent * amp.a * x
    wx = spec.extent * amp.a * wx
    kv = TWO_PI * v
    total = np.zeros(K1.shape[0], dtype=complex)
    for lo in range(0, K1.shape[0], chunk):
        k1, k2 = K1[lo : lo + chunk], K2[lo : lo + chunk]
        for c1, s1 in terms:
            for c2, s2 in terms:
                prod = np.ones((len(k1), len(w)), dtype=complex)
                for axis in range(3):
                    av = amp.axis_value(xs, axis)
                    # conj(H(x1)) exp(i K1 x1) and H(x2) exp(-i K2 x2), integrated over x
                    g1 = (k1[:, axis, None] - s1 * kv[None, :, axis])[..., None] * xs
                    g2 = (k2[:, axis, None] - s2 * kv[None, :, axis])[..., None] * xs
                    prod *= (np.exp(1j * g1) @ (np.conj(av) * wx)) * (np.exp(-1j * g2) @ (av * wx))
                total[lo : lo + chunk] += c1 * c2 * (prod @ w)
    return total


def _generic_nodes(n):
    if n**3 > GENERIC_NODE_CAP:
        raise ValueError(f"nodes_per_axis={n} exceeds the generic-kernel cap of {round(GENERIC_NODE_CAP ** (1 / 3))}")
    return n


def _bochner_generic(model, K1, K2, spec, block=4096):
    """Any Bochner kernel: ``sum_j w_j conj(Ht_j(-K1)) Ht_j(K2)`` with 3-D transforms per node."""
    n = _generic_nodes(spec.nodes_per_axis)
    x, w = _rule(n, spec.rule)
    L = spec.extent * model.length_scale
    x, w = L * x, L * w
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    wg = np.einsum("i,j,k->ijk", w, w, w).ravel()
    _, wv = model.grid
    a1 = np.zeros((len(K1), len(wv)), dtype=complex)
    a2 = np.zeros((len(K2), len(wv)), dtype=complex)
    for lo in range(0, len(grid), block):
        r, wr = grid[lo : lo + block], wg[lo : lo + block]
        h = model.kernel_matrix(r)
        a1 += (np.exp(1j * K1 @ r.T) * wr) @ np.conj(h)
        a2 += (np.exp(-1j * K2 @ r.T) * wr) @ h
    return np.sum(wv * a1 * a2, axis=1)


def _tensor_6d(model, K1, K2, spec):
    """Plain 6-D product rule for callables without a Bochner form (small specs only)."""
    n = spec.nodes_per_axis
    if n**6 > TENSOR_NODE_CAP:
        raise ValueError(f"nodes_per_axis={n} exceeds the 6-D cap of {int(TENSOR_NODE_CAP ** (1 / 6))}")
    x, w = _rule(n, spec.rule)
    L = spec.extent * getattr(model, "length_scale", 1.0)
    x, w = L * x, L * w
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    wg = np.einsum("i,j,k->ijk", w, w, w).ravel()
    c = model.correlation(grid[:, None, :], grid[None, :, :]) * wg[:, None] * wg[None, :]
    e1 = np.exp(1j * K1 @ grid.T)
    e2 = np.exp(-1j * K2 @ grid.T)
    return np.einsum("pi,ij,pj->p", e1, c, e2)


def _generic_path(model):
    if isinstance(model, (PtSchellLinear, ClassicQuadratic)) or hasattr(model, "axis_factor"):
        return False
    return not (isinstance(model, BochnerModel) and _kernel_exponentials(model.kernel) is not None)


def _quadrature_once(model, K1, K2, spec):
    if isinstance(model, (PtSchellLinear, ClassicQuadratic)) or hasattr(model, "axis_factor"):
        return _schell_axis_integrals(model, K1, K2, spec)
    if isinstance(model, BochnerModel):
        terms = _kernel_exponentials(model.kernel)
        if terms is not None:
            return _bochner_separable(model, K1, K2, spec, terms)
        return _bochner_generic(model, K1, K2, spec)
    return _tensor_6d(model, K1, K2, spec)


def ctilde_quadrature(model, K1, K2, spec=None, check=True):
    """Numerically integrate ``C(r1, r2) exp(-i (K2.r2 - K1.r1))`` over six dimensions.

    Parameters
    ----------
    model
        Any medium model. Models exposing ``axis_factor`` (the Gaussian Schell
        families) are integrated as a product of per-axis 2-D integrals;
        Bochner models with Gaussian Schell or cosine kernels as a sum over
        v-nodes of per-axis 1-D integrals; other Bochner kernels as a sum over
        v-nodes of 3-D transforms (at most 130 nodes per axis); anything else
        with a correlation method on a 6-D product grid (at most 11 nodes per axis).
    K1, K2 : array_like, shape (..., 3)
        Momentum-transfer vectors.
    spec : QuadratureSpec, optional
        Defaults to 128 nodes per axis; generic kernels need a smaller spec.
    check : bool
        Also evaluate at a second resolution and raise :class:`NotConverged`
        if the two differ by more than ``1e-4`` relative. Separable paths
        compare against doubled nodes and return the refined value; the
        capped generic paths compare against three quarters of the nodes
        (``>= 16`` needed) and return the value at ``spec``.
    """
    spec = spec or QuadratureSpec()
    K1, K2 = np.broadcast_arrays(as_vec3(K1), as_vec3(K2))
    shape = K1.shape[:-1]
    K1 = K1.reshape(-1, 3)
    K2 = K2.reshape(-1, 3)
    value = _quadrature_once(model, K1, K2, spec)
    if check:
        if _generic_path(model):
            if spec.nodes_per_axis < 16:
                raise ValueError("checked generic quadrature needs nodes_per_axis >= 16")
            fine = value
            value = _quadrature_once(model, K1, K2, QuadratureSpec(3 * spec.nodes_per_axis // 4, spec.extent, spec.rule))
        else:
            fine = _quadrature_once(model, K1, K2, spec.refined())
        scale = np.maximum(np.abs(fine), np.finfo(float).tiny)
        worst = np.max(np.abs(fine - value) / scale)
        if worst > CONVERGENCE_LIMIT:
            raise NotConverged(f"changing the node count altered the result by {worst:.3g} (relative)")
        value = fine
    return value.reshape(shape) if shape else value[0]


# ---------------------------------------------------------------------------
# Realizations and ensembles
# ---------------------------------------------------------------------------


def _bochner(model, nodes_per_axis=17):
    if isinstance(model, BochnerModel):
        return model
    from .media import bochner_model

    return bochner_model(model, nodes_per_axis)


def realization_rng(seed, index):
    """Generator for realization ``index`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _deviates(seed, start, count, size):
    return np.stack([realization_rng(seed, i).standard_normal(size) for i in range(start, start + count)])


@dataclass(frozen=True)
class RealizationField:
    """One sampled potential realization ``F(r)`` on a set of points."""

    points: np.ndarray
    values: np.ndarray
    seed: int
    index: int
    model: Any

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("realization contains non-finite values")


def sample_realization(model, points, seed, index=0):
    """Draw realization ``index`` of master ``seed`` at ``points``, shape (M, 3)."""
    model = _bochner(model)
    points = np.reshape(np.asarray(points, dtype=float), (-1, 3))
    _, w = model.grid
    xi = realization_rng(seed, index).standard_normal(len(w))
    values = model.kernel_matrix(points) @ (np.sqrt(w) * xi)
    return RealizationField(points, values, seed, index, model)


def sample_realizations(model, points, seed, n, start=0):
    """Realizations ``start .. start + n - 1`` at ``points`` as an ``(n, M)`` array."""
    model = _bochner(model)
    points = np.reshape(np.asarray(points, dtype=float), (-1, 3))
    _, w = model.grid
    h = model.kernel_matrix(points)
    xi = _deviates(seed, start, n, len(w)) * np.sqrt(w)
    return xi @ h.T


@dataclass(frozen=True)
class EnsembleEstimate:
    """Sample mean with standard error ``max(std(Re), std(Im)) / sqrt(n)``."""

    mean: Any
    stderr: Any
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("an ensemble estimate needs at least two samples")

    def as_correlation_value(self):
        from .media import CorrelationValue

        return CorrelationValue(complex(self.mean), "ensemble", float(self.stderr))


def _moments(x):
    """Count, mean and centered sum of squares of real and imaginary parts."""
    re, im = x.real, x.imag
    mr, mi = re.mean(axis=0), im.mean(axis=0)
    return len(x), mr, mi, ((re - mr) ** 2).sum(axis=0), ((im - mi) ** 2).sum(axis=0)


def _merge(m1, m2):
    # Chan et al. pairwise update; applied in a fixed order
    n1, mr1, mi1, sr1, si1 = m1
    n2, mr2, mi2, sr2, si2 = m2
    n = n1 + n2
    dr, di = mr2 - mr1, mi2 - mi1
    return (
        n,
        mr1 + dr * n2 / n,
        mi1 + di * n2 / n,
        sr1 + sr2 + dr**2 * n1 * n2 / n,
        si1 + si2 + di**2 * n1 * n2 / n,
    )


def _ensemble(model, r1, r2, n, seed, batch, workers):
    model = _bochner(model)
    r1 = np.reshape(np.asarray(r1, dtype=float), (-1, 3))
    r2 = np.reshape(np.asarray(r2, dtype=float), (-1, 3))
    npair = len(r1)
    _, w = model.grid
    h = model.kernel_matrix(np.concatenate([r1, r2])).T
    sw = np.sqrt(w)

    def run(start):
        count = min(batch, n - start)
        f = (_deviates(seed, start, count, len(w)) * sw) @ h
        return _moments(np.conj(f[:, :npair]) * f[:, npair:])

    starts = range(0, n, batch)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    acc = parts[0]
    for part in parts[1:]:
        acc = _merge(acc, part)
    _, mr, mi, sr, si = acc
    stderr = np.sqrt(np.maximum(sr, si) / (n - 1) / n)
    return mr + 1j * mi, stderr


def estimate_correlation(model, r1, r2, n, seed, batch=1000, workers=1):
    """Ensemble estimate of ``<F*(r1) F(r2)>`` over ``n`` realizations.

    ``r1`` and ``r2`` may hold many point pairs (shape ``(P, 3)``); the same
    realizations serve all pairs. Results are identical for any ``workers``.
    """
    if n < 100:
        raise ValueError("ensemble estimates need n >= 100")
    r1 = np.asarray(r1, dtype=float)
    mean, stderr = _ensemble(model, r1, r2, n, seed, batch, workers)
    if r1.ndim == 1:
        return EnsembleEstimate(complex(mean[0]), float(stderr[0]), n)
    return EnsembleEstimate(mean, stderr, n)


@dataclass(frozen=True)
class EvennessReport:
    symmetry: str
    max_violation: float
    n: int


def realization_evenness_check(model, grid, n, seed=0):
    """Largest per-realization violation of the realization-level symmetry.

    PT kernels are tested for ``F*(-r) = F(r)``, all others for
    ``F(-r) = F(r)``; violations are relative to ``max |F|`` of each realization.
    """
    model = _bochner(model)
    grid = np.reshape(np.asarray(grid, dtype=float), (-1, 3))
    m = len(grid)
    f = sample_realizations(model, np.concatenate([grid, -grid]), seed, n)
    plus, minus = f[:, :m], f[:, m:]
    pt = model.symmetry_class == "PT"
    diff = np.abs((np.conj(minus) if pt else minus) - plus)
    scale = np.maximum(np.max(np.abs(plus), axis=1), np.finfo(float).tiny)
    return EvennessReport("PT" if pt else "classic", float(np.max(np.max(diff, axis=1) / scale)), n)


# ---------------------------------------------------------------------------
# Positive semidefiniteness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsdReport:
    min_eigenvalue: float
    trace: float
    size: int
    tol: float

    @property
    def passed(self):
        return self.min_eigenvalue >= -self.tol * self.trace / self.size


def gram_psd_check(model, points, tol=1e-10):
    """Minimum eigenvalue of the Gram matrix ``G_ij = C(r_i, r_j)``.

    ``model`` may be a medium model or a plain callable ``C(r1, r2)``.
    """
    points = np.reshape(np.asarray(points, dtype=float), (-1, 3))
    if len(points) > 200:
        raise ValueError("gram_psd_check is limited to 200 points")
    corr = model.correlation if hasattr(model, "correlation") else model
    g = corr(points[:, None, :], points[None, :, :])
    g = 0.5 * (g + np.conj(g.T))
    eig = np.linalg.eigvalsh(g)
    return PsdReport(float(eig[0]), float(np.real(np.trace(g))), len(points), tol)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def write_realization_csv(field, path, metadata: Optional[dict] = None):
    """Write ``x, y, z, re_F, im_F`` rows; ``metadata`` goes into a leading comment."""
    meta = {"seed": int(field.seed), "index": int(field.index)}
    meta.update(metadata or {})
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "z", "re_F", "im_F"])
        for p, v in zip(field.points, field.values):
            writer.writerow([format(c, ".17g") for c in (*p, v.real, v.imag)])
