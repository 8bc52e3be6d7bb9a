import numpy as np
import pytest
import sympy as sp
from scipy.special import roots_legendre

from ptscatter.media import (
    BochnerModel,
    ClassicQuadratic,
    CorrelationValue,
    EvenCosineKernel,
    GaussianAmplitude,
    GaussianWeight,
    NonIntegrable,
    PtSchellLinear,
    RefractiveIndexSample,
    SampledKernel,
    SchellKernel,
    TabulatedWeight,
    ZeroStrength,
    anti_strength,
    bochner_model,
    classify_symmetry,
    correlation,
    correlation_value,
    degree_of_potential_correlation,
    g_from_p,
    mu_from_p,
    potential_from_index,
    strength,
)

PT = PtSchellLinear(1.3, 1.0, 0.7, [0.4, -0.3, 0.2], [-0.1, 0.5, 0.3])
PT0 = PtSchellLinear(1.3, 1.0, 0.7)
CL = ClassicQuadratic(0.8, 1.2, 0.9, 2.0)
MODELS = {
    "pt": PT,
    "pt_gamma0": PT0,
    "classic": CL,
    "pt_bochner": bochner_model(PT, 9),
    "classic_bochner": bochner_model(CL, 9),
    "classic_even_cosine": bochner_model(CL, 9, kernel="even_cosine"),
}


def random_points(n, seed=0, scale=1.0):
    return np.random.default_rng(seed).uniform(-scale, scale, size=(n, 3))


# --- scattering potential --------------------------------------------------


def test_vacuum_has_zero_potential():
    assert potential_from_index(2.0, RefractiveIndexSample(1.0, 0.0)) == 0


def test_lossless_even_index_gives_real_even_potential():
    half = np.linspace(0.05, 2, 20)
    x = np.concatenate([-half[::-1], [0.0], half])
    nr = 1.5 + 0.2 * np.cos(x)
    f = potential_from_index(3.0, nr + 0j)
    assert np.all(f.imag == 0)
    np.testing.assert_array_equal(f, f[::-1])


def test_potential_formula():
    k, n = 2.5, complex(1.4, 0.03)
    assert potential_from_index(k, n) == pytest.approx(k**2 / (4 * np.pi**2) * (n**2 - 1), rel=1e-15)
    with pytest.raises(ValueError):
        potential_from_index(0.0, n)


def test_imaginary_part_of_squared_potential_symbolic():
    # Im F^2 = (k^4 / 4 pi^4) nr ni (nr^2 - ni^2 - 1), pointwise and hence on average
    k, nr, ni = sp.symbols("k n_r n_i", real=True)
    F = k**2 / (4 * sp.pi**2) * ((nr + sp.I * ni) ** 2 - 1)
    lhs = sp.im(sp.expand(F**2))
    rhs = k**4 / (4 * sp.pi**4) * nr * ni * (nr**2 - ni**2 - 1)
    assert sp.simplify(lhs - rhs) == 0


def test_imaginary_part_of_squared_potential_numeric_ensemble():
    rng = np.random.default_rng(3)
    nr = 1.3 + 0.1 * rng.standard_normal(1000)
    ni = 0.05 * rng.standard_normal(1000)
    k = 1.7
    f = potential_from_index(k, nr + 1j * ni)
    expected = k**4 / (4 * np.pi**4) * np.mean(nr * ni * (nr**2 - ni**2 - 1))
    assert np.mean(f**2).imag == pytest.approx(expected, rel=1e-10)


# --- model construction ------------------------------------------------------


@pytest.mark.parametrize("kw", [{"I0": 0}, {"a": -1}, {"d": 0}, {"d": np.inf}])
def test_pt_rejects_invalid_parameters(kw):
    with pytest.raises(ValueError):
        PtSchellLinear(**kw)


def test_pt_gamma_and_deterministic_flag():
    np.testing.assert_allclose(PT.gamma, [0.3, 0.2, 0.5])
    m = PtSchellLinear(1.0, 1.0, 5.0, deterministic=True)
    assert m.d == np.inf
    assert PT.with_gamma_zero().gamma.tolist() == [0, 0, 0]


@pytest.mark.parametrize("kw", [{"I0": -1}, {"a": 0}, {"d": -2}])
def test_classic_rejects_invalid_parameters(kw):
    with pytest.raises(ValueError):
        ClassicQuadratic(**kw)


# --- correlation ---------------------------------------------------------------


def test_pt_correlation_formula():
    r1, r2 = random_points(50, 1), random_points(50, 2)
    rd = r2 - r1
    env = -(np.sum(r1**2, -1) + np.sum(r2**2, -1)) / (2 * PT.a**2) - np.sum(rd**2, -1) / (2 * PT.d**2)
    expected = PT.I0**2 * np.exp(env) * np.exp(-1j * rd @ PT.gamma)
    np.testing.assert_allclose(correlation(PT, r1, r2), expected, rtol=1e-14)


def test_classic_correlation_formula():
    r1, r2 = random_points(50, 1), random_points(50, 2)
    q1, q2 = np.sum(r1**2, -1), np.sum(r2**2, -1)
    env = -(q1 + q2) / (2 * CL.a**2) - np.sum((r2 - r1) ** 2, -1) / (2 * CL.d**2)
    expected = CL.I0**2 * np.exp(env) * np.exp(1j * CL.alpha * (q1 - q2))
    np.testing.assert_allclose(correlation(CL, r1, r2), expected, rtol=1e-14)


def test_pt_diagonal_is_real_positive():
    r = random_points(30, 4)
    c = correlation(PT, r, r)
    np.testing.assert_allclose(c, PT.I0**2 * np.exp(-np.sum(r**2, -1) / PT.a**2), rtol=1e-14)
    assert np.all(c.imag == 0) and np.all(c.real > 0)


def test_pt_symmetric_points_closed_form():
    r = random_points(30, 5)
    expected = PT.I0**2 * np.exp(-np.sum(r**2, -1) * (1 / PT.a**2 + 2 / PT.d**2)) * np.exp(-2j * r @ PT.gamma)
    np.testing.assert_allclose(correlation(PT, -r, r), expected, rtol=1e-14)
    np.testing.assert_allclose(anti_strength(PT, r), expected, rtol=1e-14)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_hermiticity(name):
    m = MODELS[name]
    r1, r2 = random_points(100, 6), random_points(100, 7)
    c12, c21 = m.correlation(r1, r2), m.correlation(r2, r1)
    tol = 0 if name in ("pt", "pt_gamma0", "classic") else 1e-12
    assert np.max(np.abs(c21 - np.conj(c12))) <= tol * np.max(np.abs(c12))


def test_correlation_value_provenance():
    v = correlation_value(PT, [0.1, 0, 0], [0, 0.2, 0])
    assert v.provenance == "closed_form" and v.stderr is None
    assert correlation_value(MODELS["pt_bochner"], [0.1, 0, 0], [0, 0.2, 0]).provenance == "quadrature"
    with pytest.raises(ValueError):
        CorrelationValue(1.0, "ensemble")
    with pytest.raises(ValueError):
        CorrelationValue(1.0, "closed_form", 0.1)
    with pytest.raises(ValueError):
        CorrelationValue(1.0, "guess")


def test_model_conditions_on_random_probes():
    r1, r2 = random_points(200, 8, 2), random_points(200, 9, 2)
    # PT condition and classic condition
    c, cm = PT.correlation(r1, r2), PT.correlation(-r1, -r2)
    assert np.max(np.abs(np.conj(cm) - c) / np.abs(c)) < 1e-12
    c, cm = CL.correlation(r1, r2), CL.correlation(-r1, -r2)
    assert np.max(np.abs(cm - c) / np.abs(c)) < 1e-12
    # derived swap identities
    np.testing.assert_allclose(CL.correlation(r2, r1), np.conj(CL.correlation(-r1, -r2)), rtol=1e-12)
    np.testing.assert_allclose(PT.correlation(r2, r1), PT.correlation(-r1, -r2), rtol=1e-12)


# --- strength, anti-strength, degree of correlation -------------------------------


def test_strength_at_origin_and_evenness():
    assert strength(PT, np.zeros(3)) == pytest.approx(PT.I0**2, rel=1e-15)
    r = random_points(100, 10, 2)
    for m in MODELS.values():
        np.testing.assert_allclose(strength(m, -r), strength(m, r), rtol=1e-12, atol=0)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_anti_strength_origin_is_real(name):
    assert abs(anti_strength(MODELS[name], np.zeros(3)).imag) <= 1e-15


def test_anti_strength_gamma_zero_is_real():
    assert np.all(anti_strength(PT0, random_points(50, 11, 2)).imag == 0)


def test_degree_of_correlation_examples():
    r = random_points(20, 12)
    np.testing.assert_array_equal(degree_of_potential_correlation(PT, r, r), np.ones(20))
    mu = degree_of_potential_correlation(PT, -r, r)
    np.testing.assert_allclose(mu, np.exp(-2 * np.sum(r**2, -1) / PT.d**2) * np.exp(-2j * r @ PT.gamma), rtol=1e-13)
    np.testing.assert_allclose(mu, anti_strength(PT, r) / strength(PT, r), rtol=1e-13)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_degree_of_correlation_bounded(name):
    m = MODELS[name]
    r1, r2 = random_points(10_000, 13, 1.5), random_points(10_000, 14, 1.5)
    assert np.max(np.abs(degree_of_potential_correlation(m, r1, r2))) <= 1 + 1e-9


def test_degree_of_correlation_underflow():
    with pytest.raises(ZeroStrength):
        degree_of_potential_correlation(PT, [40.0, 0, 0], [0, 0, 0])


def test_classic_schell_is_not_fully_correlated_at_symmetric_points():
    # only the correlation-level classic condition holds; mu(-r, r) = mu(2r) != 1
    r = np.array([0.5, 0.2, -0.1])
    mu = degree_of_potential_correlation(CL, -r, r)
    assert mu == pytest.approx(np.exp(-2 * r @ r / CL.d**2), rel=1e-13)
    assert abs(mu) < 1


def test_even_cosine_model_is_fully_correlated_at_symmetric_points():
    m = MODELS["classic_even_cosine"]
    r = random_points(20, 15)
    np.testing.assert_allclose(degree_of_potential_correlation(m, -r, r), 1, rtol=1e-13)


# --- Bochner construction ------------------------------------------------------------


@pytest.mark.parametrize("base", [PT, CL], ids=["pt", "classic"])
def test_bochner_reproduces_closed_form(base):
    m = bochner_model(base, 17)
    r1, r2 = random_points(200, 16), random_points(200, 17)
    exact = base.correlation(r1, r2)
    assert np.max(np.abs(m.correlation(r1, r2) - exact)) < 1e-6 * np.max(np.abs(exact))


def test_bochner_deterministic_pt_is_fully_coherent():
    base = PtSchellLinear(1.0, 1.0, 1.0, [0.2, 0.0, -0.4], [0.1, 0.1, 0.1], deterministic=True)
    m = bochner_model(base)
    assert len(m.grid[1]) == 1
    r1, r2 = random_points(20, 18), random_points(20, 19)
    np.testing.assert_allclose(m.correlation(r1, r2), base.correlation(r1, r2), rtol=1e-12)


def test_bochner_pt_class_checks_kernel():
    amp = GaussianAmplitude(1.0, 1.0, quadratic_phase=1.5)
    with pytest.raises(ValueError):
        BochnerModel(GaussianWeight(std=0.2), SchellKernel(amp), "PT")
    ok = BochnerModel(GaussianWeight(std=0.2), SchellKernel(GaussianAmplitude(1.0, 1.0, linear_phase=[1, 0, 0])), "PT")
    assert ok.symmetry_class == "PT"


def test_bochner_rejects_bad_inputs():
    with pytest.raises(ValueError):
        GaussianWeight(std=-1.0)
    with pytest.raises(ValueError):
        BochnerModel(GaussianWeight(), SchellKernel(GaussianAmplitude()), "chiral")
    with pytest.raises(TypeError):
        bochner_model(object())
    with pytest.raises(ValueError):
        bochner_model(PT, kernel="even_cosine")


def test_sampled_kernel_generic_model():
    def h(r, v):
        # r has shape (M, 1, 3), v has shape (1, J, 3)
        return np.exp(-0.5 * np.sum(r**2, -1)) * np.exp(-2j * np.pi * np.sum(r * v, -1))

    m = BochnerModel(GaussianWeight(std=0.3), SampledKernel(h), "generic", 9)
    ref = BochnerModel(GaussianWeight(std=0.3), SchellKernel(GaussianAmplitude()), "generic", 9)
    r1, r2 = random_points(10, 20), random_points(10, 21)
    np.testing.assert_allclose(m.correlation(r1, r2), ref.correlation(r1, r2), rtol=1e-12)


# --- tabulated weights and g -----------------------------------------------------------


def test_tabulated_weight_validation():
    ax = np.linspace(-1, 1, 5)
    with pytest.raises(NonIntegrable):
        TabulatedWeight((ax, ax, ax), np.full((5, 5, 5), np.inf))
    with pytest.raises(ValueError):
        TabulatedWeight((ax, ax, ax), -np.ones((5, 5, 5)))
    with pytest.raises(NonIntegrable):
        TabulatedWeight((ax, ax, ax), np.zeros((5, 5, 5)))
    with pytest.raises(ValueError):
        TabulatedWeight((ax, ax), np.ones((5, 5)))


def test_gaussian_point_mass_g_not_integrable():
    with pytest.raises(NonIntegrable):
        g_from_p(GaussianWeight(std=0.0), np.zeros(3))


def test_g_at_zero_lag():
    w = GaussianWeight(mean=[0.1, -0.2, 0.05], std=[0.3, 0.2, 0.25], mass=2.0)
    g0 = g_from_p(w, np.zeros(3))
    assert g0.imag == 0 and g0.real > 0
    # g(0) = integral of sqrt(p), which is analytic for a Gaussian
    s = np.array([0.3, 0.2, 0.25])
    expected = np.sqrt(2.0) * np.prod((2 * np.pi * s**2) ** -0.25 * np.sqrt(4 * np.pi * s**2))
    assert g0.real == pytest.approx(expected, rel=1e-14)


def test_g_self_convolution_matches_fourier_transform_of_p():
    w = GaussianWeight(mean=[0.1, -0.2, 0.05], std=[0.3, 0.2, 0.25], mass=2.0)
    x, wx = roots_legendre(48)
    L = 3.0
    x, wx = L * x, L * wx
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), -1).reshape(-1, 3)
    weights = np.einsum("i,j,k->ijk", wx, wx, wx).ravel()
    g = g_from_p(w, grid)
    for rd in [np.zeros(3), np.array([0.3, -0.4, 0.2]), np.array([1.0, 0.5, -0.7])]:
        conv = np.sum(weights * g * g_from_p(w, rd - grid))
        direct = mu_from_p(w, rd)
        analytic = 2.0 * np.exp(-2j * np.pi * rd @ w.mean - 2 * np.pi**2 * (rd**2) @ w.std**2)
        assert abs(conv - direct) < 1e-8 * abs(direct)
        assert direct == pytest.approx(analytic, rel=1e-14)
    assert mu_from_p(w, np.zeros(3)) == pytest.approx(w.mass, rel=1e-15)


def test_tabulated_weight_matches_gaussian():
    s = 0.3
    # sqrt(p) is sqrt(2) wider than p, so the table must reach further out
    ax = np.linspace(-10 * s, 10 * s, 81)
    vals = np.exp(-sum(v**2 for v in np.meshgrid(ax, ax, ax, indexing="ij")) / (2 * s**2)) / (2 * np.pi * s**2) ** 1.5
    tab = TabulatedWeight((ax, ax, ax), vals)
    gauss = GaussianWeight(std=s)
    assert tab.mass == pytest.approx(1.0, rel=1e-8)
    rd = np.array([[0.2, -0.1, 0.4], [0.0, 0.0, 0.0]])
    np.testing.assert_allclose(mu_from_p(tab, rd), mu_from_p(gauss, rd), rtol=1e-8)
    np.testing.assert_allclose(g_from_p(tab, rd), g_from_p(gauss, rd), rtol=1e-8)


# --- symmetry classification ------------------------------------------------------------


def test_classify_symmetry_examples():
    pts = random_points(15, 22, 1.5)
    assert classify_symmetry(PT, pts).symmetry == "PT"
    assert classify_symmetry(CL, pts).symmetry == "classic"
    assert classify_symmetry(PT0, pts).symmetry == "classic+PT"
    assert classify_symmetry(PT, pts).level == "correlation"
    with pytest.raises(ValueError):
        classify_symmetry(PT, np.zeros((0, 3)))


def test_classify_symmetry_neither():
    m = BochnerModel(GaussianWeight(mean=[0.2, 0, 0], std=0.3), SchellKernel(GaussianAmplitude(quadratic_phase=1.0)), "generic", 9)
    assert classify_symmetry(m, random_points(10, 23)).symmetry == "neither"
