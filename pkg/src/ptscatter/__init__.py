"""First-Born scattering statistics of classic and PT-symmetric random media."""

from .born import (
    FarZonePoint,
    IncidentPlaneWave,
    MismatchedRadius,
    SpectralMap,
    ZeroDenominator,
    ctilde,
    ctilde_cl_closed,
    ctilde_factored,
    ctilde_pt_closed,
    ctilde_pt_deterministic,
    mu_s,
    mu_s_k,
    mu_s_symmetric,
    mu_s_symmetric_closed,
    ntilde,
    position_term,
    spectral_density,
    spectral_map,
    ws_far,
    ws_far_k,
)
from .geometry import (
    DegenerateDirection,
    ScatteringGeometry,
    momentum_transfer,
    symmetric_pair,
    unit_from_spherical,
)
from .media import (
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
    degree_of_potential_correlation,
    g_from_p,
    mu_from_p,
    potential_from_index,
    strength,
)
from .oracle import (
    EnsembleEstimate,
    NotConverged,
    QuadratureSpec,
    RealizationField,
    ctilde_quadrature,
    estimate_correlation,
    gram_psd_check,
    realization_evenness_check,
    sample_realization,
    sample_realizations,
)

__version__ = "0.1.0"
