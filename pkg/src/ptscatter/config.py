"""Run configuration for the command-line frontend.

Configs are JSON documents validated against ``config_schema.json``. Media
are described by dimensionless groups (``ka``, ``d_over_a``, ``a_alpha``,
``a_beta``, ``a_gamma``, ``alpha_over_k2``); internally the scatterer size
``a = 1`` fixes the length unit. Angles are given in degrees here and
converted to radians on resolution.
"""

import copy
import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .born import IncidentPlaneWave
from .media import ClassicQuadratic, PtSchellLinear, bochner_model

DEFAULT_THETA = {"start": 0.0, "stop": 180.0, "num": 181}
DEFAULT_PHI = {"start": 0.0, "stop": 358.0, "num": 180}
DEFAULT_COHERENCE_THETA = {"start": 0.0, "stop": 90.0, "num": 91}

VALIDATE_DEFAULTS = {"probes": 200, "max_aK": 4.0, "mc_n": 20000, "mc_pairs": 100, "psd_sets": 3, "corrupt_sign": False}
REALIZE_DEFAULTS = {
    "n": 4,
    "ensemble_n": 2000,
    "nodes_per_axis": 9,
    "grid": {"half_width": 2.0, "num": 9},
    "points": [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.3, -0.4, 0.2]],
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _pt(ka, d_over_a=1.0, gamma=(0.0, 0.0, 0.0)):
    return {"family": "pt_schell_linear", "ka": ka, "d_over_a": d_over_a, "a_gamma": list(gamma)}


FIGURES = {
    "fig2a": ("spectrum", _pt(1.0, 1.0, (0, 0, 0))),
    "fig2b": ("spectrum", _pt(1.0, 1.0, (0.5, 0, 0))),
    "fig2c": ("spectrum", _pt(1.0, 1.0, (1, 0, 0))),
    "fig2d": ("spectrum", _pt(1.0, 1.0, (0, 0.5, 0))),
    "fig2e": ("spectrum", _pt(1.0, 1.0, (0, 1, 0))),
    "fig3a": ("spectrum", _pt(1.0, 0.1, (1, 1, 1))),
    "fig3b": ("spectrum", _pt(1.0, 0.5, (1, 1, 1))),
    "fig3c": ("spectrum", _pt(1.0, 1.0, (1, 1, 1))),
    "fig5": (
        "coherence",
        {"family": "classic_quadratic", "ka": 1.0, "d_over_a": 1.0, "alpha_over_k2": 2.0},
    ),
}


def figure_config(name):
    """Raw config of a figure preset; returns ``(command, config)``."""
    if name not in FIGURES:
        raise ConfigError(f"--figure: unknown preset {name!r}")
    command, medium = FIGURES[name]
    raw = {"medium": copy.deepcopy(medium), "incident_direction": [0.0, 0.0, 1.0]}
    if command == "spectrum":
        raw["normalization"] = "position"
        raw["scan"] = {"theta_deg": dict(DEFAULT_THETA), "phi_deg": dict(DEFAULT_PHI)}
    else:
        raw["scan"] = {"theta_deg": dict(DEFAULT_COHERENCE_THETA), "d_over_a": [0.1, 1.0, 3.0]}
    return command, raw


@dataclass
class RunConfig:
    """Fully resolved run parameters; ``resolved`` is echoed into every output file."""

    resolved: dict
    model: object
    wave: IncidentPlaneWave
    theta: np.ndarray
    phi: np.ndarray
    d_over_a: list
    alpha_over_k2: float
    normalization: str
    output: str
    seed: int
    oracle: bool
    gnuplot: bool
    realize: dict
    validate: dict


def _schema():
    text = resources.files("ptscatter").joinpath("config_schema.json").read_text()
    return json.loads(text)


def load_config(path):
    """Read and parse a JSON config file (not yet resolved)."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _grid(spec, field):
    if isinstance(spec, dict):
        values = np.linspace(spec["start"], spec["stop"], spec["num"])
    else:
        values = np.asarray(spec, dtype=float)
    if len(values) > 1 and np.any(np.diff(values) <= 0):
        raise ConfigError(f"{field}: grid must be strictly increasing")
    return values


def build_medium(medium, field="medium"):
    """Medium model from a validated medium descriptor (``a = 1``)."""
    family = medium["family"]
    if family == "bochner":
        kernel = medium.get("kernel", "schell")
        base = build_medium(medium["base"], field + ".base")
        if kernel == "even_cosine" and not isinstance(base, ClassicQuadratic):
            raise ConfigError(f"{field}.kernel: even_cosine requires a classic_quadratic base")
        return bochner_model(base, medium.get("nodes_per_axis", 17), kernel)
    ka = medium["ka"]
    I0 = medium.get("I0", 1.0)
    if family == "classic_quadratic":
        return ClassicQuadratic(I0, 1.0, medium["d_over_a"], medium.get("alpha_over_k2", 0.0) * ka**2)
    deterministic = medium.get("deterministic", False)
    if not deterministic and "d_over_a" not in medium:
        raise ConfigError(f"{field}.d_over_a: required unless deterministic is true")
    if "a_gamma" in medium and ("a_alpha" in medium or "a_beta" in medium):
        raise ConfigError(f"{field}.a_gamma: give either a_gamma or a_alpha/a_beta, not both")
    alpha = medium.get("a_gamma", medium.get("a_alpha", [0.0, 0.0, 0.0]))
    beta = medium.get("a_beta", [0.0, 0.0, 0.0])
    return PtSchellLinear(I0, 1.0, medium.get("d_over_a", 1.0), alpha, beta, deterministic)


def _ka(medium):
    return medium["base"]["ka"] if medium["family"] == "bochner" else medium["ka"]


def resolve(raw, overrides=None):
    """Validate ``raw`` against the schema, apply CLI overrides and fill defaults."""
    raw = copy.deepcopy(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {err.message}")

    raw.setdefault("incident_direction", [0.0, 0.0, 1.0])
    raw.setdefault("normalization", "position")
    raw.setdefault("output", "out")
    raw.setdefault("seed", 0)
    raw.setdefault("oracle", True)
    raw.setdefault("gnuplot", False)
    scan = raw.setdefault("scan", {})
    scan.setdefault("theta_deg", dict(DEFAULT_THETA))
    scan.setdefault("phi_deg", dict(DEFAULT_PHI))
    raw["validate"] = {**VALIDATE_DEFAULTS, **raw.get("validate", {})}
    realize = {**REALIZE_DEFAULTS, **raw.get("realize", {})}
    realize["grid"] = {**REALIZE_DEFAULTS["grid"], **realize["grid"]}
    raw["realize"] = realize

    try:
        model = build_medium(raw["medium"])
        s0 = np.asarray(raw["incident_direction"], dtype=float)
        if np.linalg.norm(s0) == 0:
            raise ConfigError("incident_direction: must be nonzero")
        wave = IncidentPlaneWave(_ka(raw["medium"]), s0 / np.linalg.norm(s0))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"medium: {exc}") from None

    theta_deg = _grid(scan["theta_deg"], "scan.theta_deg")
    if np.any((theta_deg < 0) | (theta_deg > 180)):
        raise ConfigError("scan.theta_deg: angles must lie in [0, 180]")
    phi_deg = _grid(scan["phi_deg"], "scan.phi_deg")
    medium = raw["medium"]
    base = medium.get("base", medium)
    d_list = scan.get("d_over_a", [base.get("d_over_a", 1.0)])
    alpha_over_k2 = scan.get("alpha_over_k2", base.get("alpha_over_k2", 0.0))
    return RunConfig(
        resolved=raw,
        model=model,
        wave=wave,
        theta=np.deg2rad(theta_deg),
        phi=np.deg2rad(phi_deg),
        d_over_a=[float(x) for x in d_list],
        alpha_over_k2=float(alpha_over_k2),
        normalization=raw["normalization"],
        output=raw["output"],
        seed=int(raw["seed"]),
        oracle=bool(raw["oracle"]),
        gnuplot=bool(raw["gnuplot"]),
        realize=realize,
        validate=raw["validate"],
    )
