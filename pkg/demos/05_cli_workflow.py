"""
Command-line workflow
=====================

The ``ptscatter`` command writes raw grids; this script drives it from Python
(equivalent to running it in a shell) and reads the results back.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from ptscatter.cli import main

out = Path(tempfile.mkdtemp())

###############################################################################
# Figure presets: a spectral map and the coherence curves.
main(["spectrum", "--figure", "fig3c", "--out", str(out / "fig3c"), "--gnuplot"])
main(["coherence", "--figure", "fig5", "--out", str(out / "fig5")])

side = json.loads((out / "fig3c" / "spectrum.json").read_text())
print("fig3c peak (deg):", np.rad2deg(side["peak"]["theta"]), np.rad2deg(side["peak"]["phi"]))
data = np.loadtxt(out / "fig5" / "coherence.csv", delimiter=",", skiprows=2)
print("fig5 rows:", data.shape[0], "columns: d_over_a, theta, mu_PT, mu_CL")

###############################################################################
# A config file describing a medium in dimensionless groups, validated by the
# oracle suite. Exit code 0 means every check passed.
cfg = {
    "medium": {"family": "pt_schell_linear", "ka": 1.0, "d_over_a": 1.0, "a_gamma": [0.5, 0.0, 0.0]},
    "validate": {"probes": 40, "mc_n": 5000},
}
path = out / "cfg.json"
path.write_text(json.dumps(cfg))
code = main(["validate", "--config", str(path), "--out", str(out / "validate")])
report = json.loads((out / "validate" / "validation.json").read_text())
print("validate exit code:", code)
for check in report["checks"]:
    print(f"  {check['name']:22s} {check['status']}")
