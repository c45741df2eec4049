"""
Configuration settings for the point-transformation diffusion toolkit.
Contains output directory names, numerical defaults and tolerances, and
the environment-driven knobs (read through python-dotenv).
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Output directories
OUTPUT_DIR = os.getenv("PTDIFF_OUTPUT_DIR", "ptdiff_output")
SNAPSHOT_SUBDIR = "snapshots"

# Batch parallelism (0 or unset = serial)
try:
    THREADS = max(0, int(os.getenv("PTDIFF_THREADS", "0") or 0))
except ValueError:
    THREADS = 0

# Float formatting for byte-stable CSV/JSON output
FLOAT_FORMAT = "%.17g"

# transform_core
INVERT_MAX_ITER = 200
INVERT_DEFAULT_REL_TOL = 1e-12

# operator_assembly
MIN_GRID_NODES = 4

# spectral_transforms
BESSEL_MAX_ORDER = 2.0
BESSEL_Z_SWITCH = 12.0
BESSEL_OVERLAP_WINDOW = (11.0, 13.0)
BESSEL_SERIES_TERMS = 60
TRUNCATION_THRESHOLD = 1e-12
K_CHUNK = 256
# exp(-SPECTRAL_DECAY) is where the propagator is considered zero
SPECTRAL_DECAY = 38.0
MAX_K_NODES = 1 << 16

# diffusion_solvers
DELTA_WIDTH_COEFF = 1000.0
DEFAULT_DT = 1e-4
DT_SNAPSHOT_FRACTION = 0.05
ACCURACY_MONITOR_TOL = 1e-4
POSITIVITY_SLACK = 1e-12
LEAKAGE_REPORT_LEVEL = 1e-12
# solver output: edge/peak ratio and boundary leakage beyond which a run is rejected
SNAPSHOT_EDGE_LIMIT = 1e-6
LEAKAGE_LIMIT = 1e-6

# scaling_analysis
MIN_FIT_POINTS = 5
RENORMALIZE_DRIFT_LIMIT = 1e-6
NORMAL_BETA_TOL = 0.02
NO_KNEE_IMPROVEMENT = 0.01
CROSSOVER_MIN_DECADES = 3.0

# Operator variants and solver methods accepted by configs
OPERATOR_VARIANTS = ("Delta1", "Delta2", "Delta3", "Delta4")
SOLVER_METHODS = ("WClosedForm", "Spectral", "FiniteDifference")

# Run-config defaults; JSON configs are merged over these
DEFAULT_RUN_CONFIG = {
    "transform": {"kind": "polynomial", "coeffs": [1.0]},
    "operator": {"variant": "Delta3", "alpha": 0.0},
    "D": 1.0,
    "grid": {"x_min": -10.0, "x_max": 10.0, "n": 4000},
    "initial": {"kind": "delta", "center": 0.0},
    "times": [0.01, 0.1, 1.0],
    "method": {"kind": "FiniteDifference"},
    "solver": {
        "dt": None,
        "dt_growth": None,
        "accuracy_monitor": False,
        "cross_check": False,
    },
    "analysis": {
        "coordinates": ["X", "W"],
        "fit_window": None,
        "crossover": False,
        "subtract_initial": True,
    },
    "outputs": {
        "directory": OUTPUT_DIR,
        "combined_snapshots": True,
        "write_snapshots": True,
    },
}

# map-osp --simulate: mapped equation run on these settings
OSP_SIMULATION_CONFIG = {
    "name": "osp",
    "grid": {"x_min": -20.0, "x_max": 20.0, "n": 8000},
    "initial": {"kind": "delta", "center": 0.0},
    "times": {"start": 1e-3, "stop": 1.0, "per_decade": 5},
    "method": {"kind": "FiniteDifference"},
    "solver": {"dt_growth": 0.01},
    "analysis": {"coordinates": ["X"], "fit_window": [0.01, 1.0]},
}

# validate: property-check grids and thresholds
VALIDATION_SMALL_N = 256
VALIDATION_CHECK_GRID = (-2.0, 2.0, 4000)
VALIDATION_GROUND_STATE_N = 4000
VALIDATION_K = 1.0
VALIDATION_THRESHOLDS = {
    "operator_self_adjoint": 1e-12,
    "delta3_delta4_pairing": 1e-12,
    "negative_semidefinite": 1e-10,
    "eigenrelation": 1e-3,
    "gaussian_fixed_point": 1e-8,
    "biorthogonality": 0.02,
    "bessel_collapse": 1e-10,
    "annihilation": 1e-3,
    "mass_conservation": 1e-8,
    "positivity": POSITIVITY_SLACK,
    "accuracy_monitor": ACCURACY_MONITOR_TOL,
}
