"""
Ricci Disc Configuration

Project-wide defaults for grids, the flow solver, the exhaustion
construction and the verifier suite. Experiment config files and CLI
flags override these values; nothing here is read from the network.
"""

import os

# Grid defaults
DEFAULT_RADIUS = 1.0
DEFAULT_N_R = 64
DEFAULT_N_THETA = 1            # 1 selects the radially symmetric fast path
DEFAULT_CLUSTERING = 1.5       # rim-clustering exponent
DEFAULT_COLLAR = 0.02          # relative width cut off before the rim

# Solver defaults
DEFAULT_SCHEME = "explicit-rk2"
DEFAULT_CFL_SAFETY = 0.4
DEFAULT_DT_MAX = float("inf")
DEFAULT_SEMI_IMPLICIT_DT = 1e-3
DEFAULT_SOLVER_TOLERANCE = 1e-10
DIVERGENCE_BOUND = 50.0        # abort once |u| exceeds this

# Construction defaults
DEFAULT_ETA = 0.1
DEFAULT_K_LIST = (2, 4, 8, 16, 24)
DEFAULT_LIMIT_TOL = 0.15       # above the k=16 -> 24 disc gap of 0.116 at r = 0.8
DEFAULT_REFERENCE_RADIUS = 0.8
DEFAULT_N_R_REFERENCE = 33
DEFAULT_N_R_MAX = 512
DEFAULT_HORIZON = 1.0
DEFAULT_SNAPSHOT_COUNT = 20    # snapshots every T/20 unless configured
DEFAULT_WORKERS = 1            # >1 runs the k family in a process pool

# Verifier defaults
TOLERANCE_FACTOR = 10.0        # tol = factor * h^2 * (1 + |value|)
CHECK_FRACTION = 0.8           # checks stay inside this share of the truncation radius

# Output location (RICCI_DISC_OUT overrides)
OUTPUT_ROOT = os.environ.get("RICCI_DISC_OUT", "results")
FORMAT_VERSION = 1
