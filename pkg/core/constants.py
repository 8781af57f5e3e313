"""
Global Constants
"""

APP_NAME = "gdr"
APP_VERSION = "v1.0.0"

# Solver defaults
DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_ITERS = 50

# Discrete-derivative degeneracy threshold (relative)
DEFAULT_DEGENERACY_THRESHOLD = 1e-10

# Pivot tolerance for the dense solvers (relative to row scale)
PIVOT_TOL = 1e-14

# Quotient masking: denominators below QUOTIENT_MASK_TOL * (1 + |xi|) are unreliable
QUOTIENT_MASK_TOL = 1e-13

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_FAILURE = 3
