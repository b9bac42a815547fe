"""
Shared constants: model identifiers, solver defaults and exit codes.
"""
import enum


class Model(enum.Enum):
	ONE = "one"
	TWO = "two"


class Provenance(enum.Enum):
	ANALYTIC = "analytic"
	SIMULATED = "simulated"
	ORACLE = "oracle"


# ---------------
# Solver defaults
# ---------------

DEFAULT_EPSILON = 1e-12
DEFAULT_MAX_ITER = 100000
DEFAULT_TRUNCATION_TOL = 1e-10
MIN_TRUNCATION_LEVELS = 8

# phase space of model two grows as 2 ** N
MODEL_TWO_MAX_OWNERS = 10

# -------------------
# Simulation defaults
# -------------------

DEFAULT_MAX_EVENTS = 500000
DEFAULT_WARMUP_FRACTION = 0.2
DEFAULT_REPLICATIONS = 20
DEFAULT_BASE_SEED = 20230101
MIN_MAX_EVENTS = 1000
CONFIDENCE_LEVEL = 0.99

# ----------
# Exit codes
# ----------

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNSTABLE = 2
EXIT_SOLVER = 3
EXIT_UNSUPPORTED = 4

sweepParameters = ["lambda", "mu", "gamma", "n_owners", "price", "share"]
