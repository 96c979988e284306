DEFAULT_EQ_TOL = 1e-9
DEFAULT_PSD_TOL = 1e-9
DEFAULT_RELATIVE_FLOOR = 1e-8  # (iii)' floor relative to ||rho||, absolute when rho = 0
DEFAULT_SAMPLE_COUNT = 32
DEFAULT_SEED = 0
DEFAULT_MODE = "representation"  # Default definition mode

SELF_ADJOINT_TOL = 1e-10  # relative to max(1, ||x||)
SUPPORT_TOL = 1e-12  # leakage outside the block support that is silently zeroed
ZERO_EMIT_THRESHOLD = 1e-14

SAMPLER_MAX_RETRIES = 10  # per requested sample

ASCENT_MAX_ITER = 500
ASCENT_PATIENCE = 50
ASCENT_IMPROVEMENT_TOL = 1e-8
LP_TOL = 1e-9
BRACKET_TOL = 1e-9  # allowed excess of the ascent value over the upper end

SEARCH_MAX_ITER = 5000
SEARCH_RESTARTS = 8
SEARCH_RESIDUAL_TOL = 1e-8
SEARCH_EPS = 1e-6
SEARCH_MAX_DIM = 12
SEARCH_HISTORY_POINTS = 1000
SUPPORTED_GAUGES = ["trace", "norm"]
