"""
Sampling defaults used by this python-fcontact library
"""

DEFAULT_SAMPLE_COUNT = 64
DEFAULT_SEED = 42
DEFAULT_BOX = (-1.0, 1.0)

"""
Tolerances and floors
"""
DEFAULT_TOLERANCE = 1e-9
POSITIVE_DEFINITE_FLOOR = 1e-10
GRAM_FLOOR = 1e-10
ROW_SUM_FLOOR = 1e-8
ORTHOGONALITY_TOLERANCE = 1e-10
SKEW_TOLERANCE = 1e-10
LEAF_TOLERANCE = 1e-9
RANK_THRESHOLD = 1e-10

"""
Finite-difference and flow cross-checks
"""
FD_STEP = 1e-5
FD_TOLERANCE = 1e-5
FLOW_STEP = 1e-3
FLOW_TIME = 1e-2

"""
Rotation search
"""
SOLVER_MAX_ITERATIONS = 200
SOLVER_RESTARTS = 8
SOLVER_JACOBIAN_STEP = 1e-7
SOLVER_TOLERANCE = 1e-10
EXPM_TERM_TOLERANCE = 1e-15

"""
Jets cached per field (keyed by evaluation point)
"""
JET_CACHE_SIZE = 1024

"""
Name of the coordinate appended by the mapping-torus lift
"""
LIFT_COORDINATE = 't'

"""
Environment variable names used by this python-fcontact library
"""
FCONTACT_SAMPLES_KEY_NAME = 'FCONTACT_SAMPLES'
FCONTACT_SEED_KEY_NAME = 'FCONTACT_SEED'
FCONTACT_TOLERANCE_KEY_NAME = 'FCONTACT_TOLERANCE'
