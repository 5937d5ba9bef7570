"""Default constants for synergyopt."""

import math

SCHEMA_VERSION = "1.0"

# Unit conversions at the file boundary
MM = 1e-3
NMM_PER_RAD = 1e-3

# Contact model
DEFAULT_FRICTION_EDGES = 8
UNIT_NORM_TOL = 1e-9
TANGENT_DEGENERATE_RAD = 1e-6

# Solver
DEFAULT_QP_TOL = 1e-6
DEFAULT_QP_MAX_ITER = 10_000
PSD_EIG_TOL = 1e-7

# Total joint torque normalization in the force search (N·m)
TORQUE_SUM = 1.0

# Kinematic phase
DEFAULT_OPEN_POSE_WEIGHT = 10.0
OPEN_POSE_NAME = "open"

# Force closure
DEFAULT_CLOSURE_SUBDIVISIONS = 3
CLOSURE_TOL = 1e-8

# Search runner
DEFAULT_CHUNK_SIZE = 64

# Three-finger reference hand parameter ranges
REFERENCE_HAND_RADIUS_RANGE_MM = (2.0, 12.0, 0.5)
REFERENCE_HAND_STIFFNESS_NMM = (1.80, 2.11, 6.82)
REFERENCE_HAND_PRELOAD_RANGES = {
    "roll": (math.pi / 4, 7 * math.pi / 4),
    "proximal": (math.pi / 4, 3 * math.pi / 2),
    "distal": (0.0, 3 * math.pi / 2),
}
REFERENCE_HAND_PRELOAD_COUNT = 30
