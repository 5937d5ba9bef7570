"""Enums and type aliases for synergyopt."""

from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]


class AxisKind(StrEnum):
    ROLL = "roll"
    PITCH = "pitch"


class QpStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"
    UNBOUNDED = "unbounded"
    INACCURATE = "inaccurate"


class ParamKind(StrEnum):
    MOMENT_ARM = "r"
    STIFFNESS = "K"
    PRELOAD = "theta0"


class Phase(StrEnum):
    FORCE = "force"
    KINEMATIC = "kinematic"


class ExitCode:
    OK = 0
    FAILURE = 1
    PARSE = 2
    CLOSURE = 3
    INFEASIBLE = 4
    MISSING = 5
