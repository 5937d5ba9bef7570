"""Exhaustive force-phase and kinematic-phase parameter searches."""

from synergyopt.optimizer.force import force_optimize, grasp_stability_metric
from synergyopt.optimizer.grid import ParameterAxis, ParameterGrid, load_grid
from synergyopt.optimizer.kinematic import (
    PreContactSystem,
    kinematic_optimize,
    precontact_stability_metric,
    spring_torque,
)

__all__ = [
    "ParameterAxis",
    "ParameterGrid",
    "PreContactSystem",
    "force_optimize",
    "grasp_stability_metric",
    "kinematic_optimize",
    "load_grid",
    "precontact_stability_metric",
    "spring_torque",
]
