"""Manifolds, principal components, force closure and comparison reports."""

from synergyopt.analysis.closure import ForceClosureReport, force_closure_margin, grasp_closure
from synergyopt.analysis.manifold import MRManifold, derive_mrm, mrm_alignment, mrm_distance
from synergyopt.analysis.pca import PCAResult, pca_grasps
from synergyopt.analysis.report import build_comparison_report

__all__ = [
    "ForceClosureReport",
    "MRManifold",
    "PCAResult",
    "build_comparison_report",
    "derive_mrm",
    "force_closure_margin",
    "grasp_closure",
    "mrm_alignment",
    "mrm_distance",
    "pca_grasps",
]
