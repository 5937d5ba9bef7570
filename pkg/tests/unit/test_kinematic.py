import math

import numpy as np
import pytest

from synergyopt import fixtures
from synergyopt.analysis.manifold import derive_mrm, mrm_distance
from synergyopt.constants import MM, NMM_PER_RAD
from synergyopt.exceptions import GridError, HandModelError, MissingInputError
from synergyopt.grasp.matrices import GraspSample, actuation_matrix, load_grasps
from synergyopt.hand.model import ActuationParams, HandKinematics
from synergyopt.optimizer import (
    PreContactSystem,
    kinematic_optimize,
    load_grid,
    precontact_stability_metric,
    spring_torque,
)
from synergyopt.optimizer.kinematic import finger_components, pose_weights
from synergyopt.optimizer.search import weighted_norm
from synergyopt.types import ParamKind, Phase

THUMB_R = np.array([[12.0], [4.0]]) * MM


def _reference_r_star(hand: HandKinematics) -> dict[str, float]:
    radii_mm = {"tp": 12.0, "td": 4.0, "fr": 2.0, "fp": 12.0, "fd": 4.0}
    return dict(
        ActuationParams.from_keys(
            hand, [(ParamKind.MOMENT_ARM, k, v * MM) for k, v in radii_mm.items()]
        ).r
    )


def _reference_poses(hand: HandKinematics) -> list[GraspSample]:
    return [
        GraspSample("open", np.zeros(8), is_open=True),
        GraspSample("cylinder", np.array([0.9, 0.5, 0.1, 0.8, 0.6, -0.1, 0.8, 0.6])),
        GraspSample("pinch", np.array([0.5, 0.9, 0.3, 0.4, 1.1, -0.3, 0.4, 1.1])),
    ]


def _reference_small_grid_document() -> dict:
    return {
        "parameters": {
            "K_td": {"values_nmm_per_rad": [1.80, 6.82]},
            "theta0_tp": {"values_rad": [0.8, 1.6]},
            "theta0_td": {"values_rad": [0.0, 1.0]},
            "K_fd": {"values_nmm_per_rad": [1.80, 6.82]},
            "theta0_fp": {"values_rad": [0.8, 1.6]},
            "theta0_fd": {"values_rad": [0.0, 1.0]},
        },
        "fixed": {
            "K_tp_nmm_per_rad": 6.82,
            "K_fr_nmm_per_rad": 6.82,
            "K_fp_nmm_per_rad": 6.82,
            "theta0_fr_rad": 0.5,
        },
    }


@pytest.mark.unit
class TestSpringTorque:
    def test_zero_state(self) -> None:
        tau = spring_torque({"j": 1.0}, [0.0], {"j": 0.0}, ["j"])
        np.testing.assert_array_equal(tau, [0.0])

    def test_catalog_spring_at_full_preload(self) -> None:
        K = 6.82 * NMM_PER_RAD
        tau = spring_torque({"j": K}, [0.0], {"j": 4.712}, ["j"])
        assert tau[0] == pytest.approx(32.14 * MM, rel=1e-3)
        assert tau[0] == pytest.approx(K * 4.712)

    def test_linear_in_stiffness(self) -> None:
        theta = [0.3, 1.2]
        theta0 = {"a": 0.5, "b": 0.1}
        single = spring_torque({"a": 1.0, "b": 2.0}, theta, theta0, ["a", "b"])
        double = spring_torque({"a": 2.0, "b": 4.0}, theta, theta0, ["a", "b"])
        np.testing.assert_allclose(double, 2.0 * single)

    def test_follows_joint_order(self) -> None:
        tau = spring_torque({"a": 1.0, "b": 2.0}, [1.0, 1.0], {"a": 0.0, "b": 0.0}, ["b", "a"])
        np.testing.assert_array_equal(tau, [2.0, 1.0])

    def test_shape_mismatch(self) -> None:
        with pytest.raises(HandModelError, match="theta has shape"):
            spring_torque({"a": 1.0}, [0.0, 1.0], {"a": 0.0}, ["a"])

    def test_missing_entries(self) -> None:
        with pytest.raises(HandModelError, match="missing"):
            spring_torque({"a": 1.0}, [0.0, 1.0], {"a": 0.0, "b": 0.0}, ["a", "b"])


@pytest.mark.unit
class TestPrecontactStabilityMetric:
    def test_pose_on_manifold(self, rng: np.random.Generator) -> None:
        R = rng.uniform(0.001, 0.01, size=(3, 2))
        tau = R @ rng.uniform(0.0, 5.0, size=2)
        result = precontact_stability_metric(PreContactSystem(R=R, tau_s=tau))
        assert result.residual <= 1e-9

    def test_thumb_exact_fit(self) -> None:
        result = precontact_stability_metric(
            PreContactSystem(R=THUMB_R, tau_s=np.array([12.0, 4.0]) * MM)
        )
        assert result.t[0] == pytest.approx(1.0)
        assert result.residual == pytest.approx(0.0, abs=1e-12)

    def test_thumb_misfit_matches_tension_scan(self) -> None:
        tau = np.array([4.0, 12.0]) * MM
        result = precontact_stability_metric(PreContactSystem(R=THUMB_R, tau_s=tau))
        tensions = np.arange(0.0, 10.0 + 1e-12, 1e-4)
        scan = np.min(np.linalg.norm(THUMB_R @ tensions[None, :] - tau[:, None], axis=0))
        assert result.residual > 0.0
        assert result.residual == pytest.approx(scan, abs=1e-7)


@pytest.mark.unit
class TestComponents:
    def test_reference_hand_splits_thumb_from_mirrored_fingers(
        self, reference_hand: HandKinematics
    ) -> None:
        components = finger_components(reference_hand)
        assert [c.name for c in components] == ["thumb", "finger1+finger2"]
        assert components[0].joint_ids == ("tp", "td")
        assert components[0].columns == (0,)
        assert components[1].columns == (1, 2)
        assert components[1].rows == (2, 3, 4, 5, 6, 7)

    def test_shared_tendon_joins_fingers(self, tripod_hand: HandKinematics) -> None:
        assert [c.name for c in finger_components(tripod_hand)] == ["a+b+c"]


@pytest.mark.unit
class TestPoseWeights:
    def test_open_pose_gets_its_weight(self, tripod_grasps) -> None:
        assert pose_weights(tripod_grasps, 10.0) == [1.0, 10.0, 1.0]

    def test_without_open_pose(self, two_joint_poses) -> None:
        assert pose_weights(two_joint_poses, 10.0) == [1.0, 1.0, 1.0]

    def test_document_weight_on_open_pose_is_kept(self, tripod_hand: HandKinematics) -> None:
        doc = fixtures.tripod_grasps_document()
        doc["grasps"][1]["weight"] = 2.5
        poses = load_grasps(doc, tripod_hand)
        assert poses[1].weight_given
        assert pose_weights(poses, 10.0) == [1.0, 2.5, 1.0]

    def test_default_weight_is_not_taken_as_given(self, tripod_grasps) -> None:
        assert not any(p.weight_given for p in tripod_grasps)


@pytest.mark.unit
class TestKinematicOptimize:
    def test_two_joint_finger_fits_exactly(
        self, two_joint_hand: HandKinematics, two_joint_poses, two_joint_grid
    ) -> None:
        report = kinematic_optimize(
            two_joint_hand, two_joint_poses, two_joint_grid, fixtures.TWO_JOINT_R_STAR
        )
        assert report.phase == Phase.KINEMATIC
        assert report.best_q <= 1e-9
        assert all(q is not None and q <= 1e-9 for q in report.per_grasp_q.values())
        assert report.combos_evaluated == report.combos_total == 81
        params = ActuationParams(
            K=report.best_params["K"], theta0=report.best_params["theta0"]
        )
        R = actuation_matrix(two_joint_hand, fixtures.TWO_JOINT_R_STAR)
        for theta in fixtures.TWO_JOINT_POSES.values():
            tau = spring_torque(params.K, theta, params.theta0, two_joint_hand.joint_ids)
            system = PreContactSystem(R=R, tau_s=tau)
            assert precontact_stability_metric(system).residual <= 1e-9

    def test_known_exact_combo_scores_zero(
        self, two_joint_hand: HandKinematics, two_joint_poses
    ) -> None:
        grid = load_grid(
            {
                "parameters": {"K_j1": {"values_nmm_per_rad": [2.0]}},
                "fixed": {"K_j2_nmm_per_rad": 1.0, "theta0_j1_rad": 1.0, "theta0_j2_rad": 0.0},
            }
        )
        report = kinematic_optimize(
            two_joint_hand, two_joint_poses, grid, fixtures.TWO_JOINT_R_STAR
        )
        assert report.best_q == pytest.approx(0.0, abs=1e-12)

    def test_best_params_carry_r_star(
        self, two_joint_hand: HandKinematics, two_joint_poses, two_joint_grid
    ) -> None:
        report = kinematic_optimize(
            two_joint_hand, two_joint_poses, two_joint_grid, fixtures.TWO_JOINT_R_STAR
        )
        assert report.moment_arms() == pytest.approx(fixtures.TWO_JOINT_R_STAR)
        assert set(report.best_params) == {"r", "K", "theta0"}

    def test_decomposition_matches_whole_hand(self, reference_hand: HandKinematics) -> None:
        poses = _reference_poses(reference_hand)
        grid = load_grid(_reference_small_grid_document())
        r_star = _reference_r_star(reference_hand)
        split = kinematic_optimize(reference_hand, poses, grid, r_star)
        joint = kinematic_optimize(reference_hand, poses, grid, r_star, decompose=False)
        assert split.best_q == pytest.approx(joint.best_q, abs=1e-10)
        assert split.best_combo == joint.best_combo
        assert split.combos_total == 16
        assert joint.combos_total == 64
        assert [c.name for c in split.components] == ["thumb", "finger1+finger2"]
        assert [c.name for c in joint.components] == ["thumb+finger1+finger2"]
        assert split.baseline_q == pytest.approx(joint.baseline_q, abs=1e-10)

    def test_weighting_scales_squared_contribution(self, tripod_hand: HandKinematics) -> None:
        grid = load_grid(
            {
                "parameters": {"K_a": {"values_nmm_per_rad": [2.0]}},
                "fixed": {
                    "K_b_nmm_per_rad": 2.0,
                    "K_c_nmm_per_rad": 2.0,
                    "theta0_a_rad": 0.5,
                    "theta0_b_rad": 0.5,
                    "theta0_c_rad": 0.5,
                },
            }
        )
        r_star = {"a": 0.003, "b": 0.001, "c": 0.001}
        base_doc = fixtures.tripod_grasps_document()
        poses = load_grasps(base_doc, tripod_hand)
        heavy_doc = fixtures.tripod_grasps_document()
        heavy_doc["grasps"][2]["weight"] = 3.0
        heavy = load_grasps(heavy_doc, tripod_hand)

        light_report = kinematic_optimize(tripod_hand, poses, grid, r_star)
        heavy_report = kinematic_optimize(tripod_hand, heavy, grid, r_star)
        q_half = light_report.per_grasp_q["half_closed"]
        assert q_half is not None
        assert q_half > 0.0
        assert heavy_report.best_q**2 - light_report.best_q**2 == pytest.approx(
            8.0 * q_half**2
        )
        assert light_report.best_q == pytest.approx(
            weighted_norm(list(light_report.per_grasp_q.values()), [1.0, 10.0, 1.0])
        )

    def test_open_pose_weight_recorded(
        self, tripod_hand: HandKinematics, tripod_grasps
    ) -> None:
        grid = load_grid(fixtures.tripod_kinematic_grid_document())
        report = kinematic_optimize(
            tripod_hand,
            tripod_grasps,
            grid,
            {"a": 0.003, "b": 0.001, "c": 0.001},
            open_pose_weight=4.0,
        )
        assert report.weights == {"tripod": 1.0, "open": 4.0, "half_closed": 1.0}
        assert report.combos_total == 3**6
        assert report.baseline_q is not None
        assert report.best_q <= report.baseline_q

    def test_heavy_open_pose_puts_it_on_the_manifold(
        self, tripod_hand: HandKinematics, tripod_grasps
    ) -> None:
        preload = {"values_rad": [0.3, 0.6, 0.9]}
        grid = load_grid(
            {
                "parameters": {
                    "theta0_a": dict(preload),
                    "theta0_b": dict(preload),
                    "theta0_c": dict(preload),
                },
                "fixed": {
                    "K_a_nmm_per_rad": 2.0,
                    "K_b_nmm_per_rad": 2.0,
                    "K_c_nmm_per_rad": 2.0,
                },
            }
        )
        # K θ0 is parallel to r* only for θ0 = (0.9, 0.3, 0.3).
        r_star = {"a": 0.003, "b": 0.001, "c": 0.001}
        report = kinematic_optimize(
            tripod_hand, tripod_grasps, grid, r_star, open_pose_weight=1e6
        )
        assert report.best_combo == pytest.approx(
            {"theta0_a": 0.9, "theta0_b": 0.3, "theta0_c": 0.3}
        )
        assert report.per_grasp_q["open"] == pytest.approx(0.0, abs=1e-12)

        params = ActuationParams(
            r=r_star, K=report.best_params["K"], theta0=report.best_params["theta0"]
        )
        open_theta = next(p.theta for p in tripod_grasps if p.is_open)
        for finger in tripod_hand.fingers:
            manifold = derive_mrm(tripod_hand, params, finger.name)
            rows = [tripod_hand.joint_index[j] for j in manifold.joint_ids]
            assert mrm_distance(manifold, open_theta[rows]) == pytest.approx(0.0, abs=1e-12)

    def test_unequal_mirrored_r_star_rejected(self, reference_hand: HandKinematics) -> None:
        r_star = _reference_r_star(reference_hand)
        r_star["fp2"] = r_star["fp"] * 2.0
        grid = load_grid(_reference_small_grid_document())
        with pytest.raises(HandModelError, match="mirror group"):
            kinematic_optimize(reference_hand, _reference_poses(reference_hand), grid, r_star)

    def test_missing_r_star(
        self, two_joint_hand: HandKinematics, two_joint_poses, two_joint_grid
    ) -> None:
        with pytest.raises(MissingInputError, match="r\\* missing"):
            kinematic_optimize(two_joint_hand, two_joint_poses, two_joint_grid, {"j1": 0.01})

    def test_rejects_moment_arm_axes(
        self, two_joint_hand: HandKinematics, two_joint_poses
    ) -> None:
        doc = fixtures.two_joint_grid_document()
        doc["parameters"]["r_j1"] = {"values_mm": [1.0]}
        with pytest.raises(GridError, match="not searched here"):
            kinematic_optimize(
                two_joint_hand, two_joint_poses, load_grid(doc), fixtures.TWO_JOINT_R_STAR
            )

    def test_grid_must_cover_every_joint(
        self, two_joint_hand: HandKinematics, two_joint_poses
    ) -> None:
        doc = fixtures.two_joint_grid_document()
        del doc["parameters"]["theta0_j2"]
        with pytest.raises(GridError, match="unset"):
            kinematic_optimize(
                two_joint_hand, two_joint_poses, load_grid(doc), fixtures.TWO_JOINT_R_STAR
            )

    def test_needs_poses(self, two_joint_hand: HandKinematics, two_joint_grid) -> None:
        with pytest.raises(GridError, match="at least one pose"):
            kinematic_optimize(two_joint_hand, [], two_joint_grid, fixtures.TWO_JOINT_R_STAR)

    def test_trace_rows_name_their_component(
        self, reference_hand: HandKinematics
    ) -> None:
        report = kinematic_optimize(
            reference_hand,
            _reference_poses(reference_hand),
            load_grid(_reference_small_grid_document()),
            _reference_r_star(reference_hand),
            trace=True,
        )
        assert report.trace is not None
        assert len(report.trace) == 16
        assert {row.component for row in report.trace} == {"thumb", "finger1+finger2"}
        assert math.isclose(
            min(r.q for r in report.trace if r.component == "thumb" and r.q is not None),
            report.components[0].best_q or 0.0,
        )
