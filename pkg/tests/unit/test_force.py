import copy
import math

import numpy as np
import pytest

from synergyopt import fixtures
from synergyopt.constants import MM
from synergyopt.exceptions import GraspModelError, GridError, InfeasibleSearchError
from synergyopt.grasp.matrices import (
    GraspMatrices,
    actuation_matrix,
    assemble_grasp_system,
    contact_system,
    load_grasps,
)
from synergyopt.hand.model import HandKinematics, load_hand
from synergyopt.optimizer import force_optimize, grasp_stability_metric, load_grid
from synergyopt.optimizer import force as force_module
from synergyopt.optimizer.force import feasible_start, stability_qp
from synergyopt.types import ParamKind, Phase


def _pinch_system(hand: HandKinematics, r_mm: dict[str, float]) -> GraspMatrices:
    grasp = load_grasps(fixtures.pinch_grasps_document(), hand)[0]
    return assemble_grasp_system(hand, grasp, {k: v * MM for k, v in r_mm.items()})


def _lever_two_hand() -> HandKinematics:
    return load_hand(fixtures.pinch_hand_document(levers_mm=(40.0, 20.0)))


@pytest.mark.unit
class TestGraspStabilityMetric:
    def test_balanced_pinch_is_exact(self, pinch_hand: HandKinematics) -> None:
        result = grasp_stability_metric(_pinch_system(pinch_hand, {"a": 1.0, "b": 1.0}))
        assert result.feasible
        assert result.q == pytest.approx(0.0, abs=1e-7)
        assert result.t_net[0] == pytest.approx(0.5 / (1.0 * MM), rel=1e-5)

    def test_unactuated_finger_leaves_its_torque(self) -> None:
        hand = load_hand(fixtures.pinch_hand_document(crossings=("a",)))
        result = grasp_stability_metric(_pinch_system(hand, {"a": 1.0}))
        assert result.q == pytest.approx(0.5, abs=1e-6)
        np.testing.assert_allclose(result.delta_tau, [0.0, 0.5], atol=1e-6)

    def test_unactuated_finger_matches_tension_scan(self) -> None:
        hand = load_hand(fixtures.pinch_hand_document(crossings=("a",)))
        m = _pinch_system(hand, {"a": 1.0})
        result = grasp_stability_metric(m)
        # Balanced opposing contacts fix τ_eq at (½, ½); only t_net is free.
        tensions = np.linspace(0.0, 1000.0, 200_001)
        tau = np.array([0.5, 0.5])
        scan = np.min(np.linalg.norm(tau[:, None] - m.A @ tensions[None, :], axis=0))
        assert result.q == pytest.approx(scan, rel=0.02)

    def test_constraints_hold_at_optimum(self, tripod_hand: HandKinematics, tripod_grasps) -> None:
        m = assemble_grasp_system(
            tripod_hand, tripod_grasps[0], {"a": 0.003, "b": 0.003, "c": 0.003}
        )
        result = grasp_stability_metric(m)
        assert np.linalg.norm(m.wrench_map @ result.beta) <= 1e-6
        assert float(np.sum(m.torque_map @ result.beta)) == pytest.approx(1.0, abs=1e-6)
        assert np.all(result.beta >= -1e-12)
        assert np.all(result.t_net >= -1e-12)
        np.testing.assert_allclose(
            result.delta_tau, m.torque_map @ result.beta - m.A @ result.t_net
        )

    def test_moment_arm_scale_is_redundant(self) -> None:
        hand = _lever_two_hand()
        q1 = grasp_stability_metric(_pinch_system(hand, {"a": 3.0, "b": 1.0})).q
        q2 = grasp_stability_metric(_pinch_system(hand, {"a": 6.0, "b": 2.0})).q
        assert q1 == pytest.approx(q2, abs=1e-7)
        assert q1 > 0.01

    def test_lever_ratio_baseline_value(self) -> None:
        q = grasp_stability_metric(_pinch_system(_lever_two_hand(), {"a": 3.0, "b": 3.0})).q
        assert q == pytest.approx(math.sqrt(2.0) / 6.0, abs=1e-6)

    def test_infeasible_constraints(self, pinch_hand: HandKinematics) -> None:
        doc = copy.deepcopy(fixtures.pinch_grasps_document())
        doc["grasps"][0]["contacts"] = doc["grasps"][0]["contacts"][:1]
        grasp = load_grasps(doc, pinch_hand)[0]
        m = assemble_grasp_system(pinch_hand, grasp, {"a": 0.001, "b": 0.001})
        assert feasible_start(m) is None
        result = grasp_stability_metric(m)
        assert not result.feasible
        assert result.q == math.inf

    def test_warm_start_agrees_with_cold_start(
        self, pinch_hand: HandKinematics, pinch_grasps
    ) -> None:
        m = _pinch_system(pinch_hand, {"a": 2.0, "b": 5.0})
        start = feasible_start(contact_system(pinch_hand, pinch_grasps[0]))
        assert start is not None
        x0 = np.concatenate([start[: m.n_beta], np.zeros(m.n_t)])
        warm = grasp_stability_metric(m, x0=x0)
        cold = grasp_stability_metric(m)
        assert warm.q == pytest.approx(cold.q, abs=1e-7)

    def test_start_tolerance_follows_qp_tol(
        self, pinch_hand: HandKinematics, pinch_grasps, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        m = contact_system(pinch_hand, pinch_grasps[0])
        monkeypatch.setattr(force_module, "phase_one", lambda qp: (np.ones(qp.n), 5e-6))
        assert feasible_start(m) is None
        start = feasible_start(m, tol=1e-4)
        assert start is not None
        np.testing.assert_array_equal(start[m.n_beta :], 0.0)

    def test_qp_layout(self, pinch_hand: HandKinematics) -> None:
        m = _pinch_system(pinch_hand, {"a": 1.0, "b": 1.0})
        qp = stability_qp(m)
        assert qp.n == m.n_beta + m.n_t
        assert qp.A_eq.shape == (7, qp.n)
        assert qp.b_eq[-1] == 1.0
        np.testing.assert_array_equal(qp.lb, 0.0)


@pytest.mark.unit
class TestForceOptimize:
    def test_lever_ratio_two_is_found(self) -> None:
        hand = _lever_two_hand()
        grasps = load_grasps(fixtures.pinch_grasps_document(), hand)
        report = force_optimize(hand, grasps, load_grid(fixtures.pinch_force_grid_document()))
        assert report.phase == Phase.FORCE
        assert report.combos_evaluated == report.combos_total == 25
        assert report.best_q == pytest.approx(0.0, abs=1e-6)
        r = report.moment_arms()
        assert r["a"] / r["b"] == pytest.approx(2.0)
        assert report.baseline_combo == pytest.approx({"r_a": 0.003, "r_b": 0.003})
        assert report.baseline_q == pytest.approx(math.sqrt(2.0) / 6.0, abs=1e-6)
        assert report.reduction_pct > 99.0

    def test_matches_independent_re_enumeration(self) -> None:
        hand = _lever_two_hand()
        grasp = load_grasps(fixtures.pinch_grasps_document(), hand)[0]
        ra = [1.0, 1.5, 2.5, 3.5, 4.5]
        rb = [1.0, 1.7, 2.9, 4.3, 6.1]
        grid = load_grid({"parameters": {"r_a": {"values_mm": ra}, "r_b": {"values_mm": rb}}})
        report = force_optimize(hand, [grasp], grid)

        best = None
        for a in ra:
            for b in rb:
                A = actuation_matrix(hand, {"a": a * MM, "b": b * MM})
                q = grasp_stability_metric(contact_system(hand, grasp).with_actuation(A)).q
                if best is None or q < best[0]:
                    best = (q, a, b)
        assert best is not None
        assert report.best_combo == pytest.approx({"r_a": best[1] * MM, "r_b": best[2] * MM})
        assert report.best_q == pytest.approx(best[0], abs=1e-7)

    def test_singleton_grid_echoes_combo(self, pinch_hand: HandKinematics, pinch_grasps) -> None:
        grid = load_grid({"parameters": {"r_a": {"values_mm": [2.0]}}, "fixed": {"r_b_mm": 4.0}})
        report = force_optimize(pinch_hand, pinch_grasps, grid)
        assert report.best_combo == pytest.approx({"r_a": 0.002})
        assert report.best_params["r"] == pytest.approx({"a": 0.002, "b": 0.004})
        assert report.combos_evaluated == 1
        assert report.best_q == pytest.approx(report.baseline_q)

    def test_tripod_improves_on_baseline(self, tripod_hand: HandKinematics, tripod_grasps) -> None:
        grid = load_grid(fixtures.tripod_force_grid_document())
        report = force_optimize(tripod_hand, tripod_grasps, grid, trace=True)
        assert list(report.per_grasp_q) == ["tripod"]
        assert report.best_q == pytest.approx(0.0, abs=1e-6)
        assert report.baseline_q is not None
        assert report.baseline_q > 0.01
        assert report.best_q <= report.baseline_q
        assert report.reduction_pct >= 20.0
        assert report.trace is not None
        assert len(report.trace) == 125
        assert [row.index for row in report.trace] == list(range(125))

    def test_all_combos_infeasible(self, pinch_hand: HandKinematics) -> None:
        doc = copy.deepcopy(fixtures.pinch_grasps_document())
        doc["grasps"][0]["contacts"] = doc["grasps"][0]["contacts"][:1]
        doc["grasps"][0]["name"] = "poke"
        grasps = load_grasps(doc, pinch_hand)
        with pytest.raises(InfeasibleSearchError) as exc:
            force_optimize(pinch_hand, grasps, load_grid(fixtures.pinch_force_grid_document()))
        assert exc.value.blocking_grasps == ["poke"]

    def test_no_contact_grasps(self, tripod_hand: HandKinematics, tripod_grasps) -> None:
        grid = load_grid(fixtures.tripod_force_grid_document())
        with pytest.raises(GraspModelError, match="at least one grasp"):
            force_optimize(tripod_hand, tripod_grasps[1:], grid)

    def test_grid_must_cover_crossed_joints(self, pinch_hand: HandKinematics, pinch_grasps) -> None:
        grid = load_grid({"parameters": {"r_a": {"values_mm": [1.0, 2.0]}}})
        with pytest.raises(GridError, match="unset"):
            force_optimize(pinch_hand, pinch_grasps, grid)

    def test_rejects_stiffness_axes(self, pinch_hand: HandKinematics, pinch_grasps) -> None:
        doc = fixtures.pinch_force_grid_document()
        doc["parameters"]["K_a"] = {"values_nmm_per_rad": [1.0]}
        with pytest.raises(GridError, match="not searched here"):
            force_optimize(pinch_hand, pinch_grasps, load_grid(doc))

    def test_weights_recorded(self, pinch_hand: HandKinematics) -> None:
        doc = copy.deepcopy(fixtures.pinch_grasps_document())
        doc["grasps"][0]["weight"] = 2.5
        grasps = load_grasps(doc, pinch_hand)
        report = force_optimize(pinch_hand, grasps, load_grid(fixtures.pinch_force_grid_document()))
        assert report.weights == {"pinch": 2.5}
        assert report.best_params[ParamKind.MOMENT_ARM.value].keys() == {"a", "b"}

    def test_qp_tol_reaches_feasible_start(
        self, pinch_hand: HandKinematics, pinch_grasps, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        seen: list[float] = []

        def spy(m: GraspMatrices, *, tol: float) -> np.ndarray | None:
            seen.append(tol)
            return feasible_start(m, tol=tol)

        monkeypatch.setattr(force_module, "feasible_start", spy)
        grid = load_grid(fixtures.pinch_force_grid_document())
        force_optimize(pinch_hand, pinch_grasps, grid, tol=1e-5)
        assert seen == [1e-5] * sum(1 for g in pinch_grasps if g.contacts)
