"""Solver-state tests: initialization, coordinate updates, the maintained
inverse, objective bookkeeping, and the refresh path.

Oracle: direct dense inversion (SciPy) of the freshly assembled model
matrix, plus hand-derived update values on two-node instances.
"""
import math

import numpy as np
import pytest

from covgraph import (
    GraphValidationError,
    SingularModelError,
    all_pairs,
    as_covariance,
    edge_cost,
    edge_update,
    evaluate_objective,
    init_state,
    refresh_phi,
    vertex_update,
)
from covgraph.learn import epoch, kernel_weights
from covgraph.bench import VariogramSpec, sample_locations, variogram_covariance
from _support import kernel_spd_covariance
from oracles import direct_inverse_oracle

S2 = np.array([[1.0, 0.5], [0.5, 1.0]])


def joint_state(S, w0=None, q0=1.0, q_min=1e-4):
    S = as_covariance(S).entries
    n = S.shape[0]
    pairs = all_pairs(n)
    if w0 is None:
        w0 = np.zeros(len(pairs))
    return init_state(S, pairs, w0, q0=q0, q_min=q_min)


class TestEdgeCost:
    def test_correlated_pair(self):
        assert edge_cost(S2, 0, 1) == pytest.approx(1.0)

    def test_identity_covariance(self):
        assert edge_cost(np.eye(3), 0, 2) == pytest.approx(2.0)

    def test_perfect_correlation_rejected(self):
        with pytest.raises(GraphValidationError, match="degenerate"):
            edge_cost(np.array([[10.0, 10.0], [10.0, 10.0]]), 0, 1)


class TestInitState:
    def test_identity_start(self):
        state = joint_state(S2, q0=1.0)
        np.testing.assert_allclose(state.phi, np.eye(2), atol=1e-14)
        # -logdet(I) = 0, so the objective is the trace term alone.
        assert state.objective == pytest.approx(np.trace(S2))

    def test_baseline_phi_matches_direct_inversion(self):
        state = init_state(S2, [(0, 1)], [1.0])
        L = np.array([[1.0, -1.0], [-1.0, 1.0]])
        oracle = direct_inverse_oracle(L + 0.5)
        np.testing.assert_allclose(state.phi, oracle, atol=1e-12)

    def test_baseline_empty_graph_is_singular(self):
        with pytest.raises(SingularModelError, match="connected"):
            init_state(np.eye(3), all_pairs(3), np.zeros(3))

    def test_baseline_disconnected_graph_is_singular(self):
        S = kernel_spd_covariance(4, seed=0).entries
        pairs = [(0, 1), (2, 3)]
        with pytest.raises(SingularModelError):
            init_state(S, pairs, [1.0, 1.0])

    def test_q0_below_floor_rejected(self):
        with pytest.raises(GraphValidationError, match="q_min"):
            joint_state(S2, q0=1e-6, q_min=1e-4)

    def test_negative_initial_weight_rejected(self):
        with pytest.raises(GraphValidationError, match="nonnegative"):
            init_state(S2, [(0, 1)], [-1.0], q0=1.0, q_min=1e-4)


class TestEdgeUpdate:
    def test_hand_derived_first_step(self):
        # From phi = I: resistance 2, cost 1, step max(-0, 1/1 - 1/2) = 0.5.
        state = joint_state(S2)
        upd = edge_update(state, 0)
        assert upd.cost == pytest.approx(1.0)
        assert upd.effective == pytest.approx(2.0)
        assert upd.delta == pytest.approx(0.5)
        assert state.w[0] == pytest.approx(0.5)
        np.testing.assert_allclose(state.phi, [[0.75, 0.25], [0.25, 0.75]], atol=1e-14)

    def test_stationary_coordinate_is_untouched(self):
        # Identity covariance: from phi = I after importances settle, each
        # pair has matching cost and resistance.
        state = joint_state(np.eye(2), q0=1.0, q_min=1e-4)
        phi_before = state.phi.copy()
        upd = edge_update(state, 0)
        assert upd.delta == 0.0
        np.testing.assert_array_equal(state.phi, phi_before)

    def test_clamped_at_zero_exactly(self):
        state = joint_state(S2, w0=np.array([0.5]))
        # Make the unconstrained step far more negative than -w by doctoring
        # the maintained inverse (tiny effective resistance).
        state.phi = np.array([[0.026, 0.001], [0.001, 0.026]])
        upd = edge_update(state, 0)
        assert upd.delta == -0.5
        assert state.w[0] == 0.0

    def test_monotone_descent_closed_form(self):
        state = joint_state(kernel_spd_covariance(5, seed=5))
        for sweep in range(30):
            for e in range(state.m):
                upd = edge_update(state, e)
                change = upd.delta * upd.cost - math.log1p(upd.delta * upd.effective)
                assert change <= 1e-12
            for i in range(state.n):
                upd = vertex_update(state, i)
                change = upd.delta * upd.cost - math.log1p(upd.delta * upd.effective)
                assert change <= 1e-12

    def test_objective_tracks_direct_evaluation(self):
        state = joint_state(kernel_spd_covariance(4, seed=9))
        for _ in range(50):
            epoch(state)
        assert state.objective == pytest.approx(evaluate_objective(state), abs=1e-10)


class TestVertexUpdate:
    def test_stationary_at_identity(self):
        state = joint_state(np.eye(3), q0=1.0)
        upd = vertex_update(state, 0)
        assert upd.delta == 0.0
        assert upd.cost == pytest.approx(1.0)
        assert upd.effective == pytest.approx(1.0)

    def test_clamps_to_floor_exactly(self):
        state = joint_state(kernel_spd_covariance(3, seed=2), q0=1.0, q_min=0.01)
        # Doctor the inverse so the unconstrained step dives past the floor.
        state.phi = np.eye(3) * 0.05
        vertex_update(state, 1)
        assert state.q[1] == 0.01

    def test_phi_consistent_with_direct_inversion(self):
        state = joint_state(kernel_spd_covariance(4, seed=3))
        for _ in range(5):
            for e in range(state.m):
                edge_update(state, e)
            for i in range(state.n):
                vertex_update(state, i)
        direct = direct_inverse_oracle(state.model_matrix())
        assert np.max(np.abs(state.phi - direct)) <= 1e-10

    def test_rejected_in_baseline_mode(self):
        state = init_state(S2, [(0, 1)], [1.0])
        with pytest.raises(ValueError, match="joint"):
            vertex_update(state, 0)


class TestObjective:
    def test_identity_model_identity_covariance(self):
        state = joint_state(np.eye(2), q0=1.0)
        assert evaluate_objective(state) == pytest.approx(2.0)

    def test_joint_closed_form_at_optimum(self):
        # At theta = S^{-1} the objective equals logdet(S) + n.
        state = joint_state(S2, w0=np.array([2.0 / 3.0]), q0=np.array([2 / 3, 2 / 3]), q_min=1e-4)
        assert evaluate_objective(state) == pytest.approx(np.log(0.75) + 2.0, abs=1e-12)

    def test_baseline_direct_evaluation(self):
        state = init_state(S2, [(0, 1)], [1.0])
        L = np.array([[1.0, -1.0], [-1.0, 1.0]])
        theta = L + 0.5
        expected = -np.linalg.slogdet(theta)[1] + np.sum(L * S2)
        assert evaluate_objective(state) == pytest.approx(expected, abs=1e-12)


class TestRefreshPhi:
    def test_no_drift_right_after_init(self):
        state = joint_state(kernel_spd_covariance(5, seed=1))
        assert refresh_phi(state) <= 1e-12

    def test_post_refresh_inverse_is_exact(self):
        sample = sample_locations(20, seed=8)
        S = variogram_covariance(sample, VariogramSpec(range_=0.2))
        pairs = all_pairs(20)
        state = init_state(S, pairs, kernel_weights(sample.points, pairs), q0=1.0, q_min=1e-4)
        for _ in range(60):
            epoch(state)
        drift = refresh_phi(state)
        assert drift < 1e-8  # measured accumulation, small but nonzero
        ident = state.phi @ state.model_matrix()
        assert np.max(np.abs(ident - np.eye(20))) <= 1e-12

    def test_joint_mode_never_singular(self):
        # Even an edgeless floor-level model stays positive definite.
        state = joint_state(np.eye(3), q0=1e-4, q_min=1e-4)
        refresh_phi(state)
        assert np.isfinite(state.objective)


class TestSharedUpdatePath:
    def test_modes_share_edge_update_given_same_inverse(self):
        # The edge update must depend on the mode only through phi: inject
        # the same inverse into both states and compare results bitwise.
        S = kernel_spd_covariance(4, seed=21)
        pairs = all_pairs(4)
        w0 = np.full(len(pairs), 0.25)
        joint = init_state(S, pairs, w0, q0=1.0, q_min=1e-4)
        base = init_state(S, pairs, w0)
        injected = direct_inverse_oracle(joint.model_matrix())
        joint.phi = injected.copy()
        base.phi = injected.copy()
        for e in range(len(pairs)):
            upd_j = edge_update(joint, e)
            upd_b = edge_update(base, e)
            assert upd_j.delta == upd_b.delta
            assert upd_j.effective == upd_b.effective
        np.testing.assert_array_equal(joint.phi, base.phi)
        np.testing.assert_array_equal(joint.w, base.w)

    def test_baseline_singularity_guard_clips(self):
        # Doctor a baseline state so the optimal step would push the
        # determinant factor 1 + delta*r below tolerance (effective
        # resistance vastly smaller than the edge cost): the step must be
        # clipped short of the singularity, not crash.
        state = init_state(S2, [(0, 1)], [1.0])
        state.w[0] = 3e12
        state.phi = np.array([[0.5 + 2.5e-13, 0.5], [0.5, 0.5 + 2.5e-13]])
        upd = edge_update(state, 0)
        assert state.singularity_clips == 1
        assert state.w[0] > 0.0
        assert upd.delta > -3e12
        assert np.all(np.isfinite(state.phi))


class TestEpochInvariant:
    def test_phi_inverse_identity_at_epoch_boundaries(self):
        for seed, mode in [(4, "joint"), (5, "baseline")]:
            S = kernel_spd_covariance(6, seed=seed)
            pairs = all_pairs(6)
            if mode == "joint":
                state = init_state(S, pairs, np.full(len(pairs), 1 / 6), q0=1.0, q_min=1e-4)
            else:
                state = init_state(S, pairs, np.full(len(pairs), 1 / 6))
            for _ in range(40):
                epoch(state)
                ident = state.phi @ state.model_matrix()
                assert np.max(np.abs(ident - np.eye(6))) <= 1e-6

    def test_rank_one_maintenance_exact_after_every_epoch(self):
        # Without any refresh the maintained inverse must track the direct
        # inverse at every epoch boundary.
        sample = sample_locations(10, seed=13)
        S = variogram_covariance(sample, VariogramSpec(range_=0.2))
        pairs = all_pairs(10)
        state = init_state(S, pairs, kernel_weights(sample.points, pairs), q0=1.0, q_min=1e-4)
        for _ in range(100):
            epoch(state)
            direct = direct_inverse_oracle(state.model_matrix())
            assert np.max(np.abs(state.phi - direct)) <= 1e-8

    def test_projection_exact_after_every_epoch(self):
        # Clamped arithmetic: bounds hold exactly, never within a tolerance.
        S = kernel_spd_covariance(6, seed=31)
        pairs = all_pairs(6)
        state = init_state(S, pairs, np.full(len(pairs), 1 / 6), q0=1.0, q_min=0.05)
        for _ in range(60):
            epoch(state)
            assert np.all(state.w >= 0.0)
            assert np.all(state.q >= 0.05)
