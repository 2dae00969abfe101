import numpy as np
import pytest

from gossipsim import (
    OpinionGossipState,
    build_network,
    fj_fixed_point,
    fj_sync_step,
    fj_system,
    gossip_coefficients,
    gossip_opinion_step,
    iterate_sync,
    opinion_kernels,
    random_influence_network,
    run_gossip_opinions,
    stubborn_reachability_check,
    verify_expectation,
)
from gossipsim.errors import (
    AssumptionViolated,
    EdgeNotInGraph,
    NegativeEntry,
    NotRowStochastic,
)


def cycle_network():
    # pure rotation: nobody is stubborn
    w = np.roll(np.eye(3), 1, axis=1)
    return build_network(w, np.array([1.0, 2.0, 3.0]))


class TestBuildNetwork:
    def test_identity_weights_fully_stubborn(self):
        net = build_network(np.eye(3), np.zeros(3))
        np.testing.assert_array_equal(net.susceptibility, 0.0)

    def test_three_agent_susceptibility(self, three_agent_network):
        np.testing.assert_allclose(
            three_agent_network.susceptibility, [0.5, 2.0 / 3.0, 0.5]
        )

    def test_row_sum_guard(self):
        w = np.array([[0.5, 0.4, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 0.5, 0.5]])
        with pytest.raises(NotRowStochastic):
            build_network(w, np.zeros(3))

    def test_negative_entry_guard(self):
        w = np.array([[1.2, -0.2, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 0.5, 0.5]])
        with pytest.raises(NegativeEntry):
            build_network(w, np.zeros(3))

    def test_structural_self_loops_present(self, three_agent_network):
        for i in range(3):
            assert (i, i) in three_agent_network.edge_set

    def test_degrees_count_self_loop(self, three_agent_network):
        np.testing.assert_array_equal(three_agent_network.out_degrees, [2, 3, 2])


class TestReachability:
    def test_all_self_weights_positive(self, three_agent_network):
        assert stubborn_reachability_check(three_agent_network)

    def test_rotation_has_no_stubborn_agent(self):
        assert not stubborn_reachability_check(cycle_network())

    def test_star_with_stubborn_center(self):
        w = np.array([
            [0.5, 0.25, 0.25],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
        ])
        net = build_network(w, np.zeros(3))
        assert stubborn_reachability_check(net)


class TestFixedPoint:
    def test_uniform_prejudice_is_consensus(self, three_agent_network):
        net = build_network(three_agent_network.weights, np.full(3, 0.7))
        np.testing.assert_allclose(fj_fixed_point(net), 0.7, atol=1e-12)

    def test_fully_stubborn_keep_prejudices(self):
        net = build_network(np.eye(3), np.array([1.0, -2.0, 0.5]))
        np.testing.assert_allclose(fj_fixed_point(net), [1.0, -2.0, 0.5], atol=0)

    def test_dual_method_oracle(self, three_agent_network):
        direct = fj_fixed_point(three_agent_network)
        traj = iterate_sync(
            fj_system(three_agent_network), three_agent_network.prejudices, 10**4
        )
        np.testing.assert_allclose(direct, traj.final, atol=1e-12)

    def test_requires_reachability(self):
        with pytest.raises(AssumptionViolated):
            fj_fixed_point(cycle_network())


class TestSyncStep:
    def test_fixed_point_is_invariant(self, three_agent_network):
        x = fj_fixed_point(three_agent_network)
        np.testing.assert_allclose(fj_sync_step(three_agent_network, x), x, atol=1e-12)

    def test_fully_stubborn_jump_to_prejudice(self):
        net = build_network(np.eye(3), np.array([0.1, 0.2, 0.3]))
        np.testing.assert_array_equal(
            fj_sync_step(net, np.array([9.0, 9.0, 9.0])), [0.1, 0.2, 0.3]
        )

    def test_hand_multiplication(self, three_agent_network):
        net = three_agent_network
        v = net.prejudices
        lam = np.diag(net.susceptibility)
        expected = lam @ net.weights @ v + (np.eye(3) - lam) @ v
        np.testing.assert_allclose(fj_sync_step(net, v), expected, atol=1e-15)


class TestGossipCoefficients:
    def test_isolated_stubborn_agent(self):
        w = np.eye(3)
        w[1] = [0.25, 0.5, 0.25]
        net = build_network(w, np.zeros(3))
        coeffs = gossip_coefficients(net)
        assert coeffs.openness[0] == 0.0
        assert coeffs.mixing[0, 0] == 1.0
        np.testing.assert_array_equal(coeffs.mixing[0, 1:], 0.0)

    def test_hand_evaluation(self):
        # agent 0: self weight 0.5, one neighbour, degree 2
        w = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
        net = build_network(w, np.zeros(3))
        coeffs = gossip_coefficients(net)
        assert coeffs.openness[0] == pytest.approx(0.75)
        assert coeffs.mixing[0, 0] == pytest.approx(2.0 / 3.0)
        assert coeffs.mixing[0, 1] == pytest.approx(1.0 / 3.0)

    def test_rows_stochastic_on_random_networks(self):
        for seed in range(25):
            net = random_influence_network(6, seed=seed)
            coeffs = gossip_coefficients(net)
            np.testing.assert_allclose(coeffs.mixing.sum(axis=1), 1.0, atol=1e-12)
            assert coeffs.mixing.min() >= 0.0

    def test_meetings_less_obstinate_than_rounds(self):
        # openness >= susceptibility whenever the agent has real neighbours
        for seed in range(10):
            net = random_influence_network(8, seed=seed)
            coeffs = gossip_coefficients(net)
            lam = net.susceptibility
            deg = net.out_degrees
            mask = deg >= 2
            assert np.all(coeffs.openness[mask] >= lam[mask] - 1e-15)

    def test_non_stochastic_rows_surface_as_invariant_violation(self):
        from gossipsim import InfluenceNetwork
        from gossipsim.errors import InvariantViolation

        # bypass build_network's validation: deficient rows make the
        # computed mixing rows sum away from one
        w = np.array([[0.2, 0.1, 0.0], [0.0, 0.3, 0.2], [0.1, 0.0, 0.4]])
        net = InfluenceNetwork(weights=w, prejudices=np.zeros(3))
        with pytest.raises(InvariantViolation):
            gossip_coefficients(net)


class TestGossipStep:
    def test_zero_openness_snaps_to_prejudice(self):
        w = np.eye(3)
        w[1] = [0.25, 0.5, 0.25]
        net = build_network(w, np.array([5.0, 0.0, -5.0]))
        coeffs = gossip_coefficients(net)
        state = OpinionGossipState.initial(net)
        state.x[:] = [9.0, 9.0, 9.0]
        gossip_opinion_step(state, net, coeffs, (0, 0))
        assert state.x[0] == 5.0

    def test_self_anchoring_when_mixing_zero(self, three_agent_network):
        net = three_agent_network
        coeffs = gossip_coefficients(net)
        state = OpinionGossipState.initial(net)
        # meeting yourself never imports the partner's opinion
        before = state.x[0]
        gossip_opinion_step(state, net, coeffs, (0, 0))
        hi = coeffs.openness[0]
        assert state.x[0] == pytest.approx(hi * before + (1 - hi) * net.prejudices[0])

    def test_arithmetic_plug(self):
        # openness 0.75, mixing 1/3, x = (0, 1, .), prejudice 1
        w = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
        net = build_network(w, np.array([1.0, 0.0, 0.0]))
        coeffs = gossip_coefficients(net)
        state = OpinionGossipState.initial(net)
        state.x[:] = [0.0, 1.0, 0.5]
        gossip_opinion_step(state, net, coeffs, (0, 1))
        assert state.x[0] == pytest.approx(0.75 * (2 / 3 * 0.0 + 1 / 3 * 1.0) + 0.25 * 1.0)
        assert state.x[0] == pytest.approx(0.5)

    def test_unknown_edge(self, three_agent_network):
        net = three_agent_network
        coeffs = gossip_coefficients(net)
        state = OpinionGossipState.initial(net)
        with pytest.raises(EdgeNotInGraph):
            gossip_opinion_step(state, net, coeffs, (0, 2) if (0, 2) not in net.edge_set else (2, 0))

    def test_fast_loop_matches_reference_bitwise(self, three_agent_network):
        from gossipsim._fastloops import opinions_loop

        net = three_agent_network
        coeffs = gossip_coefficients(net)
        rng = np.random.default_rng(8)
        edges = net.edges
        draws = rng.integers(0, len(edges), size=500).astype(np.int64)

        ref = OpinionGossipState.initial(net)
        for e in draws:
            gossip_opinion_step(ref, net, coeffs, edges[e])

        fast = OpinionGossipState.initial(net)
        edge_i = np.array([e[0] for e in edges], dtype=np.int64)
        edge_j = np.array([e[1] for e in edges], dtype=np.int64)
        edge_mix = np.array([coeffs.mixing[i, j] for i, j in edges])
        opinions_loop(
            fast.x, fast.xbar, edge_i, edge_j, edge_mix,
            coeffs.openness, net.prejudices, draws, 1.0,
        )
        np.testing.assert_array_equal(ref.x, fast.x)
        np.testing.assert_array_equal(ref.xbar, fast.xbar)


class TestKernels:
    def test_expectation_identity(self, three_agent_network):
        net = three_agent_network
        dist = opinion_kernels(net)
        target = fj_system(net)
        report = verify_expectation(
            dist, target.p, target.u, 1.0 / len(net.edges), tolerance=1e-13
        )
        assert report.passed

    def test_expected_input(self, three_agent_network):
        net = three_agent_network
        dist = opinion_kernels(net)
        expected = (1.0 - net.susceptibility) * net.prejudices / len(net.edges)
        np.testing.assert_allclose(dist.expected_u(), expected, atol=1e-16)


class TestRunGossip:
    def test_uniform_prejudice_never_moves(self, three_agent_network):
        net = build_network(three_agent_network.weights, np.full(3, 1.5))
        result = run_gossip_opinions(net, 2000, seed=1)
        np.testing.assert_allclose(result.state.x, 1.5, atol=1e-12)
        np.testing.assert_allclose(result.state.xbar, 1.5, atol=1e-12)

    def test_fully_stubborn_never_move(self):
        net = build_network(np.eye(3), np.array([1.0, 0.0, -1.0]))
        result = run_gossip_opinions(net, 2000, seed=2)
        np.testing.assert_array_equal(result.state.x, net.prejudices)
        np.testing.assert_array_equal(result.state.xbar, net.prejudices)

    def test_three_agent_average_converges(self, three_agent_network):
        result = run_gossip_opinions(three_agent_network, 10**6, seed=3)
        target = fj_fixed_point(three_agent_network)
        assert np.abs(result.state.xbar - target).max() <= 1e-2

    def test_beliefs_stay_in_prejudice_hull(self):
        net = random_influence_network(6, seed=5)
        result = run_gossip_opinions(net, 20000, seed=5, thin=200)
        lo, hi = net.prejudices.min(), net.prejudices.max()
        x_log = result.log.columns["x"]
        assert x_log.min() >= lo - 1e-12
        assert x_log.max() <= hi + 1e-12

    def test_requires_reachability(self):
        with pytest.raises(AssumptionViolated):
            run_gossip_opinions(cycle_network(), 100, seed=0)
