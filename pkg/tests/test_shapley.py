import numpy as np
import pytest

from stochgame import (
    ConvergenceError,
    InputError,
    StochasticGame,
    discounted_value,
    finite_value,
    finite_values,
    limit_value_estimate,
    local_game_tensor,
    shapley_operator,
    solve_matrix_game,
)
from stochgame.corpus import big_match, random_game, single_player_mdp

from oracles import (
    bisection_big_match_discounted,
    finite_values_recursion,
    mdp_discounted_value_iteration,
    mdp_finite_values,
    mdp_policy_enumeration_discounted,
)


def constant_game(value, num_states=2):
    return StochasticGame(
        states=tuple(f"s{k}" for k in range(num_states)),
        actions1=("a0", "a1"),
        actions2=("b0", "b1"),
        payoff=np.full((num_states, 2, 2), value),
        transition=np.full((num_states, 2, 2, num_states), 1.0 / num_states),
    )


class TestOperator:
    def test_full_discount_ignores_continuation(self):
        game = random_game(2, 2, 2, seed=1).game
        out1 = shapley_operator(game, 1.0, np.zeros(2))
        out2 = shapley_operator(game, 1.0, np.array([5.0, -7.0]))
        np.testing.assert_allclose(out1, out2, atol=1e-14)
        expected = [solve_matrix_game(game.payoff[s]).value for s in range(2)]
        np.testing.assert_allclose(out1, expected, atol=1e-10)

    def test_single_state_constant_game_is_affine(self):
        game = constant_game(2.0, num_states=1)
        for discount in (0.3, 0.8):
            for v in (-1.0, 0.0, 4.0):
                got = shapley_operator(game, discount, [v])
                assert got[0] == pytest.approx(discount * 2.0 + (1 - discount) * v, abs=1e-14)

    def test_decision_problem_matches_bellman_update(self):
        game = single_player_mdp().game
        v = np.array([0.1, 0.4, 0.9])
        discount = 0.3
        got = shapley_operator(game, discount, v)
        expected = np.array(
            [
                max(
                    discount * game.payoff[s, i, 0]
                    + (1 - discount) * float(game.transition[s, i, 0] @ v)
                    for i in range(2)
                )
                for s in range(3)
            ]
        )
        np.testing.assert_allclose(got, expected, atol=1e-14)

    def test_contraction_on_seeded_tuples(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            game = random_game(int(rng.integers(1, 4)), 2, 2, int(rng.integers(0, 10_000))).game
            discount = float(rng.uniform(0.05, 1.0))
            v = rng.uniform(-2, 2, game.num_states)
            w = rng.uniform(-2, 2, game.num_states)
            lhs = np.abs(shapley_operator(game, discount, v) - shapley_operator(game, discount, w)).max()
            assert lhs <= (1 - discount) * np.abs(v - w).max() + 1e-10

    def test_monotone_in_values(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            game = random_game(2, 2, 2, int(rng.integers(0, 10_000))).game
            discount = float(rng.uniform(0.05, 0.95))
            v = rng.uniform(-2, 2, 2)
            w = v + rng.uniform(0.0, 1.0, 2)
            assert (
                shapley_operator(game, discount, v) <= shapley_operator(game, discount, w) + 1e-10
            ).all()


class TestDiscountedValue:
    def test_constant_game_has_constant_value(self):
        game = constant_game(0.4)
        for discount in (1.0, 0.5, 0.05):
            sol = discounted_value(game, discount, tol=1e-10)
            np.testing.assert_allclose(sol.value, 0.4, atol=1e-9)

    def test_big_match_active_value_half(self):
        game = big_match().game
        for discount in (0.1, 0.01):
            oracle = bisection_big_match_discounted(discount)
            sol = discounted_value(game, discount, tol=1e-8)
            assert sol.value[0] == pytest.approx(oracle, abs=1e-6)
            assert sol.value[0] == pytest.approx(0.5, abs=1e-6)

    def test_decision_problem_against_value_iteration_oracle(self):
        game = single_player_mdp().game
        sol = discounted_value(game, 0.25, tol=1e-10)
        oracle = mdp_discounted_value_iteration(game, 0.25)
        np.testing.assert_allclose(sol.value, oracle, atol=1e-8)

    def test_decision_problem_against_policy_enumeration(self):
        game = single_player_mdp().game
        sol = discounted_value(game, 0.25, tol=1e-10)
        oracle = mdp_policy_enumeration_discounted(game, 0.25)
        np.testing.assert_allclose(sol.value, oracle, atol=1e-8)

    def test_residual_within_tolerance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            game = random_game(2, 2, 2, int(rng.integers(0, 10_000))).game
            discount = float(rng.uniform(0.05, 0.9))
            sol = discounted_value(game, discount, tol=1e-8)
            assert sol.residual <= 1e-8 * discount

    def test_extracted_profile_is_locally_optimal(self):
        game = random_game(3, 2, 2, seed=8).game
        sol = discounted_value(game, 0.2, tol=1e-9)
        local = local_game_tensor(game, 0.2, sol.value)
        for s in range(3):
            reference = solve_matrix_game(local[s])
            assert (sol.x.probs[s] @ local[s]).min() >= reference.value - 1e-8
            assert (local[s] @ sol.y.probs[s]).max() <= reference.value + 1e-8

    def test_shapley_consistency_with_extracted_strategy(self):
        # holding the extracted Player 1 strategy fixed, the best pure reply
        # reproduces the fixed point up to residual + solver gap
        game = random_game(3, 2, 2, seed=15).game
        sol = discounted_value(game, 0.3, tol=1e-9)
        local = local_game_tensor(game, 0.3, sol.value)
        replies = np.einsum("si,sij->sj", sol.x.probs, local).min(axis=1)
        assert np.abs(replies - sol.value).max() <= sol.residual + 1e-8

    def test_value_bounded_by_max_payoff(self):
        from stochgame.corpus import CORPUS

        pool = [random_game(2, 2, 2, seed).game for seed in range(20)]
        pool += [ctor().game for ctor in CORPUS.values()]
        for game in pool:
            sol = discounted_value(game, 0.2, tol=1e-8)
            assert np.abs(sol.value).max() <= game.max_abs_payoff + 1e-8

    def test_iteration_cap_raises_with_residual(self):
        game = big_match().game
        with pytest.raises(ConvergenceError) as info:
            discounted_value(game, 0.01, tol=1e-10, max_iterations=3)
        assert info.value.residual > 0.0
        assert info.value.iterations == 3

    def test_bad_discount_rejected(self):
        game = big_match().game
        for bad in (0.0, -0.1, 1.1):
            with pytest.raises(InputError):
                discounted_value(game, bad)


class TestFiniteValue:
    def test_one_stage_is_one_shot_value(self):
        game = random_game(2, 2, 2, seed=4).game
        sol = finite_value(game, 1)
        expected = [solve_matrix_game(game.payoff[s]).value for s in range(2)]
        np.testing.assert_allclose(sol.values[0], expected, atol=1e-12)

    def test_constant_game_all_horizons(self):
        game = constant_game(-0.7)
        sol = finite_value(game, 12)
        np.testing.assert_allclose(sol.values, -0.7, atol=1e-12)

    def test_matches_independent_recursion_oracle(self):
        game = random_game(2, 2, 2, seed=42).game
        oracle = finite_values_recursion(game, 3)
        got = finite_values(game, 3)
        for m in range(3):
            np.testing.assert_allclose(got[m], oracle[m], atol=1e-9)

    def test_values_only_path_matches_full_solve(self):
        game = random_game(2, 2, 2, seed=12).game
        np.testing.assert_allclose(finite_values(game, 6), finite_value(game, 6).values, atol=1e-10)

    def test_decision_problem_matches_dp_oracle(self):
        game = single_player_mdp().game
        oracle = mdp_finite_values(game, 20)
        got = finite_values(game, 20)
        for m in range(20):
            np.testing.assert_allclose(got[m], oracle[m], atol=1e-12)

    def test_strategy_stage_actions_solve_local_games(self):
        game = random_game(2, 2, 2, seed=5).game
        n = 4
        sol = finite_value(game, n)
        v_prev = np.zeros(2)
        for r in range(1, n + 1):
            local = local_game_tensor(game, 1.0 / r, v_prev)
            stage = n - r + 1
            for s in range(2):
                guarantee = (sol.x_strategies.at_stage(stage).probs[s] @ local[s]).min()
                assert guarantee >= sol.values[r - 1][s] - 1e-9
            v_prev = sol.values[r - 1]

    def test_bounded_by_max_payoff(self):
        from stochgame.corpus import CORPUS

        pool = [random_game(2, 2, 2, seed).game for seed in range(20)]
        pool += [ctor().game for ctor in CORPUS.values()]
        for game in pool:
            assert np.abs(finite_values(game, 15)).max() <= game.max_abs_payoff + 1e-12


class TestLimitValue:
    def test_constant_game_zero_dispersion(self):
        game = constant_game(0.25)
        est = limit_value_estimate(game, [1e-1, 1e-2, 1e-3], tol=1e-10)
        np.testing.assert_allclose(est.value, 0.25, atol=1e-9)
        assert est.dispersion <= 1e-9

    def test_big_match_limit_half(self):
        est = limit_value_estimate(big_match().game, [1e-1, 1e-2, 1e-3])
        oracle = bisection_big_match_discounted(1e-3)
        assert est.value[0] == pytest.approx(oracle, abs=1e-3)
        assert est.value[0] == pytest.approx(0.5, abs=1e-3)

    def test_absorbing_only_game_matches_per_state_one_shot_values(self):
        # every state absorbing: the limit value is each state's one-shot value
        rng = np.random.default_rng(3)
        payoff = rng.uniform(-1, 1, (3, 2, 2))
        transition = np.zeros((3, 2, 2, 3))
        for s in range(3):
            transition[s, :, :, s] = 1.0
        game = StochasticGame(
            ("s0", "s1", "s2"), ("a0", "a1"), ("b0", "b1"), payoff, transition
        )
        est = limit_value_estimate(game, [1e-1, 1e-2, 1e-3], tol=1e-12)
        expected = [solve_matrix_game(payoff[s]).value for s in range(3)]
        np.testing.assert_allclose(est.value, expected, atol=1e-9)
        assert est.dispersion <= 1e-10

    def test_grid_preconditions(self):
        game = constant_game(0.0)
        with pytest.raises(InputError):
            limit_value_estimate(game, [1e-3, 1e-2])  # increasing
        with pytest.raises(InputError):
            limit_value_estimate(game, [1e-1, 1e-2])  # does not reach 1e-3
