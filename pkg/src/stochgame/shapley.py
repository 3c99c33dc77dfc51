"""Shapley operator and the three value computations.

* discounted values with optimal stationary profiles (fixed-point iteration),
* finite-horizon values with optimal Markov strategies (backward induction),
* limit-value estimation along a decreasing discount grid.

The discounted stage weight ``discount`` multiplies the current payoff and
``1 - discount`` the continuation, so the total payoff is the Abel mean of
the stage payoffs.  The n-stage recursion uses stage weight 1/r when r
stages remain, which evaluates the Cesaro mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError
from .game import MarkovStrategy, StationaryStrategy, StochasticGame
from .matrix import solve_matrix_game, value_batch


@dataclass(frozen=True, eq=False)
class DiscountedSolution:
    """Fixed point of the discounted Shapley operator plus optimal profile.

    ``residual`` is the sup-norm of (operator applied to value) - value,
    measured from the strategy-extraction solves, so it is an independent
    check rather than a copy of the stopping test.
    """

    discount: float
    value: np.ndarray
    x: StationaryStrategy
    y: StationaryStrategy
    residual: float


@dataclass(frozen=True, eq=False)
class FiniteHorizonSolution:
    """Backward-induction values v_1..v_n and optimal Markov strategies.

    ``values[m - 1]`` is the value of the m-stage game (per state); the
    stage-m mixed actions of the returned strategies are optimal in the
    local one-shot game with n - m + 1 stages remaining.
    """

    horizon: int
    values: np.ndarray
    x_strategies: MarkovStrategy
    y_strategies: MarkovStrategy

    def value_at(self, num_stages: int) -> np.ndarray:
        if not 1 <= num_stages <= self.horizon:
            raise InputError(f"num_stages {num_stages} outside [1, {self.horizon}]")
        return self.values[num_stages - 1]


@dataclass(frozen=True, eq=False)
class LimitValueEstimate:
    """Discounted value at the smallest grid point, with a dispersion bar.

    ``dispersion`` is the largest sup-norm gap between consecutive grid
    solutions; callers should treat it as the error bar on the limit value.
    """

    value: np.ndarray
    dispersion: float
    discounts: tuple[float, ...]


def local_game_tensor(game: StochasticGame, discount: float, continuation: np.ndarray) -> np.ndarray:
    """Per-state one-shot matrices: discount * payoff + (1-discount) * E[continuation]."""
    cont = game.transition @ continuation
    return discount * game.payoff + (1.0 - discount) * cont


def _check_discount(discount: float, *, allow_one: bool = True) -> float:
    discount = float(discount)
    upper_ok = discount <= 1.0 if allow_one else discount < 1.0
    if not (0.0 < discount and upper_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise InputError(f"discount must lie in {bound}, got {discount!r}")
    return discount


def shapley_operator(game: StochasticGame, discount: float, values) -> np.ndarray:
    """One application of the discounted minimax backup to ``values``."""
    discount = _check_discount(discount)
    v = np.asarray(values, dtype=float)
    if v.shape != (game.num_states,) or not np.isfinite(v).all():
        raise InputError("values must be a finite vector over the game's states")
    return value_batch(local_game_tensor(game, discount, v))


def default_iteration_cap(game: StochasticGame, discount: float, tol: float) -> int:
    """Iterations guaranteed to reach residual tol * discount from v = 0."""
    gmax = game.max_abs_payoff
    target = tol * discount
    if discount >= 1.0 or gmax == 0.0 or target >= 2.0 * gmax:
        return 4
    return math.ceil(math.log(target / (2.0 * gmax)) / math.log1p(-discount)) + 16


def discounted_value(
    game: StochasticGame,
    discount: float,
    tol: float = 1e-8,
    max_iterations: int | None = None,
) -> DiscountedSolution:
    """Discounted value and optimal stationary profile.

    Iterates the Shapley operator from v = 0 until the residual drops below
    ``tol * discount``; by the contraction factor 1 - discount this bounds
    the distance to the fixed point by ``tol`` uniformly in the discount.
    Strategies are extracted from the local games at the final iterate only.
    """
    discount = _check_discount(discount)
    if not tol > 0.0:
        raise InputError("tol must be positive")
    ns = game.num_states
    target = tol * discount
    cap = default_iteration_cap(game, discount, tol) if max_iterations is None else max_iterations
    flat_transition = game.transition.reshape(-1, ns)
    shape = game.payoff.shape

    v = np.zeros(ns)
    residual = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, cap + 1):
        local = discount * game.payoff + (1.0 - discount) * (flat_transition @ v).reshape(shape)
        w = value_batch(local)
        residual = float(np.abs(w - v).max())
        v = w
        if residual <= target:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"discounted value iteration at discount {discount} stopped after "
            f"{iterations} iterations with residual {residual:.3e} > {target:.3e}",
            residual=residual,
            iterations=iterations,
        )

    local = local_game_tensor(game, discount, v)
    xs = np.empty((ns, game.num_actions1))
    ys = np.empty((ns, game.num_actions2))
    applied = np.empty(ns)
    for s in range(ns):
        sol = solve_matrix_game(local[s])
        xs[s] = sol.row_strategy
        ys[s] = sol.col_strategy
        applied[s] = sol.value
    residual = float(np.abs(applied - v).max())
    return DiscountedSolution(discount, v, StationaryStrategy(xs), StationaryStrategy(ys), residual)


def finite_values(game: StochasticGame, horizon: int) -> np.ndarray:
    """Values v_1..v_n of the 1..n stage games, shape (n, states).

    Value-only backward induction; use :func:`finite_value` when the optimal
    Markov strategies are needed as well.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    ns = game.num_states
    flat_transition = game.transition.reshape(-1, ns)
    shape = game.payoff.shape
    out = np.empty((horizon, ns))
    v = np.zeros(ns)
    for r in range(1, horizon + 1):
        weight = 1.0 / r
        local = weight * game.payoff + (1.0 - weight) * (flat_transition @ v).reshape(shape)
        v = value_batch(local)
        out[r - 1] = v
    return out


def finite_value(game: StochasticGame, horizon: int) -> FiniteHorizonSolution:
    """Values and optimal Markov strategies of the n-stage game.

    Stage m of the returned strategies plays the optimal mixed action of the
    local game with r = n - m + 1 remaining stages, i.e. the strategies
    realize the backward-induction solution.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    ns = game.num_states
    values = np.empty((horizon, ns))
    x_by_remaining: list[StationaryStrategy] = []
    y_by_remaining: list[StationaryStrategy] = []
    v = np.zeros(ns)
    for r in range(1, horizon + 1):
        local = local_game_tensor(game, 1.0 / r, v)
        xs = np.empty((ns, game.num_actions1))
        ys = np.empty((ns, game.num_actions2))
        for s in range(ns):
            sol = solve_matrix_game(local[s])
            xs[s] = sol.row_strategy
            ys[s] = sol.col_strategy
            v[s] = sol.value
        values[r - 1] = v
        x_by_remaining.append(StationaryStrategy(xs))
        y_by_remaining.append(StationaryStrategy(ys))
    # stage m plays the solution with n - m + 1 stages remaining
    x_stages = list(reversed(x_by_remaining))
    y_stages = list(reversed(y_by_remaining))
    return FiniteHorizonSolution(
        horizon,
        values,
        MarkovStrategy.from_stages(x_stages),
        MarkovStrategy.from_stages(y_stages),
    )


def limit_value_estimate(
    game: StochasticGame,
    discounts,
    tol: float = 1e-8,
) -> LimitValueEstimate:
    """Estimate the limit value from a decreasing discount grid.

    Returns the discounted value at the smallest grid point together with
    the maximal sup-norm gap between consecutive grid solutions.  No
    extrapolation is attempted; the dispersion is reported, never hidden.
    """
    grid = tuple(float(d) for d in discounts)
    if not grid:
        raise InputError("discount grid must be non-empty")
    if any(not 0.0 < d <= 1.0 for d in grid):
        raise InputError("discounts must lie in (0, 1]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise InputError("discount grid must be strictly decreasing")
    if grid[-1] > 1e-3:
        raise InputError("smallest grid discount must be at most 1e-3")
    solutions = [discounted_value(game, d, tol) for d in grid]
    dispersion = 0.0
    for a, b in zip(solutions, solutions[1:]):
        dispersion = max(dispersion, float(np.abs(a.value - b.value).max()))
    return LimitValueEstimate(solutions[-1].value, dispersion, grid)
