"""Exact evaluation of strategy profiles and optimality diagnostics.

Everything except :func:`monte_carlo_payoff` is computed by exact forward or
backward recursions on state distributions, so results carry only floating
accumulation error (order ``horizon * 1e-14 * max_abs_payoff``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .game import (
    MarkovStrategy,
    StationaryStrategy,
    StochasticGame,
    point_mass,
    profile_stage_payoffs,
    profile_transition_matrix,
)
from .shapley import finite_values


def stages_to_weight(discount: float, fraction: float) -> int:
    """First stage count whose cumulative discount weight reaches ``fraction``.

    This is the smallest M >= 1 with sum_{m<=M} d(1-d)^(m-1) >= fraction,
    equivalently 1 - (1-d)^M >= fraction.  The log-ratio ceiling gives the
    candidate; the defining inequality is then re-checked so the returned
    integer is exact even when the ratio lands on an integer boundary.
    """
    discount = float(discount)
    fraction = float(fraction)
    if not 0.0 < discount < 1.0:
        raise InputError(f"discount must lie in (0, 1), got {discount!r}")
    if not 0.0 <= fraction < 1.0:
        raise InputError(f"fraction must lie in [0, 1), got {fraction!r}")
    if fraction == 0.0:
        return 1
    stages = max(1, math.ceil(math.log1p(-fraction) / math.log1p(-discount)))
    remaining = 1.0 - fraction
    base = 1.0 - discount
    while stages > 1 and base ** (stages - 1) <= remaining:
        stages -= 1
    while base**stages > remaining:
        stages += 1
    return stages


def cumulative_stage(fraction: float, horizon: int) -> int:
    """Stage index ceil(fraction * horizon), clamped to [1, horizon].

    Decimal fractions are meant to land exactly on stage boundaries, so a
    1e-9 downward guard absorbs binary rounding of fraction * horizon.
    """
    return max(1, min(horizon, math.ceil(fraction * horizon - 1e-9)))


def _as_markov(strategy, horizon: int, who: str) -> MarkovStrategy:
    if isinstance(strategy, StationaryStrategy):
        return MarkovStrategy.from_stationary(strategy, horizon)
    if isinstance(strategy, MarkovStrategy):
        if strategy.horizon < horizon:
            raise InputError(
                f"{who} strategy horizon {strategy.horizon} is shorter than the requested {horizon}"
            )
        return strategy
    raise InputError(f"{who} strategy must be a StationaryStrategy or MarkovStrategy")


def _profile_strategies(profile, horizon: int) -> tuple[MarkovStrategy, MarkovStrategy]:
    if hasattr(profile, "sigma") and hasattr(profile, "rho"):
        sigma, rho = profile.sigma, profile.rho
    else:
        try:
            sigma, rho = profile
        except (TypeError, ValueError):
            raise InputError("profile must be an AdaptedProfile or a (sigma, rho) pair") from None
    return _as_markov(sigma, horizon, "Player 1"), _as_markov(rho, horizon, "Player 2")


def _joint_runs(sigma: MarkovStrategy, rho: MarkovStrategy, horizon: int):
    """Yield (length, x, y) runs over which both strategies are constant."""
    runs1 = iter(sigma.runs(horizon))
    runs2 = iter(rho.runs(horizon))
    len1, x = next(runs1)
    len2, y = next(runs2)
    done = 0
    while done < horizon:
        take = min(len1, len2)
        yield take, x, y
        done += take
        len1 -= take
        len2 -= take
        if len1 == 0 and done < horizon:
            len1, x = next(runs1)
        if len2 == 0 and done < horizon:
            len2, y = next(runs2)


@dataclass(frozen=True, eq=False)
class PayoffTrajectory:
    """Exact per-stage payoffs of a profile from one initial state.

    ``stage_payoffs[m - 1]`` is the expected stage-m payoff,
    ``cumulative[M]`` is (1/n) * sum of the first M stage payoffs
    (``cumulative[0] == 0``), and ``value_curve[m - 1]``, when present, is
    the expected reference value of the stage-m state for m = 1..n+1.
    """

    horizon: int
    initial_state: int
    stage_payoffs: np.ndarray
    cumulative: np.ndarray
    value_curve: np.ndarray | None = None

    @property
    def total_payoff(self) -> float:
        """Average payoff over the whole horizon."""
        return float(self.cumulative[-1])


def trajectory(
    game: StochasticGame,
    sigma,
    rho,
    initial_state,
    horizon: int,
    limit_value=None,
) -> PayoffTrajectory:
    """Exact expected stage payoffs under (sigma, rho) from ``initial_state``.

    When ``limit_value`` is given, also records the expected reference value
    of the state at every stage 1..n+1.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    sigma, rho = _as_markov(sigma, horizon, "Player 1"), _as_markov(rho, horizon, "Player 2")
    start = game.state_index(initial_state)
    vstar = None
    if limit_value is not None:
        vstar = np.asarray(limit_value, dtype=float)
        if vstar.shape != (game.num_states,):
            raise InputError("limit_value must be a vector over the game's states")

    dist = point_mass(game, start)
    stage_payoffs = np.empty(horizon)
    curve = np.empty(horizon + 1) if vstar is not None else None
    m = 0
    for length, x, y in _joint_runs(sigma, rho, horizon):
        rewards = profile_stage_payoffs(game, x, y)
        kernel = profile_transition_matrix(game, x, y)
        for _ in range(length):
            if curve is not None:
                curve[m] = dist @ vstar
            stage_payoffs[m] = dist @ rewards
            dist = dist @ kernel
            m += 1
    if curve is not None:
        curve[horizon] = dist @ vstar
    cumulative = np.concatenate(([0.0], np.cumsum(stage_payoffs) / horizon))
    return PayoffTrajectory(horizon, start, stage_payoffs, cumulative, curve)


@dataclass(frozen=True, eq=False)
class ConstantPayoffCurve:
    """Cumulative payoff at each fraction t against the target t * v*(start)."""

    horizon: int
    initial_state: int
    t_grid: tuple[float, ...]
    stages: tuple[int, ...]
    cumulative: tuple[float, ...]
    targets: tuple[float, ...]
    deviations: tuple[float, ...]
    sup_deviation: float


def constant_payoff_curve(
    game: StochasticGame,
    profile,
    initial_state,
    horizon: int,
    t_grid,
    limit_value,
) -> ConstantPayoffCurve:
    """Deviation of the cumulative payoff from the linear growth t * v*(start)."""
    grid = tuple(float(t) for t in t_grid)
    if not grid or any(not 0.0 < t < 1.0 for t in grid):
        raise InputError("t_grid must be non-empty with entries in (0, 1)")
    sigma, rho = _profile_strategies(profile, horizon)
    traj = trajectory(game, sigma, rho, initial_state, horizon)
    vstar = np.asarray(limit_value, dtype=float)
    start_value = float(vstar[traj.initial_state])
    stages = tuple(cumulative_stage(t, horizon) for t in grid)
    cumulative = tuple(float(traj.cumulative[M]) for M in stages)
    targets = tuple(t * start_value for t in grid)
    deviations = tuple(c - tv for c, tv in zip(cumulative, targets))
    sup_dev = max(abs(d) for d in deviations)
    return ConstantPayoffCurve(
        horizon, traj.initial_state, grid, stages, cumulative, targets, deviations, sup_dev
    )


def discounted_cumulative_payoff(
    game: StochasticGame,
    x: StationaryStrategy,
    y: StationaryStrategy,
    initial_state,
    discount: float,
    fraction: float,
) -> float:
    """Discounted payoff accumulated until the weight-``fraction`` stage.

    Exact expectation of sum_{m<=M} d(1-d)^(m-1) g_m under the stationary
    profile, where M = :func:`stages_to_weight`(discount, fraction).
    """
    if not 0.0 < fraction < 1.0:
        raise InputError(f"fraction must lie in (0, 1), got {fraction!r}")
    stages = stages_to_weight(discount, fraction)
    rewards = profile_stage_payoffs(game, x, y)
    kernel = profile_transition_matrix(game, x, y)
    dist = point_mass(game, initial_state)
    weight = discount
    total = 0.0
    for _ in range(stages):
        total += weight * float(dist @ rewards)
        dist = dist @ kernel
        weight *= 1.0 - discount
    return total


def expected_value_under_profile(
    game: StochasticGame,
    x: StationaryStrategy,
    y: StationaryStrategy,
    values,
    num_stages: int,
) -> np.ndarray:
    """E[values(state at stage m)] for m = 1..num_stages, from every start.

    Returns an array of shape (num_stages, states) whose row m-1, column s
    is the expectation when the chain induced by (x, y) starts at state s.
    """
    if not isinstance(num_stages, int) or num_stages < 1:
        raise InputError("num_stages must be a positive integer")
    v = np.asarray(values, dtype=float)
    if v.shape != (game.num_states,):
        raise InputError("values must be a vector over the game's states")
    kernel = profile_transition_matrix(game, x, y)
    out = np.empty((num_stages, game.num_states))
    u = v.copy()
    for m in range(num_stages):
        out[m] = u
        if m + 1 < num_stages:
            u = kernel @ u
    return out


# ---------------------------------------------------------------------------
# Guarantees and optimality certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GuaranteeCertificate:
    """Best-response guarantee levels of a fixed Player 1 Markov strategy.

    ``levels[m - 1]`` is the average payoff over stages m..n that the
    strategy guarantees against an adversary best-responding from stage m on
    (``levels[n]`` is the zero terminal).  ``epsilon`` is the worst-state gap
    between the n-stage value and ``levels[0]``.
    """

    horizon: int
    levels: np.ndarray
    epsilon: float


def _response_levels(
    game: StochasticGame,
    strategy: MarkovStrategy,
    horizon: int,
    *,
    adversary_minimizes: bool,
) -> np.ndarray:
    """Backward best-response recursion against a fixed Markov strategy.

    With ``adversary_minimizes`` the fixed strategy belongs to Player 1 and
    the recursion takes the min over Player 2's pure actions; otherwise the
    fixed strategy is Player 2's and the max is over Player 1's actions.
    Stage m mixes the stage payoff with weight 1/(n - m + 1).  Returns the
    full (horizon + 1, states) table; row m-1 is the level from stage m.
    """
    ns = game.num_states
    levels = np.empty((horizon + 1, ns))
    levels[horizon] = 0.0
    w = levels[horizon]
    runs = list(strategy.runs(horizon))
    m = horizon
    for length, stat in reversed(runs):
        probs = stat.probs
        if adversary_minimizes:
            own_payoff = np.einsum("si,sij->sj", probs, game.payoff)
            own_kernel = np.einsum("si,sijt->sjt", probs, game.transition)
        else:
            own_payoff = np.einsum("sj,sij->si", probs, game.payoff)
            own_kernel = np.einsum("sj,sijt->sit", probs, game.transition)
        for _ in range(length):
            weight = 1.0 / (horizon - m + 1)
            totals = weight * own_payoff + (1.0 - weight) * (own_kernel @ w)
            w = totals.min(axis=1) if adversary_minimizes else totals.max(axis=1)
            levels[m - 1] = w
            m -= 1
    return levels


def guaranteed_value(game: StochasticGame, sigma, horizon: int) -> GuaranteeCertificate:
    """Exact worst-case (best-response) value of a fixed Player 1 strategy.

    Against a fixed Markov strategy the adversary faces a finite-horizon
    Markov decision problem, so the backward min recursion attains the
    minimum over all strategies.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    sigma = _as_markov(sigma, horizon, "Player 1")
    levels = _response_levels(game, sigma, horizon, adversary_minimizes=True)
    v_n = finite_values(game, horizon)[-1]
    epsilon = float((v_n - levels[0]).max())
    return GuaranteeCertificate(horizon, levels, epsilon)


def certify_epsilon_optimality(game: StochasticGame, profile, horizon: int) -> float:
    """Worst-state optimality gap of a profile in the n-stage game.

    Both players' strategies are measured against exact best responses; the
    result is max over states of the larger one-sided gap to the n-stage
    value.  Values within solver noise of zero certify optimality.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    sigma, rho = _profile_strategies(profile, horizon)
    low = _response_levels(game, sigma, horizon, adversary_minimizes=True)[0]
    high = _response_levels(game, rho, horizon, adversary_minimizes=False)[0]
    v_n = finite_values(game, horizon)[-1]
    return float(max((v_n - low).max(), (high - v_n).max()))


# ---------------------------------------------------------------------------
# Value-drift diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ValueDriftReport:
    """Drift of the expected reference value along a profile's play.

    ``drifts[k]`` is E[v*(state at stage ceil(t_k n) + 1)] - v*(start).  The
    block fields are filled when the profile carries a block schedule: the
    largest within-block drift is reported against 1/p^2 and the largest
    drift over the scheduled stages against 2/p, p being the block count.
    """

    horizon: int
    initial_state: int
    t_grid: tuple[float, ...]
    drifts: tuple[float, ...]
    sup_drift: float
    within_block_max: float | None = None
    within_block_target: float | None = None
    global_max: float | None = None
    global_target: float | None = None


def value_drift_diagnostic(
    game: StochasticGame,
    profile,
    initial_state,
    horizon: int,
    t_grid,
    limit_value,
) -> ValueDriftReport:
    """Measure how far play moves the expected reference value of the state."""
    grid = tuple(float(t) for t in t_grid)
    if not grid or any(not 0.0 < t < 1.0 for t in grid):
        raise InputError("t_grid must be non-empty with entries in (0, 1)")
    sigma, rho = _profile_strategies(profile, horizon)
    traj = trajectory(game, sigma, rho, initial_state, horizon, limit_value=limit_value)
    curve = traj.value_curve
    start_value = float(curve[0])
    drifts = tuple(
        float(curve[cumulative_stage(t, horizon)] - start_value) for t in grid
    )
    sup_drift = max(abs(d) for d in drifts)

    within_max = within_target = global_max = global_target = None
    schedule = getattr(profile, "schedule", None)
    if schedule is not None:
        a, p = schedule.block_length, schedule.num_blocks
        within_max = 0.0
        for k in range(p):
            block_start = curve[k * a]  # stage k*a + 1
            top = min(a + 1, horizon + 1 - k * a)
            for j in range(1, top + 1):
                within_max = max(within_max, abs(float(curve[k * a + j - 1] - block_start)))
        within_target = p**-2
        scheduled = curve[: p * a] - start_value
        global_max = float(np.abs(scheduled).max())
        global_target = 2.0 / p
    return ValueDriftReport(
        horizon,
        traj.initial_state,
        grid,
        drifts,
        sup_drift,
        within_max,
        within_target,
        global_max,
        global_target,
    )


# ---------------------------------------------------------------------------
# Monte Carlo cross-check
# ---------------------------------------------------------------------------


def _sample_rows(cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    idx = (cdf_rows < u[:, None]).sum(axis=1)
    return np.minimum(idx, cdf_rows.shape[1] - 1)


def monte_carlo_payoff(
    game: StochasticGame,
    profile,
    initial_state,
    horizon: int,
    trials: int,
    seed,
) -> tuple[float, float]:
    """Unbiased simulation estimate of the average n-stage payoff.

    Returns (mean, standard error) over ``trials`` independent paths.  All
    paths advance in lockstep on one seeded PCG64 stream; each stage draws,
    in order, Player 1 actions, Player 2 actions, then next states, one
    vectorized draw each.  That draw order is part of the reproducibility
    contract: the same seed always yields the same estimate.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InputError("horizon must be a positive integer")
    if not isinstance(trials, int) or trials < 1:
        raise InputError("trials must be a positive integer")
    sigma, rho = _profile_strategies(profile, horizon)
    start = game.state_index(initial_state)
    rng = np.random.default_rng(seed)
    kernel_cdf = np.cumsum(game.transition, axis=-1)

    states = np.full(trials, start, dtype=np.intp)
    totals = np.zeros(trials)
    for length, x, y in _joint_runs(sigma, rho, horizon):
        x_cdf = np.cumsum(x.probs, axis=1)
        y_cdf = np.cumsum(y.probs, axis=1)
        for _ in range(length):
            acts1 = _sample_rows(x_cdf[states], rng.random(trials))
            acts2 = _sample_rows(y_cdf[states], rng.random(trials))
            totals += game.payoff[states, acts1, acts2]
            states = _sample_rows(kernel_cdf[states, acts1, acts2], rng.random(trials))
    averages = totals / horizon
    mean = float(averages.mean())
    stderr = float(averages.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr
