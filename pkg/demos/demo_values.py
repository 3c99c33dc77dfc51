"""Values of a stochastic game three ways: fixed horizon, discounted, limit.

The running example is the classical Big Match: an active state where the
row player can end the game forever (rows absorb) and two constant absorbing
states.  Its value is exactly 1/2 from the active state no matter how the
game is evaluated, which makes it a perfect calibration target.
"""
import numpy as np

from stochgame import discounted_value, finite_values, limit_value_estimate
from stochgame.corpus import big_match, single_player_mdp

entry = big_match()
game = entry.game
print(f"game: {game}")
print(f"states: {game.states}")

# --- discounted values over a coarse-to-fine grid -------------------------
print("\ndiscounted values (the discount weights the current stage):")
for discount in (0.5, 0.1, 0.01, 0.001):
    sol = discounted_value(game, discount, tol=1e-9)
    row = ", ".join(f"{s}={v:.6f}" for s, v in zip(game.states, sol.value))
    print(f"  discount {discount:>6}: {row}   (residual {sol.residual:.1e})")
    print(f"      active-state mix over {game.actions1}: {np.round(sol.x.probs[0], 6)}")

# --- fixed-horizon values by backward induction ----------------------------
print("\nn-stage values:")
table = finite_values(game, 1000)
for n in (1, 10, 100, 1000):
    print(f"  n={n:>5}: play={table[n - 1][0]:.8f}")

# --- limit value with an honest error bar ----------------------------------
estimate = limit_value_estimate(game, [1e-1, 1e-2, 1e-3])
print("\nlimit value estimate (smallest grid discount, dispersion as error bar):")
for s, v in zip(game.states, estimate.value):
    print(f"  {s}: {v:.8f}")
print(f"  dispersion: {estimate.dispersion:.2e}")

# --- a pure decision problem for contrast ----------------------------------
mdp = single_player_mdp().game
print(f"\ndecision problem ({mdp.name}): the best opening move depends on the horizon")
values = finite_values(mdp, 6)
for n in range(1, 7):
    print(f"  n={n}: start-state value {values[n - 1][0]:.4f}")
print("  (short horizons keep the safe payoff; longer ones walk to the goal)")
