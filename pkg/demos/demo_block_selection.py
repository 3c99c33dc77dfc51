"""Choosing block lengths from measured value drift.

The block length controls a trade-off: long blocks mean fewer discounted
solves, short blocks track the per-stage discount 1/(n-m+1) more closely.
A schedule keeps the expected state value flat when each block discount is
small enough that stationary play moves the expected limit value by at most
1/p^2 (p = number of blocks).  This script estimates those thresholds
empirically on a grid of discounts, then selects block lengths from them.
"""
import numpy as np

from stochgame import (
    DiscountedProfileProvider,
    DiscountThresholds,
    ScheduleNotReadyError,
    default_block_length,
    estimate_discount_thresholds,
    limit_value_estimate,
    select_block_length,
)
from stochgame.corpus import random_game

entry = random_game(3, 2, 2, seed=11)
game = entry.game
provider = DiscountedProfileProvider(game, tol=1e-8)
estimate = limit_value_estimate(game, [1e-1, 1e-2, 1e-3, 1e-4])

grid = [2.0**-k for k in range(1, 13)]
thresholds = estimate_discount_thresholds(game, provider, grid, max_blocks=30, limit_value=estimate.value)
print(f"{entry.name}: empirical drift thresholds (approximate={thresholds.approximate})")
print(f"  {'p':>4} {'1/p^2':>10} {'threshold':>12}")
for p in (1, 2, 4, 8, 16, 30):
    print(f"  {p:>4} {p**-2:>10.4f} {thresholds.value_at(p):>12.6f}")

print("\nselected block lengths (falling back to ceil(sqrt n) when not ready):")
full = DiscountThresholds(
    thresholds.values + tuple(thresholds.values[-1] for _ in range(30, 500)),
    thresholds.provenance,
    thresholds.approximate,
)
for n in (20, 60, 200, 1000):
    try:
        a = select_block_length(n, full)
        how = "thresholds"
    except ScheduleNotReadyError:
        a = default_block_length(n)
        how = "default"
    print(f"  n={n:>5}: a={a:>3} p={n // a:>4}  ({how}); 1/a <= mu_p: {1 / a <= full.value_at(n // a)}")

print("\nthe selected a grows sublinearly, so the block fraction a/n vanishes:")
for n in (100, 400, 1600, 6400):
    a = select_block_length(n, DiscountThresholds.analytic_default(n // 2))
    print(f"  n={n:>6}: a={a:>4}  a/n={a / n:.4f}")
