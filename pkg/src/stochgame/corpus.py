"""Canonical test games and a seeded random-game generator."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .game import StochasticGame


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    """A named game plus certified quantities with provenance notes."""

    name: str
    game: StochasticGame
    known_facts: dict = field(default_factory=dict)


def big_match() -> CorpusEntry:
    """The classical 2x2 absorbing game with limit value 1/2.

    From the active state, the first row absorbs: (top, left) pays 1 and
    locks the play in the payoff-1 state, (top, right) pays 0 and locks it
    in the payoff-0 state; the bottom row keeps the play active with the
    anti-diagonal payoffs.  Both absorbing states are constant games.
    """
    states = ("play", "one", "zero")
    actions1 = ("top", "bottom")
    actions2 = ("left", "right")
    payoff = np.array(
        [
            [[1.0, 0.0], [0.0, 1.0]],  # play
            [[1.0, 1.0], [1.0, 1.0]],  # one
            [[0.0, 0.0], [0.0, 0.0]],  # zero
        ]
    )
    transition = np.zeros((3, 2, 2, 3))
    transition[0, 0, 0, 1] = 1.0  # (top, left): absorb into the payoff-1 state
    transition[0, 0, 1, 2] = 1.0  # (top, right): absorb into the payoff-0 state
    transition[0, 1, :, 0] = 1.0  # bottom row stays active
    transition[1, :, :, 1] = 1.0
    transition[2, :, :, 2] = 1.0
    game = StochasticGame(states, actions1, actions2, payoff, transition, name="big_match")
    facts = {
        "limit_value": {
            "values": {"play": 0.5, "one": 1.0, "zero": 0.0},
            "provenance": "bisection on the scalar discounted fixed-point equation of the "
            "active state; the absorbing states are constant games",
        }
    }
    return CorpusEntry("big_match", game, facts)


def single_player_mdp() -> CorpusEntry:
    """A 3-state, 2-action decision problem (|J| = 1) with horizon-dependent play.

    Short horizons favor collecting the safe in-state payoff; long horizons
    favor walking to the absorbing payoff-1 state, so the optimal action at
    the start state switches with the horizon.
    """
    states = ("start", "mid", "goal")
    actions1 = ("stay", "move")
    actions2 = ("only",)
    payoff = np.array(
        [
            [[0.3], [0.0]],
            [[0.5], [0.0]],
            [[1.0], [1.0]],
        ]
    )
    transition = np.zeros((3, 2, 1, 3))
    transition[0, 0, 0, 0] = 1.0
    transition[0, 1, 0, 1] = 1.0
    transition[1, 0, 0, 1] = 1.0
    transition[1, 1, 0, 2] = 1.0
    transition[2, :, 0, 2] = 1.0
    game = StochasticGame(states, actions1, actions2, payoff, transition, name="single_player_mdp")
    facts = {
        "limit_value": {
            "values": {"start": 1.0, "mid": 1.0, "goal": 1.0},
            "provenance": "the absorbing payoff-1 state is reachable from everywhere, so the "
            "long-run average is 1; cross-checked by policy enumeration",
        }
    }
    return CorpusEntry("single_player_mdp", game, facts)


def two_state_cycle() -> CorpusEntry:
    """A 2-state non-absorbing game whose limit value is state dependent.

    Neither state is absorbing (each has an action profile that leaves it),
    and the kernel contains the cycle top -> trap -> top, yet optimal play
    never exits: the top state pays 0.7 forever unless Player 1 dives while
    Player 2 plays right, and the trap pays 0 forever as long as Player 2
    plays right.  The discounted value is (0.7, 0) for every discount.
    """
    states = ("top", "trap")
    actions1 = ("hold", "dive")
    actions2 = ("left", "right")
    payoff = np.array(
        [
            [[0.7, 0.7], [0.7, 0.7]],
            [[0.0, 0.0], [0.0, 0.0]],
        ]
    )
    transition = np.zeros((2, 2, 2, 2))
    transition[0, :, :, 0] = 1.0
    transition[0, 1, 1, 0] = 0.0
    transition[0, 1, 1, 1] = 1.0  # (dive, right) falls into the trap
    transition[1, :, 0, 0] = 1.0  # left releases the trap
    transition[1, :, 1, 1] = 1.0  # right keeps it closed
    game = StochasticGame(states, actions1, actions2, payoff, transition, name="two_state_cycle")
    facts = {
        "limit_value": {
            "values": {"top": 0.7, "trap": 0.0},
            "provenance": "hand fixed-point: holding guarantees the constant 0.7 at top and "
            "right keeps the trap at 0; verified by small-discount dispersion",
        }
    }
    return CorpusEntry("two_state_cycle", game, facts)


def random_game(num_states: int, num_actions1: int, num_actions2: int, seed) -> CorpusEntry:
    """Seeded random game: uniform payoffs in [-1, 1], flat-simplex transitions."""
    if min(num_states, num_actions1, num_actions2) < 1:
        raise InputError("all sizes must be at least 1")
    rng = np.random.default_rng(seed)
    payoff = rng.uniform(-1.0, 1.0, (num_states, num_actions1, num_actions2))
    transition = rng.dirichlet(
        np.ones(num_states), size=(num_states, num_actions1, num_actions2)
    )
    transition = transition / transition.sum(axis=-1, keepdims=True)
    name = f"random_{num_states}_{num_actions1}_{num_actions2}_seed{seed}"
    game = StochasticGame(
        states=tuple(f"s{k}" for k in range(num_states)),
        actions1=tuple(f"a{k}" for k in range(num_actions1)),
        actions2=tuple(f"b{k}" for k in range(num_actions2)),
        payoff=payoff,
        transition=transition,
        name=name,
    )
    return CorpusEntry(name, game)


#: named corpus constructors, the lookup table behind the CLI's --corpus flag
CORPUS = {
    "big_match": big_match,
    "single_player_mdp": single_player_mdp,
    "two_state_cycle": two_state_cycle,
}


def get_corpus_entry(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]()
    except KeyError:
        raise InputError(
            f"unknown corpus game {name!r}; available: {', '.join(sorted(CORPUS))}"
        ) from None
