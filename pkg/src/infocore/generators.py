"""Seeded random games for property tests and searches.

Supermodular games are built from two nonnegative ingredients, each
supermodular by construction:

* nonnegative interaction (Moebius) coefficients ``m(t)`` summed over the
  subsets of a coalition, ``v(s) = sum_{t <= s} m(t)``; every second
  difference of ``v`` is a sum of ``m`` values and so is nonnegative;
* a convex increasing function of an additive weight, ``c * w(s)**2``.

Rational games draw small integers over small denominators so exact
arithmetic stays cheap.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .game import Game, Orientation, new_game, players_of


def _draw(rng: np.random.Generator, exact: bool, hi: int = 10, den: int = 4):
    if exact:
        return Fraction(int(rng.integers(0, hi + 1)), int(rng.integers(1, den + 1)))
    return float(rng.uniform(0, hi))


def random_game(n: int, rng: np.random.Generator, exact: bool = True,
                orientation=Orientation.COST, hi: int = 10) -> Game:
    """Arbitrary nonnegative game; the grand value is drawn on a wider range
    so that both balanced and unbalanced games are common."""
    vals = [0] + [_draw(rng, exact, hi) for _ in range(1, 1 << n)]
    # spread the grand coalition value around the sum of singletons
    base = sum(vals[1 << i] for i in range(n))
    vals[-1] = base * (Fraction(int(rng.integers(1, 9)), 4) if exact else float(rng.uniform(0.25, 2.25)))
    return new_game(n, orientation, vals, exact=exact)


def random_supermodular_game(n: int, rng: np.random.Generator, exact: bool = False,
                             density: float = 0.6) -> Game:
    """Cost game that is supermodular by construction (see module notes)."""
    moebius = {}
    for t in range(1, 1 << n):
        if len(players_of(t)) == 1 or rng.random() < density:
            moebius[t] = _draw(rng, exact, 6, 3)
    w = [_draw(rng, exact, 3, 2) for _ in range(n)]
    c = _draw(rng, exact, 2, 2)
    zero = Fraction(0) if exact else 0.0
    vals = []
    for s in range(1 << n):
        acc = sum((m for t, m in moebius.items() if t & s == t), zero)
        ws = sum((w[i] for i in players_of(s)), zero)
        vals.append(acc + c * ws * ws)
    return new_game(n, Orientation.COST, vals, exact=exact)


def random_submodular_game(n: int, rng: np.random.Generator, exact: bool = False) -> Game:
    """Monotone resource game obtained as the dual of a supermodular one."""
    g = random_supermodular_game(n, rng, exact)
    N = g.grand
    vals = [g.total - g.values[N ^ s] for s in range(1 << n)]
    return new_game(n, Orientation.RESOURCE, vals, exact=exact)
