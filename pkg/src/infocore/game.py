"""Finite transferable-utility games and the LP-free operations on them.

Coalitions are bitmasks: bit ``i`` stands for player ``i`` (0-based in the
API, 1-based in files and reports).  A game stores its value function as a
dense tuple of length ``2**n`` indexed by mask.

Two numeric modes exist.  An *exact* game holds :class:`fractions.Fraction`
values and every comparison is exact; a *float* game holds Python floats and
comparisons use an absolute tolerance (default ``1e-9``).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import (
    EmptySetInCollection,
    EmptySubset,
    InputError,
    InvalidOrder,
    LengthMismatch,
    NegativeValue,
    NonzeroEmptySet,
    TooManyPlayers,
    WrongLength,
)

MAX_PLAYERS = 20
DEFAULT_TOL = 1e-9


class Orientation(str, enum.Enum):
    COST = "cost"
    RESOURCE = "resource"


class Modularity(str, enum.Enum):
    SUPERMODULAR = "supermodular"
    SUBMODULAR = "submodular"
    ADDITIVE = "additive"
    NEITHER = "neither"


def to_fraction(x) -> Fraction:
    """Exact conversion; floats go through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise InputError(f"boolean is not a game value: {x!r}")
    if isinstance(x, (int, Rational, np.integer)):
        return Fraction(int(x)) if not isinstance(x, Rational) else Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {x!r}") from exc
    xf = float(x)
    if not math.isfinite(xf):
        raise InputError(f"non-finite value {x!r}")
    return Fraction(repr(xf))


def _to_float(x) -> float:
    if isinstance(x, str):
        return float(to_fraction(x))
    return float(x)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def players_of(mask: int) -> list[int]:
    """0-based players in ``mask``, increasing."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(players) -> int:
    m = 0
    for p in players:
        m |= 1 << int(p)
    return m


def popcounts(n: int) -> np.ndarray:
    """Array of coalition sizes indexed by mask."""
    sizes = np.zeros(1 << n, dtype=np.int64)
    masks = np.arange(1 << n)
    for i in range(n):
        sizes += (masks >> i) & 1
    return sizes


def incidence_matrix(n: int, include_empty: bool = False) -> np.ndarray:
    """Rows are coalitions (by mask), columns players; 0/1 entries."""
    start = 0 if include_empty else 1
    masks = np.arange(start, 1 << n)
    return ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)


@dataclass(frozen=True)
class Game:
    """An immutable game ``v: 2^[n] -> R_+`` with ``v(empty) = 0``.

    Build instances through :func:`new_game`, which validates the data.
    """

    n: int
    orientation: Orientation
    values: tuple
    exact: bool = False
    tol: float = DEFAULT_TOL

    def __call__(self, mask: int):
        return self.values[mask]

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    @property
    def total(self):
        return self.values[self.grand]

    @property
    def mode(self) -> str:
        return "rational" if self.exact else "float"

    @property
    def eps(self):
        """Comparison slack: exactly zero for rational games."""
        return 0 if self.exact else self.tol

    def array(self) -> np.ndarray:
        if self.exact:
            return np.array(self.values, dtype=object)
        return np.array(self.values, dtype=np.float64)

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def with_orientation(self, orientation) -> "Game":
        return Game(self.n, Orientation(orientation), self.values, self.exact, self.tol)

    def as_float(self, tol: float | None = None) -> "Game":
        return Game(self.n, self.orientation, tuple(float(x) for x in self.values),
                    False, self.tol if tol is None else tol)

    def as_exact(self) -> "Game":
        return Game(self.n, self.orientation, tuple(to_fraction(x) for x in self.values),
                    True, self.tol)

    def __add__(self, other: "Game") -> "Game":
        if other.n != self.n:
            raise LengthMismatch("games have different player counts")
        return Game(self.n, self.orientation,
                    tuple(a + b for a, b in zip(self.values, other.values)),
                    self.exact and other.exact, max(self.tol, other.tol))


def new_game(n: int, orientation, values, *, exact: bool | None = None,
             tol: float = DEFAULT_TOL) -> Game:
    """Validate and build a game.

    ``exact=None`` picks rational mode when every value is an int,
    ``Fraction`` or ``"p/q"`` string, and float mode otherwise.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError(f"player count must be a positive integer, got {n!r}")
    if n > MAX_PLAYERS:
        raise TooManyPlayers(f"n={n} exceeds the limit of {MAX_PLAYERS}")
    orientation = Orientation(orientation)
    values = list(values)
    if len(values) != 1 << n:
        raise WrongLength(f"expected {1 << n} values for n={n}, got {len(values)}")
    if exact is None:
        exact = all(isinstance(x, (int, np.integer, Fraction, str)) and not isinstance(x, bool)
                    for x in values)
    if exact:
        vals = tuple(to_fraction(x) for x in values)
    else:
        vals = tuple(_to_float(x) for x in values)
        bad = [i for i, x in enumerate(vals) if not math.isfinite(x)]
        if bad:
            raise InputError(f"non-finite value at mask {bad[0]}")
    if vals[0] != 0:
        raise NonzeroEmptySet(f"v(empty) must be 0, got {vals[0]}")
    neg = [i for i, x in enumerate(vals) if x < 0]
    if neg:
        who = [p + 1 for p in players_of(neg[0])]
        raise NegativeValue(f"v({who}) = {vals[neg[0]]} is negative")
    return Game(int(n), orientation, vals, bool(exact), float(tol))


def game_from_function(n: int, orientation, fn, **kw) -> Game:
    """Build a game by evaluating ``fn(mask)`` on every nonempty coalition."""
    vals = [0] + [fn(m) for m in range(1, 1 << n)]
    return new_game(n, orientation, vals, **kw)


def additive_game(weights, orientation=Orientation.COST, **kw) -> Game:
    n = len(weights)
    return game_from_function(n, orientation,
                              lambda m: sum((weights[i] for i in players_of(m)), 0 * weights[0]),
                              **kw)


def subgame(g: Game, s: int) -> Game:
    """Restriction of ``g`` to coalition ``s``, players relabelled increasingly."""
    if s == 0:
        raise EmptySubset("cannot restrict a game to the empty coalition")
    if s >> g.n:
        raise InputError(f"coalition {s:#b} has players outside [n]")
    members = players_of(s)
    k = len(members)
    vals = []
    for u in range(1 << k):
        orig = 0
        for b, p in enumerate(members):
            if u >> b & 1:
                orig |= 1 << p
        vals.append(g.values[orig])
    return Game(k, g.orientation, tuple(vals), g.exact, g.tol)


def subset_sums(t, n: int) -> np.ndarray:
    """``out[mask] = sum of t[i] for i in mask`` for every mask."""
    t = np.asarray(t)
    dtype = object if t.dtype == object else np.float64
    out = np.zeros(1 << n, dtype=dtype)
    if dtype == object:
        out[:] = Fraction(0)
    masks = np.arange(1 << n)
    for i in range(n):
        sel = (masks >> i) & 1 == 1
        out[sel] = out[sel] + t[i]
    return out


@dataclass(frozen=True)
class ModularityResult:
    verdict: Modularity
    supermodular_violation: tuple | None  # (s, i, j), first in mask order
    submodular_violation: tuple | None
    mode: str
    tol: float

    @property
    def violation(self):
        return self.supermodular_violation or self.submodular_violation


def check_modularity(g: Game) -> ModularityResult:
    """Classify ``g`` with the pairwise increment test.

    For every coalition ``s`` and players ``i < j`` outside it the second
    difference ``v(s+i+j) - v(s+i) - v(s+j) + v(s)`` is nonnegative for
    supermodular games and nonpositive for submodular ones.
    """
    v = g.array()
    eps = g.eps
    masks = np.arange(1 << g.n)
    sup_viol = sub_viol = None
    sup_first = sub_first = None  # (s, i, j) with smallest s, then (i, j)
    for i, j in itertools.combinations(range(g.n), 2):
        bi, bj = 1 << i, 1 << j
        s = masks[(masks & (bi | bj)) == 0]
        d = v[s | bi | bj] - v[s | bi] - v[s | bj] + v[s]
        lo = np.nonzero(np.asarray(d < -eps, dtype=bool))[0]
        hi = np.nonzero(np.asarray(d > eps, dtype=bool))[0]
        if lo.size:
            cand = (int(s[lo[0]]), i, j)
            if sup_first is None or cand < sup_first:
                sup_first = cand
        if hi.size:
            cand = (int(s[hi[0]]), i, j)
            if sub_first is None or cand < sub_first:
                sub_first = cand
    sup_viol, sub_viol = sup_first, sub_first
    if sup_viol is None and sub_viol is None:
        verdict = Modularity.ADDITIVE
    elif sup_viol is None:
        verdict = Modularity.SUPERMODULAR
    elif sub_viol is None:
        verdict = Modularity.SUBMODULAR
    else:
        verdict = Modularity.NEITHER
    return ModularityResult(verdict, sup_viol, sub_viol, g.mode, g.eps)


def is_supermodular(g: Game) -> bool:
    return check_modularity(g).verdict in (Modularity.SUPERMODULAR, Modularity.ADDITIVE)


def is_submodular(g: Game) -> bool:
    return check_modularity(g).verdict in (Modularity.SUBMODULAR, Modularity.ADDITIVE)


def _check_order(order, n: int) -> list[int]:
    order = [int(p) for p in order]
    if len(order) != n or sorted(order) != list(range(n)):
        raise InvalidOrder(f"{order} is not a permutation of 0..{n - 1}")
    return order


def marginal_vector(g: Game, order) -> np.ndarray:
    """Incremental value of each player joining in ``order``."""
    order = _check_order(order, g.n)
    out = np.empty(g.n, dtype=object if g.exact else np.float64)
    prev = 0
    for p in order:
        cur = prev | (1 << p)
        out[p] = g.values[cur] - g.values[prev]
        prev = cur
    return out


def shapley_value(g: Game) -> np.ndarray:
    n = g.n
    v = g.array()
    masks = np.arange(1 << n)
    sizes = popcounts(n)
    fact = math.factorial
    if g.exact:
        w = np.array([Fraction(0)] + [Fraction(fact(k - 1) * fact(n - k), fact(n))
                                      for k in range(1, n + 1)], dtype=object)
    else:
        w = np.array([0.0] + [fact(k - 1) * fact(n - k) / fact(n) for k in range(1, n + 1)])
    out = np.empty(n, dtype=object if g.exact else np.float64)
    for i in range(n):
        s = masks[(masks >> i) & 1 == 1]
        contrib = w[sizes[s]] * (v[s] - v[s ^ (1 << i)])
        out[i] = sum(contrib, Fraction(0)) if g.exact else math.fsum(contrib)
    return out


def _as_allocation(g: Game, t) -> np.ndarray:
    t = list(t)
    if len(t) != g.n:
        raise LengthMismatch(f"allocation has {len(t)} entries for a {g.n}-player game")
    if g.exact:
        return np.array([to_fraction(x) for x in t], dtype=object)
    return np.array([float(x) for x in t], dtype=np.float64)


def aspiration_contains(g: Game, t) -> bool:
    """Membership in the aspiration set (subset sums >= v for cost games,
    <= v for resource games, and nonnegative entries in both cases)."""
    t = _as_allocation(g, t)
    eps = g.eps
    if any(x < -eps for x in t):
        return False
    sums = subset_sums(t, g.n)
    v = g.array()
    if g.orientation is Orientation.COST:
        return not np.any(np.asarray(sums < v - eps, dtype=bool))
    return not np.any(np.asarray(sums[1:] > v[1:] + eps, dtype=bool))


def core_contains(g: Game, t) -> bool:
    t = _as_allocation(g, t)
    total = sum(t, Fraction(0)) if g.exact else math.fsum(t)
    return abs(total - g.total) <= g.eps and aspiration_contains(g, t)


@dataclass(frozen=True)
class FractionalPartition:
    """Weighted collection of distinct nonempty coalitions (bitmasks)."""

    collection: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.collection) != len(self.weights):
            raise InputError("collection and weights differ in length")
        if len(set(self.collection)) != len(self.collection):
            raise InputError("collection has repeated coalitions")

    def degree(self, i: int) -> int:
        return sum(1 for s in self.collection if s >> i & 1)

    def max_degree(self, n: int) -> int:
        return max(self.degree(i) for i in range(n))

    def value(self, g: Game):
        terms = [w * g.values[s] for s, w in zip(self.collection, self.weights)]
        return sum(terms, Fraction(0)) if g.exact else math.fsum(float(x) for x in terms)


def uniform_degree_partition(collection, n: int) -> FractionalPartition:
    """Weights ``1/r+`` on every set (a partition only when degrees agree)."""
    fp = FractionalPartition(tuple(collection), (Fraction(1),) * len(collection))
    r = fp.max_degree(n)
    return FractionalPartition(fp.collection, (Fraction(1, r),) * len(collection))


def is_fractional_partition(fp: FractionalPartition, n: int, tol: float | None = None) -> bool:
    """Per-player weight sums all equal one (exactly for rational weights)."""
    for s in fp.collection:
        if s == 0:
            raise EmptySetInCollection("collection contains the empty set")
        if s >> n:
            raise InputError(f"coalition {s:#b} has players outside [n]")
    exact = all(isinstance(w, (int, Fraction)) for w in fp.weights)
    if any(w < 0 for w in fp.weights):
        return False
    eps = 0 if exact and tol is None else (DEFAULT_TOL if tol is None else tol)
    for i in range(n):
        acc = [w for s, w in zip(fp.collection, fp.weights) if s >> i & 1]
        total = sum(acc, Fraction(0)) if exact else math.fsum(float(w) for w in acc)
        if abs(total - 1) > eps:
            return False
    return True
