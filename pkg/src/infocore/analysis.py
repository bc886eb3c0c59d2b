"""Structural tests and solution concepts that reduce to linear programs.

Cost games use the ``>=`` aspiration constraints, resource games the
``<=`` ones; both keep the explicit nonnegativity of allocations.  All
verdicts carry the numeric mode (``"rational"`` or ``"float"``) and the
comparison slack that produced them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._linalg import solve_exact
from .errors import (
    EmptyCore,
    InputError,
    NotBalanced,
    NotMonotone,
    TooManyPlayers,
    VerificationFailed,
    WrongOrientation,
)
from .game import (
    FractionalPartition,
    Game,
    Orientation,
    core_contains,
    incidence_matrix,
    marginal_vector,
    new_game,
    players_of,
    subgame,
    subset_sums,
    to_fraction,
)
from .lp import Direction, LinearProgram, Relation, solve

MAX_MBC_PLAYERS = 4
MAX_WEBER_PLAYERS = 8
MAX_LARGE_CORE_PLAYERS = 5


def _fsum(xs, exact):
    return sum(xs, Fraction(0)) if exact else math.fsum(xs)


def _row(mask, n):
    return [1 if mask >> i & 1 else 0 for i in range(n)]


def _is_cost(g: Game) -> bool:
    return g.orientation is Orientation.COST


# --------------------------------------------------------------------------
# balancedness


@dataclass
class BalanceResult:
    balanced: bool
    lp_value: object  # optimum of the balancedness program
    core_point: np.ndarray | None
    certificate: FractionalPartition | None
    certificate_kind: str | None  # "fractional_partition" | "fractional_cover"
    mode: str
    tol: float

    @property
    def verdict(self) -> str:
        return "balanced" if self.balanced else "not_balanced"


def _reduce_cover(cover: dict, n: int, exact: bool) -> dict:
    """Turn a fractional cover into a partition by shrinking sets.

    Moving weight from ``s`` to ``s - {j}`` never raises the combined value
    of a monotone game, so the certificate stays violating.
    """
    alpha = dict(cover)
    one = Fraction(1) if exact else 1.0
    eps = 0 if exact else 1e-12
    while True:
        excess = None
        for j in range(n):
            tot = _fsum([w for s, w in alpha.items() if s >> j & 1], exact)
            if tot > one + eps:
                excess = (j, tot - one)
                break
        if excess is None:
            return {s: w for s, w in alpha.items() if w > eps}
        j, ex = excess
        s = min(s for s, w in alpha.items() if s >> j & 1 and w > 0)
        move = min(ex, alpha[s])
        alpha[s] -= move
        if alpha[s] <= eps:
            del alpha[s]
        t = s & ~(1 << j)
        if t:
            alpha[t] = alpha.get(t, 0 * move) + move


def is_monotone(g: Game) -> bool:
    v = g.values
    eps = g.eps
    return all(v[s] <= v[s | (1 << i)] + eps for s in range(1 << g.n) for i in range(g.n))


def check_balanced(g: Game) -> BalanceResult:
    """Decide balancedness by linear programming duality.

    Cost games: ``max sum a(s) v(s)`` over fractional partitions ``a``; the
    multipliers of the partition rows minimise ``sum t`` over the
    aspiration set, so the game is balanced iff the optimum equals
    ``v([n])``, and the multipliers are then a core point.  Resource games
    mirror this with ``min`` over fractional covers.
    """
    n = g.n
    masks = list(range(1, 1 << n))
    rows = []
    for j in range(n):
        rows.append(([1 if s >> j & 1 else 0 for s in masks],
                     Relation.EQ if _is_cost(g) else Relation.GE, 1))
    obj = [g.values[s] for s in masks]
    direction = Direction.MAX if _is_cost(g) else Direction.MIN
    out = solve(LinearProgram(direction, obj, rows), exact=g.exact, tol=g.tol)
    if not out.optimal:  # pragma: no cover - the program is always feasible and bounded
        raise RuntimeError(f"balancedness program returned {out.status}")
    value = out.value if g.exact else float(out.value)
    eps = g.eps
    if _is_cost(g):
        balanced = value <= g.total + eps
    else:
        balanced = value >= g.total - eps
    t = np.array(out.duals, dtype=object if g.exact else np.float64)
    if not g.exact:
        t = np.where(np.abs(t) < 1e-15, 0.0, t)
    alpha = {s: w for s, w in zip(masks, out.x) if w > eps}
    kind = "fractional_partition"
    if not _is_cost(g):
        if is_monotone(g):
            alpha = _reduce_cover(alpha, n, g.exact)
        else:
            kind = "fractional_cover"
    cert = None
    if not balanced:
        items = sorted(alpha.items())
        cert = FractionalPartition(tuple(s for s, _ in items), tuple(w for _, w in items))
    return BalanceResult(balanced, value, t if balanced else None, cert,
                         None if balanced else kind, g.mode, eps)


# --------------------------------------------------------------------------
# core linear programs


def _core_program(g: Game, objective, direction, upper=None, extra=()):
    n = g.n
    rel = Relation.GE if _is_cost(g) else Relation.LE
    rows = [(_row(s, n), rel, g.values[s]) for s in range(1, g.grand)]
    rows.append(([1] * n, Relation.EQ, g.total))
    rows.extend(extra)
    return LinearProgram(direction, list(objective), rows, [0] * n, upper)


def _solve_core(g: Game, objective, direction, upper=None, extra=()):
    lp = _core_program(g, objective, direction, upper, extra)
    return solve(lp, exact=g.exact, tol=g.tol)


def _clean(x, g: Game):
    if g.exact:
        return np.array(list(x), dtype=object)
    return np.where(np.abs(np.asarray(x, dtype=np.float64)) < 1e-15, 0.0, np.asarray(x, dtype=np.float64))


def find_core_point(g: Game, objective=None) -> np.ndarray:
    """A core point; with ``objective`` it maximises that linear form."""
    obj = [0] * g.n if objective is None else list(objective)
    if len(obj) != g.n:
        raise InputError(f"objective has {len(obj)} entries for {g.n} players")
    out = _solve_core(g, obj, Direction.MAX)
    if not out.optimal:
        raise EmptyCore(f"core is empty ({out.status.value})")
    return _clean(out.x, g)


# --------------------------------------------------------------------------
# minimal balanced collections


def enumerate_minimal_balanced_collections(n: int) -> list[FractionalPartition]:
    """All minimal balanced collections on ``n <= 4`` players.

    A balanced collection is minimal exactly when its incidence vectors are
    linearly independent, so it suffices to scan independent collections
    of at most ``n`` coalitions and keep those whose (unique) balancing
    weights are strictly positive.
    """
    if n > MAX_MBC_PLAYERS:
        raise TooManyPlayers(f"n={n} exceeds {MAX_MBC_PLAYERS}")
    if n < 1:
        raise InputError("n must be positive")
    masks = list(range(1, 1 << n))
    out = []
    for k in range(1, n + 1):
        for coll in itertools.combinations(masks, k):
            A = [[1 if s >> i & 1 else 0 for s in coll] for i in range(n)]
            w = solve_exact(A, [1] * n)
            if w is not None and all(x > 0 for x in w):
                out.append(FractionalPartition(coll, tuple(w)))
    return out


# --------------------------------------------------------------------------
# Weber set and the Shapley-Ichiishi characterisation


def weber_set(g: Game) -> list[np.ndarray]:
    """Distinct marginal vectors over all orders, in first-seen order."""
    if g.n > MAX_WEBER_PLAYERS:
        raise TooManyPlayers(f"n={g.n} exceeds {MAX_WEBER_PLAYERS}")
    seen = {}
    for order in itertools.permutations(range(g.n)):
        m = marginal_vector(g, order)
        key = tuple(m) if g.exact else tuple(np.round(m, 12))
        seen.setdefault(key, m)
    return list(seen.values())


@dataclass
class ConvexityResult:
    convex: bool  # supermodular (cost) / submodular (resource)
    failing_order: tuple | None
    mode: str
    tol: float


def shapley_ichiishi_check(g: Game) -> ConvexityResult:
    """Weber set inside the core iff the game is convex (concave for resource games)."""
    if g.n > MAX_WEBER_PLAYERS:
        raise TooManyPlayers(f"n={g.n} exceeds {MAX_WEBER_PLAYERS}")
    for order in itertools.permutations(range(g.n)):
        if not core_contains(g, marginal_vector(g, order)):
            return ConvexityResult(False, order, g.mode, g.eps)
    return ConvexityResult(True, None, g.mode, g.eps)


# --------------------------------------------------------------------------
# exactness


@dataclass
class ExactResult:
    exact: bool
    failures: list  # (mask, attainable optimum) where v(s) is not reached
    witnesses: dict  # mask -> core point attaining v(s)
    mode: str
    tol: float


def check_exact(g: Game) -> ExactResult:
    """Does every coalition's value get attained by some core point?"""
    n = g.n
    cost = _is_cost(g)
    direction = Direction.MIN if cost else Direction.MAX
    failures, witnesses = [], {}
    for s in range(1, g.grand):
        out = _solve_core(g, _row(s, n), direction)
        if not out.optimal:
            raise EmptyCore("core is empty; exactness is undefined")
        val = out.value if g.exact else float(out.value)
        if abs(val - g.values[s]) <= g.eps:
            witnesses[s] = _clean(out.x, g)
        else:
            failures.append((s, val))
    # every core point attains the grand coalition
    witnesses[g.grand] = find_core_point(g)
    return ExactResult(not failures, failures, witnesses, g.mode, g.eps)


def dual_game(g: Game) -> Game:
    """``v*(s) = v([n]) - v([n] - s)`` with the opposite orientation.

    For a monotone game the two games share the same core, which turns a
    resource question into the mirrored cost question.
    """
    N = g.grand
    vals = [g.total - g.values[N ^ s] for s in range(1 << g.n)]
    other = Orientation.RESOURCE if _is_cost(g) else Orientation.COST
    return new_game(g.n, other, vals, exact=g.exact, tol=g.tol)


# --------------------------------------------------------------------------
# large core


def aspiration_vertices(g: Game) -> list[np.ndarray]:
    """Vertices of a cost game's aspiration polyhedron.

    Every choice of ``n`` independent coalition constraints is made tight
    and solved; feasible solutions are kept.  Singleton constraints dominate
    nonnegativity because ``v >= 0``, so no bound rows are needed.  Float
    arithmetic screens the candidates; rational games re-solve the
    survivors exactly.
    """
    n = g.n
    S = incidence_matrix(n)  # row r is mask r + 1
    vf = np.array([float(x) for x in g.values[1:]])
    combos = np.array(list(itertools.combinations(range(S.shape[0]), n)), dtype=np.int64)
    M = S[combos].astype(np.float64)
    det = np.linalg.det(M)
    keep = np.abs(det) > 0.5  # integer determinants
    combos, M = combos[keep], M[keep]
    Y = np.linalg.solve(M, vf[combos][..., None])[..., 0]
    scale = max(1.0, float(np.max(np.abs(vf))) if vf.size else 1.0)
    slack = 1e-7 * scale if g.exact else g.tol
    ok = np.all(S @ Y.T >= vf[:, None] - slack, axis=0)
    combos, Y = combos[ok], Y[ok]
    if not g.exact:
        _, idx = np.unique(np.round(Y / scale, 9), axis=0, return_index=True)
        return [Y[i] for i in sorted(idx)]
    _, idx = np.unique(np.round(Y / scale, 6), axis=0, return_index=True)
    verts = {}
    vals = g.values
    for i in sorted(idx):
        tight = [int(r) + 1 for r in combos[i]]
        y = solve_exact([_row(s, n) for s in tight], [vals[s] for s in tight])
        if y is None:
            continue
        sums = subset_sums(np.array(y, dtype=object), n)
        if all(sums[s] >= vals[s] for s in range(1, 1 << n)):
            verts.setdefault(tuple(y), np.array(y, dtype=object))
    return list(verts.values())


@dataclass
class LargeCoreResult:
    large: bool
    vertices_checked: int
    counterexample: np.ndarray | None  # aspiration vertex dominating no core point
    mode: str
    tol: float


def check_large_core(g: Game) -> LargeCoreResult:
    """Does every aspiration vector dominate some core point?

    Checking the vertices suffices: an aspiration vector is a convex
    combination of vertices plus a nonnegative direction, and the same
    combination of the dominated core points is a dominated core point.
    """
    if not _is_cost(g):
        raise WrongOrientation("large-core check is defined for cost games")
    if g.n > MAX_LARGE_CORE_PLAYERS:
        raise TooManyPlayers(f"n={g.n} exceeds {MAX_LARGE_CORE_PLAYERS}")
    if not check_balanced(g).balanced:
        raise EmptyCore("game is not balanced")
    verts = aspiration_vertices(g)
    for y in verts:
        out = _solve_core(g, [0] * g.n, Direction.MIN, upper=list(y))
        if not out.optimal:
            return LargeCoreResult(False, len(verts), y, g.mode, g.eps)
    return LargeCoreResult(True, len(verts), None, g.mode, g.eps)


# --------------------------------------------------------------------------
# XOS representation


@dataclass
class XosResult:
    clauses: list  # (mask, additive vector of length n)
    reproduces: bool
    mode: str
    tol: float

    def evaluate(self, mask: int, exact: bool):
        return max(_fsum([a[i] for i in players_of(mask)], exact) for _, a in self.clauses)


def xos_representation(g: Game) -> XosResult:
    """One additive clause per coalition whose maximum reproduces ``v``.

    Clause ``a(s)`` maximises ``sum_{i in s} a_i`` subject to
    ``sum_{i in u} a_i <= v(u)`` for ``u`` inside ``s``.  It reaches
    ``v(s)`` exactly when the subgame on ``s`` is balanced; otherwise
    :class:`NotBalanced` names the offending coalition.
    """
    if _is_cost(g):
        raise WrongOrientation("XOS representation is defined for resource games")
    if not is_monotone(g):
        raise NotMonotone("value function is not nondecreasing")
    if not check_balanced(g).balanced:
        raise NotBalanced("game is not balanced")
    n = g.n
    clauses = []
    for s in range(1, 1 << n):
        sub = subgame(g, s)
        k = sub.n
        rows = [(_row(u, k), Relation.LE, sub.values[u]) for u in range(1, 1 << k)]
        out = solve(LinearProgram(Direction.MAX, [1] * k, rows), exact=g.exact, tol=g.tol)
        val = out.value if g.exact else float(out.value)
        if abs(val - g.values[s]) > g.eps:
            raise NotBalanced(f"subgame on {[p + 1 for p in players_of(s)]} is not balanced "
                              f"(best additive clause reaches {val}, v = {g.values[s]})")
        a = np.zeros(n, dtype=object if g.exact else np.float64)
        if g.exact:
            a[:] = Fraction(0)
        for b, p in enumerate(players_of(s)):
            a[p] = out.x[b]
        clauses.append((s, _clean(a, g)))
    res = XosResult(clauses, True, g.mode, g.eps)
    res.reproduces = all(abs(res.evaluate(t, g.exact) - g.values[t]) <= g.eps * max(1, n)
                         for t in range(1, 1 << n))
    return res


# --------------------------------------------------------------------------
# tolerance vectors and prefix-robust allocations


@dataclass
class ToleranceResult:
    feasible: bool
    allocation: np.ndarray | None
    violated: int | None  # most violated coalition when T is not an aspiration
    reason: str = ""


def tolerance_allocation(g: Game, T) -> ToleranceResult:
    """A core point below the tolerance vector ``T``, if one exists.

    ``T`` must itself be an aspiration; otherwise the coalition with the
    largest deficit ``v(s) - T(s)`` (smallest mask on ties) is reported.
    """
    if not _is_cost(g):
        raise WrongOrientation("tolerance vectors are defined for cost games")
    T = list(T)
    if len(T) != g.n:
        raise InputError(f"tolerance vector has {len(T)} entries for {g.n} players")
    if g.exact:
        T = [to_fraction(x) for x in T]
        arr = np.array(T, dtype=object)
    else:
        T = [float(x) for x in T]
        arr = np.array(T)
    sums = subset_sums(arr, g.n)
    worst, worst_gap = None, g.eps
    for s in range(1, 1 << g.n):
        gap = g.values[s] - sums[s]
        if gap > worst_gap:
            worst, worst_gap = s, gap
    if worst is not None:
        return ToleranceResult(False, None, worst, "tolerance vector violates a coalition constraint")
    out = _solve_core(g, [0] * g.n, Direction.MIN, upper=T)
    if not out.optimal:
        return ToleranceResult(False, None, None, "no core point lies below the tolerance vector")
    return ToleranceResult(True, _clean(out.x, g), None)


@dataclass
class PrefixResult:
    allocation: np.ndarray
    violations: list = field(default_factory=list)  # (k, mask) with k 1-based

    @property
    def verified(self) -> bool:
        return not self.violations


def prefix_robust_allocation(family, strict: bool = True) -> PrefixResult:
    """Allocation that stays in the core of every prefix game.

    ``family[k-1]`` is a game on players ``0..k-1``.  The allocation is the
    marginal vector of the natural order on the largest game; each prefix
    of it is checked against the core of the matching prefix game.
    """
    family = list(family)
    if not family:
        raise InputError("empty game family")
    orient = family[0].orientation
    for k, G in enumerate(family, start=1):
        if G.n != k:
            raise InputError(f"game {k} of the family has {G.n} players")
        if G.orientation is not orient:
            raise InputError("family mixes orientations")
    exact = all(G.exact for G in family)
    R = np.empty(len(family), dtype=object if exact else np.float64)
    prev = 0
    for k, G in enumerate(family):
        R[k] = G.total - prev
        prev = G.total
    violations = []
    for k, G in enumerate(family, start=1):
        sums = subset_sums(R[:k], k)
        eps = G.eps
        for s in range(1, 1 << k):
            if G.orientation is Orientation.COST:
                bad = sums[s] < G.values[s] - eps
            else:
                bad = sums[s] > G.values[s] + eps
            if s == G.grand:
                bad = bad or abs(sums[s] - G.values[s]) > eps
            if bad:
                violations.append((k, s))
        if any(x < -eps for x in R[:k]):
            violations.append((k, 0))
    res = PrefixResult(R, violations)
    if strict and violations:
        raise VerificationFailed(violations)
    return res
