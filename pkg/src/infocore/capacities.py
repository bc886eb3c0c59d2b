"""Capacities on a finite outcome space and robust hypothesis testing.

A capacity is a monotone resource game ``nu`` over the outcomes with
``nu(empty) = 0`` and ``nu(Omega) = 1``; its core is the set of pmfs ``P``
with ``P(A) <= nu(A)`` for every event.  Only finite outcome spaces are
handled, where the continuity conditions of the general theory are vacuous.

For a 2-alternating (submodular) capacity, maximising a linear function
over the core is solved greedily by a marginal vector, which is what the
Frank-Wolfe steps and the worst-case test errors below rely on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergenceInfinite,
    EmptyFamily,
    InputError,
    IterationLimit,
    MismatchedOutcomeSpaces,
    NotMonotone,
    NotTwoAlternating,
    OutcomeSpaceTooLarge,
    ParameterOutOfRange,
    UnnormalizedInput,
)
from .game import Game, Orientation, is_submodular, new_game, subset_sums

MAX_OUTCOMES = 12
MAX_VERTEX_OUTCOMES = 8
MAX_LR_OUTCOMES = 4
NORM_TOL = 1e-12
REALIZATION = "finite outcome space"
LN2 = math.log(2)


@dataclass(frozen=True)
class FinitePmf:
    probs: np.ndarray

    @property
    def size(self) -> int:
        return self.probs.size

    def event(self, mask: int) -> float:
        return math.fsum(self.probs[i] for i in range(self.size) if mask >> i & 1)


def finite_pmf(probs) -> FinitePmf:
    if isinstance(probs, FinitePmf):
        return probs
    arr = np.array(probs, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InputError("pmf over an empty outcome space")
    if arr.size > MAX_OUTCOMES:
        raise OutcomeSpaceTooLarge(f"{arr.size} outcomes exceeds the limit of {MAX_OUTCOMES}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise UnnormalizedInput("pmf has negative or non-finite entries")
    if abs(math.fsum(arr) - 1.0) > NORM_TOL:
        raise UnnormalizedInput(f"pmf sums to {math.fsum(arr)!r}")
    arr.setflags(write=False)
    return FinitePmf(arr)


@dataclass(frozen=True)
class Capacity:
    game: Game
    monotone: bool = True

    @property
    def size(self) -> int:
        return self.game.n

    def __call__(self, mask: int) -> float:
        return self.game.values[mask]

    def array(self) -> np.ndarray:
        return np.asarray(self.game.values, dtype=np.float64)


def capacity(values, tol: float = 1e-9) -> Capacity:
    """Validate a set function (indexed by event bitmask) as a capacity."""
    vals = [float(x) for x in values]
    m = max(len(vals), 1).bit_length() - 1
    if m > MAX_OUTCOMES:
        raise OutcomeSpaceTooLarge(f"{m} outcomes exceeds the limit of {MAX_OUTCOMES}")
    g = new_game(m, Orientation.RESOURCE, vals, exact=False, tol=tol)
    return capacity_from_game(g)


def capacity_from_game(g: Game) -> Capacity:
    g = g.as_float() if g.exact else g
    if g.orientation is not Orientation.RESOURCE:
        g = g.with_orientation(Orientation.RESOURCE)
    if abs(g.total - 1.0) > NORM_TOL:
        raise UnnormalizedInput(f"capacity of the whole space is {g.total!r}, not 1")
    v = np.asarray(g.values)
    for i in range(g.n):
        masks = np.arange(1 << g.n)
        s = masks[(masks >> i) & 1 == 0]
        bad = np.nonzero(v[s | (1 << i)] < v[s] - NORM_TOL)[0]
        if bad.size:
            raise NotMonotone(f"capacity decreases when outcome {i + 1} joins event {int(s[bad[0]])}")
    return Capacity(g, True)


def _same_space(*items):
    sizes = {x.size for x in items}
    if len(sizes) != 1:
        raise MismatchedOutcomeSpaces(f"outcome space sizes differ: {sorted(sizes)}")
    return sizes.pop()


def upper_envelope(family) -> Capacity:
    """``nu(A) = max_P P(A)`` over a finite family of pmfs."""
    fam = [finite_pmf(p) for p in family]
    if not fam:
        raise EmptyFamily("upper envelope of an empty family")
    m = _same_space(*fam)
    sums = np.max([subset_sums(p.probs, m) for p in fam], axis=0)
    sums[0] = 0.0
    sums[-1] = 1.0
    return capacity_from_game(new_game(m, Orientation.RESOURCE, list(sums), exact=False))


def _check_param(x: float, name: str) -> float:
    x = float(x)
    if not 0 <= x < 1:
        raise ParameterOutOfRange(f"{name} must lie in [0, 1), got {x}")
    return x


def contamination_capacity(P0, eps: float) -> Capacity:
    """``nu(A) = (1 - eps) P0(A) + eps`` for nonempty ``A``."""
    P0 = finite_pmf(P0)
    eps = _check_param(eps, "eps")
    v = (1 - eps) * subset_sums(P0.probs, P0.size) + eps
    v[0], v[-1] = 0.0, 1.0
    return capacity_from_game(new_game(P0.size, Orientation.RESOURCE, list(v), exact=False))


def tv_capacity(P0, delta: float) -> Capacity:
    """``nu(A) = min(P0(A) + delta, 1)`` for nonempty ``A``."""
    P0 = finite_pmf(P0)
    delta = _check_param(delta, "delta")
    v = np.minimum(subset_sums(P0.probs, P0.size) + delta, 1.0)
    v[0], v[-1] = 0.0, 1.0
    return capacity_from_game(new_game(P0.size, Orientation.RESOURCE, list(v), exact=False))


def is_capacity(nu) -> bool:
    g = nu.game if isinstance(nu, Capacity) else nu
    try:
        capacity_from_game(g)
    except InputError:
        return False
    return True


def is_two_alternating(nu: Capacity) -> bool:
    return is_submodular(nu.game)


def capacity_core_contains(P, nu: Capacity, tol: float = 1e-9) -> bool:
    P = finite_pmf(P)
    _same_space(P, nu)
    return bool(np.all(subset_sums(P.probs, P.size) <= nu.array() + tol))


def greedy_vertex(nu: Capacity, w) -> np.ndarray:
    """Core point maximising ``w . P`` for a 2-alternating ``nu``.

    Outcomes are added in decreasing order of ``w`` (ties by index) and
    each receives its marginal capacity.
    """
    v = nu.game.values
    out = np.empty(nu.size)
    prev = 0
    for i in sorted(range(nu.size), key=lambda k: (-w[k], k)):
        cur = prev | (1 << i)
        out[i] = v[cur] - v[prev]
        prev = cur
    return out


def core_vertices(nu: Capacity) -> list[np.ndarray]:
    """Distinct marginal vectors over all orderings of the outcomes."""
    if not is_two_alternating(nu):
        raise NotTwoAlternating("core vertices are marginal vectors only for 2-alternating capacities")
    m = nu.size
    if m > MAX_VERTEX_OUTCOMES:
        raise OutcomeSpaceTooLarge(f"vertex enumeration is limited to {MAX_VERTEX_OUTCOMES} outcomes")
    seen = {}
    for order in itertools.permutations(range(m)):
        w = np.empty(m)
        w[list(order)] = np.arange(m, 0, -1)
        x = greedy_vertex(nu, w)
        seen.setdefault(tuple(np.round(x, 12)), x)
    return list(seen.values())


def choquet(nu: Capacity, phi) -> np.ndarray:
    """``max_{P in core} E_P[phi]`` for each row of ``phi`` (2-alternating ``nu``)."""
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    v = nu.array()
    order = np.argsort(-phi, axis=1, kind="stable")
    sorted_phi = np.take_along_axis(phi, order, axis=1)
    masks = np.cumsum(1 << order, axis=1)
    steps = sorted_phi - np.concatenate([sorted_phi[:, 1:], np.zeros((phi.shape[0], 1))], axis=1)
    return np.sum(steps * v[masks], axis=1)


# --------------------------------------------------------------------------
# least favourable pairs


def divergence(P, Q) -> float:
    """``D(P || Q)`` in bits with ``0 log 0/q = 0``."""
    P, Q = np.asarray(P, dtype=np.float64), np.asarray(Q, dtype=np.float64)
    pos = P > 0
    if np.any(Q[pos] <= 0):
        return math.inf
    return math.fsum(P[pos] * np.log2(P[pos] / Q[pos]))


def _line_search(deriv, gmax: float, iters: int = 60) -> float:
    """Minimiser of a convex function on ``[0, gmax]`` given its derivative."""
    if deriv(0.0) >= 0:
        return 0.0
    if deriv(gmax) <= 0:
        return gmax
    lo, hi = 0.0, gmax
    for _ in range(iters):
        mid = (lo + hi) / 2
        if deriv(mid) > 0:
            hi = mid
        else:
            lo = mid
    return lo


class _ActiveSet:
    """Convex combination of core vertices, for away steps."""

    def __init__(self, vertices, weights):
        self.V = [np.asarray(v, dtype=np.float64) for v in vertices]
        self.w = list(weights)

    @property
    def x(self) -> np.ndarray:
        return np.sum([w * v for w, v in zip(self.w, self.V)], axis=0)

    def _index(self, s):
        for k, v in enumerate(self.V):
            if np.allclose(v, s, atol=1e-14, rtol=0):
                return k
        return None

    def fw_step(self, s, gamma):
        self.w = [(1 - gamma) * w for w in self.w]
        k = self._index(s)
        if k is None:
            self.V.append(s)
            self.w.append(gamma)
        else:
            self.w[k] += gamma
        self._prune()

    def away_step(self, a, gamma):
        self.w = [(1 + gamma) * w for w in self.w]
        self.w[a] -= gamma
        self._prune()

    def _prune(self):
        keep = [k for k, w in enumerate(self.w) if w > 1e-15]
        self.V = [self.V[k] for k in keep]
        total = math.fsum(self.w[k] for k in keep)
        self.w = [self.w[k] / total for k in keep]


def _away_fw(active: _ActiveSet, nu: Capacity, grad, deriv_along, tol: float, budget: int):
    """Minimise a convex function over ``core(nu)``; returns (x, steps, gap)."""
    steps = 0
    gap = math.inf
    while steps < budget:
        x = active.x
        g = grad(x)
        s = greedy_vertex(nu, -g)
        gap = float(g @ (x - s))
        if gap <= tol:
            break
        dots = [float(g @ v) for v in active.V]
        a = int(np.argmax(dots))
        away_gap = dots[a] - float(g @ x)
        if gap >= away_gap or len(active.V) == 1:
            d, gmax = s - x, 1.0
            gamma = _line_search(lambda t: deriv_along(x + t * d, d), gmax)
            active.fw_step(s, gamma)
        else:
            wa = active.w[a]
            d, gmax = x - active.V[a], wa / (1 - wa)
            gamma = _line_search(lambda t: deriv_along(x + t * d, d), gmax)
            active.away_step(a, gamma)
        steps += 1
        if gamma == 0.0:
            break
    return active.x, steps, gap


@dataclass
class LfpResult:
    P: np.ndarray
    Q: np.ndarray
    divergence: float
    iterations: int
    gap: float  # Frank-Wolfe duality gap bound on suboptimality
    history: list = field(default_factory=list)
    direction: str = "D(P||Q)"
    note: str = REALIZATION


def _support_point(nu: Capacity):
    """Core point with the largest support: mean of the vertices that put
    each outcome first."""
    verts = []
    for i in range(nu.size):
        w = np.zeros(nu.size)
        w[i] = 1.0
        verts.append(greedy_vertex(nu, w))
    return verts


def _lfp(u: Capacity, v: Capacity, tol: float, max_iter: int, start):
    m = u.size
    if start is None:
        qverts = _support_point(v)
        q0 = np.mean(qverts, axis=0)
        supp = q0 > 0
        smask = sum(1 << i for i in range(m) if supp[i])
        if u(smask) < 1 - NORM_TOL:
            raise DivergenceInfinite("every null pmf puts mass where all alternatives vanish")
        pverts = []
        for i in np.nonzero(supp)[0]:
            w = supp.astype(float)
            w[i] = 2.0
            pverts.append(greedy_vertex(u, w))
        P = _ActiveSet(pverts, [1 / len(pverts)] * len(pverts))
        Q = _ActiveSet(qverts, [1 / m] * m)
    else:
        p0, q0 = (np.asarray(x, dtype=np.float64) for x in start)
        if not (capacity_core_contains(p0, u) and capacity_core_contains(q0, v)):
            raise InputError("starting pair is not in the cores")
        if not math.isfinite(divergence(p0, q0)):
            raise DivergenceInfinite("starting pair has infinite divergence")
        P, Q = _ActiveSet([p0], [1.0]), _ActiveSet([q0], [1.0])

    def p_grad(x, q):
        out = np.full(m, 1e300)
        ok = q > 0
        out[ok] = np.log2(np.maximum(x[ok], 1e-300) / q[ok]) + 1 / LN2
        return out

    def p_deriv(x, d, q):
        nz = d != 0
        if np.any(q[nz] <= 0):
            return math.inf
        return float(d[nz] @ (np.log2(np.maximum(x[nz], 1e-300) / q[nz]) + 1 / LN2))

    def q_grad(y, p):
        out = np.zeros(m)
        pos = p > 0
        out[pos] = -p[pos] / (np.maximum(y[pos], 1e-300) * LN2)
        return out

    def q_deriv(y, d, p):
        nz = (d != 0) & (p > 0)
        if np.any(y[nz] <= 0):
            return math.inf
        return float(-(p[nz] / (y[nz] * LN2)) @ d[nz])

    history = [divergence(P.x, Q.x)]
    total = 0
    gap = math.inf
    inner_tol = tol / 10
    for _ in range(max_iter):
        q = Q.x
        _, k1, gp = _away_fw(P, u, lambda x: p_grad(x, q), lambda x, d: p_deriv(x, d, q),
                             inner_tol, max_iter - total)
        total += k1
        history.append(divergence(P.x, q))
        p = P.x
        _, k2, gq = _away_fw(Q, v, lambda y: q_grad(y, p), lambda y, d: q_deriv(y, d, p),
                             inner_tol, max_iter - total)
        total += k2
        history.append(divergence(p, Q.x))
        gap = gp + gq
        if history[-3] - history[-1] < tol or total >= max_iter:
            break
    if total >= max_iter and history[-3] - history[-1] >= tol:
        raise IterationLimit(f"no convergence within {max_iter} Frank-Wolfe steps")
    P_, Q_ = P.x, Q.x
    return LfpResult(P_, Q_, divergence(P_, Q_), total, gap, history)


def least_favorable_pair(u: Capacity, v: Capacity, tol: float = 1e-8, reverse: bool = False,
                         max_iter: int = 10_000, start=None) -> LfpResult:
    """Pair ``(P, Q)`` in ``core(u) x core(v)`` minimising ``D(P || Q)``.

    Alternates Frank-Wolfe minimisation (with away steps) over the two
    cores until the divergence improves by less than ``tol``.  With
    ``reverse=True`` the objective is ``D(Q || P)`` instead.
    """
    _same_space(u, v)
    for name, c in (("u", u), ("v", v)):
        if not is_two_alternating(c):
            raise NotTwoAlternating(f"capacity {name} is not 2-alternating")
    if not reverse:
        return _lfp(u, v, tol, max_iter, start)
    res = _lfp(v, u, tol, max_iter, None if start is None else (start[1], start[0]))
    return LfpResult(res.Q, res.P, res.divergence, res.iterations, res.gap, res.history,
                     "D(Q||P)")


# --------------------------------------------------------------------------
# likelihood-ratio tests against the enumerated risk envelope


@dataclass
class LrCheckReport:
    on_envelope: bool
    max_excess: float  # worst LR point above the envelope
    dominance_gap: float  # worst grid test not matched by an LR test
    min_total_error: float
    lr_points: np.ndarray  # (type-I, type-II) worst-case errors
    tests: int
    step: float
    tol: float
    note: str = REALIZATION


def worst_case_errors(u: Capacity, v: Capacity, phi) -> tuple[np.ndarray, np.ndarray]:
    """Worst-case type-I error over ``core(u)`` and type-II error over ``core(v)``."""
    phi = np.atleast_2d(phi)
    return choquet(u, phi), choquet(v, 1.0 - phi)


def _lr_tests(P, Q, levels):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(P > 0, Q / np.where(P > 0, P, 1.0), np.where(Q > 0, np.inf, 1.0))
    tests = [np.zeros_like(P), np.ones_like(P)]
    for t in np.unique(r):
        above = (r > t) & ~np.isclose(r, t, rtol=1e-12, atol=0)
        at = np.isclose(r, t, rtol=1e-12, atol=0) | (r == t)
        for gam in levels:
            tests.append(np.where(above, 1.0, np.where(at, gam, 0.0)))
    return np.array(tests)


def minimax_lr_check(u: Capacity, v: Capacity, pair, step: float = 0.05,
                     tol: float = 0.02) -> LrCheckReport:
    """Compare likelihood-ratio tests of ``Q*/P*`` with all grid tests.

    Every randomised test ``phi: Omega -> {0, step, ..., 1}`` is scored by
    its worst-case errors; the LR tests (thresholds on ``Q*/P*`` with
    randomisation on the grid) must lie on or below the lower envelope of
    those scores up to ``tol``.
    """
    m = _same_space(u, v)
    if m > MAX_LR_OUTCOMES:
        raise OutcomeSpaceTooLarge(f"test enumeration is limited to {MAX_LR_OUTCOMES} outcomes")
    if not step > 0 or abs(round(1 / step) * step - 1) > 1e-9:
        raise InputError(f"grid step must divide 1, got {step}")
    levels = np.linspace(0.0, 1.0, round(1 / step) + 1)
    grid = np.array(np.meshgrid(*[levels] * m, indexing="ij")).reshape(m, -1).T
    a, b = worst_case_errors(u, v, grid)
    order = np.argsort(a, kind="stable")
    a_sorted, env = a[order], np.minimum.accumulate(b[order])

    P, Q = (np.asarray(x, dtype=np.float64) for x in pair)
    lr = _lr_tests(P, Q, levels)
    la, lb = worst_case_errors(u, v, lr)
    idx = np.searchsorted(a_sorted, la + 1e-12, side="right") - 1
    excess = lb - env[np.maximum(idx, 0)]
    excess[idx < 0] = -np.inf

    lorder = np.argsort(la, kind="stable")
    la_sorted, lenv = la[lorder], np.minimum.accumulate(lb[lorder])
    j = np.searchsorted(la_sorted, a + 1e-12, side="right") - 1
    best_lr = np.where(j >= 0, lenv[np.maximum(j, 0)], np.inf)
    dominance = float(np.max(best_lr - b))

    max_excess = float(np.max(excess))
    return LrCheckReport(max_excess <= tol, max_excess, dominance, float(np.min(a + b)),
                         np.column_stack([la, lb]), grid.shape[0], step, tol)
