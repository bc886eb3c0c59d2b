"""Dense two-phase simplex with Bland's rule, exact or floating.

The same tableau code runs on ``dtype=object`` arrays of GMP rationals
(exact mode, zero tolerance; results come back as
:class:`~fractions.Fraction`) or on ``float64`` arrays (float mode,
feasibility/optimality tolerance ``tol``).

Dual sign convention
--------------------
``LpOutcome.duals[i]`` is the multiplier of user constraint ``i`` such that,
at an optimum, ``value == sum(b[i] * duals[i]) + bound terms`` (see
:attr:`LpOutcome.dual_value`).  For a minimisation, ``>=`` rows have
nonnegative multipliers and ``<=`` rows nonpositive ones; for a
maximisation the signs are swapped.  Equality rows are free.  With this
convention the multipliers of the ``n`` equality rows of the balancedness
program ``max sum a(s) v(s), sum_{s containing j} a(s) = 1`` are directly a
minimiser of ``min sum t_j, t(s) >= v(s)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import IterationLimit, MalformedProgram
from .game import to_fraction

try:  # exact pivots are several times faster on GMP rationals
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = None

FLOAT_TOL = 1e-9
MAX_FLOAT_PIVOTS = 10**6


class Direction(str, enum.Enum):
    MIN = "min"
    MAX = "max"


class Relation(str, enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """``direction objective.x`` subject to rows and per-variable bounds.

    ``lower`` defaults to zero for every variable; a ``None`` entry makes
    the variable free below.  ``upper`` entries of ``None`` mean no upper
    bound.
    """

    direction: Direction
    objective: list
    constraints: list = field(default_factory=list)  # (coeffs, relation, rhs)
    lower: list | None = None
    upper: list | None = None

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add(self, coeffs, relation, rhs) -> None:
        self.constraints.append((list(coeffs), Relation(relation), rhs))


@dataclass
class LpOutcome:
    status: Status
    value: object = None
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    dual_value: object = None
    pivots: int = 0
    mode: str = "float"

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _num(x, exact):
    if exact:
        q = to_fraction(x)
        return _mpq(q.numerator, q.denominator) if _mpq is not None else q
    xf = float(x)
    if not math.isfinite(xf):
        raise MalformedProgram(f"non-finite coefficient {x!r}")
    return xf


def _validate(lp: LinearProgram, exact: bool):
    m = lp.num_vars
    if m == 0:
        raise MalformedProgram("program has no variables")
    c = [_num(x, exact) for x in lp.objective]
    rows = []
    for k, row in enumerate(lp.constraints):
        try:
            coeffs, rel, rhs = row
            rel = Relation(rel)
        except (TypeError, ValueError) as exc:
            raise MalformedProgram(f"constraint {k} is not (coeffs, relation, rhs)") from exc
        if len(coeffs) != m:
            raise MalformedProgram(f"constraint {k} has {len(coeffs)} coefficients, expected {m}")
        rows.append(([_num(a, exact) for a in coeffs], rel, _num(rhs, exact)))
    lower = [0] * m if lp.lower is None else list(lp.lower)
    upper = [None] * m if lp.upper is None else list(lp.upper)
    if len(lower) != m or len(upper) != m:
        raise MalformedProgram("bound vectors have the wrong length")
    lower = [None if b is None else _num(b, exact) for b in lower]
    upper = [None if b is None else _num(b, exact) for b in upper]
    for j, (lo, hi) in enumerate(zip(lower, upper)):
        if lo is not None and hi is not None and lo > hi:
            raise MalformedProgram(f"variable {j} has lower bound above upper bound")
    return c, rows, lower, upper


class _Tableau:
    def __init__(self, A, b, exact, tol):
        self.exact = exact
        self.eps = 0 if exact else tol
        m, ncols = A.shape
        dtype = object if exact else np.float64
        self.T = np.zeros((m + 1, ncols + 1), dtype=dtype)
        if exact:
            self.T[:] = _num(0, True)
        self.T[:m, :ncols] = A
        self.T[:m, ncols] = b
        self.m = m
        self.ncols = ncols
        self.basis = [None] * m
        self.pivots = 0

    def pivot(self, r, c):
        T = self.T
        T[r] = T[r] / T[r, c]
        col = T[:, c].copy()
        col[r] = 0
        nz = np.nonzero(np.asarray(col != 0, dtype=bool))[0]
        if nz.size:
            T[nz] = T[nz] - col[nz, None] * T[r][None, :]
        if not self.exact:
            T[np.abs(T) < 1e-13] = 0.0
            T[:, c] = 0.0
            T[r, c] = 1.0
        self.basis[r] = c
        self.pivots += 1
        if not self.exact and self.pivots > MAX_FLOAT_PIVOTS:
            raise IterationLimit(f"more than {MAX_FLOAT_PIVOTS} pivots")

    def set_objective(self, cost):
        """Load reduced costs for ``cost`` given the current basis."""
        T = self.T
        row = np.array(cost + [0], dtype=T.dtype) if not self.exact else \
            np.array(list(cost) + [_num(0, True)], dtype=object)
        for i, j in enumerate(self.basis):
            cj = cost[j]
            if cj != 0:
                row = row - cj * T[i]
        T[self.m] = row

    def run(self, allowed):
        """Bland's rule on the loaded objective row; returns a Status."""
        T = self.T
        eps = self.eps
        m = self.m
        while True:
            red = T[m, :self.ncols]
            entering = None
            for j in np.nonzero(np.asarray(red < -eps, dtype=bool))[0]:
                if allowed[j]:
                    entering = int(j)
                    break
            if entering is None:
                return Status.OPTIMAL
            col = T[:m, entering]
            cand = np.nonzero(np.asarray(col > eps, dtype=bool))[0]
            if cand.size == 0:
                return Status.UNBOUNDED
            ratios = [(T[i, -1] / col[i], self.basis[i], int(i)) for i in cand]
            best = min(r[0] for r in ratios)
            if self.exact:
                ties = [r for r in ratios if r[0] == best]
            else:
                ties = [r for r in ratios if r[0] <= best + eps]
            leave = min(ties, key=lambda r: r[1])[2]
            self.pivot(leave, entering)


def solve(lp: LinearProgram, exact: bool = False, tol: float = FLOAT_TOL) -> LpOutcome:
    """Solve ``lp``; deterministic for a fixed input."""
    c, rows, lower, upper = _validate(lp, exact)
    zero = _num(0, True) if exact else 0.0
    one = _num(1, True) if exact else 1.0
    nv = len(c)

    # column map: original var j -> list of (std column, sign); value offset
    cols = []
    ns = 0
    offset = []
    for j in range(nv):
        if lower[j] is None:
            cols.append([(ns, one), (ns + 1, -one)])
            ns += 2
            offset.append(zero)
        else:
            cols.append([(ns, one)])
            ns += 1
            offset.append(lower[j])

    std_rows = []  # (dense coeffs over ns, rel, rhs)
    for coeffs, rel, rhs in rows:
        a = [zero] * ns
        shift = zero
        for j, aj in enumerate(coeffs):
            if aj != 0:
                for k, sgn in cols[j]:
                    a[k] += sgn * aj
                shift += aj * offset[j]
        std_rows.append((a, rel, rhs - shift))
    n_user = len(std_rows)
    for j in range(nv):
        if upper[j] is not None:
            a = [zero] * ns
            for k, sgn in cols[j]:
                a[k] += sgn
            std_rows.append((a, Relation.LE, upper[j] - offset[j]))

    m = len(std_rows)
    sign = -one if lp.direction is Direction.MAX else one
    cost_std = [zero] * ns
    for j in range(nv):
        for k, sgn in cols[j]:
            cost_std[k] += sign * c[j] * sgn

    flipped = []
    n_slack = sum(1 for _, rel, _ in std_rows if rel is not Relation.EQ)
    n_art = sum(1 for _, rel, rhs in std_rows
                if rel is not Relation.LE or rhs < 0)
    # after flipping, LE rows with rhs >= 0 use their slack as the initial basis
    ncols = ns + n_slack + n_art
    A = np.zeros((m, ncols), dtype=object if exact else np.float64)
    if exact:
        A[:] = zero
    b = np.zeros(m, dtype=A.dtype)
    basis0 = []  # initial basic column per row (coefficient +1 in that row)
    art_cols = set()
    slack_j = ns
    art_j = ns + n_slack
    for i, (a, rel, rhs) in enumerate(std_rows):
        flip = rhs < 0
        if flip:
            a = [-x for x in a]
            rhs = -rhs
            rel = {Relation.LE: Relation.GE, Relation.GE: Relation.LE}.get(rel, rel)
        flipped.append(flip)
        A[i, :ns] = a
        b[i] = rhs
        if rel is Relation.LE:
            A[i, slack_j] = one
            basis0.append(slack_j)
            slack_j += 1
        elif rel is Relation.GE:
            A[i, slack_j] = -one
            slack_j += 1
            A[i, art_j] = one
            basis0.append(art_j)
            art_cols.add(art_j)
            art_j += 1
        else:
            A[i, art_j] = one
            basis0.append(art_j)
            art_cols.add(art_j)
            art_j += 1
    ncols = art_j
    A = A[:, :ncols]

    tab = _Tableau(A, b, exact, tol)
    tab.basis = list(basis0)
    eps = tab.eps
    mode = "rational" if exact else "float"

    if art_cols:
        phase1 = [zero] * ncols
        for k in art_cols:
            phase1[k] = one
        tab.set_objective(phase1)
        tab.run([True] * ncols)
        if -tab.T[m, -1] > (eps if not exact else 0) * max(1, m):
            return LpOutcome(Status.INFEASIBLE, pivots=tab.pivots, mode=mode)
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if tab.basis[i] in art_cols:
                row = tab.T[i, :ns + n_slack]
                nz = np.nonzero(np.asarray(abs(row) > eps, dtype=bool))[0]
                if nz.size:
                    tab.pivot(i, int(nz[0]))

    allowed = [k not in art_cols for k in range(ncols)]
    cost_full = cost_std + [zero] * (ncols - ns)
    tab.set_objective(cost_full)
    status = tab.run(allowed)
    if status is Status.UNBOUNDED:
        return LpOutcome(Status.UNBOUNDED, pivots=tab.pivots, mode=mode)

    xs = [zero] * ncols
    for i, k in enumerate(tab.basis):
        xs[k] = tab.T[i, -1]
    x = np.empty(nv, dtype=object if exact else np.float64)
    for j in range(nv):
        x[j] = offset[j] + sum((sgn * xs[k] for k, sgn in cols[j]), zero)

    red = tab.T[m, :ncols]
    y = np.empty(n_user, dtype=object if exact else np.float64)
    for i in range(n_user):
        yi = -red[basis0[i]]
        if flipped[i]:
            yi = -yi
        y[i] = sign * yi
    value = sum((cj * xj for cj, xj in zip(c, x)), zero)

    # reduced costs in the original variables and the dual objective
    rc = np.empty(nv, dtype=y.dtype)
    for j in range(nv):
        rc[j] = c[j] - sum((rows[i][0][j] * y[i] for i in range(n_user)), zero)
    dual_value = sum((rows[i][2] * y[i] for i in range(n_user)), zero)
    for j in range(nv):
        r = rc[j]
        if abs(r) <= eps:
            continue
        at_lower = (r > 0) == (lp.direction is Direction.MIN)
        bound = lower[j] if at_lower else upper[j]
        if bound is not None:
            dual_value += r * bound
    if exact:
        x, y, rc = (np.array([_frac(a) for a in arr], dtype=object) for arr in (x, y, rc))
        value, dual_value = _frac(value), _frac(dual_value)
    else:
        value, dual_value = float(value), float(dual_value)
    return LpOutcome(Status.OPTIMAL, value, x, y, rc, dual_value, tab.pivots, mode)


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def feasible_point(constraints, num_vars, exact=False, tol=FLOAT_TOL, lower=None, upper=None):
    """Any point satisfying ``constraints`` and the bounds, or ``None``."""
    lp = LinearProgram(Direction.MIN, [0] * num_vars, list(constraints), lower, upper)
    out = solve(lp, exact=exact, tol=tol)
    return out.x if out.optimal else None
