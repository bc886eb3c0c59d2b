"""Minimax (Pitman) risk for location estimation and the sensor game.

With a flat prior the posterior-mean estimator has constant risk, equal to
the expected posterior variance.  By translation invariance the expectation
only runs over the differences ``d_j = W_{j+1} - W_1`` of the noise
samples.  Writing ``L_d(t) = f(-t) * prod_j f(d_j - t)``,

    risk = integral over d of  integral (t - m_d)^2 L_d(t) dt,

where ``m_d`` is the mean of ``L_d``.  Both integrals use the trapezoid
rule; for ``M`` samples the outer integral has ``M - 1`` axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfiniteVariance, InputError, UnsupportedSampleSize
from .game import Orientation, game_from_function, players_of

GAME_TOL = 5e-3
MAX_SAMPLES = 3
GRID_NORM_TOL = 1e-6


@dataclass(frozen=True)
class Gaussian:
    var: float
    mean: float = 0.0


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float


@dataclass(frozen=True)
class Grid:
    """Density sampled at ``start + k*step``, linear in between, zero outside."""

    start: float
    step: float
    values: tuple


@dataclass(frozen=True)
class SumOf:
    parts: tuple


@dataclass(frozen=True)
class QuadratureSpec:
    half_width: float = 8.0  # in standard deviations
    theta_points: int = 2001
    sample_points: int = 401

    def __post_init__(self):
        for name in ("theta_points", "sample_points"):
            k = getattr(self, name)
            if k < 3 or k % 2 == 0:
                raise InputError(f"{name} must be odd and at least 3, got {k}")
        if not self.half_width > 0:
            raise InputError("half_width must be positive")

    def coarse(self) -> "QuadratureSpec":
        half = lambda k: max(3, (k // 2) | 1)  # noqa: E731
        return QuadratureSpec(self.half_width, half(self.theta_points), half(self.sample_points))


def gaussian(var: float, mean: float = 0.0) -> Gaussian:
    if not (var > 0 and math.isfinite(var)):
        raise InputError(f"Gaussian variance must be positive, got {var}")
    return Gaussian(float(var), float(mean))


def uniform(a: float, b: float) -> Uniform:
    if not a < b:
        raise InputError(f"uniform density needs a < b, got ({a}, {b})")
    return Uniform(float(a), float(b))


def grid(start: float, step: float, values) -> Grid:
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size < 2 or not step > 0:
        raise InputError("grid density needs a positive step and at least two values")
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise InputError("grid density values must be finite and nonnegative")
    mass = np.trapezoid(vals, dx=step)
    if abs(mass - 1.0) > GRID_NORM_TOL:
        raise InputError(f"grid density integrates to {mass}, not 1")
    return Grid(float(start), float(step), tuple(float(v) for v in vals))


def sum_of(*parts) -> SumOf:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, SumOf) else [p])
    if not flat:
        raise InputError("sum of no densities")
    return SumOf(tuple(flat))


# --------------------------------------------------------------------------
# moments, support and evaluation


def mean(f) -> float:
    if isinstance(f, Gaussian):
        return f.mean
    if isinstance(f, Uniform):
        return (f.a + f.b) / 2
    if isinstance(f, Grid):
        x, y = _grid_xy(f)
        return float(np.trapezoid(x * y, x))
    return math.fsum(mean(p) for p in f.parts)


def variance(f) -> float:
    if isinstance(f, Gaussian):
        return f.var
    if isinstance(f, Uniform):
        return (f.b - f.a) ** 2 / 12
    if isinstance(f, Grid):
        x, y = _grid_xy(f)
        mu = np.trapezoid(x * y, x)
        return float(np.trapezoid((x - mu) ** 2 * y, x))
    return math.fsum(variance(p) for p in f.parts)


def support(f):
    """``(lo, hi)`` with ``None`` for an unbounded side."""
    if isinstance(f, Gaussian):
        return None, None
    if isinstance(f, Uniform):
        return f.a, f.b
    if isinstance(f, Grid):
        return f.start, f.start + f.step * (len(f.values) - 1)
    lo = hi = 0.0
    for p in f.parts:
        a, b = support(p)
        lo = None if lo is None or a is None else lo + a
        hi = None if hi is None or b is None else hi + b
    return lo, hi


def _grid_xy(f: Grid):
    y = np.asarray(f.values)
    return f.start + f.step * np.arange(y.size), y


def evaluate(f, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if isinstance(f, Gaussian):
        return np.exp(-(x - f.mean) ** 2 / (2 * f.var)) / math.sqrt(2 * math.pi * f.var)
    if isinstance(f, Uniform):
        return np.where((x >= f.a) & (x <= f.b), 1.0 / (f.b - f.a), 0.0)
    if isinstance(f, Grid):
        gx, gy = _grid_xy(f)
        return np.interp(x, gx, gy, left=0.0, right=0.0)
    return evaluate(realize(f), x)


def _cell_masses(f, start: float, h: float, count: int) -> np.ndarray:
    """Probability of each cell ``[c - h/2, c + h/2]`` with ``c = start + k h``."""
    edges = start - h / 2 + h * np.arange(count + 1)
    if isinstance(f, Gaussian):
        z = (edges - f.mean) / math.sqrt(2 * f.var)
        cdf = 0.5 * (1 + np.vectorize(math.erf)(z))
    elif isinstance(f, Uniform):
        cdf = np.clip((edges - f.a) / (f.b - f.a), 0.0, 1.0)
    else:
        gx, gy = _grid_xy(f)
        fine = np.linspace(edges[0], edges[-1], 8 * count + 1)
        dens = np.interp(fine, gx, gy, left=0.0, right=0.0)
        cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(fine))])
        cdf = cum[::8]
    return np.diff(cdf)


def realize(f, half_width: float = 10.0, max_points: int = 40_001):
    """Collapse a :class:`SumOf` into a single density.

    Gaussian parts combine in closed form; anything else is discretised into
    cell masses on a shared grid and convolved by direct summation.
    """
    if not isinstance(f, SumOf):
        return f
    parts = list(f.parts)
    gauss = [p for p in parts if isinstance(p, Gaussian)]
    other = [p for p in parts if not isinstance(p, Gaussian)]
    if gauss:
        g = Gaussian(math.fsum(p.var for p in gauss), math.fsum(p.mean for p in gauss))
        if not other:
            return g
        other.append(g)
    if len(other) == 1:
        return other[0]
    sds = [math.sqrt(variance(p)) for p in other]
    spans = []
    for p, sd in zip(other, sds):
        lo, hi = support(p)
        mu = mean(p)
        lo = mu - half_width * sd if lo is None else lo
        hi = mu + half_width * sd if hi is None else hi
        spans.append((lo, hi))
    total = sum(hi - lo for lo, hi in spans)
    h = max(min(sds) / 400, total / (max_points - 1))
    masses, start = np.array([1.0]), 0.0
    for p, (lo, hi) in zip(other, spans):
        k0 = math.floor(lo / h)
        count = math.ceil(hi / h) - k0 + 1
        masses = np.convolve(masses, _cell_masses(p, k0 * h, h, count))
        start += k0 * h
    dens = masses / h
    dens = dens / np.trapezoid(dens, dx=h)
    return Grid(start, h, tuple(dens))


# --------------------------------------------------------------------------
# Pitman risk


@dataclass(frozen=True)
class RiskEstimate:
    risk: float
    error: float  # |fine - coarse| quadrature discrepancy
    sample_size: int
    quadrature: QuadratureSpec = field(repr=False, default=QuadratureSpec())


def _axis(lo, hi, k):
    x = np.linspace(lo, hi, k)
    w = np.full(k, (hi - lo) / (k - 1))
    w[0] = w[-1] = w[0] / 2
    return x, w


def _risk_quadrature(f, M: int, q: QuadratureSpec) -> float:
    mu, sd = mean(f), math.sqrt(variance(f))
    lo, hi = support(f)
    lo = mu - q.half_width * sd if lo is None else max(lo, mu - q.half_width * sd)
    hi = mu + q.half_width * sd if hi is None else min(hi, mu + q.half_width * sd)
    # L_d(t) needs -t in the support of f
    t, wt = _axis(-hi, -lo, q.theta_points)
    base = evaluate(f, -t) * wt
    if M == 1:
        Z = base.sum()
        m1 = (t * base).sum() / Z
        return float(((t - m1) ** 2 * base).sum() / Z)
    span = hi - lo
    dmax = min(span, q.half_width * sd * math.sqrt(2))
    d, wd = _axis(-dmax, dmax, q.sample_points)
    F = evaluate(f, d[:, None] - t[None, :])  # F[k, i] = f(d_k - t_i)
    if M == 2:
        Z = F @ base
        S1 = F @ (base * t)
        S2 = F @ (base * t * t)
        W = wd
    else:
        Z = (F * base) @ F.T
        S1 = (F * (base * t)) @ F.T
        S2 = (F * (base * t * t)) @ F.T
        W = np.outer(wd, wd)
    with np.errstate(invalid="ignore", divide="ignore"):
        inner = np.where(Z > 0, S2 - S1 * S1 / np.where(Z > 0, Z, 1.0), 0.0)
    return float(np.sum(W * np.maximum(inner, 0.0)))


def _centered(f):
    # the risk is location invariant; centering keeps the grids aligned
    mu = mean(f)
    if isinstance(f, Gaussian):
        return Gaussian(f.var, 0.0)
    if isinstance(f, Uniform):
        return Uniform(f.a - mu, f.b - mu)
    if isinstance(f, Grid):
        return Grid(f.start - mu, f.step, f.values)
    return f


def pitman_risk(f, M: int = 1, q: QuadratureSpec | None = None) -> RiskEstimate:
    """Constant risk of the Pitman estimator from ``M`` observations of ``theta + W``."""
    q = q or QuadratureSpec()
    if not (isinstance(M, int) and 1 <= M <= MAX_SAMPLES):
        raise UnsupportedSampleSize(f"sample size must be 1..{MAX_SAMPLES}, got {M}")
    f = _centered(realize(f))
    var = variance(f)
    if not (math.isfinite(var) and var > 0):
        raise InfiniteVariance(f"noise variance is {var}")
    fine = _risk_quadrature(f, M, q)
    coarse = _risk_quadrature(f, M, q.coarse())
    return RiskEstimate(fine, abs(fine - coarse), M, q)


def de_game(sources, M: int = 1, q: QuadratureSpec | None = None,
            tol: float = GAME_TOL, return_errors: bool = False):
    """Cost game ``v(s)`` = Pitman risk of the sensor seeing the sources in ``s``.

    All-Gaussian inputs use the closed form ``sum of variances / M``.
    """
    sources = list(sources)
    if not sources:
        raise InputError("no sources")
    if not (isinstance(M, int) and 1 <= M <= MAX_SAMPLES):
        raise UnsupportedSampleSize(f"sample size must be 1..{MAX_SAMPLES}, got {M}")
    errors = {}
    if all(isinstance(f, Gaussian) for f in sources):
        def value(s):
            return math.fsum(sources[i].var for i in players_of(s)) / M
    else:
        def value(s):
            est = pitman_risk(sum_of(*[sources[i] for i in players_of(s)]), M, q)
            errors[s] = est.error
            return est.risk
    g = game_from_function(len(sources), Orientation.COST, value, exact=False, tol=tol)
    return (g, errors) if return_errors else g
