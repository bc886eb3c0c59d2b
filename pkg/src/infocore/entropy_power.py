"""Games on entropies and entropy powers of sums of independent variables.

Discrete entropies are in bits, differential entropies in nats.  Entropy
power is only evaluated for Gaussians, where ``N(X) = det(cov)^(1/d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InputError,
    InvalidPartition,
    NonpositiveVariance,
    NotAGame,
    NotPositiveDefinite,
    SupportTooLarge,
    UnnormalizedInput,
)
from .game import (
    DEFAULT_TOL,
    FractionalPartition,
    Game,
    Orientation,
    game_from_function,
    is_fractional_partition,
    players_of,
    uniform_degree_partition,
)
from .infogames import entropy_bits

MAX_SUM_SOURCES = 10
MAX_SUPPORT = 10_000
SYMMETRY_TOL = 1e-12
EQUALITY_RTOL = 1e-6


@dataclass(frozen=True)
class IntegerPmf:
    offset: int
    probs: np.ndarray


def integer_pmf(offset: int, probs) -> IntegerPmf:
    arr = np.asarray(probs, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("integer pmf needs a nonempty probability vector")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise UnnormalizedInput("integer pmf has negative or non-finite entries")
    if abs(math.fsum(arr) - 1.0) > 1e-12:
        raise UnnormalizedInput(f"integer pmf sums to {math.fsum(arr)!r}")
    arr.setflags(write=False)
    return IntegerPmf(int(offset), arr)


def sum_pmf(pmfs) -> IntegerPmf:
    """Exact distribution of a sum of independent integer variables."""
    support = 1 + sum(p.probs.size - 1 for p in pmfs)
    if support > MAX_SUPPORT:
        raise SupportTooLarge(f"sum has support {support} > {MAX_SUPPORT}")
    out = np.array([1.0])
    off = 0
    for p in pmfs:
        out = np.convolve(out, p.probs)  # direct summation
        off += p.offset
    return IntegerPmf(off, out)


def entropy_sum_game(sources, tol: float = DEFAULT_TOL) -> Game:
    """Resource game ``v(s) = H(sum_{i in s} X_i)`` in bits."""
    sources = list(sources)
    if not 1 <= len(sources) <= MAX_SUM_SOURCES:
        raise InputError(f"entropy-of-sums game takes 1..{MAX_SUM_SOURCES} sources")
    sum_pmf(sources)  # support check on the largest sum

    def value(s):
        return entropy_bits(sum_pmf([sources[i] for i in players_of(s)]).probs)

    return game_from_function(len(sources), Orientation.RESOURCE, value, exact=False, tol=tol)


def random_integer_pmf(rng: np.random.Generator, max_support: int = 8) -> IntegerPmf:
    k = int(rng.integers(1, max_support + 1))
    w = rng.dirichlet(np.ones(k))
    w = w / math.fsum(w)
    return integer_pmf(int(rng.integers(-3, 4)), w)


# --------------------------------------------------------------------------
# Gaussian entropy power


@dataclass(frozen=True)
class GaussianSpec:
    d: int
    covariances: tuple  # n arrays of shape (d, d)

    @property
    def n(self) -> int:
        return len(self.covariances)


def gaussian_spec(d: int, covariances) -> GaussianSpec:
    d = int(d)
    if d < 1:
        raise InputError("dimension must be positive")
    covs = []
    for k, c in enumerate(covariances):
        a = np.array(c, dtype=np.float64).reshape(d, d) if np.size(c) == d * d else None
        if a is None:
            raise InputError(f"covariance {k + 1} is not {d}x{d}")
        if np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
            raise NotPositiveDefinite(f"covariance {k + 1} is not symmetric")
        try:
            np.linalg.cholesky(a)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(f"covariance {k + 1} is not positive definite") from exc
        a.setflags(write=False)
        covs.append(a)
    if not covs:
        raise InputError("need at least one covariance")
    return GaussianSpec(d, tuple(covs))


def entropy_power(cov: np.ndarray) -> float:
    d = cov.shape[0]
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise NotPositiveDefinite("covariance sum is not positive definite")
    return math.exp(logdet / d)


def _sum_cov(g: GaussianSpec, s: int) -> np.ndarray:
    return sum((g.covariances[i] for i in players_of(s)), np.zeros((g.d, g.d)))


def gaussian_entropy_power_game(g: GaussianSpec, tol: float = DEFAULT_TOL) -> Game:
    """Cost game ``v(s) = det(sum of covariances in s)^(1/d)``."""
    return game_from_function(g.n, Orientation.COST,
                              lambda s: entropy_power(_sum_cov(g, s)), exact=False, tol=tol)


@dataclass
class EpiReport:
    lhs: float
    rhs: float
    margin: float
    equality: bool
    mode: str  # "fractional_partition" | "uniform_degree"
    conjecture_evidence: bool
    holds: bool


def check_fractional_epi(g: GaussianSpec, fp: FractionalPartition | None = None,
                         collection=None) -> EpiReport:
    """Compare ``N(X_1+...+X_n)`` with the weighted sum over a collection.

    With ``fp`` the weights form a fractional partition and the comparison is
    reported as evidence for the open conjecture.  With ``collection`` every
    set gets weight ``1/r+`` (``r+`` the maximum degree), a proven
    inequality, so ``holds`` must come out true.
    """
    if (fp is None) == (collection is None):
        raise InputError("pass exactly one of a fractional partition or a collection")
    n = g.n
    if fp is not None:
        try:
            ok = is_fractional_partition(fp, n, tol=1e-12)
        except InputError as exc:
            raise InvalidPartition(str(exc)) from exc
        if not ok:
            raise InvalidPartition("weights are not a fractional partition")
        mode, evidence = "fractional_partition", True
    else:
        coll = tuple(collection)
        if not coll or any(s == 0 or s >> n for s in coll):
            raise InvalidPartition("collection must hold nonempty coalitions of [n]")
        fp = uniform_degree_partition(coll, n)
        mode, evidence = "uniform_degree", False
    lhs = entropy_power(_sum_cov(g, (1 << n) - 1))
    rhs = math.fsum(float(w) * entropy_power(_sum_cov(g, s))
                    for s, w in zip(fp.collection, fp.weights))
    margin = lhs - rhs
    return EpiReport(lhs, rhs, margin, abs(margin) <= EQUALITY_RTOL * lhs, mode, evidence,
                     margin >= -1e-9 * max(1.0, lhs))


def random_gaussian_spec(n: int, d: int, rng: np.random.Generator) -> GaussianSpec:
    covs = []
    for _ in range(n):
        A = rng.normal(size=(d, d))
        c = A @ A.T + 0.05 * np.eye(d)
        covs.append((c + c.T) / 2)
    return gaussian_spec(d, covs)


# --------------------------------------------------------------------------
# shifted differential entropy of sums

TWO_PI_E = 2 * math.pi * math.e


def differential_entropy_game(variances):
    """Raw ``h(sum of X_i)`` has ``v(empty) = -inf`` and is not a game."""
    raise NotAGame("differential entropies of sums give v(empty) = -inf; "
                   "use shifted_diff_entropy_game, which adds an independent "
                   "zero-entropy Gaussian")


def shifted_diff_entropy_game(variances, tol: float = DEFAULT_TOL) -> Game:
    """``v(s) = h(X + sum_{i in s} X_i)`` in nats for scalar Gaussians.

    ``X`` has variance ``1/(2 pi e)`` so that ``h(X) = 0`` and hence
    ``v(empty) = 0``; then ``v(s) = ln(1 + 2 pi e sum sigma_i^2) / 2``.
    The function is submodular, so it is analysed as a resource game.
    """
    var = [float(x) for x in variances]
    if not var:
        raise InputError("need at least one variance")
    if any(not (x > 0 and math.isfinite(x)) for x in var):
        raise NonpositiveVariance(f"variances must be positive, got {var}")

    def value(s):
        return 0.5 * math.log1p(TWO_PI_E * math.fsum(var[i] for i in players_of(s)))

    return game_from_function(len(var), Orientation.RESOURCE, value, exact=False, tol=tol)
