"""Source-coding and multiple-access games built from probability data.

Discrete entropies and mutual informations are in bits.  Probability
tensors are validated to sum to one within ``1e-12``; zero-probability
cells contribute nothing to entropy sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import PrefixResult, prefix_robust_allocation
from .errors import InputError, NonpositiveNoise, OverlappingSubsets, UnnormalizedInput
from .game import DEFAULT_TOL, Game, Orientation, game_from_function, players_of
from .lp import Direction, LinearProgram, Relation, solve

NORM_TOL = 1e-12


def entropy_bits(probs) -> float:
    p = np.asarray(probs, dtype=np.float64).ravel()
    p = p[p > 0]
    return -math.fsum(p * np.log2(p))


def _check_normalized(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise UnnormalizedInput(f"{what} has non-finite entries")
    if np.any(arr < 0):
        raise UnnormalizedInput(f"{what} has negative entries")
    total = math.fsum(arr.ravel())
    if abs(total - 1.0) > NORM_TOL:
        raise UnnormalizedInput(f"{what} sums to {total!r}, not 1")


@dataclass(frozen=True)
class JointPmf:
    alphabet_sizes: tuple
    probs: np.ndarray  # shape == alphabet_sizes

    @property
    def n(self) -> int:
        return len(self.alphabet_sizes)


def joint_pmf(alphabet_sizes, probs) -> JointPmf:
    """Validate a row-major probability table over the product alphabet."""
    sizes = tuple(int(a) for a in alphabet_sizes)
    if not sizes or any(a < 1 for a in sizes):
        raise InputError(f"alphabet sizes must be positive integers, got {list(alphabet_sizes)}")
    arr = np.asarray(probs, dtype=np.float64)
    if arr.size != math.prod(sizes):
        raise InputError(f"expected {math.prod(sizes)} probabilities, got {arr.size}")
    arr = arr.reshape(sizes)
    _check_normalized(arr, "joint pmf")
    arr.setflags(write=False)
    return JointPmf(sizes, arr)


def product_pmf(marginals) -> JointPmf:
    arrs = [np.asarray(m, dtype=np.float64) for m in marginals]
    for k, a in enumerate(arrs):
        _check_normalized(a, f"marginal {k + 1}")
    out = arrs[0]
    for a in arrs[1:]:
        out = np.multiply.outer(out, a)
    return joint_pmf([a.size for a in arrs], out)


def random_pmf(alphabet_sizes, rng: np.random.Generator) -> JointPmf:
    w = rng.dirichlet(np.ones(math.prod(alphabet_sizes)))
    w = w / math.fsum(w)
    return joint_pmf(alphabet_sizes, w)


def _marginal_table(p: np.ndarray, keep: list[int]) -> np.ndarray:
    drop = tuple(a for a in range(p.ndim) if a not in keep)
    return p.sum(axis=drop) if drop else p


def joint_entropy(p: JointPmf, s: int) -> float:
    """``H(X_s)`` in bits."""
    if s == 0:
        return 0.0
    return entropy_bits(_marginal_table(p.probs, players_of(s)))


def conditional_entropy(p: JointPmf, s: int, t: int) -> float:
    """``H(X_s | X_t)`` for disjoint coalitions ``s`` and ``t``."""
    if s & t:
        raise OverlappingSubsets("conditioning set overlaps the target set")
    return joint_entropy(p, s | t) - joint_entropy(p, t)


def marginal(p: JointPmf, k: int) -> JointPmf:
    """Distribution of the first ``k`` sources."""
    return JointPmf(p.alphabet_sizes[:k], _marginal_table(p.probs, list(range(k))))


def _nonneg(x: float) -> float:
    # differences of entropies that are mathematically >= 0
    return 0.0 if -1e-12 < x < 0 else x


def slepian_wolf_game(p: JointPmf, tol: float = DEFAULT_TOL) -> Game:
    """Cost game ``v(s) = H(X_s | X_{s^c})``."""
    N = (1 << p.n) - 1
    H = [joint_entropy(p, m) for m in range(1 << p.n)]
    return game_from_function(p.n, Orientation.COST,
                              lambda s: _nonneg(H[N] - H[N ^ s]), exact=False, tol=tol)


def modified_sw_game(p: JointPmf, tol: float = DEFAULT_TOL) -> Game:
    """Cost game ``v(s) = H(X_s | X_{[max s] - s})``.

    Only sources with smaller index than the largest member of ``s`` are
    conditioned on: those are the ones still present when sources drop out
    in decreasing order.
    """
    H = [joint_entropy(p, m) for m in range(1 << p.n)]

    def value(s):
        prefix = (1 << s.bit_length()) - 1
        return _nonneg(H[prefix] - H[prefix ^ s])

    return game_from_function(p.n, Orientation.COST, value, exact=False, tol=tol)


def sw_robust_allocation(p: JointPmf, tol: float = DEFAULT_TOL) -> PrefixResult:
    """Rates ``R_k = H(X_k | X_1..X_{k-1})``, checked against every prefix game."""
    family = [slepian_wolf_game(marginal(p, k), tol) for k in range(1, p.n + 1)]
    return prefix_robust_allocation(family, strict=True)


# --------------------------------------------------------------------------
# multiple access channels


@dataclass(frozen=True)
class ChannelSpec:
    input_marginals: tuple  # arrays, one per sender
    transition: np.ndarray  # rows: product input alphabet (row-major); cols: outputs

    @property
    def n(self) -> int:
        return len(self.input_marginals)

    def joint(self) -> np.ndarray:
        """``p(x_1..x_n, y)`` with the output as the last axis."""
        px = product_pmf(self.input_marginals).probs
        sizes = px.shape
        return (px.reshape(-1, 1) * self.transition).reshape(sizes + (self.transition.shape[1],))


def channel_spec(input_marginals, transition, output_size: int | None = None) -> ChannelSpec:
    margs = []
    for k, m in enumerate(input_marginals):
        a = np.asarray(m, dtype=np.float64)
        if a.ndim != 1 or a.size == 0:
            raise InputError(f"input marginal {k + 1} must be a nonempty vector")
        _check_normalized(a, f"input marginal {k + 1}")
        a.setflags(write=False)
        margs.append(a)
    if not margs:
        raise InputError("channel needs at least one input")
    W = np.asarray(transition, dtype=np.float64)
    rows = math.prod(a.size for a in margs)
    if W.ndim != 2 or W.shape[0] != rows:
        raise InputError(f"transition must have {rows} rows (product input alphabet)")
    if output_size is not None and W.shape[1] != output_size:
        raise InputError(f"transition has {W.shape[1]} columns, output_size is {output_size}")
    for r in range(rows):
        _check_normalized(W[r], f"transition row {r}")
    W.setflags(write=False)
    return ChannelSpec(tuple(margs), W)


def random_channel(input_sizes, output_size: int, rng: np.random.Generator) -> ChannelSpec:
    margs = []
    for a in input_sizes:
        w = rng.dirichlet(np.ones(a))
        margs.append(w / math.fsum(w))
    W = rng.dirichlet(np.ones(output_size), size=math.prod(input_sizes))
    W = W / W.sum(axis=1, keepdims=True)
    return channel_spec(margs, W, output_size)


def cmi_with_output(ch: ChannelSpec, s: int) -> float:
    """``I(X_s; Y | X_{s^c})`` in bits."""
    pj = ch.joint()
    n = ch.n
    comp = [i for i in range(n) if not s >> i & 1]

    def H(axes):
        return entropy_bits(_marginal_table(pj, axes))

    # H(Y | X_comp) - H(Y | X_all)
    val = (H(comp + [n]) - H(comp)) - (H(list(range(n + 1))) - H(list(range(n))))
    return _nonneg(val)


def dmmac_game(ch: ChannelSpec, tol: float = DEFAULT_TOL) -> Game:
    """Resource game ``gamma(s) = I(X_s; Y | X_{s^c})`` for one fixed product input law."""
    return game_from_function(ch.n, Orientation.RESOURCE, lambda s: cmi_with_output(ch, s),
                              exact=False, tol=tol)


@dataclass(frozen=True)
class PowerProfile:
    P: tuple
    N: float

    @property
    def n(self) -> int:
        return len(self.P)


def power_profile(P, N) -> PowerProfile:
    P = tuple(float(x) for x in P)
    N = float(N)
    if not P:
        raise InputError("power profile needs at least one sender")
    if not (N > 0 and math.isfinite(N)):
        raise NonpositiveNoise(f"noise variance must be positive, got {N}")
    if any(not (x >= 0 and math.isfinite(x)) for x in P):
        raise InputError(f"powers must be finite and nonnegative, got {list(P)}")
    return PowerProfile(P, N)


def gaussian_capacity(snr: float) -> float:
    """``C(x) = log2(1 + x) / 2``."""
    return 0.5 * math.log1p(snr) / math.log(2)


def gmac_game(pp: PowerProfile, tol: float = DEFAULT_TOL) -> Game:
    def value(s):
        return gaussian_capacity(math.fsum(pp.P[i] for i in players_of(s)) / pp.N)

    return game_from_function(pp.n, Orientation.RESOURCE, value, exact=False, tol=tol)


def la_anantharam_value(pp: PowerProfile, s: int) -> float:
    """Capacity coalition ``s`` keeps while the others jam coherently.

    Jamming power is ``(sum of sqrt(P_i) over the jammers)**2``; senders
    whose own power falls below it cannot communicate at all.
    """
    n = pp.n
    jam = math.fsum(math.sqrt(pp.P[i]) for i in range(n) if not s >> i & 1) ** 2
    live = math.fsum(pp.P[i] for i in players_of(s) if pp.P[i] >= jam)
    return gaussian_capacity(live / (jam + pp.N))


def la_anantharam_game(pp: PowerProfile, orientation=Orientation.COST,
                       tol: float = DEFAULT_TOL) -> Game:
    """Arbitrarily varying Gaussian MAC game.

    The default cost orientation reads values as the minimum payoff each
    coalition accepts, which is the reading under which the core is
    nonempty; ``orientation="resource"`` builds the other reading.
    """
    return game_from_function(pp.n, orientation, lambda s: la_anantharam_value(pp, s),
                              exact=False, tol=tol)


def la_constrained_core_point(pp: PowerProfile, tol: float = DEFAULT_TOL):
    """Point with ``v_LA(s) <= x(s) <= v_g(s)`` and full sum capacity, or ``None``."""
    n = pp.n
    la = la_anantharam_game(pp, tol=tol)
    g = gmac_game(pp, tol=tol)
    rows = []
    for s in range(1, 1 << n):
        row = [1 if s >> i & 1 else 0 for i in range(n)]
        if s == (1 << n) - 1:
            rows.append((row, Relation.EQ, g.total))
        else:
            rows.append((row, Relation.GE, la.values[s]))
            rows.append((row, Relation.LE, g.values[s]))
    out = solve(LinearProgram(Direction.MIN, [0] * n, rows), tol=tol)
    return out.x if out.optimal else None


def random_power_profile(n: int, rng: np.random.Generator, pmax: float = 10.0) -> PowerProfile:
    P = rng.uniform(0.0, pmax, size=n)
    N = rng.uniform(0.1, 3.0)
    return power_profile(P, N)
