"""Command-line front end.

Exit status: 0 on success, 1 when a property the command asserts fails
(for instance a robust allocation that does not verify), 2 on malformed
input.  Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, capacities, entropy_power, estimation, infogames, io
from .errors import (
    DivergenceInfinite,
    EmptyCore,
    InfocoreError,
    InputError,
    NotBalanced,
    NotTwoAlternating,
)
from .game import (
    Orientation,
    check_modularity,
    core_contains,
    shapley_value,
    to_fraction,
    uniform_degree_partition,
)

MAX_ANALYZE_EXACT = 10


class PropertyFailure(Exception):
    """A property the command asserts did not hold; the report is still printed."""

    def __init__(self, items):
        super().__init__("asserted property failed")
        self.items = items


def _emit(args, items):
    if args.json:
        sys.stdout.write(io.write_json(items))
    else:
        sys.stdout.write(io.format_report(items))


def _load_game(args, path):
    return io.load_game(path, mode=args.mode, tol=args.tol)


# --------------------------------------------------------------------------
# analyze


def _balance_item(g, res):
    if res.balanced:
        cert = {"core_point": res.core_point}
    else:
        cert = {res.certificate_kind: io.partition_dict(res.certificate),
                "lp_value": res.lp_value}
    return io.item("balanced", res.balanced, cert, g.mode, g.eps)


def analyze_items(g):
    items = []
    bal = analysis.check_balanced(g)
    items.append(_balance_item(g, bal))
    mod = check_modularity(g)
    cert = {}
    if mod.supermodular_violation:
        s, i, j = mod.supermodular_violation
        cert["supermodular_fails_at"] = {"coalition": io.coalition(s), "pair": [i + 1, j + 1]}
    if mod.submodular_violation:
        s, i, j = mod.submodular_violation
        cert["submodular_fails_at"] = {"coalition": io.coalition(s), "pair": [i + 1, j + 1]}
    items.append(io.item("modularity", mod.verdict, cert, g.mode, g.eps))
    phi = shapley_value(g)
    items.append(io.item("shapley", list(phi), {"in_core": core_contains(g, phi)}, g.mode, g.eps))
    if not bal.balanced:
        items.append(io.item("exact", None, {"skipped": "core is empty"}, g.mode, g.eps))
    elif g.n > MAX_ANALYZE_EXACT:
        items.append(io.item("exact", None, {"skipped": f"n > {MAX_ANALYZE_EXACT}"}, g.mode, g.eps))
    else:
        ex = analysis.check_exact(g)
        cert = {"failures": [{"coalition": io.coalition(s), "attainable": v}
                             for s, v in ex.failures]}
        items.append(io.item("exact", ex.exact, cert, g.mode, g.eps))
    if g.orientation is not Orientation.COST:
        items.append(io.item("large_core", None, {"skipped": "defined for cost games"},
                             g.mode, g.eps))
    elif not bal.balanced:
        items.append(io.item("large_core", None, {"skipped": "core is empty"}, g.mode, g.eps))
    elif g.n > analysis.MAX_LARGE_CORE_PLAYERS:
        items.append(io.item("large_core", None,
                             {"skipped": f"n > {analysis.MAX_LARGE_CORE_PLAYERS}"}, g.mode, g.eps))
    else:
        lc = analysis.check_large_core(g)
        cert = {"vertices_checked": lc.vertices_checked}
        if lc.counterexample is not None:
            cert["aspiration_vertex"] = lc.counterexample
        items.append(io.item("large_core", lc.large, cert, g.mode, g.eps))
    return items


def cmd_analyze(args):
    return analyze_items(_load_game(args, args.game))


# --------------------------------------------------------------------------
# construct


def _construct(args):
    kind, path = args.kind, args.input
    if kind == "sw":
        return infogames.slepian_wolf_game(io.load_pmf(path), tol=args.tol)
    if kind == "swmod":
        return infogames.modified_sw_game(io.load_pmf(path), tol=args.tol)
    if kind == "dmmac":
        return infogames.dmmac_game(io.load_channel(path), tol=args.tol)
    if kind == "gmac":
        return infogames.gmac_game(io.load_power_profile(path), tol=args.tol)
    if kind == "la":
        return infogames.la_anantharam_game(io.load_power_profile(path), tol=args.tol)
    if kind == "esum":
        return entropy_power.entropy_sum_game(io.load_integer_pmfs(path), tol=args.tol)
    if kind == "epower":
        return entropy_power.gaussian_entropy_power_game(io.load_gaussian(path), tol=args.tol)
    if kind == "shifted":
        var = io.load_variances(path)
        try:
            return entropy_power.shifted_diff_entropy_game(var, tol=args.tol)
        except InputError as exc:
            raise io.FieldError(f"{path}: field 'variances': {exc}") from exc
    if kind == "degame":
        return estimation.de_game(io.load_sources(path), args.samples,
                                  tol=max(args.tol, estimation.GAME_TOL))
    raise AssertionError(kind)


def cmd_construct(args):
    g = _construct(args)
    text = io.write_json(io.game_to_dict(g), args.output)
    if args.output is None:
        sys.stdout.write(text)
    elif not args.json:
        print(f"wrote {args.kind} game on {g.n} players to {args.output}")
    return None


# --------------------------------------------------------------------------
# robust, tolerance, xos


def cmd_robust(args):
    obj = io.load_json(args.input)
    if isinstance(obj, dict) and "alphabet_sizes" in obj:
        p = io.load_pmf(args.input)
        family = [infogames.slepian_wolf_game(infogames.marginal(p, k), tol=args.tol)
                  for k in range(1, p.n + 1)]
        kind = "slepian_wolf"
    elif isinstance(obj, dict) and "P" in obj:
        pp = io.load_power_profile(args.input)
        family = [infogames.gmac_game(infogames.PowerProfile(pp.P[:k], pp.N), tol=args.tol)
                  for k in range(1, pp.n + 1)]
        kind = "gmac"
    else:
        raise io.FieldError(f"{args.input}: expected a pmf (alphabet_sizes) or a power profile (P)")
    res = analysis.prefix_robust_allocation(family, strict=False)
    cert = {"game": kind, "allocation": res.allocation,
            "violations": [{"prefix": k, "coalition": io.coalition(s)} for k, s in res.violations]}
    items = [io.item("prefix_robust", res.verified, cert, "float", args.tol)]
    if not res.verified:
        raise PropertyFailure(items)
    return items


def _parse_vector(text, exact):
    try:
        parts = [p.strip() for p in text.split(",")]
        return [to_fraction(p) if exact else float(to_fraction(p)) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--T: cannot parse {text!r} ({exc})") from exc


def cmd_tolerance(args):
    g = _load_game(args, args.game)
    T = _parse_vector(args.T, g.exact)
    if len(T) != g.n:
        raise InputError(f"--T: expected {g.n} entries, got {len(T)}")
    res = analysis.tolerance_allocation(g, T)
    cert = {"allocation": res.allocation} if res.feasible else {"reason": res.reason}
    if res.violated is not None:
        cert["violated_coalition"] = io.coalition(res.violated)
    return [io.item("tolerance_feasible", res.feasible, cert, g.mode, g.eps)]


def cmd_xos(args):
    g = _load_game(args, args.game)
    try:
        res = analysis.xos_representation(g)
    except NotBalanced as exc:
        raise PropertyFailure([io.item("xos", False, {"reason": str(exc)}, g.mode, g.eps)])
    clauses = [{"coalition": io.coalition(s), "weights": a} for s, a in res.clauses]
    items = [io.item("xos", res.reproduces, {"clauses": clauses}, g.mode, g.eps)]
    if not res.reproduces:
        raise PropertyFailure(items)
    return items


# --------------------------------------------------------------------------
# entropy power


def cmd_epi(args):
    spec = io.load_gaussian(args.gaussian)
    n = spec.n
    if args.partition and not args.uniform_degree:
        fp = io.load_partition(args.partition, n)
        rep = entropy_power.check_fractional_epi(spec, fp=fp)
    else:
        if args.partition:
            coll = io.load_partition(args.partition, n).collection
        elif n == 1:
            coll = (1,)
        else:
            full = (1 << n) - 1
            coll = tuple(full ^ (1 << i) for i in range(n))
        rep = entropy_power.check_fractional_epi(spec, collection=coll)
        fp = uniform_degree_partition(coll, n)
    cert = {"lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin, "equality": rep.equality,
            "weights_mode": rep.mode, "partition": io.partition_dict(fp)}
    items = [io.item("fractional_epi", rep.holds, cert, "float", 1e-9,
                     conjecture_evidence=rep.conjecture_evidence)]
    if not rep.conjecture_evidence and not rep.holds:
        raise PropertyFailure(items)
    return items


# --------------------------------------------------------------------------
# capacities


def _capacities(args):
    u = io.load_capacity(args.u, tol=args.tol)
    v = io.load_capacity(args.v, tol=args.tol)
    if u.size != v.size:
        raise InputError(f"{args.v}: field 'n': outcome spaces differ ({u.size} vs {v.size})")
    return u, v


def _lfp(args, u, v):
    try:
        return capacities.least_favorable_pair(u, v, reverse=args.reverse)
    except (NotTwoAlternating, DivergenceInfinite) as exc:
        raise PropertyFailure([io.item("least_favorable_pair", False, {"reason": str(exc)},
                                       "float", args.tol, note=capacities.REALIZATION)])


def cmd_lfp(args):
    u, v = _capacities(args)
    res = _lfp(args, u, v)
    cert = {"P": res.P, "Q": res.Q, "divergence_bits": res.divergence,
            "direction": res.direction, "iterations": res.iterations, "gap": res.gap}
    return [io.item("least_favorable_pair", True, cert, "float", args.tol,
                    note=capacities.REALIZATION)]


def cmd_lr_check(args):
    u, v = _capacities(args)
    res = _lfp(args, u, v)
    try:
        rep = capacities.minimax_lr_check(u, v, (res.P, res.Q), args.step, args.envelope_tol)
    except InputError:
        raise
    cert = {"P": res.P, "Q": res.Q, "max_excess": rep.max_excess,
            "dominance_gap": rep.dominance_gap, "min_total_error": rep.min_total_error,
            "tests": rep.tests, "step": rep.step}
    items = [io.item("lr_on_envelope", rep.on_envelope, cert, "float", rep.tol,
                     note=capacities.REALIZATION)]
    if not rep.on_envelope:
        raise PropertyFailure(items)
    return items


# --------------------------------------------------------------------------
# minimal balanced collections and seeded searches


def cmd_mbc(args):
    if args.n < 1:
        raise InputError(f"n: expected a positive integer, got {args.n}")
    cols = analysis.enumerate_minimal_balanced_collections(args.n)
    cert = [io.partition_dict(fp) for fp in cols]
    return [io.item("minimal_balanced_collections", len(cols), {"collections": cert},
                    "rational", 0)]


def cmd_search(args):
    """Seeded random searches over La-Anantharam power profiles."""
    rng = np.random.default_rng(args.seed)
    found = None
    for trial in range(args.trials):
        pp = infogames.random_power_profile(args.n, rng)
        g = infogames.la_anantharam_game(pp, tol=args.tol)
        if args.target == "la-nonsubmodular":
            hit = check_modularity(g).verdict.value in ("supermodular", "neither")
        else:
            hit = not core_contains(g, shapley_value(g))
        if hit:
            found = (trial, pp, g)
            break
    cert = {"seed": args.seed, "trials": args.trials}
    if found:
        trial, pp, g = found
        cert.update(trial=trial, P=list(pp.P), N=pp.N, values=list(g.values))
    return [io.item(args.target, found is not None, cert, "float", args.tol)]


# --------------------------------------------------------------------------


def _global_flags(p, defaults):
    d = (lambda x: x) if defaults else (lambda x: argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable report")
    p.add_argument("--mode", choices=["rational", "float"], default=d(None),
                   help="numeric mode for game files (default: from the file)")
    p.add_argument("--tol", type=float, default=d(1e-9), help="float-mode tolerance")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized searches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infocore", description=__doc__.splitlines()[0])
    _global_flags(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, False)
        p.set_defaults(func=fn)
        return p

    p = add("analyze", cmd_analyze, "balancedness, modularity, Shapley value, exactness, large core")
    p.add_argument("game")
    p = add("construct", cmd_construct, "build a game from probability or channel data")
    p.add_argument("kind", choices=["sw", "swmod", "dmmac", "gmac", "la", "esum", "epower",
                                    "shifted", "degame"])
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--samples", type=int, default=1, help="sample size M for degame")
    p = add("robust", cmd_robust, "prefix-robust allocation for a pmf or power profile")
    p.add_argument("input")
    p = add("tolerance", cmd_tolerance, "core point below a tolerance vector")
    p.add_argument("game")
    p.add_argument("--T", required=True, help="comma-separated tolerance vector")
    p = add("xos", cmd_xos, "XOS clauses of a balanced resource game")
    p.add_argument("game")
    p = add("epi-check", cmd_epi, "fractional entropy power inequality for Gaussians")
    p.add_argument("gaussian")
    p.add_argument("--partition", help="fractional partition file")
    p.add_argument("--uniform-degree", action="store_true",
                   help="weights 1/r+ on the collection (leave-one-out by default)")
    for name, fn, help_ in (("lfp", cmd_lfp, "least favorable pair of two capacities"),
                            ("lr-check", cmd_lr_check, "likelihood-ratio tests vs all grid tests")):
        p = add(name, fn, help_)
        p.add_argument("u")
        p.add_argument("v")
        p.add_argument("--reverse", action="store_true", help="minimise D(Q||P) instead")
        if name == "lr-check":
            p.add_argument("--step", type=float, default=0.05)
            p.add_argument("--envelope-tol", type=float, default=0.02)
    p = add("mbc", cmd_mbc, "minimal balanced collections")
    p.add_argument("n", type=int)
    p = add("search", cmd_search, "seeded search for La-Anantharam instances")
    p.add_argument("target", choices=["la-nonsubmodular", "la-shapley-outside-core"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--trials", type=int, default=2000)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        items = args.func(args)
    except PropertyFailure as exc:
        _emit(args, exc.items)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EmptyCore, InfocoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if items is not None:
        _emit(args, items)
    return 0


def main() -> None:
    sys.exit(run())
