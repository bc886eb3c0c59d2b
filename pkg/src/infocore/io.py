"""JSON file formats and report serialisation.

Players are 1-based in every file and report.  Malformed input raises
:class:`InputError` whose message starts with the file and the offending
field, e.g. ``powers.json: field 'N': noise variance must be positive``.
"""

from __future__ import annotations

import enum
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import capacities, entropy_power, estimation, infogames
from .errors import InfocoreError, InputError, NotMonotone
from .game import FractionalPartition, Game, new_game, players_of, to_fraction


class FieldError(InputError):
    pass


def _fail(path, field, msg):
    raise FieldError(f"{path}: field '{field}': {msg}")


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: not valid UTF-8 JSON ({exc})") from exc


def _get(obj, field, path, kind=None):
    if not isinstance(obj, dict):
        raise FieldError(f"{path}: expected a JSON object")
    if field not in obj:
        _fail(path, field, "missing")
    val = obj[field]
    if kind is not None and not isinstance(val, kind):
        _fail(path, field, f"expected {getattr(kind, '__name__', kind)}")
    return val


def _wrap(path, field, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except InputError as exc:
        if isinstance(exc, FieldError):
            raise
        _fail(path, field, str(exc))
    except (TypeError, ValueError) as exc:
        _fail(path, field, f"malformed value ({exc})")


# --------------------------------------------------------------------------
# games and capacities


def _parse_exact(mode):
    return {None: None, "rational": True, "float": False}[mode]


def game_from_dict(obj, path="<game>", mode=None, tol=1e-9) -> Game:
    n = _get(obj, "n", path, int)
    orient = _get(obj, "orientation", path, str)
    if orient not in ("cost", "resource"):
        _fail(path, "orientation", f"must be 'cost' or 'resource', got {orient!r}")
    vals = _get(obj, "values", path, list)
    if mode == "float":
        vals = [_wrap(path, "values", lambda x: float(to_fraction(x)), x) for x in vals]
    g = _wrap(path, "values", new_game, n, orient, vals, exact=_parse_exact(mode), tol=tol)
    if obj.get("capacity", False):
        if orient != "resource":
            _fail(path, "orientation", "capacities must be resource games")
        try:
            capacities.capacity_from_game(g)
        except (InputError, NotMonotone) as exc:
            _fail(path, "values", str(exc))
    return g


def load_game(path, mode=None, tol=1e-9) -> Game:
    return game_from_dict(load_json(path), path, mode, tol)


def load_capacity(path, tol=1e-9) -> capacities.Capacity:
    obj = load_json(path)
    if not (isinstance(obj, dict) and obj.get("capacity", False)):
        _fail(path, "capacity", "capacity files need \"capacity\": true")
    g = game_from_dict(obj, path, "float", tol)
    return capacities.capacity_from_game(g)


def _number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


def game_to_dict(g: Game, capacity: bool = False) -> dict:
    out = {"n": g.n, "orientation": g.orientation.value,
           "values": [_number(x) for x in g.values]}
    if capacity:
        out["capacity"] = True
    return out


def write_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# --------------------------------------------------------------------------
# probability data


def load_pmf(path) -> infogames.JointPmf:
    obj = load_json(path)
    sizes = _get(obj, "alphabet_sizes", path, list)
    probs = _get(obj, "probs", path, list)
    if not all(isinstance(a, int) for a in sizes):
        _fail(path, "alphabet_sizes", "entries must be integers")
    return _wrap(path, "probs", infogames.joint_pmf, sizes, probs)


def load_channel(path) -> infogames.ChannelSpec:
    obj = load_json(path)
    margs = _get(obj, "input_marginals", path, list)
    trans = _get(obj, "transition", path, list)
    out = obj.get("output_size")
    try:
        return infogames.channel_spec(margs, trans, out)
    except InputError as exc:
        field = "input_marginals" if "marginal" in str(exc) else "transition"
        _fail(path, field, str(exc))
    except (TypeError, ValueError) as exc:
        _fail(path, "transition", f"malformed value ({exc})")


def load_power_profile(path) -> infogames.PowerProfile:
    obj = load_json(path)
    P = _get(obj, "P", path, list)
    N = _get(obj, "N", path)
    _wrap(path, "N", infogames.power_profile, [1.0], N)
    return _wrap(path, "P", infogames.power_profile, P, N)


def load_gaussian(path) -> entropy_power.GaussianSpec:
    obj = load_json(path)
    d = _get(obj, "d", path, int)
    covs = _get(obj, "covariances", path, list)
    return _wrap(path, "covariances", entropy_power.gaussian_spec, d, covs)


def _integer_pmf(obj, path, where):
    off = _get(obj, "offset", path, int)
    probs = _get(obj, "probs", path, list)
    return _wrap(path, f"{where}probs", entropy_power.integer_pmf, off, probs)


def load_integer_pmfs(path) -> list:
    """A list of integer pmfs, or a single one."""
    obj = load_json(path)
    if isinstance(obj, dict):
        return [_integer_pmf(obj, path, "")]
    if not isinstance(obj, list) or not obj:
        raise FieldError(f"{path}: expected an integer pmf or a nonempty list of them")
    return [_integer_pmf(o, path, f"[{k}].") for k, o in enumerate(obj)]


def density_from_dict(obj, path="<sources>", where=""):
    kind = _get(obj, "type", path, str)
    if kind == "gaussian":
        return _wrap(path, f"{where}var", estimation.gaussian, _get(obj, "var", path),
                     obj.get("mean", 0.0))
    if kind == "uniform":
        return _wrap(path, f"{where}a", estimation.uniform, _get(obj, "a", path),
                     _get(obj, "b", path))
    if kind == "grid":
        return _wrap(path, f"{where}values", estimation.grid, _get(obj, "start", path),
                     _get(obj, "step", path), _get(obj, "values", path, list))
    _fail(path, f"{where}type", f"unknown density type {kind!r}")


def load_sources(path) -> list:
    obj = load_json(path)
    if not isinstance(obj, list) or not obj:
        raise FieldError(f"{path}: expected a nonempty list of densities")
    return [density_from_dict(o, path, f"[{k}].") for k, o in enumerate(obj)]


def load_variances(path) -> list:
    """``{"variances": [...]}`` or a bare list."""
    obj = load_json(path)
    var = obj if isinstance(obj, list) else _get(obj, "variances", path, list)
    if not var or not all(isinstance(x, (int, float)) for x in var):
        _fail(path, "variances", "expected a nonempty list of numbers")
    return var


def load_partition(path, n: int) -> FractionalPartition:
    """``{"collection": [[1, 2], [3]], "weights": [...]}`` with 1-based players."""
    obj = load_json(path)
    coll = _get(obj, "collection", path, list)
    masks = []
    for k, s in enumerate(coll):
        if not isinstance(s, list) or not s or not all(isinstance(p, int) for p in s):
            _fail(path, f"collection[{k}]", "expected a nonempty list of player numbers")
        if any(p < 1 or p > n for p in s):
            _fail(path, f"collection[{k}]", f"players must lie in 1..{n}")
        masks.append(sum(1 << (p - 1) for p in set(s)))
    weights = obj.get("weights")
    if weights is None:
        weights = [1] * len(masks)
    if not isinstance(weights, list) or len(weights) != len(masks):
        _fail(path, "weights", "expected one weight per coalition")
    weights = [_wrap(path, "weights", to_fraction, w) for w in weights]
    return _wrap(path, "collection", FractionalPartition, tuple(masks), tuple(weights))


# --------------------------------------------------------------------------
# reports


def coalition(mask: int) -> list:
    return [p + 1 for p in players_of(mask)]


def jsonable(x):
    """Fractions become ``"p/q"`` strings; arrays become lists."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    return _number(x)


def partition_dict(fp: FractionalPartition) -> dict:
    return {"collection": [coalition(s) for s in fp.collection], "weights": jsonable(fp.weights)}


def item(prop: str, verdict, certificate, mode: str, tol, **extra) -> dict:
    out = {"property": prop, "verdict": jsonable(verdict), "certificate": jsonable(certificate),
           "mode": mode, "tolerance": float(tol)}
    out.update({k: jsonable(v) for k, v in extra.items()})
    return out


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, float):
        return f"{x:.6f}"
    if isinstance(x, list):
        if x and all(isinstance(v, (int, float, str)) for v in x):
            return "(" + ", ".join(_fmt(v) for v in x) + ")"
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def format_report(items: list) -> str:
    lines = []
    for it in items:
        line = f"{it['property']}: {_fmt(it['verdict'])}"
        cert = it.get("certificate")
        if cert not in (None, {}, []):
            line += f"  {_fmt(cert)}"
        line += f"  [mode={it['mode']}, tol={it['tolerance']:g}]"
        lines.append(line)
    return "\n".join(lines) + "\n"


__all__ = [
    "FieldError", "InfocoreError", "load_json", "load_game", "load_capacity", "game_from_dict",
    "game_to_dict", "write_json", "load_pmf", "load_channel", "load_power_profile",
    "load_gaussian", "load_integer_pmfs", "load_sources", "load_variances", "load_partition",
    "coalition", "jsonable", "item", "format_report", "partition_dict",
]
