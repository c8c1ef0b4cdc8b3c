"""JSON reading and writing.

Complex numbers are [re, im] pairs; plain numbers are accepted as real
entries. Every per-point table is a dict keyed by point label, and point
orderings are always given explicitly, so matrices are never ambiguous.
Malformed input raises InputError with a JSON path such as $.mult.a.
"""
import hashlib
import json

import numpy as np

from .base import BaseSpace, CFunction
from .bimod import Cell1, Cell2
from .covering import make_covering
from .errors import InputError
from .frobenius import FrobeniusStructure
from .hilbmod import BundleMorphism, HilbertBundle


# -- files ---------------------------------------------------------------------

def read_text(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "$") from None


def loads(raw):
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"invalid JSON: {exc}", "$") from None


def load(path):
    return loads(read_text(path))


def digest(*raws):
    h = hashlib.sha256()
    for raw in raws:
        h.update(hashlib.sha256(raw).digest())
    return h.hexdigest()


def dumps(obj, compact=False):
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- arrays --------------------------------------------------------------------

def _clean(v):
    v = float(v)
    return 0.0 if v == 0 else v


def encode_array(a, real_if_close=False):
    """Nested lists with [re, im] leaves (or plain floats if every entry is real)."""
    a = np.asarray(a)
    if real_if_close and np.iscomplexobj(a) and np.all(a.imag == 0):
        a = a.real
    if np.iscomplexobj(a):
        a = np.stack([a.real, a.imag], axis=-1)
    return (a.astype(float) + 0.0).tolist()


def decode_array(obj, shape, path):
    """Read an array of the given shape, with real or [re, im] leaves."""
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise InputError("expected a rectangular numeric array", path) from None
    n = int(np.prod(shape))
    if arr.shape == tuple(shape) or (n == 0 and arr.size == 0):
        return arr.reshape(shape).astype(complex)
    if arr.shape == tuple(shape) + (2,):
        return arr[..., 0] + 1j * arr[..., 1]
    raise InputError(f"expected shape {tuple(shape)} (optionally with [re, im] leaves), got {arr.shape}", path)


def _need(obj, key, path):
    if not isinstance(obj, dict):
        raise InputError("expected an object", path)
    if key not in obj:
        raise InputError(f"missing key {key!r}", path)
    return obj[key]


def _per_point(obj, X, path):
    """A {label: value} table covering exactly the points of X, in X's order."""
    if not isinstance(obj, dict):
        raise InputError("expected an object keyed by point label", path)
    extra = sorted(set(obj) - set(X.points))
    if extra:
        raise InputError(f"unknown point {extra[0]!r}", path)
    missing = [p for p in X.points if p not in obj]
    if missing:
        raise InputError(f"missing point {missing[0]!r}", path)
    return [obj[p] for p in X.points]


# -- base and bundles ----------------------------------------------------------

def base_from_json(obj, path="$"):
    pts = obj.get("points") if isinstance(obj, dict) else obj
    if not isinstance(pts, list) or not all(isinstance(p, (str, int)) for p in pts):
        raise InputError("expected a list of point labels", f"{path}.points" if isinstance(obj, dict) else path)
    try:
        return BaseSpace(pts)
    except InputError as exc:
        raise InputError(str(exc).split(": ", 1)[-1], f"{path}.points") from None


def base_to_json(X):
    return {"points": list(X.points)}


def cfunction_from_json(obj, X, path="$"):
    vals = _per_point(_need(obj, "values", path), X, f"{path}.values")
    return CFunction(X, [decode_array(v, (), f"{path}.values.{p}").item() for p, v in zip(X.points, vals)])


def cfunction_to_json(f):
    return {"values": {p: encode_array(v) for p, v in zip(f.base.points, f.values)}}


def bundle_from_json(obj, path="$"):
    X = base_from_json(_need(obj, "base", path), f"{path}.base")
    dims = []
    for p, d in zip(X.points, _per_point(_need(obj, "dims", path), X, f"{path}.dims")):
        if not isinstance(d, int) or isinstance(d, bool) or d < 0:
            raise InputError("dimension must be a nonnegative integer", f"{path}.dims.{p}")
        dims.append(d)
    if "weights" in obj:
        weights = []
        for p, w, d in zip(X.points, _per_point(obj["weights"], X, f"{path}.weights"), dims):
            if not isinstance(w, (int, float)) or isinstance(w, bool) or (d > 0 and not w > 0):
                raise InputError("weight must be a positive number", f"{path}.weights.{p}")
            weights.append(float(w))
    else:
        weights = [1.0] * len(X)
    return HilbertBundle(X, tuple(dims), tuple(weights))


def bundle_to_json(E):
    return {"base": base_to_json(E.base),
            "dims": dict(zip(E.base.points, E.dims)),
            "weights": dict(zip(E.base.points, E.weights))}


def morphism_from_json(obj, source, target, path="$"):
    if source.base != target.base:
        raise InputError("source and target live over different bases", path)
    X = source.base
    raw = _per_point(_need(obj, "blocks", path), X, f"{path}.blocks")
    blocks = [decode_array(b, (target.dims[t], source.dims[t]), f"{path}.blocks.{X.points[t]}")
              for t, b in enumerate(raw)]
    return BundleMorphism(source, target, blocks)


def morphism_to_json(f):
    return {"blocks": {p: encode_array(b, True) for p, b in zip(f.source.base.points, f.blocks)}}


# -- Frobenius structures and coverings ----------------------------------------

def frobenius_from_json(obj, path="$"):
    E = bundle_from_json(obj, path)
    X = E.base
    mult = _per_point(_need(obj, "mult", path), X, f"{path}.mult")
    unit = _per_point(_need(obj, "unit", path), X, f"{path}.unit")
    mus = [decode_array(m, (d, d, d), f"{path}.mult.{p}") for p, m, d in zip(X.points, mult, E.dims)]
    etas = [decode_array(u, (d,), f"{path}.unit.{p}") for p, u, d in zip(X.points, unit, E.dims)]
    return FrobeniusStructure(E, mus, etas)


def frobenius_to_json(F):
    out = bundle_to_json(F.carrier)
    out["mult"] = {p: encode_array(m, True) for p, m in zip(F.base.points, F.mult)}
    out["unit"] = {p: encode_array(u, True) for p, u in zip(F.base.points, F.unit)}
    return out


def covering_from_json(obj, path="$"):
    Y = base_from_json(_need(obj, "total", path), f"{path}.total")
    X = base_from_json(_need(obj, "base", path), f"{path}.base")
    proj = _per_point(_need(obj, "proj", path), Y, f"{path}.proj")
    for y, x in zip(Y.points, proj):
        if not isinstance(x, str) or x not in X.points:
            raise InputError(f"{x!r} is not a point of the base", f"{path}.proj.{y}")
    return make_covering(Y, X, proj)


def covering_to_json(p):
    return {"total": base_to_json(p.total), "base": base_to_json(p.base),
            "proj": {y: p.base.points[t] for y, t in zip(p.total.points, p.proj)}}


# -- bimodule cells ------------------------------------------------------------

def cell1_from_json(obj, path="$"):
    X = base_from_json(_need(obj, "source", path), f"{path}.source")
    Y = base_from_json(_need(obj, "target", path), f"{path}.target")
    rows = _per_point(_need(obj, "dims", path), X, f"{path}.dims")
    dims = []
    for x, row in zip(X.points, rows):
        vals = _per_point(row, Y, f"{path}.dims.{x}")
        for y, d in zip(Y.points, vals):
            if not isinstance(d, int) or isinstance(d, bool) or d < 0:
                raise InputError("dimension must be a nonnegative integer", f"{path}.dims.{x}.{y}")
        dims.append(vals)
    return Cell1(X, Y, np.array(dims, dtype=np.int64).reshape(len(X), len(Y)))


def cell1_to_json(E):
    return {"source": base_to_json(E.source0), "target": base_to_json(E.target0),
            "dims": {x: {y: int(E.dims[i, j]) for j, y in enumerate(E.target0.points)}
                     for i, x in enumerate(E.source0.points)}}


def cell2_from_json(obj, source, target, path="$"):
    X, Y = source.source0, source.target0
    rows = _per_point(_need(obj, "blocks", path), X, f"{path}.blocks")
    blocks = []
    for i, (x, row) in enumerate(zip(X.points, rows)):
        vals = _per_point(row, Y, f"{path}.blocks.{x}")
        blocks.append([decode_array(b, (target.dims[i, j], source.dims[i, j]), f"{path}.blocks.{x}.{y}")
                       for j, (y, b) in enumerate(zip(Y.points, vals))])
    return Cell2(source, target, blocks)


def cell2_to_json(f):
    X, Y = f.source1.source0, f.source1.target0
    return {"blocks": {x: {y: encode_array(f.blocks[i][j], True) for j, y in enumerate(Y.points)}
                       for i, x in enumerate(X.points)}}
