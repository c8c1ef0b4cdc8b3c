import json

import numpy as np
import pytest
from hypothesis import given, settings

from frobase import io
from frobase._linalg import random_unitary
from frobase.acceptance import random_blocks, random_surjection
from frobase.bimod import random_cell1, random_cell2
from frobase.base import CFunction
from frobase.errors import InputError
from frobase.frobenius import block_frobenius, conjugate

from conftest import points, random_bundle, random_morphism, seeds


def round_trip(obj):
    return json.loads(io.dumps(obj))


def test_encode_decode_complex():
    a = np.array([[1 + 2j, -0.0], [3, 4j]])
    enc = io.encode_array(a)
    assert enc[0][1] == [0.0, 0.0] and str(enc[0][1][0]) == "0.0"
    assert np.array_equal(io.decode_array(enc, (2, 2), "$"), a)
    assert np.array_equal(io.decode_array([[1, 2]], (1, 2), "$"), [[1, 2]])
    assert io.encode_array(np.eye(2, dtype=complex), real_if_close=True) == [[1.0, 0.0], [0.0, 1.0]]


def test_decode_errors_carry_path():
    with pytest.raises(InputError) as exc:
        io.decode_array([[1, 2]], (2, 2), "$.mult.a")
    assert exc.value.path == "$.mult.a"
    with pytest.raises(InputError):
        io.decode_array([[1, "x"]], (1, 2), "$")


def test_loads_and_read_errors(tmp_path):
    with pytest.raises(InputError, match="invalid JSON"):
        io.loads(b'{"a": ')
    with pytest.raises(InputError) as exc:
        io.load(tmp_path / "missing.json")
    assert exc.value.path == "$"


def test_digest_depends_on_every_input():
    assert io.digest(b"a", b"b") != io.digest(b"ab")
    assert io.digest(b"a") == io.digest(b"a")


def test_dumps_is_sorted_and_stable():
    s = io.dumps({"b": 1, "a": [1.5]})
    assert s.index('"a"') < s.index('"b"') and s.endswith("\n")
    assert io.dumps({"b": 1, "a": 2}, compact=True) == '{"a":2,"b":1}\n'


def test_bundle_validation_paths():
    base = {"points": ["a", "b"]}
    with pytest.raises(InputError) as exc:
        io.bundle_from_json({"base": base, "dims": {"a": 1}})
    assert exc.value.path == "$.dims"
    with pytest.raises(InputError) as exc:
        io.bundle_from_json({"base": base, "dims": {"a": 1, "b": 1.5}})
    assert exc.value.path == "$.dims.b"
    with pytest.raises(InputError) as exc:
        io.bundle_from_json({"base": base, "dims": {"a": 1, "b": 1, "c": 0}})
    assert "'c'" in str(exc.value)
    with pytest.raises(InputError) as exc:
        io.bundle_from_json({"base": base, "dims": {"a": 1, "b": 1}, "weights": {"a": 1, "b": -1}})
    assert exc.value.path == "$.weights.b"
    with pytest.raises(InputError):
        io.bundle_from_json({"base": {"points": ["a", "a"]}, "dims": {"a": 1}})
    with pytest.raises(InputError, match="missing key 'dims'"):
        io.bundle_from_json({"base": base})


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_bundle_and_morphism_round_trip(seed):
    rng = np.random.default_rng(seed)
    X = points(3)
    E, F = random_bundle(rng, X), random_bundle(rng, X)
    f = random_morphism(rng, E, F)
    E2 = io.bundle_from_json(round_trip(io.bundle_to_json(E)))
    assert E2 == E
    f2 = io.morphism_from_json(round_trip(io.morphism_to_json(f)), E, F)
    assert all(np.array_equal(a, b) for a, b in zip(f.blocks, f2.blocks))
    c = CFunction(X, rng.standard_normal(3) + 1j * rng.standard_normal(3))
    assert np.array_equal(io.cfunction_from_json(round_trip(io.cfunction_to_json(c)), X).values, c.values)


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_frobenius_round_trip(seed):
    rng = np.random.default_rng(seed)
    X = points(2)
    F = block_frobenius(X, [random_blocks(rng, 2, 2) for _ in X])
    F = conjugate(F, [random_unitary(d, rng) for d in F.carrier.dims])
    G = io.frobenius_from_json(round_trip(io.frobenius_to_json(F)))
    assert G.carrier == F.carrier
    assert all(np.array_equal(a, b) for a, b in zip(F.mult, G.mult))
    assert all(np.array_equal(a, b) for a, b in zip(F.unit, G.unit))


def test_frobenius_shape_error_path():
    obj = {"base": {"points": ["t"]}, "dims": {"t": 1}, "mult": {"t": [[1]]}, "unit": {"t": [1]}}
    with pytest.raises(InputError) as exc:
        io.frobenius_from_json(obj)
    assert exc.value.path == "$.mult.t"


def test_covering_round_trip_and_errors():
    p = random_surjection(np.random.default_rng(0), 6, 3)
    q = io.covering_from_json(round_trip(io.covering_to_json(p)))
    assert q.proj == p.proj and q.total == p.total and q.base == p.base
    bad = {"total": {"points": ["y"]}, "base": {"points": ["x"]}, "proj": {"y": "z"}}
    with pytest.raises(InputError) as exc:
        io.covering_from_json(bad)
    assert exc.value.path == "$.proj.y"


def test_cells_round_trip():
    rng = np.random.default_rng(1)
    E = random_cell1(points(2, "x"), points(3, "y"), rng)
    F = random_cell1(E.source0, E.target0, rng)
    assert io.cell1_from_json(round_trip(io.cell1_to_json(E))) == E
    f = random_cell2(E, F, rng)
    g = io.cell2_from_json(round_trip(io.cell2_to_json(f)), E, F)
    assert all(np.array_equal(a, b) for ra, rb in zip(f.blocks, g.blocks) for a, b in zip(ra, rb))
    with pytest.raises(InputError) as exc:
        io.cell1_from_json({"source": ["a"], "target": ["b"], "dims": {"a": {"b": -1}}})
    assert exc.value.path == "$.dims.a.b"
