import numpy as np
import pytest
from hypothesis import given, settings

from frobase.bimod import (Cell1, Cell2, associator, coherence_check, composition_comparison, dagger2,
                           distance2, endohom_agreement, from_2fhilb, hcompose, hcompose2, identity1,
                           identity2, identity_comparison, is_unitary2, left_unitor, local_hom_bijective,
                           random_cell1, random_cell2, right_unitor, vcompose)
from frobase.errors import InputError
from frobase.hilbmod import bundle

from conftest import points, seeds


def chain(rng, sizes, max_dim=3):
    Xs = [points(n, f"b{i}_") for i, n in enumerate(sizes)]
    return [random_cell1(Xs[i], Xs[i + 1], rng, max_dim) for i in range(len(Xs) - 1)]


def test_cell_validation():
    X, Y = points(2), points(1)
    with pytest.raises(InputError):
        Cell1(X, Y, [[1], [-1]])
    E = Cell1(X, Y, [[1], [2]])
    with pytest.raises(InputError):
        Cell2(E, E, [[np.eye(1)], [np.eye(3)]])
    with pytest.raises(InputError):
        hcompose(E, E)
    with pytest.raises(InputError):
        Cell2(E, Cell1(Y, X, [[1, 2]]), [[1]])


def test_hcompose_dims():
    X, Y, Z = points(2, "x"), points(2, "y"), points(1, "z")
    E = Cell1(X, Y, [[1, 2], [0, 1]])
    F = Cell1(Y, Z, [[3], [1]])
    assert np.array_equal(hcompose(E, F).dims, [[5], [1]])
    zero = Cell1(Y, points(2, "w"), [[1, 0], [2, 0]])
    assert np.all(hcompose(E, zero).dims[:, 1] == 0)
    assert hcompose(identity1(X), E) == E and hcompose(E, identity1(Y)) == E


def test_identity_2cells_compose():
    rng = np.random.default_rng(0)
    E, F = chain(rng, (2, 3, 2))
    assert distance2(hcompose2(identity2(E), identity2(F)), identity2(hcompose(E, F))) == 0
    assert distance2(vcompose(identity2(E), identity2(E)), identity2(E)) == 0


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_interchange_and_dagger(seed):
    rng = np.random.default_rng(seed)
    X, Y, Z = points(2, "x"), points(3, "y"), points(2, "z")
    A, B, C = (random_cell1(X, Y, rng) for _ in range(3))
    D, E, F = (random_cell1(Y, Z, rng) for _ in range(3))
    f, g = random_cell2(B, C, rng), random_cell2(A, B, rng)
    h, k = random_cell2(E, F, rng), random_cell2(D, E, rng)
    lhs = hcompose2(vcompose(f, g), vcompose(h, k))
    rhs = vcompose(hcompose2(f, h), hcompose2(g, k))
    assert distance2(lhs, rhs) < 1e-12
    assert distance2(dagger2(dagger2(f)), f) == 0
    assert distance2(dagger2(vcompose(f, g)), vcompose(dagger2(g), dagger2(f))) < 1e-12
    assert distance2(dagger2(hcompose2(f, h)), hcompose2(dagger2(f), dagger2(h))) < 1e-12


def test_coherence_unit_dims():
    X = points(2)
    E = Cell1(X, X, np.ones((2, 2), dtype=int))
    rep = coherence_check(E, E, E, E)
    assert rep["pentagon"] == 0 and rep["triangle"] == 0 and rep["unitary"]


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_coherence_random(seed):
    rng = np.random.default_rng(seed)
    sizes = tuple(int(v) for v in rng.integers(1, 4, size=5))
    E, F, G, H = chain(rng, sizes)
    rep = coherence_check(E, F, G, H)
    assert rep["pentagon"] < 1e-12 and rep["triangle"] < 1e-12 and rep["unitary"]


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_associator_natural(seed):
    rng = np.random.default_rng(seed)
    E, F, G = chain(rng, (2, 2, 2, 2), 2)
    E2, F2, G2 = (random_cell1(c.source0, c.target0, rng, 2) for c in (E, F, G))
    f, g, h = random_cell2(E, E2, rng), random_cell2(F, F2, rng), random_cell2(G, G2, rng)
    lhs = vcompose(associator(E2, F2, G2), hcompose2(hcompose2(f, g), h))
    rhs = vcompose(hcompose2(f, hcompose2(g, h)), associator(E, F, G))
    assert distance2(lhs, rhs) < 1e-12


def test_unitors_unitary():
    rng = np.random.default_rng(1)
    (E,) = chain(rng, (3, 2))
    assert is_unitary2(left_unitor(E)) and is_unitary2(right_unitor(E))


def test_endohom_matches_bundles():
    X = points(3)
    rng = np.random.default_rng(2)
    E, F, G = (bundle(X, rng.integers(0, 4, size=3)) for _ in range(3))
    ok, diff = endohom_agreement(E, F, G)
    assert ok and diff < 1e-12


def test_two_fhilb_examples():
    E = from_2fhilb(1, 1, [[4]])
    assert E.dims.tolist() == [[4]] and E.source0.points == ("1",)
    c = identity_comparison(3)
    assert is_unitary2(c) and np.array_equal(c.target1.dims, np.eye(3))
    with pytest.raises(InputError):
        from_2fhilb(2, 2, [[1, 2]])


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_composition_comparison_unitary(seed):
    rng = np.random.default_rng(seed)
    m, n, k = (int(v) for v in rng.integers(1, 4, size=3))
    H, K = rng.integers(0, 3, size=(m, n)), rng.integers(0, 3, size=(n, k))
    c = composition_comparison(H, K)
    assert is_unitary2(c)
    assert np.array_equal(c.target1.dims, H @ K)
    assert local_hom_bijective(H, H, rng)
