import numpy as np
import pytest
from hypothesis import given, settings

from frobase._linalg import random_unitary
from frobase.acceptance import algebra_basis, algebra_vec, random_blocks
from frobase.base import BaseSpace
from frobase.covering import frobenius_from_covering, make_covering
from frobase.errors import InputError, NotSpecialisable, VerificationError
from frobase.frobenius import (LAWS, FrobeniusStructure, block_frobenius, center_dims, classify_fibers,
                               conjugate, cstar_norm, endomorphism_frobenius, from_ortho, involution,
                               is_central, is_phase, is_star_homomorphism, phase_residuals, require_laws,
                               restrict, specialise, specialiser, star_homomorphism_residuals,
                               star_isomorphism_residual, star_section, support_restriction,
                               tensor_frobenius, trivial_frobenius, verify_laws)
from frobase.hilbmod import BundleMorphism, Section, bundle, distance, identity, unit_bundle

from conftest import crandn, points, random_section, seeds


def covering_structure():
    p = make_covering(["y1", "y2", "y3"], ["a", "b", "c"], {"y1": "a", "y2": "a", "y3": "b"})
    return frobenius_from_covering(p, allow_degenerate=True)


def test_shape_mismatch_is_input_error():
    E = bundle(points(1), [2])
    with pytest.raises(InputError, match="t0"):
        FrobeniusStructure(E, [np.zeros((2, 2, 3))], [np.zeros(2)])
    with pytest.raises(InputError):
        FrobeniusStructure(E, [], [])


def test_matrix_algebra_laws():
    rep = verify_laws(trivial_frobenius(points(1), [2]))
    for law in ("unit", "associativity", "frobenius", "strong_frobenius", "special", "nondegenerate"):
        assert rep.verdicts[law], law
    assert not rep.verdicts["commutative"]
    assert set(LAWS) <= set(rep.verdicts)


def test_covering_structure_laws():
    p = make_covering(["y1", "y2", "y3"], ["a", "b"], {"y1": "a", "y2": "a", "y3": "b"})
    rep = verify_laws(frobenius_from_covering(p))
    assert rep.ok("unit", "associativity", "frobenius", "strong_frobenius", "commutative", "nondegenerate")
    # the normalized sheet counting measure is not special on fibers of size 2
    assert not rep.verdicts["special"] and rep.verdicts["specialisable"]


def test_perturbation_breaks_associativity():
    F = trivial_frobenius(points(1), [2])
    mult = F.mult[0].copy()
    mult[0, 1, 2] += 1e-3
    rep = verify_laws(FrobeniusStructure(F.carrier, [mult], F.unit))
    assert rep.residuals["associativity"] >= 1e-4 and not rep.verdicts["associativity"]
    with pytest.raises(VerificationError) as exc:
        require_laws(FrobeniusStructure(F.carrier, [mult], F.unit))
    assert exc.value.report is not None


def test_weights_are_respected():
    # the same algebra with a rescaled carrier is still a valid structure
    F = trivial_frobenius(points(2), [1, 2])
    E = bundle(F.base, F.carrier.dims, [4.0, 0.25])
    G = from_ortho(E, [F.ortho(t)[0] for t in range(2)], [F.ortho(t)[1] for t in range(2)])
    assert verify_laws(G).ok("unit", "associativity", "frobenius", "special")


def test_matrix_star_is_conjugate_transpose():
    blocks = [1, 2]
    F = trivial_frobenius(points(1), blocks)
    _, star = involution(F)
    for x in algebra_basis(blocks):
        x = x * (1 + 2j)
        s = star(Section(F.carrier, [algebra_vec(x, blocks)])).vectors[0]
        assert np.abs(s - algebra_vec(x.conj().T, blocks)).max() < 1e-12
        assert np.abs(s - star_section(F, Section(F.carrier, [algebra_vec(x, blocks)])).vectors[0]).max() < 1e-12


def test_covering_star_is_conjugation_and_unit_self_adjoint():
    F = covering_structure()
    _, star = involution(F)
    rng = np.random.default_rng(0)
    x = random_section(rng, F.carrier)
    assert all(np.abs(a - b.conj()).max(initial=0) < 1e-12 for a, b in zip(star(x).vectors, x.vectors))
    u = F.unit_section()
    assert all(np.abs(a - b).max(initial=0) < 1e-12 for a, b in zip(star(u).vectors, u.vectors))


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_star_is_antimultiplicative_involution(seed):
    rng = np.random.default_rng(seed)
    X = points(2)
    F = block_frobenius(X, [random_blocks(rng, 3, 2) for _ in X])
    F = conjugate(F, [random_unitary(d, rng) for d in F.carrier.dims])
    _, star = involution(F)
    x, y = random_section(rng, F.carrier), random_section(rng, F.carrier)
    xx = star(star(x))
    assert all(np.abs(a - b).max() < 1e-10 for a, b in zip(xx.vectors, x.vectors))
    lhs = star(F.product(x, y))
    rhs = F.product(star(y), star(x))
    assert all(np.abs(a - b).max() < 1e-10 for a, b in zip(lhs.vectors, rhs.vectors))


def test_specialiser_examples():
    F = trivial_frobenius(points(2), [2, 1])
    assert distance(specialiser(F), identity(F.carrier)) < 1e-12
    for n in (1, 2, 3):
        T = trivial_frobenius(points(1), [n], normalization="trace")
        d = specialiser(T).blocks[0]
        assert np.abs(d - np.eye(n * n) / np.sqrt(n)).max() < 1e-12
        assert verify_laws(specialise(T)).residuals["special"] < 1e-10


def test_specialise_covering():
    F = covering_structure()
    assert verify_laws(specialise(F)).residuals["special"] < 1e-10


def test_not_specialisable_on_degenerate_unit():
    # the zero structure on a 1-dimensional fiber: mu mu^dag singular; laws fail first
    E = bundle(points(1), [1])
    with pytest.raises((NotSpecialisable, VerificationError)):
        specialiser(FrobeniusStructure(E, [np.zeros((1, 1, 1))], [np.zeros(1)]))


def test_block_constructor_examples():
    X = points(2)
    F = trivial_frobenius(X, [1])
    assert F.carrier.dims == (1, 1)
    assert all(np.array_equal(m, np.ones((1, 1, 1))) and np.array_equal(u, [1]) for m, u in zip(F.mult, F.unit))
    M2 = trivial_frobenius(X, [2])
    assert verify_laws(M2).ok("special") and not verify_laws(M2).verdicts["commutative"] and is_central(M2)
    C2 = trivial_frobenius(X, [1, 1])
    assert verify_laws(C2).ok("special", "commutative")
    with pytest.raises(InputError):
        trivial_frobenius(X, [0])
    with pytest.raises(InputError):
        block_frobenius(X, [[1]], "bogus")


def test_endomorphism_structure():
    X = points(2)
    F = endomorphism_frobenius(unit_bundle(X))
    T = trivial_frobenius(X, [1])
    assert all(np.abs(a - b).max() < 1e-14 for a, b in zip(F.mult, T.mult))
    G = endomorphism_frobenius(bundle(points(1), [2], [3.0]))
    assert verify_laws(G).ok("unit", "associativity", "frobenius")
    assert classify_fibers(G) == {"t0": [2]}


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_endomorphism_structure_specialisable(seed):
    rng = np.random.default_rng(seed)
    X = points(2)
    E = bundle(X, rng.integers(1, 5, size=2), rng.uniform(0.5, 2, size=2))
    F = endomorphism_frobenius(E)
    assert verify_laws(specialise(F)).residuals["special"] < 1e-10


def test_tensor_structure():
    F = tensor_frobenius(trivial_frobenius(points(1), [2]), trivial_frobenius(points(1), [1, 1]))
    assert verify_laws(F).ok("unit", "associativity", "frobenius", "special")
    assert classify_fibers(F) == {"t0": [2, 2]}


def test_cstar_norm_examples():
    F = trivial_frobenius(points(2), [1, 2])
    assert np.abs(cstar_norm(F, F.unit_section()).values - 1).max() < 1e-12
    p = make_covering(["y1", "y2", "y3"], ["a", "b"], {"y1": "a", "y2": "a", "y3": "b"})
    C = frobenius_from_covering(p)
    sheet = Section(C.carrier, [[1, 0], [0]])
    assert np.abs(cstar_norm(C, sheet).values - [1, 0]).max() < 1e-12


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_cstar_identity(seed):
    rng = np.random.default_rng(seed)
    F = trivial_frobenius(points(1), random_blocks(rng, 3, 3))
    x, y = random_section(rng, F.carrier), random_section(rng, F.carrier)
    nx, ny = cstar_norm(F, x).values, cstar_norm(F, y).values
    assert np.abs(cstar_norm(F, F.product(star_section(F, x), x)).values - nx ** 2).max() < 1e-9 * max(1, nx.max() ** 2)
    assert np.all(cstar_norm(F, F.product(x, y)).values <= nx * ny * (1 + 1e-9))


def test_classification_examples():
    F = trivial_frobenius(points(3), [1, 2])
    assert classify_fibers(F) == {"t0": [1, 2], "t1": [1, 2], "t2": [1, 2]}
    p = make_covering(["y1", "y2", "y3", "y4"], ["a", "b"], {"y1": "a", "y2": "a", "y3": "a", "y4": "b"})
    assert classify_fibers(frobenius_from_covering(p)) == {"a": [1, 1, 1], "b": [1]}


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_classification_invariant_under_conjugation(seed):
    rng = np.random.default_rng(seed)
    X = points(2)
    blocks = [sorted(random_blocks(rng)) for _ in X]
    F = conjugate(block_frobenius(X, blocks), [random_unitary(d, rng) for d in block_frobenius(X, blocks).carrier.dims])
    assert classify_fibers(F, seed % 1000) == dict(zip(X.points, blocks))
    assert center_dims(F) == [len(b) for b in blocks]


def test_centrality_examples():
    X = points(2)
    for n in (1, 2, 3):
        assert is_central(trivial_frobenius(X, [n]))
    assert not is_central(trivial_frobenius(X, [1, 1]))
    assert not is_central(covering_structure())


def test_phase_examples():
    F = trivial_frobenius(points(2), [1])
    assert is_phase(F, F.unit_section())
    phi = Section(F.carrier, [[np.exp(0.3j)], [np.exp(-2j)]])
    assert is_phase(F, phi)
    assert not is_phase(F, Section(F.carrier, [2 * u for u in F.unit]))


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_phase_criteria_agree(seed):
    rng = np.random.default_rng(seed)
    F = trivial_frobenius(points(1), [2])
    U = random_unitary(2, rng) * (1 if rng.uniform() < 0.5 else rng.uniform(0.5, 1.5))
    phi = Section(F.carrier, [algebra_vec(U, [2])])
    eq, un = phase_residuals(F, phi)
    assert (eq < 1e-10) == (un < 1e-10)


def test_star_homomorphism_examples():
    rng = np.random.default_rng(5)
    F = block_frobenius(points(2), [[2], [1, 2]])
    assert is_star_homomorphism(identity(F.carrier), F, F)
    Us = [random_unitary(d, rng) for d in F.carrier.dims]
    G = conjugate(F, Us)
    U = BundleMorphism(F.carrier, G.carrier, Us)
    assert star_isomorphism_residual(U, F, G) < 1e-10
    f = BundleMorphism(F.carrier, F.carrier, [crandn(rng, d, d) for d in F.carrier.dims])
    r = star_homomorphism_residuals(f, F, F)
    assert not is_star_homomorphism(f, F, F) and r["mult"] > 1e-3


def test_support_restriction_examples():
    F = trivial_frobenius(points(2), [2])
    U, G, _ = support_restriction(F)
    assert U == ("t0", "t1") and G.carrier.dims == F.carrier.dims
    X = BaseSpace(["a", "b", "c"])
    E = bundle(X, [4, 0, 9])
    H = block_frobenius(points(1), [[2]])
    K = block_frobenius(points(1), [[3]])
    F = FrobeniusStructure(E, [H.mult[0], np.zeros((0, 0, 0)), K.mult[0]], [H.unit[0], np.zeros(0), K.unit[0]])
    U, G, s = support_restriction(F)
    assert U == ("a", "c") and G.carrier.dims == (4, 9)
    assert restrict(F, ["c"]).carrier.dims == (9,)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_support_scalar_matches_carrier(seed):
    rng = np.random.default_rng(seed)
    X = points(4)
    dims = [random_blocks(rng) if rng.uniform() < 0.7 else [] for _ in X]
    parts = [block_frobenius(points(1), [b]) if b else None for b in dims]
    E = bundle(X, [p.carrier.dims[0] if p else 0 for p in parts], rng.uniform(0.5, 2, size=4))
    F = from_ortho(E, [p.mult[0] if p else np.zeros((0, 0, 0)) for p in parts],
                   [p.unit[0] if p else np.zeros(0) for p in parts])
    U, _, s = support_restriction(F)
    assert U == tuple(x for x, b in zip(X.points, dims) if b)
