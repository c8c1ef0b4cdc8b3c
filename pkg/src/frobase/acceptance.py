"""The acceptance suite: one function per criterion, shared by tests and selftest.

Each criterion takes a seed and a size ("quick" or "full") and returns a
Result whose details are JSON-ready and deterministic. Residuals are rounded
to three significant digits so reports do not depend on the last few ulps.
"""
from fractions import Fraction
from itertools import product
from typing import NamedTuple

import numpy as np

from . import bimod
from .base import (BaseSpace, StochasticKernel, ce_to_radon, identity_kernel, is_strict,
                   make_conditional_expectation, radon_compose, radon_to_cp,
                   satisfies_support_condition, strictness_witness)
from .center import check_transitivity, decompose, rebase_isomorphism, rebase_over_center
from .covering import (covering_bijection, frobenius_from_covering, make_covering, spectrum,
                       spectrum_isomorphism)
from .cpstar import choi_spectra, has_witness, is_completely_positive
from .errors import VerificationError
from .frobenius import (FrobeniusStructure, block_frobenius, classify_fibers, conjugate,
                        endomorphism_frobenius, star_isomorphism_residual, trivial_frobenius,
                        verify_laws)
from .hilbmod import (BundleMorphism, bundle, categorical_dimension, dagger, distance, identity,
                      is_unitary, kernel, localize_mor, snake_residuals, tensor_comparison, tensor_mor)
from ._linalg import random_unitary

SIZES = ("quick", "full")


class Result(NamedTuple):
    number: int
    name: str
    passed: bool
    details: dict

    def line(self):
        return f"criterion {self.number:2d} {self.name}: {'PASS' if self.passed else 'FAIL'}"

    def as_dict(self):
        return {"number": self.number, "name": self.name, "pass": self.passed, "details": self.details}


def num(x):
    """A float rounded for reports; non-finite values become strings."""
    x = float(x)
    return float(f"{x:.3g}") if np.isfinite(x) else str(x)


def _rng(seed, k):
    return np.random.default_rng([seed, k])


def _n(size, quick, full):
    return quick if size == "quick" else full


def points(prefix, n):
    return BaseSpace([f"{prefix}{i}" for i in range(n)])


def random_surjection(rng, max_total=6, max_base=3):
    k = int(rng.integers(1, max_base + 1))
    m = int(rng.integers(k, max_total + 1))
    proj = list(range(k)) + list(rng.integers(0, k, size=m - k))
    rng.shuffle(proj)
    return make_covering(points("y", m), points("x", k), proj)


def all_surjections(max_total, max_base):
    for k in range(1, max_base + 1):
        for m in range(k, max_total + 1):
            for proj in product(range(k), repeat=m):
                if len(set(proj)) == k:
                    yield make_covering(points("y", m), points("x", k), proj)


# -- 1 ---------------------------------------------------------------------------

TRIVIAL_BLOCKS = ([1], [2], [3], [1, 1], [2, 1], [1, 1, 1])


def _law_family(name, structures, asserted, extra=None):
    """Max residual per asserted law over a family, and the laws that failed."""
    worst = dict.fromkeys(asserted, 0.0)
    failures = {}
    for F, tag in structures:
        rep = verify_laws(F, 1e-10)
        for law in asserted:
            worst[law] = max(worst[law], rep.residuals[law])
            if not rep.residuals[law] < 1e-10:
                failures[law] = failures.get(law, 0) + 1
        for law, ok in (extra(F, rep, tag) if extra else {}).items():
            if not ok:
                failures[law] = failures.get(law, 0) + 1
    return {"count": len(structures), "max_residual": {k: num(v) for k, v in worst.items()},
            "failures": failures}


def criterion_1(seed=0, size="full"):
    rng = _rng(seed, 1)
    X = points("t", 2)
    trivial = [(trivial_frobenius(X, b), tuple(b)) for b in TRIVIAL_BLOCKS]

    def commutative_iff_abelian(F, rep, blocks):
        return {"commutative iff all blocks 1": rep.verdicts["commutative"] == all(n == 1 for n in blocks)}

    fams = {"trivial_frobenius": _law_family(
        "trivial", trivial, ("unit", "associativity", "frobenius", "special", "nondegenerate"),
        commutative_iff_abelian)}

    max_total = _n(size, 4, 6)
    covers = [(frobenius_from_covering(p), None) for p in all_surjections(max_total, 3)]

    def counit_one(F, rep, _):
        return {"eta^dag eta = id": max(abs(c - 1) for c in rep.counit) < 1e-10}

    fams["frobenius_from_covering"] = _law_family(
        "covering", covers, ("unit", "associativity", "frobenius", "special", "commutative", "nondegenerate"),
        counit_one)

    endos = []
    for d in product(range(5), repeat=2):
        w = rng.uniform(0.25, 4.0, size=2)
        endos.append((endomorphism_frobenius(bundle(X, d, w)), d))
    fams["endomorphism_frobenius"] = _law_family(
        "endomorphism", endos, ("unit", "associativity", "frobenius", "specialisable"))
    passed = all(not f["failures"] for f in fams.values())
    return Result(1, "Frobenius law suite", passed, fams)


# -- 2 ---------------------------------------------------------------------------

def criterion_2(seed=0, size="full"):
    rng = _rng(seed, 2)
    n = _n(size, 10, 30)
    worst, bad = 0.0, []
    for i in range(n):
        p = random_surjection(rng)
        F = frobenius_from_covering(p)
        cov = spectrum(F, seed)
        bij = covering_bijection(cov, p)
        ok = (bij is not None and cov.fiber_sizes() == p.fiber_sizes()
              and all(p.proj[bij[y]] == cov.proj[y] for y in range(len(cov.total)))
              and len(set(bij)) == len(p.total))
        _, _, r = spectrum_isomorphism(F, seed)
        worst = max(worst, r)
        if not ok or not r < 1e-9:
            bad.append(i)
    return Result(2, "covering round trip", not bad,
                  {"instances": n, "max_isomorphism_residual": num(worst), "failed_instances": bad})


# -- 3 ---------------------------------------------------------------------------

def criterion_3(seed=0, size="full"):
    rng = _rng(seed, 3)
    n = _n(size, 10, 40)
    snake = dim_err = 0.0
    exact = True
    for _ in range(n):
        X = points("t", int(rng.integers(1, 5)))
        dims = rng.integers(0, 6, size=len(X))
        E = bundle(X, dims, rng.uniform(0.2, 5.0, size=len(X)))
        snake = max(snake, *snake_residuals(E))
        c = categorical_dimension(E).values
        dim_err = max(dim_err, np.abs(c - dims).max())
        exact &= bool(np.array_equal(np.rint(c.real).astype(int), dims))
    passed = snake < 1e-12 and dim_err < 1e-10 and exact
    return Result(3, "duality", passed, {"instances": n, "max_snake_residual": num(snake),
                                         "max_dimension_error": num(dim_err), "integer_dimensions_exact": exact})


# -- 4 ---------------------------------------------------------------------------

def random_blocks(rng, max_blocks=3, max_size=3, max_dim=14):
    while True:
        b = [int(v) for v in rng.integers(1, max_size + 1, size=int(rng.integers(1, max_blocks + 1)))]
        if sum(n * n for n in b) <= max_dim:
            return b


def random_structure(rng, kind):
    """A seeded test structure of the given kind over 1 to 3 points."""
    if kind == "covering":
        return frobenius_from_covering(random_surjection(rng, 5, 3))
    X = points("t", int(rng.integers(1, 4)))
    norm = "trace" if kind == "trace" else "special"
    F = block_frobenius(X, [random_blocks(rng) for _ in X], norm)
    F = conjugate(F, [random_unitary(d, rng) for d in F.carrier.dims])
    if kind == "perturbed":
        mult = [m + 1e-3 * rng.standard_normal(m.shape) for m in F.mult]
        F = FrobeniusStructure(F.carrier, mult, F.unit)
    return F


TRANSITIVITY_KINDS = ("special", "special", "trace", "covering", "perturbed")


def criterion_4(seed=0, size="full"):
    rng = _rng(seed, 4)
    n = _n(size, 10, 25)
    tally, worst, bad = {}, 0.0, []
    for i in range(n):
        kind = TRANSITIVITY_KINDS[i % len(TRANSITIVITY_KINDS)]
        F = random_structure(rng, kind)
        rep = check_transitivity(F, 1e-9, seed)
        key = f"{kind}: {rep.side_i}/{rep.side_ii}"
        tally[key] = tally.get(key, 0) + 1
        ok = rep.agree
        if kind != "perturbed":
            rb = rebase_over_center(F, seed)
            U, comp = rebase_isomorphism(F, rb)
            r = star_isomorphism_residual(U, F, comp)
            worst = max(worst, r)
            ok &= r < 1e-9
        if not ok:
            bad.append(i)
    return Result(4, "transitivity", not bad, {"instances": n, "verdicts": dict(sorted(tally.items())),
                                               "max_round_trip_residual": num(worst), "failed_instances": bad})


# -- 5 ---------------------------------------------------------------------------

def hattori_vectors(n, rng):
    eye = np.eye(n)
    e11, e12 = np.zeros((n, n)), np.zeros((n, n))
    e11[0, 0] = e12[0, 1] = 1
    rand = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(3)]
    return [eye, e11, e12] + rand


def biproduct_residual(dec):
    E, Z, C = dec.i1.target, dec.Z, dec.commutator
    return max(distance(dec.p1 @ dec.i1, identity(Z)), distance(dec.p2 @ dec.i2, identity(C)),
               distance(dec.p1 @ dec.i2, 0 * (dec.p1 @ dec.i2)), distance(dec.p2 @ dec.i1, 0 * (dec.p2 @ dec.i1)),
               distance(dec.i1 @ dec.p1 + dec.i2 @ dec.p2, identity(E)))


def criterion_5(seed=0, size="full"):
    rng = _rng(seed, 5)
    pt = points("t", 1)
    vec_err = 0.0
    for n in (2, 3, 4):
        dec = decompose(trivial_frobenius(pt, [n], "trace"), seed)
        p1, i1, P2 = dec.p1.blocks[0], dec.i1.blocks[0], dec.i2.blocks[0] @ dec.p2.blocks[0]
        vec_err = max(vec_err, np.abs(i1[:, 0] - np.eye(n).ravel() / np.sqrt(n)).max())
        xs = hattori_vectors(n, rng)
        for x in xs:
            tr = np.trace(x)
            vec_err = max(vec_err, abs((p1 @ x.ravel())[0] - tr / np.sqrt(n)),
                          np.abs(P2 @ x.ravel() - (x - tr / n * np.eye(n)).ravel()).max())
        for x, y in product(xs, repeat=2):
            vec_err = max(vec_err, abs((p1 @ (x @ y).ravel())[0] - (p1 @ (y @ x).ravel())[0]))
    structs = [trivial_frobenius(points("t", 2), b) for b in TRIVIAL_BLOCKS]
    structs += [random_structure(rng, k) for k in ("special", "trace", "covering") * _n(size, 2, 5)]
    structs += [endomorphism_frobenius(bundle(points("t", 2), rng.integers(1, 4, size=2)))]
    mismatch, biprod = 0, 0.0
    for F in structs:
        dec = decompose(F, seed)
        wd = [len(s) for s in classify_fibers(F, seed).values()]
        mismatch += int(list(dec.Z.dims) != wd)
        biprod = max(biprod, biproduct_residual(dec))
    passed = vec_err < 1e-12 and mismatch == 0 and biprod < 1e-10
    return Result(5, "center decomposition", passed,
                  {"max_test_vector_error": num(vec_err), "structures": len(structs),
                   "center_dim_mismatches": mismatch, "max_biproduct_residual": num(biprod)})


# -- 6 ---------------------------------------------------------------------------

CP_CONFIGS = (([2], [2]), ([1, 1], [2]), ([2], [1, 1]), ([2, 1], [1, 2]), ([1, 2], [3]))


def algebra_vec(x, blocks):
    """Coordinates of a block-diagonal matrix in the special block basis E_ab / sqrt(n)."""
    out, off = [], 0
    for n in blocks:
        out.append(np.sqrt(n) * x[off:off + n, off:off + n].ravel())
        off += n
    return np.concatenate(out)


def algebra_basis(blocks):
    N, off = sum(blocks), 0
    for n in blocks:
        for a, b in product(range(n), repeat=2):
            x = np.zeros((N, N), dtype=complex)
            x[off + a, off + b] = 1 / np.sqrt(n)
            yield x
        off += n


def algebra_map(fn, blocks1, blocks2):
    """Coordinate matrix of a linear map between block algebras (block-diagonal in, compressed out)."""
    return np.array([algebra_vec(fn(x), blocks2) for x in algebra_basis(blocks1)]).T


def kraus_mixture(rng, blocks1, blocks2, terms=3):
    """x -> sum_k c_k K_k x K_k^dag with one possibly negative coefficient."""
    N, M = sum(blocks1), sum(blocks2)
    K = [rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N)) for _ in range(terms)]
    c = np.ones(terms)
    c[-1] = -rng.uniform(0, 1.5) if rng.uniform() < 0.6 else 1.0
    return algebra_map(lambda x: sum(ck * k @ x @ k.conj().T for ck, k in zip(c, K)), blocks1, blocks2)


def criterion_6(seed=0, size="full"):
    rng = _rng(seed, 6)
    n = _n(size, 10, 50)
    pt = points("t", 1)
    agree, cp_count, total = True, 0, 0
    for b1, b2 in CP_CONFIGS:
        F1, F2 = trivial_frobenius(pt, b1), trivial_frobenius(pt, b2)
        for _ in range(n):
            f = BundleMorphism(F1.carrier, F2.carrier, [kraus_mixture(rng, b1, b2)])
            choi = is_completely_positive(f, F1, F2)
            agree &= choi == has_witness(f, F1, F2)
            cp_count += choi
            total += 1
    F = trivial_frobenius(pt, [2])
    T = BundleMorphism(F.carrier, F.carrier, [algebra_map(lambda x: x.T, [2], [2])])
    low = float(choi_spectra(T, F, F)[0].min())
    rejected = not is_completely_positive(T, F, F) and not has_witness(T, F, F)
    passed = bool(agree) and rejected and abs(low + 1) < 1e-12
    return Result(6, "CP* equivalence", passed,
                  {"maps": total, "completely_positive": int(cp_count), "routes_agree": bool(agree),
                   "transpose_rejected": rejected, "transpose_min_choi_eigenvalue": num(low)})


# -- 7 ---------------------------------------------------------------------------

def rational_rank(A):
    """Rank by exact Gaussian elimination over the rationals."""
    M = [[Fraction(int(v)) for v in row] for row in A]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def random_integer_matrix(rng):
    m, n = (int(v) for v in rng.integers(1, 7, size=2))
    r = int(rng.integers(0, min(m, n) + 1))
    return rng.integers(-3, 4, size=(m, r)) @ rng.integers(-3, 4, size=(r, n))


def criterion_7(seed=0, size="full"):
    rng = _rng(seed, 7)
    n = _n(size, 30, 100)
    iso, anni, mismatches = 0.0, 0.0, 0
    pt = points("t", 1)
    for _ in range(n):
        A = random_integer_matrix(rng)
        w = float(rng.uniform(0.5, 2.0))
        f = BundleMorphism(bundle(pt, [A.shape[1]], [w]), bundle(pt, [A.shape[0]], [w]), [A])
        K, k = kernel(f)
        iso = max(iso, distance(dagger(k) @ k, identity(K)))
        anni = max(anni, np.abs((f @ k).blocks[0]).max(initial=0.0))
        mismatches += int(K.dims[0] != A.shape[1] - rational_rank(A))
    passed = iso < 1e-10 and mismatches == 0
    return Result(7, "kernels", passed, {"matrices": n, "max_isometry_residual": num(iso),
                                        "max_annihilation_residual": num(anni), "dimension_mismatches": mismatches})


# -- 8 ---------------------------------------------------------------------------

def random_strict_expectation(rng):
    D = points("d", int(rng.integers(1, 4)))
    X = points("x", len(D) + int(rng.integers(0, 3)))
    q = list(range(len(D))) + list(rng.integers(0, len(D), size=len(X) - len(D)))
    rng.shuffle(q)
    K = np.zeros((len(D), len(X)))
    for d in range(len(D)):
        K[d, rng.choice([x for x in range(len(X)) if q[x] == d])] = 1.0
    return make_conditional_expectation(X, D, q, K)


def random_morphism(rng, E, F):
    return BundleMorphism(E, F, [rng.standard_normal((b, a)) + 1j * rng.standard_normal((b, a))
                                 for a, b in zip(E.dims, F.dims)])


def criterion_8(seed=0, size="full"):
    rng = _rng(seed, 8)
    n = _n(size, 5, 15)
    unit_err = dag_err = nat_err = 0.0
    for _ in range(n):
        ce = random_strict_expectation(rng)
        X = ce.source
        E1, E2, F1, F2 = (bundle(X, rng.integers(0, 3, size=len(X)), rng.uniform(0.5, 2, size=len(X)))
                          for _ in range(4))
        c = tensor_comparison(ce, E1, F1)
        unit_err = max(unit_err, distance(dagger(c) @ c, identity(c.source)),
                       distance(c @ dagger(c), identity(c.target)))
        f, g = random_morphism(rng, E1, E2), random_morphism(rng, F1, F2)
        dag_err = max(dag_err, distance(localize_mor(ce, dagger(f)), dagger(localize_mor(ce, f))))
        c2 = tensor_comparison(ce, E2, F2)
        lhs = localize_mor(ce, tensor_mor(f, g)) @ c
        rhs = c2 @ tensor_mor(localize_mor(ce, f), localize_mor(ce, g))
        nat_err = max(nat_err, distance(lhs, rhs) / max(1.0, distance(lhs, 0 * lhs)))
    # the normalized non-strict expectation on two points
    X, D = points("x", 2), points("d", 1)
    ce = make_conditional_expectation(X, D, [0, 0], [[0.5, 0.5]])
    U = bundle(X, [1, 1])
    c = tensor_comparison(ce, U, U)
    from .hilbmod import _quotients
    pi = _quotients(ce, U)[0].pi
    v = np.kron(pi[:, 0], pi[:, 1])
    v = v / np.linalg.norm(v)
    annihilated = float(np.linalg.norm(c.blocks[0] @ v))
    passed = (unit_err < 1e-10 and dag_err < 1e-10 and nat_err < 1e-10
              and not is_strict(ce) and strictness_witness(ce) is not None and annihilated < 1e-12)
    return Result(8, "localization", passed,
                  {"strict_instances": n, "max_comparison_unitarity_residual": num(unit_err),
                   "max_dagger_residual": num(dag_err), "max_naturality_residual": num(nat_err),
                   "nonstrict_annihilated_norm": num(annihilated)})


# -- 9 ---------------------------------------------------------------------------

def criterion_9(seed=0, size="full"):
    rng = _rng(seed, 9)
    n = _n(size, 8, 20)
    coh, unitary, dims_ok, inter = 0.0, True, True, 0.0
    for i in range(n):
        Xs = [points(c, int(rng.integers(1, 4))) for c in "wxyz"]
        E, F, G = (bimod.random_cell1(Xs[j], Xs[j + 1], rng) for j in range(3))
        rep = bimod.coherence_check(E, F, G, seed=seed + i)
        coh = max(coh, rep["pentagon"], rep["triangle"])
        unitary &= rep["unitary"]
        dims_ok &= bool(np.array_equal(bimod.hcompose(E, F).dims, E.dims @ F.dims))
        E2, E3 = (bimod.random_cell1(Xs[0], Xs[1], rng) for _ in range(2))
        F2, F3 = (bimod.random_cell1(Xs[1], Xs[2], rng) for _ in range(2))
        f, g = bimod.random_cell2(E, E2, rng), bimod.random_cell2(E2, E3, rng)
        h, k = bimod.random_cell2(F, F2, rng), bimod.random_cell2(F2, F3, rng)
        lhs = bimod.hcompose2(bimod.vcompose(g, f), bimod.vcompose(k, h))
        rhs = bimod.vcompose(bimod.hcompose2(g, k), bimod.hcompose2(f, h))
        inter = max(inter, bimod.distance2(lhs, rhs))
    ex = bimod.hcompose(bimod.from_2fhilb(2, 2, [[1, 2], [0, 1]]), bimod.from_2fhilb(2, 1, [[3], [1]]))
    dims_ok &= ex.dims.tolist() == [[5], [1]]
    passed = coh < 1e-12 and unitary and dims_ok and inter < 1e-12
    return Result(9, "bicategory coherence", passed,
                  {"triples": n, "max_pentagon_triangle_residual": num(coh), "structural_cells_unitary": bool(unitary),
                   "dims_are_integer_product": bool(dims_ok), "max_interchange_residual": num(inter)})


# -- 10 --------------------------------------------------------------------------

def random_kernel(rng, X, Y):
    w = rng.uniform(0, 1, size=(len(X), len(Y)))
    return StochasticKernel(X, Y, np.where(rng.uniform(size=w.shape) < 0.3, 0.0, w))


def random_expectation(rng):
    D = points("d", int(rng.integers(1, 4)))
    X = points("x", len(D) + int(rng.integers(0, 4)))
    q = list(range(len(D))) + list(rng.integers(0, len(D), size=len(X) - len(D)))
    rng.shuffle(q)
    K = np.zeros((len(D), len(X)))
    for x, d in enumerate(q):
        K[d, x] = rng.uniform(0, 1) if rng.uniform() < 0.7 else 0.0
    for d in range(len(D)):
        if K[d].sum() == 0:
            K[d, q.index(d)] = 1.0
        K[d] /= K[d].sum()
    return make_conditional_expectation(X, D, q, K)


def criterion_10(seed=0, size="full"):
    rng = _rng(seed, 10)
    n = _n(size, 8, 20)
    comp = 0.0
    for _ in range(n):
        X, Y, Z = (points(c, int(rng.integers(1, 5))) for c in "xyz")
        f, g = random_kernel(rng, X, Y), random_kernel(rng, Y, Z)
        lhs = radon_to_cp(radon_compose(f, g)).matrix
        rhs = (radon_to_cp(f) @ radon_to_cp(g)).matrix
        comp = max(comp, np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))
        comp = max(comp, np.abs(radon_to_cp(identity_kernel(X)).matrix - np.eye(len(X))).max())
    support = all(satisfies_support_condition(*ce_to_radon(random_expectation(rng))) for _ in range(n))
    passed = comp < 1e-12 and support
    return Result(10, "Radon duality", passed,
                  {"kernel_pairs": n, "max_composition_residual": num(comp), "support_condition_exact": support})


# -- 11 and the driver -------------------------------------------------------------

CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def _safe(fn, seed, size):
    try:
        return fn(seed, size)
    except (VerificationError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        k = int(fn.__name__.rsplit("_", 1)[1])
        return Result(k, fn.__name__, False, {"error": f"{type(exc).__name__}: {exc}"})


def run_criteria(seed=0, size="full"):
    return [_safe(fn, seed, size) for fn in CRITERIA]


def criterion_11(seed=0, size="full", first=None):
    """Rerun criteria 1-10 and compare the serialized results with a first run."""
    from .io import dumps
    first = first if first is not None else run_criteria(seed, size)
    again = run_criteria(seed, size)
    a, b = (dumps([r.as_dict() for r in rs]) for rs in (first, again))
    return Result(11, "determinism", a == b, {"identical_reruns": a == b})


def run_all(seed=0, size="full"):
    results = run_criteria(seed, size)
    return results + [criterion_11(seed, size, results)]
