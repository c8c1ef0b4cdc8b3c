"""Completely positive maps between Frobenius structures.

Two independent tests of complete positivity are provided:

* the Choi route: identify each fiber with a direct sum of matrix algebras
  (Wedderburn data from the classification) and check that the Choi matrix
  of every block component is positive semidefinite;
* the witness route: the operator (id (x) mu_F)(id (x) f (x) id)(mu_E^dag (x) id)
  on E (x) F is of the form g^dag g.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from ._linalg import nuclear_normalize, RTOL
from .errors import InputError, NoWitness, VerificationError
from .frobenius import (FROBENIUS_LAWS, require_laws, tensor_frobenius, wedderburn_data)
from .hilbmod import (BundleMorphism, HilbertBundle, associator, dagger, distance,
                      identity, norm, tensor_mor)

DEFAULT_TOL = 1e-9


def _check_endpoints(f, F1, F2):
    if f.source != F1.carrier or f.target != F2.carrier:
        raise InputError("morphism endpoints do not match the Frobenius carriers")


def block_matrix(f, F1, F2, t, data1, data2):
    """The fiber map at t in Wedderburn coordinates (block-algebra -> block-algebra)."""
    w1, w2 = F1.carrier.weights[t], F2.carrier.weights[t]
    A = f.blocks[t] * np.sqrt(w2 / w1) if f.blocks[t].size else f.blocks[t]
    phi1, phi2 = data1[t][1], data2[t][1]
    return np.linalg.solve(phi2, A @ phi1) if phi2.size else np.zeros((0, phi1.shape[1]))


def _offsets(sizes):
    out, off = [], 0
    for n in sizes:
        out.append(off)
        off += n * n
    return out


def choi_blocks(f, F1, F2, t, seed=0, data=None):
    """[((i, j), C_ji)]: Choi matrix sum_ab E_ab (x) f_ji(E_ab) for every source block i and target block j."""
    _check_endpoints(f, F1, F2)
    data1, data2 = data or (wedderburn_data(F1, seed), wedderburn_data(F2, seed))
    M = block_matrix(f, F1, F2, t, data1, data2)
    s1, s2 = data1[t][0], data2[t][0]
    out = []
    for i, (n, oi) in enumerate(zip(s1, _offsets(s1))):
        for j, (m, oj) in enumerate(zip(s2, _offsets(s2))):
            C = np.zeros((n * m, n * m), dtype=complex)
            for a in range(n):
                for b in range(n):
                    Eab = np.zeros((n, n))
                    Eab[a, b] = 1
                    C += np.kron(Eab, M[oj:oj + m * m, oi + a * n + b].reshape(m, m))
            out.append(((i, j), C))
    return out


def choi_matrix(f, F1, F2, t, seed=0, data=None):
    blocks = [C for _, C in choi_blocks(f, F1, F2, t, seed, data)]
    return block_diag(*blocks) if blocks else np.zeros((0, 0), dtype=complex)


def _psd_verdict(C, tol):
    """(is positive, normalized eigenvalues) for a matrix that should be Hermitian."""
    if C.size == 0:
        return True, np.zeros(0)
    h = (C + C.conj().T) / 2
    scale = np.abs(np.linalg.eigvalsh(h)).sum()
    if scale == 0:
        return True, np.zeros(C.shape[0])
    skew = np.linalg.norm(C - h, 2) / scale
    lam = np.linalg.eigvalsh(nuclear_normalize(h))
    return bool(skew <= tol and lam.min() >= -tol), lam


def choi_spectra(f, F1, F2, seed=0):
    data = (wedderburn_data(F1, seed), wedderburn_data(F2, seed))
    return [np.linalg.eigvalsh((lambda C: (C + C.conj().T) / 2)(choi_matrix(f, F1, F2, t, seed, data)))
            for t in range(len(F1.base))]


def is_completely_positive(f, F1, F2, tol=DEFAULT_TOL, seed=0):
    _check_endpoints(f, F1, F2)
    data = (wedderburn_data(F1, seed), wedderburn_data(F2, seed))
    return all(_psd_verdict(choi_matrix(f, F1, F2, t, seed, data), tol)[0] for t in range(len(F1.base)))


def cpstar_operator(f, F1, F2):
    """(id_E (x) mu_F) o (id_E (x) f (x) id_F) o (mu_E^dag (x) id_F): E (x) F -> E (x) F."""
    _check_endpoints(f, F1, F2)
    E, F = F1.carrier, F2.carrier
    step1 = tensor_mor(dagger(F1.mult_morphism()), identity(F))
    step2 = tensor_mor(tensor_mor(identity(E), f), identity(F))
    step3 = associator(E, F, F)
    step4 = tensor_mor(identity(E), F2.mult_morphism())
    return step4 @ step3 @ step2 @ step1


def _require_special(*Fs):
    for F in Fs:
        require_laws(F, FROBENIUS_LAWS + ("special",))


def cpstar_witness(f, F1, F2, tol=DEFAULT_TOL):
    """(G, g) with g^dag g equal to the CP* operator of f, or NoWitness."""
    _require_special(F1, F2)
    M = cpstar_operator(f, F1, F2)
    dims, blocks = [], []
    for t, B in enumerate(M.blocks):
        ok, lam_n = _psd_verdict(B, tol)
        if not ok:
            low = float(lam_n.min()) if lam_n.size else 0.0
            raise NoWitness(f"CP* operator is not positive at {F1.base.points[t]!r} "
                            f"(normalized eigenvalue {low:.3e})", low)
        if B.size == 0:
            dims.append(0)
            blocks.append(np.zeros((0, 0)))
            continue
        lam, V = np.linalg.eigh((B + B.conj().T) / 2)
        keep = lam > RTOL * max(lam.max(), 0.0) if lam.max() > 0 else np.zeros_like(lam, dtype=bool)
        g_o = np.sqrt(lam[keep])[:, None] * V[:, keep].conj().T
        dims.append(int(keep.sum()))
        blocks.append(g_o * np.sqrt(M.source.weights[t]))
    G = HilbertBundle(M.source.base, tuple(dims), (1.0,) * len(dims))
    g = BundleMorphism(M.source, G, blocks)
    r = witness_residual(f, F1, F2, g)
    if r > 1e-9 * max(1.0, norm(M)):
        raise VerificationError(f"witness does not reproduce the CP* operator (residual {r:.3e})", r)
    return G, g


def witness_residual(f, F1, F2, g):
    """Defect of the identity (CP* operator of f) = g^dag g."""
    return distance(cpstar_operator(f, F1, F2), dagger(g) @ g)


def has_witness(f, F1, F2, tol=DEFAULT_TOL):
    try:
        cpstar_witness(f, F1, F2, tol)
    except NoWitness:
        return False
    return True


# -- the category CP* ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CPMorphism:
    underlying: BundleMorphism
    source: object
    target: object
    verdict: bool
    spectra: tuple


def cp_morphism(f, F1, F2, tol=DEFAULT_TOL, seed=0):
    spectra = tuple(choi_spectra(f, F1, F2, seed))
    return CPMorphism(f, F1, F2, is_completely_positive(f, F1, F2, tol, seed), spectra)


def identity_cp(F, tol=DEFAULT_TOL):
    return cp_morphism(identity(F.carrier), F, F, tol)


def compose_cp(g, f, tol=DEFAULT_TOL):
    """g o f, verdict recomputed from scratch."""
    if f.target is not g.source and f.target.carrier != g.source.carrier:
        raise InputError("CP composition: endpoints differ")
    return cp_morphism(g.underlying @ f.underlying, f.source, g.target, tol)


def tensor_cp(f, g, tol=DEFAULT_TOL):
    S = tensor_frobenius(f.source, g.source)
    T = tensor_frobenius(f.target, g.target)
    return cp_morphism(tensor_mor(f.underlying, g.underlying), S, T, tol)

