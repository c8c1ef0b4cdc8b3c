"""Algebra on a single fiber, in orthonormal coordinates.

A fiber of a Frobenius structure is a pair (mu, eta) with mu[k, i, j] the
coefficient of e_k in e_i e_j. In orthonormal coordinates the dagger is the
plain conjugate transpose, and left multiplication by a self-adjoint element
is a Hermitian matrix.
"""
import numpy as np

from ._linalg import null_space, range_space, opnorm, RTOL
from .errors import VerificationError

GAP = 1e-6


def lmul(mu, x):
    return np.einsum("kij,i->kj", mu, x)


def rmul(mu, x):
    return np.einsum("kij,j->ki", mu, x)


def prod(mu, x, y):
    return np.einsum("kij,i,j->k", mu, x, y, optimize=True)


def star_matrix(mu, eta):
    """S with x* = conj(S x): the involution read off from eta^dag o mu."""
    return np.einsum("l,lkj->kj", eta.conj(), mu)


def star(mu, eta, x):
    return (star_matrix(mu, eta) @ x).conj()


def comult(mu):
    """mu^dag as a (d*d) x d matrix."""
    d = mu.shape[0]
    return mu.reshape(d, d * d).conj().T


def center(mu, rtol=RTOL):
    """Orthonormal basis of the center: null space of x |-> (x b - b x)_b."""
    d = mu.shape[0]
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    eye = np.eye(d)
    rows = [rmul(mu, eye[j]) - lmul(mu, eye[j]) for j in range(d)]
    return null_space(np.vstack(rows), rtol, np.linalg.norm(mu))


def commutators(mu, rtol=RTOL):
    """Orthonormal basis of span{xy - yx}."""
    d = mu.shape[0]
    cols = (mu - mu.transpose(0, 2, 1)).reshape(d, d * d)
    return range_space(cols, rtol, np.linalg.norm(mu))


def _sa_parts(mu, eta, basis):
    out = []
    for q in basis.T:
        s = star(mu, eta, q)
        out += [(q + s) / 2, (q - s) / 2j]
    return np.array(out).T


def canonical_key(v):
    v = np.round(v, 8) + 0.0
    return tuple(-v.real) + tuple(-v.imag)


def central_idempotents(mu, eta, rng, tries=20):
    """Minimal central idempotents, canonically ordered.

    A random self-adjoint a in the center acts on the center by a Hermitian
    matrix whose eigenvectors are multiples of the minimal idempotents; the
    idempotent itself is the orthogonal projection of eta onto that line.
    """
    Q = center(mu)
    k = Q.shape[1]
    if k == 0:
        return []
    sa = _sa_parts(mu, eta, Q)
    for _ in range(tries):
        a = sa @ rng.standard_normal(sa.shape[1])
        A = Q.conj().T @ lmul(mu, a) @ Q
        lam, V = np.linalg.eigh((A + A.conj().T) / 2)
        scale = max(1.0, np.abs(lam).max())
        if k > 1 and np.diff(lam).min() < GAP * scale:
            continue
        idem = []
        for v in V.T:
            z = Q @ v
            idem.append(z * np.vdot(z, eta) / np.vdot(z, z))
        _check_idempotents(mu, eta, idem)
        return sorted(idem, key=canonical_key)
    raise VerificationError("could not separate the characters of the center")


def _check_idempotents(mu, eta, idem, tol=1e-8):
    scale = max(1.0, np.linalg.norm(eta))
    r = np.linalg.norm(sum(idem) - eta)
    for i, e in enumerate(idem):
        for j, f in enumerate(idem):
            r = max(r, np.linalg.norm(prod(mu, e, f) - (e if i == j else 0)))
    if r > tol * scale:
        raise VerificationError(f"central idempotents fail their relations (residual {r:.3e})", r)


def block_basis(mu, e):
    """Orthonormal basis of the two-sided ideal e*E cut out by a central idempotent."""
    return range_space(lmul(mu, e), scale=np.linalg.norm(mu))


def block_size(mu, e):
    m = block_basis(mu, e).shape[1]
    n = int(round(np.sqrt(m)))
    if n * n != m:
        raise VerificationError(f"block of dimension {m} is not a full matrix algebra")
    return n


def matrix_units(mu, eta, e, rng, tries=20):
    """Matrix units u[:, a, b] (as fiber vectors) of the simple block e*E.

    u_ab u_cd = delta_bc u_ad, u_ab* = u_ba and sum_a u_aa = e.
    """
    B = block_basis(mu, e)
    n = block_size(mu, e)
    d = mu.shape[0]
    if n == 1:
        return e.reshape(d, 1, 1).astype(complex)
    sa = _sa_parts(mu, eta, B)
    for _ in range(tries):
        a = sa @ rng.standard_normal(sa.shape[1])
        A = B.conj().T @ lmul(mu, a) @ B
        lam, V = np.linalg.eigh((A + A.conj().T) / 2)
        scale = max(1.0, np.abs(lam).max())
        groups = np.split(np.arange(n * n), n)
        spread = max(lam[g[-1]] - lam[g[0]] for g in groups)
        gaps = [lam[groups[i + 1][0]] - lam[groups[i][-1]] for i in range(n - 1)]
        if spread > 1e-8 * scale or min(gaps) < GAP * scale:
            continue
        proj = [B @ V[:, g] @ V[:, g].conj().T @ B.conj().T @ e for g in groups]
        break
    else:
        raise VerificationError("could not find a generic self-adjoint element in the block")
    u = np.zeros((d, n, n), dtype=complex)
    u[:, 0, 0] = proj[0]
    for k in range(1, n):
        img = np.array([prod(mu, prod(mu, proj[0], b), proj[k]) for b in B.T]).T
        U, s, _ = np.linalg.svd(img)
        v = U[:, 0]
        vv = prod(mu, v, star(mu, eta, v))
        c = (np.vdot(proj[0], vv) / np.vdot(proj[0], proj[0])).real
        u[:, 0, k] = v / np.sqrt(c)
    for k in range(1, n):
        u[:, k, 0] = star(mu, eta, u[:, 0, k])
    for j in range(1, n):
        for k in range(1, n):
            u[:, j, k] = prod(mu, u[:, j, 0], u[:, 0, k])
    _check_units(mu, eta, u, e)
    return u


def _check_units(mu, eta, u, e, tol=1e-8):
    n = u.shape[1]
    scale = max(1.0, np.linalg.norm(e))
    r = np.linalg.norm(sum(u[:, a, a] for a in range(n)) - e)
    for a in range(n):
        for b in range(n):
            r = max(r, np.linalg.norm(star(mu, eta, u[:, a, b]) - u[:, b, a]))
            for c in range(n):
                for dd in range(n):
                    want = u[:, a, dd] if b == c else 0
                    r = max(r, np.linalg.norm(prod(mu, u[:, a, b], u[:, c, dd]) - want))
    if r > tol * scale:
        raise VerificationError(f"matrix units fail their relations (residual {r:.3e})", r)


def wedderburn(mu, eta, rng):
    """Block sizes and a *-isomorphism Phi from the direct sum of M_n to the fiber.

    Phi has the vectorized matrix units of every block as columns, block by
    block in row-major order. Blocks are sorted by size (stable in the
    canonical idempotent order).
    """
    d = mu.shape[0]
    idem = central_idempotents(mu, eta, rng)
    units = [matrix_units(mu, eta, e, rng) for e in idem]
    units.sort(key=lambda u: u.shape[1])
    sizes = [u.shape[1] for u in units]
    phi = np.hstack([u.reshape(d, -1) for u in units]) if units else np.zeros((d, 0))
    return sizes, phi


def operator_norm(mu, x):
    return opnorm(lmul(mu, x))
