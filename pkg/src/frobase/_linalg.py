"""Small dense linear-algebra helpers used throughout the package."""
import numpy as np

RTOL = 1e-10


def opnorm(a):
    """Spectral norm, zero for empty matrices."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def null_space(a, rtol=RTOL, scale=None):
    """Orthonormal basis (columns) of ker(a).

    Uses the eigendecomposition of the Gram matrix a^H a and drops eigenvalues
    above ``rtol`` times the largest one. ``scale`` is a known magnitude for
    the entries of a; a matrix far below it counts as zero.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    n = a.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    lam, vec = np.linalg.eigh(a.conj().T @ a)
    top = max(lam[-1], scale ** 2 if scale else 0.0)
    if top <= 0:
        return np.eye(n, dtype=complex)
    return vec[:, lam <= rtol * top]


def range_space(a, rtol=RTOL, scale=None):
    """Orthonormal basis (columns) of the column space of a (``scale`` as in null_space)."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    m = a.shape[0]
    if m == 0 or a.shape[1] == 0:
        return np.zeros((m, 0), dtype=complex)
    lam, vec = np.linalg.eigh(a @ a.conj().T)
    top = max(lam[-1], scale ** 2 if scale else 0.0)
    if top <= 0:
        return np.zeros((m, 0), dtype=complex)
    keep = lam > rtol * top
    return vec[:, keep][:, ::-1]


def psd_power(a, p):
    """a**p for a Hermitian positive-definite matrix."""
    lam, vec = np.linalg.eigh((a + a.conj().T) / 2)
    return (vec * lam ** p) @ vec.conj().T


def swap_matrix(m, n):
    """Permutation P with P @ kron(x, y) == kron(y, x) for x in C^m, y in C^n."""
    p = np.zeros((m * n, m * n))
    for i in range(m):
        for j in range(n):
            p[j * m + i, i * n + j] = 1.0
    return p


def random_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def nuclear_normalize(h):
    """Scale a Hermitian matrix so its eigenvalue magnitudes sum to one."""
    lam = np.linalg.eigvalsh(h)
    s = np.abs(lam).sum()
    return h / s if s > 0 else h
