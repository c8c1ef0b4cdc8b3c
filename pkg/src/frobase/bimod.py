"""Hilbert bimodules between finite base spaces.

A 1-cell X -> Y is a matrix of Hilbert spaces H_{x,y}, stored by dimension
only (standard bases throughout). A 2-cell is a matrix of linear maps. The
composite E o F has (E o F)(x, z) = sum_y E(x, y) (x) F(y, z), laid out
lexicographically in (y, E-index, F-index), so associators and unitors are
permutation matrices.
"""
from dataclasses import dataclass
import numpy as np

from ._linalg import opnorm
from .base import BaseSpace
from .errors import InputError


@dataclass(frozen=True, eq=False)
class Cell1:
    source0: BaseSpace
    target0: BaseSpace
    dims: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dims, dtype=np.int64).reshape(len(self.source0), len(self.target0))
        if (d < 0).any():
            raise InputError("1-cell dimensions must be nonnegative", "dims")
        object.__setattr__(self, "dims", d)

    def __eq__(self, other):
        return (isinstance(other, Cell1) and self.source0 == other.source0
                and self.target0 == other.target0 and np.array_equal(self.dims, other.dims))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Cell2:
    source1: Cell1
    target1: Cell1
    blocks: tuple          # blocks[x][y]: target dim x source dim

    def __post_init__(self):
        s, t = self.source1, self.target1
        if s.source0 != t.source0 or s.target0 != t.target0:
            raise InputError("2-cell between 1-cells with different endpoints")
        rows = []
        for x in range(len(s.source0)):
            row = []
            for y in range(len(s.target0)):
                b = np.asarray(self.blocks[x][y], dtype=complex)
                m, n = int(t.dims[x, y]), int(s.dims[x, y])
                if b.size != m * n:
                    raise InputError(f"block ({x},{y}) has {b.size} entries, expected {m}x{n}")
                row.append(b.reshape(m, n))
            rows.append(tuple(row))
        object.__setattr__(self, "blocks", tuple(rows))


def _grid(X, Y, fn):
    return [[fn(x, y) for y in range(len(Y))] for x in range(len(X))]


def identity1(X):
    return Cell1(X, X, np.eye(len(X), dtype=np.int64))


def identity2(E):
    return Cell2(E, E, _grid(E.source0, E.target0, lambda x, y: np.eye(E.dims[x, y])))


def hcompose(E, F):
    if E.target0 != F.source0:
        raise InputError("horizontal composition: 0-cells do not match")
    return Cell1(E.source0, F.target0, E.dims @ F.dims)


def layout(E, F, x, z):
    """Basis labels of (E o F)(x, z), in order: (y, e, f)."""
    return [(y, e, f) for y in range(len(E.target0))
            for e in range(E.dims[x, y]) for f in range(F.dims[y, z])]


def hcompose2(f, g):
    """f (x) g: direct sum over y of Kronecker products of the blocks."""
    E = f.source1
    S, T = hcompose(f.source1, g.source1), hcompose(f.target1, g.target1)
    Y = range(len(E.target0))

    def block(x, z):
        out = np.zeros((T.dims[x, z], S.dims[x, z]), dtype=complex)
        r = c = 0
        for y in Y:
            k = np.kron(f.blocks[x][y], g.blocks[y][z])
            out[r:r + k.shape[0], c:c + k.shape[1]] = k
            r, c = r + k.shape[0], c + k.shape[1]
        return out

    return Cell2(S, T, _grid(S.source0, S.target0, block))


def vcompose(g, f):
    """g . f (f first)."""
    if not f.target1 == g.source1:
        raise InputError("vertical composition: 1-cells do not match")
    return Cell2(f.source1, g.target1,
                 _grid(f.source1.source0, f.source1.target0, lambda x, y: g.blocks[x][y] @ f.blocks[x][y]))


def dagger2(f):
    return Cell2(f.target1, f.source1,
                 _grid(f.source1.source0, f.source1.target0, lambda x, y: f.blocks[x][y].conj().T))


def distance2(f, g):
    return max((opnorm(a - b) for ra, rb in zip(f.blocks, g.blocks) for a, b in zip(ra, rb)), default=0.0)


def _permutation(src_labels, tgt_labels):
    pos = {lab: i for i, lab in enumerate(tgt_labels)}
    P = np.zeros((len(tgt_labels), len(src_labels)))
    for j, lab in enumerate(src_labels):
        P[pos[lab], j] = 1
    return P


def associator(E, F, G):
    """(E o F) o G -> E o (F o G), a permutation on each block."""
    EF, FG = hcompose(E, F), hcompose(F, G)
    S = hcompose(EF, G)

    def block(x, w):
        left = [(y, e, z, f, g) for z in range(len(F.target0))
                for (y, e, f) in layout(E, F, x, z) for g in range(G.dims[z, w])]
        right = [(y, e, z, f, g) for y in range(len(E.target0)) for e in range(E.dims[x, y])
                 for (z, f, g) in layout(F, G, y, w)]
        return _permutation(left, right)

    return Cell2(S, S, _grid(S.source0, S.target0, block))


def left_unitor(E):
    """id o E -> E: the only summand is y = x, with the trivial factor first."""
    return Cell2(hcompose(identity1(E.source0), E), E, _grid(E.source0, E.target0, lambda x, y: np.eye(E.dims[x, y])))


def right_unitor(E):
    return Cell2(hcompose(E, identity1(E.target0)), E, _grid(E.source0, E.target0, lambda x, y: np.eye(E.dims[x, y])))


def is_unitary2(f, tol=1e-12):
    return (distance2(vcompose(dagger2(f), f), identity2(f.source1)) < tol
            and distance2(vcompose(f, dagger2(f)), identity2(f.target1)) < tol)


def random_cell1(X, Y, rng, max_dim=3):
    return Cell1(X, Y, rng.integers(0, max_dim + 1, size=(len(X), len(Y))))


def random_cell2(E, F, rng):
    return Cell2(E, F, _grid(E.source0, E.target0, lambda x, y: rng.standard_normal((F.dims[x, y], E.dims[x, y]))
                             + 1j * rng.standard_normal((F.dims[x, y], E.dims[x, y]))))


def coherence_check(E, F, G, H=None, seed=0):
    """Pentagon and triangle residuals plus unitarity of the structural cells."""
    rng = np.random.default_rng(seed)
    if H is None:
        H = random_cell1(G.target0, BaseSpace([f"v{i}" for i in range(1 + rng.integers(0, 3))]), rng)
    I = identity2
    a = associator
    # ((E F) G) H -> E (F (G H))
    top = vcompose(a(E, F, hcompose(G, H)), a(hcompose(E, F), G, H))
    bottom = vcompose(hcompose2(I(E), a(F, G, H)),
                      vcompose(a(E, hcompose(F, G), H), hcompose2(a(E, F, G), I(H))))
    pentagon = distance2(top, bottom)
    # (E id) F -> E F
    idY = identity1(E.target0)
    tri_l = vcompose(hcompose2(I(E), left_unitor(F)), a(E, idY, F))
    tri_r = hcompose2(right_unitor(E), I(F))
    triangle = distance2(tri_l, tri_r)
    cells = [a(E, F, G), a(F, G, H), left_unitor(E), right_unitor(E)]
    unitary = all(is_unitary2(c) for c in cells)
    return {"pentagon": float(pentagon), "triangle": float(triangle), "unitary": bool(unitary),
            "fourth": H}


# -- comparison with matrices of Hilbert spaces -------------------------------

def canonical_base(n):
    return BaseSpace([str(i + 1) for i in range(n)])


def from_2fhilb(m, n, dims):
    """The bimodule over {1..m}, {1..n} whose (i, j) component is C^dims[i][j]."""
    d = np.asarray(dims, dtype=np.int64)
    if d.shape != (m, n):
        raise InputError(f"dims must be {m}x{n}")
    return Cell1(canonical_base(m), canonical_base(n), d)


def fhilb_compose_layout(H, K, i, k):
    """Basis labels of (H K)_{ik} = sum_j H_ij (x) K_jk, in the matrix-of-spaces convention."""
    return [(j, a, b) for j in range(H.shape[1]) for a in range(H[i, j]) for b in range(K[j, k])]


def composition_comparison(H, K):
    """Comparison 2-cell from_2fhilb(H) o from_2fhilb(K) -> from_2fhilb(H K)."""
    H, K = np.asarray(H), np.asarray(K)
    E = from_2fhilb(*H.shape, H)
    F = from_2fhilb(*K.shape, K)
    S = hcompose(E, F)
    T = from_2fhilb(H.shape[0], K.shape[1], H @ K)
    return Cell2(S, T, _grid(S.source0, S.target0,
                             lambda x, z: _permutation(layout(E, F, x, z), fhilb_compose_layout(H, K, x, z))))


def identity_comparison(n):
    """Comparison 2-cell id_{C(n)} -> from_2fhilb of the identity matrix of spaces."""
    E = identity1(canonical_base(n))
    return Cell2(E, from_2fhilb(n, n, np.eye(n, dtype=np.int64)), _grid(E.source0, E.target0,
                                                                      lambda x, y: np.eye(E.dims[x, y])))


def local_hom_map(blocks, H, K):
    """A matrix of linear maps (H_ij -> K_ij) as a 2-cell between the corresponding bimodules."""
    H, K = np.asarray(H), np.asarray(K)
    return Cell2(from_2fhilb(*H.shape, H), from_2fhilb(*K.shape, K), blocks)


def local_hom_bijective(H, K, rng):
    """Check that matrices of maps and 2-cells determine each other block by block.

    Every block entry is a coordinate on both sides, so the check is that a
    random family survives the round trip and the coordinate counts agree.
    """
    H, K = np.asarray(H), np.asarray(K)
    blocks = [[rng.standard_normal((K[i, j], H[i, j])) for j in range(H.shape[1])] for i in range(H.shape[0])]
    cell = local_hom_map(blocks, H, K)
    back = [[b for b in row] for row in cell.blocks]
    same = all(np.array_equal(a, b) for ra, rb in zip(blocks, back) for a, b in zip(ra, rb))
    return same and int((H * K).sum()) == sum(b.size for row in cell.blocks for b in row)


def endo_cell(E):
    """A Hilbert bundle over X as a diagonal 1-cell X -> X."""
    return Cell1(E.base, E.base, np.diag(E.dims))


def endohom_agreement(E, F, G):
    """Compare diagonal 1-cells with the monoidal structure of bundles over one base.

    Returns (dims agree, largest associator difference).
    """
    from .hilbmod import associator as bundle_associator, tensor
    dims_ok = np.array_equal(hcompose(endo_cell(E), endo_cell(F)).dims, endo_cell(tensor(E, F)).dims)
    a = associator(endo_cell(E), endo_cell(F), endo_cell(G))
    b = bundle_associator(E, F, G)
    diff = max((opnorm(a.blocks[t][t] - b.blocks[t]) for t in range(len(E.base))), default=0.0)
    return bool(dims_ok), float(diff)
