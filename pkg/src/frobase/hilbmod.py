"""Finitely generated Hilbert modules over C(X) for a finite base X.

A Hilbert module is a family of finite-dimensional fibers E_t, one per point,
with inner product <x, y>(t) = w(t) * sum_i conj(x_i) y_i. Morphisms are
per-point matrices (target dim x source dim). Everything is done fiberwise.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._linalg import null_space, opnorm, swap_matrix, RTOL
from .base import BaseSpace, CFunction
from .errors import InputError, VerificationError


@dataclass(frozen=True)
class HilbertBundle:
    base: BaseSpace
    dims: tuple
    weights: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        weights = tuple(float(w) for w in self.weights)
        n = len(self.base)
        if len(dims) != n or len(weights) != n:
            raise InputError(f"need one dim and one weight per point ({n})")
        if any(d < 0 for d in dims):
            raise InputError("fiber dimensions must be nonnegative", "dims")
        if any(d > 0 and not w > 0 for d, w in zip(dims, weights)):
            raise InputError("weights must be positive on nonzero fibers", "weights")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.dims)


def bundle(X, dims, weights=None):
    return HilbertBundle(X, tuple(dims), tuple(weights) if weights is not None else (1.0,) * len(X))


def unit_bundle(X):
    return bundle(X, (1,) * len(X))


def zero_bundle(X):
    return bundle(X, (0,) * len(X))


def _same_base(*objs):
    b = objs[0].base
    if any(o.base != b for o in objs[1:]):
        raise InputError("objects live over different base spaces")
    return b


@dataclass(frozen=True, eq=False)
class Section:
    bundle: HilbertBundle
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(np.asarray(v, dtype=complex).reshape(-1) for v in self.vectors)
        if len(vecs) != len(self.bundle.dims) or any(v.shape[0] != d for v, d in zip(vecs, self.bundle.dims)):
            raise InputError("section vector lengths must match fiber dimensions")
        object.__setattr__(self, "vectors", vecs)


def inner(x, y):
    """C(X)-valued inner product of two sections of the same bundle."""
    if x.bundle != y.bundle:
        raise InputError("inner product of sections of different bundles")
    E = x.bundle
    return CFunction(E.base, [w * np.vdot(a, b) for w, a, b in zip(E.weights, x.vectors, y.vectors)])


@dataclass(frozen=True, eq=False)
class BundleMorphism:
    source: HilbertBundle
    target: HilbertBundle
    blocks: tuple

    def __post_init__(self):
        X = _same_base(self.source, self.target)
        raw = list(self.blocks)
        if len(raw) != len(X):
            raise InputError("need one block per point")
        blocks = []
        for t, (b, m, n) in enumerate(zip(raw, self.target.dims, self.source.dims)):
            b = np.asarray(b, dtype=complex)
            if b.size != m * n or (b.ndim == 2 and b.shape != (m, n) and b.size):
                raise InputError(f"block has shape {b.shape}, expected {(m, n)}", f"blocks.{X.points[t]}")
            blocks.append(b.reshape(m, n))
        object.__setattr__(self, "blocks", tuple(blocks))

    def __matmul__(self, other):
        return compose(self, other)

    def __add__(self, other):
        _check_parallel(self, other)
        return BundleMorphism(self.source, self.target, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        _check_parallel(self, other)
        return BundleMorphism(self.source, self.target, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __rmul__(self, c):
        c = np.asarray(getattr(c, "values", c), dtype=complex)
        cs = np.broadcast_to(c, (len(self.blocks),))
        return BundleMorphism(self.source, self.target, [s * b for s, b in zip(cs, self.blocks)])

    def __call__(self, x):
        if x.bundle != self.source:
            raise InputError("section does not live on the source bundle")
        return Section(self.target, [b @ v for b, v in zip(self.blocks, x.vectors)])

    @property
    def dagger(self):
        return dagger(self)


def _check_parallel(f, g):
    if f.source != g.source or f.target != g.target:
        raise InputError("morphisms are not parallel")


def pointwise_norms(f):
    """Operator norm per point with respect to the weighted inner products."""
    return np.array([np.sqrt(wt / ws) * opnorm(b) if b.size else 0.0
                     for b, ws, wt in zip(f.blocks, f.source.weights, f.target.weights)])


def norm(f):
    n = pointwise_norms(f)
    return float(n.max()) if n.size else 0.0


def distance(f, g):
    return norm(f - g)


def identity(E):
    return BundleMorphism(E, E, [np.eye(d) for d in E.dims])


def zero_morphism(E, F):
    return BundleMorphism(E, F, [np.zeros((m, n)) for m, n in zip(F.dims, E.dims)])


def compose(g, f):
    """g o f."""
    if f.target != g.source:
        raise InputError("composition: target of the first map differs from source of the second")
    return BundleMorphism(f.source, g.target, [b @ a for a, b in zip(f.blocks, g.blocks)])


def dagger(f):
    """Adjoint with respect to the weighted inner products.

    For f: E -> F the block of f^dag is (w_F / w_E) * conj(A)^T.
    """
    E, F = f.source, f.target
    return BundleMorphism(F, E, [(wf / we if b.size else 1.0) * b.conj().T
                                 for b, we, wf in zip(f.blocks, E.weights, F.weights)])


def section_morphism(x):
    """A section x of E as the morphism unit -> E, 1 |-> x."""
    E = x.bundle
    return BundleMorphism(unit_bundle(E.base), E, [v.reshape(-1, 1) for v in x.vectors])


def scalar_values(s):
    """The CFunction of an endomorphism of the unit bundle."""
    if any(b.shape != (1, 1) for b in s.blocks):
        raise InputError("not an endomorphism of the unit bundle")
    return CFunction(s.source.base, [b[0, 0] for b in s.blocks])


def scalar_morphism(c):
    X = c.base
    return BundleMorphism(unit_bundle(X), unit_bundle(X), [[[v]] for v in c.values])


# -- monoidal structure --------------------------------------------------------

def tensor(E, F):
    _same_base(E, F)
    return HilbertBundle(E.base, tuple(a * b for a, b in zip(E.dims, F.dims)),
                         tuple(a * b for a, b in zip(E.weights, F.weights)))


def tensor_mor(f, g):
    return BundleMorphism(tensor(f.source, g.source), tensor(f.target, g.target),
                          [np.kron(a, b) for a, b in zip(f.blocks, g.blocks)])


def tensor_all(*objs):
    out = objs[0]
    for o in objs[1:]:
        out = tensor(out, o) if isinstance(o, HilbertBundle) else tensor_mor(out, o)
    return out


def associator(E, F, G):
    """alpha: (E (x) F) (x) G -> E (x) (F (x) G).

    Kronecker products are associative on coordinates, so the blocks are
    identities; the map is still a genuine unitary between the two objects.
    """
    src = tensor(tensor(E, F), G)
    return BundleMorphism(src, tensor(E, tensor(F, G)), [np.eye(d) for d in src.dims])


def left_unitor(E):
    """lambda: I (x) E -> E."""
    src = tensor(unit_bundle(E.base), E)
    return BundleMorphism(src, E, [np.eye(d) for d in E.dims])


def right_unitor(E):
    """rho: E (x) I -> E."""
    src = tensor(E, unit_bundle(E.base))
    return BundleMorphism(src, E, [np.eye(d) for d in E.dims])


def symmetry(E, F):
    """sigma: E (x) F -> F (x) E."""
    return BundleMorphism(tensor(E, F), tensor(F, E),
                          [swap_matrix(m, n) for m, n in zip(E.dims, F.dims)])


def is_unitary(f, tol=1e-10):
    return (distance(dagger(f) @ f, identity(f.source)) < tol
            and distance(f @ dagger(f), identity(f.target)) < tol)


# -- biproducts --------------------------------------------------------------

class Biproduct(NamedTuple):
    bundle: HilbertBundle
    i1: BundleMorphism
    i2: BundleMorphism
    p1: BundleMorphism
    p2: BundleMorphism


def biproduct(E, F, tol=1e-12):
    """Orthogonal direct sum; needs equal weights where both fibers are nonzero."""
    X = _same_base(E, F)
    weights = []
    for t, (a, b, wa, wb) in enumerate(zip(E.dims, F.dims, E.weights, F.weights)):
        if a and b and abs(wa - wb) > tol * max(wa, wb):
            raise InputError(f"biproduct needs equal weights; they differ at point {X.points[t]!r}")
        weights.append(wa if a else (wb if b else 1.0))
    S = HilbertBundle(X, tuple(a + b for a, b in zip(E.dims, F.dims)), tuple(weights))
    i1 = BundleMorphism(E, S, [np.eye(a + b, a) for a, b in zip(E.dims, F.dims)])
    i2 = BundleMorphism(F, S, [np.eye(a + b, b, -a) for a, b in zip(E.dims, F.dims)])
    return Biproduct(S, i1, i2, dagger(i1), dagger(i2))


# -- duals -------------------------------------------------------------------

class Dual(NamedTuple):
    bundle: HilbertBundle
    zeta: BundleMorphism
    eps: BundleMorphism


def dual(E):
    """Dual object E* with unit zeta: I -> E* (x) E and counit eps: E (x) E* -> I.

    E* has the dims and weights of E; its coordinates are the complex
    conjugates of those of E. eps(x (x) ybar) = <y, x>, hence the factor w.
    """
    X = E.base
    I = unit_bundle(X)
    zeta = BundleMorphism(I, tensor(E, E), [np.eye(d).reshape(-1, 1) / w for d, w in zip(E.dims, E.weights)])
    eps = BundleMorphism(tensor(E, E), I, [w * np.eye(d).reshape(1, -1) for d, w in zip(E.dims, E.weights)])
    return Dual(E, zeta, eps)


def snake_residuals(E):
    """Residuals of both snake equations and of zeta = sigma o eps^dag."""
    Es, zeta, eps = dual(E)
    lhs1 = tensor_mor(eps, identity(E)) @ tensor_mor(identity(E), zeta)
    lhs2 = tensor_mor(identity(Es), eps) @ tensor_mor(zeta, identity(Es))
    r1 = distance(lhs1, identity(E))
    r2 = distance(lhs2, identity(Es))
    r3 = distance(zeta, symmetry(E, Es) @ dagger(eps))
    return r1, r2, r3


def categorical_dimension(E):
    Es, zeta, eps = dual(E)
    return scalar_values(eps @ symmetry(Es, E) @ zeta)


# -- kernels -------------------------------------------------------------------

def kernel(f, rtol=RTOL):
    """Dagger kernel (K, k): k is an isometry onto ker f, pointwise."""
    E = f.source
    bases = []
    for b, d in zip(f.blocks, E.dims):
        bases.append(null_space(b, rtol) if b.shape[0] else np.eye(d))
    K = HilbertBundle(E.base, tuple(q.shape[1] for q in bases), E.weights)
    return K, BundleMorphism(K, E, bases)


# -- localization along a conditional expectation ----------------------------

@dataclass(frozen=True, eq=False)
class _Quotient:
    offsets: dict         # source point index -> slice in the stacked space V_d
    size: int             # dim V_d
    pi: np.ndarray        # V_d -> quotient coordinates
    lift: np.ndarray      # quotient -> V_d, right inverse of pi
    null: np.ndarray      # orthonormal basis of the null space N in V_d
    weight: float


def _quotient(ce, E, d, rtol=RTOL):
    xs = [x for x in range(len(ce.source)) if ce.q[x] == d]
    offsets, n = {}, 0
    for x in xs:
        offsets[x] = slice(n, n + E.dims[x])
        n += E.dims[x]
    supp = [x for x in xs if ce.kernel[d, x] > 0 and E.dims[x] > 0]
    if len(supp) <= 1:
        sel = np.zeros((0, n))
        weight = 1.0
        if supp:
            x = supp[0]
            sel = np.eye(n)[offsets[x]]
            weight = ce.kernel[d, x] * E.weights[x]
        null = np.eye(n)[[i for i in range(n) if not sel[:, i].any()]].T if n else np.zeros((0, 0))
        return _Quotient(offsets, n, sel, sel.T.copy(), null.reshape(n, n - sel.shape[0]), weight)
    g = np.zeros(n)
    for x in xs:
        g[offsets[x]] = ce.kernel[d, x] * E.weights[x]
    lam, vec = np.linalg.eigh(np.diag(g))
    keep = lam > rtol * lam[-1]
    v, lk = vec[:, keep], lam[keep]
    return _Quotient(offsets, n, (np.sqrt(lk)[:, None] * v.T), v / np.sqrt(lk), vec[:, ~keep], 1.0)


def _quotients(ce, E):
    if E.base != ce.source:
        raise InputError("bundle does not live over the source of the expectation")
    return [_quotient(ce, E, d) for d in range(len(ce.target))]


def localize(ce, E):
    qs = _quotients(ce, E)
    return HilbertBundle(ce.target, tuple(q.pi.shape[0] for q in qs), tuple(q.weight for q in qs))


def _stack(q_src, q_tgt, f):
    """f restricted to one fiber of q, as a map V_d(source) -> V_d(target)."""
    m = np.zeros((q_tgt.size, q_src.size), dtype=complex)
    for x, s in q_src.offsets.items():
        m[q_tgt.offsets[x], s] = f.blocks[x]
    return m


def localize_mor(ce, f, tol=1e-9):
    """Loc(f): descends f to the quotients; raises if f does not respect N."""
    qs, qt = _quotients(ce, f.source), _quotients(ce, f.target)
    blocks = []
    for a, b in zip(qs, qt):
        m = _stack(a, b, f)
        leak = opnorm(b.pi @ m @ a.null) if a.null.size else 0.0
        if leak > tol * max(1.0, opnorm(m)):
            raise VerificationError(f"morphism does not preserve the null space (leak {leak:.3e})", leak)
        blocks.append(b.pi @ m @ a.lift)
    return BundleMorphism(localize(ce, f.source), localize(ce, f.target), blocks)


def tensor_comparison(ce, E, F):
    """Canonical map Loc(E) (x) Loc(F) -> Loc(E (x) F), (x+N) (x) (y+N) |-> x (x) y + N.

    The product of two sections is taken pointwise over X, so only pairs of
    components sitting over the same source point survive.
    """
    qE, qF, qEF = _quotients(ce, E), _quotients(ce, F), _quotients(ce, tensor(E, F))
    blocks = []
    for a, b, c in zip(qE, qF, qEF):
        diag = np.zeros((c.size, a.size * b.size))
        for x, se in a.offsets.items():
            sf, st = b.offsets[x], c.offsets[x]
            rows = np.arange(st.start, st.stop).reshape(se.stop - se.start, sf.stop - sf.start)
            for i, ie in enumerate(range(se.start, se.stop)):
                for j, jf in enumerate(range(sf.start, sf.stop)):
                    diag[rows[i, j], ie * b.size + jf] = 1.0
        blocks.append(c.pi @ diag @ np.kron(a.lift, b.lift))
    src = tensor(localize(ce, E), localize(ce, F))
    return BundleMorphism(src, localize(ce, tensor(E, F)), blocks)
