"""Finite base spaces, the scalar algebra C(X), conditional expectations and
finite Radon kernels.

A base space is a finite discrete set of labelled points, so every subset is
clopen and C(X) is just the algebra of complex vectors indexed by the points.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import InputError, VerificationError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class BaseSpace:
    points: tuple

    def __post_init__(self):
        pts = tuple(str(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise InputError("point labels must be distinct", "points")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self, label):
        try:
            return self.points.index(str(label))
        except ValueError:
            raise InputError(f"unknown point {label!r}") from None

    def indices(self, labels):
        return [self.index(u) for u in labels]


@dataclass(frozen=True, eq=False)
class CFunction:
    """An element of C(X): one complex value per point."""
    base: BaseSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.shape != (len(self.base),):
            raise InputError(f"expected {len(self.base)} values, got {v.shape[0]}", "values")
        object.__setattr__(self, "values", v)

    def __getitem__(self, label):
        return self.values[self.base.index(label)]

    def __mul__(self, other):
        return CFunction(self.base, self.values * other.values)

    def conj(self):
        return CFunction(self.base, self.values.conj())

    def as_dict(self):
        return dict(zip(self.base.points, self.values))


def constant(X, c=1.0):
    return CFunction(X, np.full(len(X), c, dtype=complex))


# -- subobjects of the tensor unit ---------------------------------------

def _subset_mask(X, U):
    mask = np.zeros(len(X), dtype=bool)
    for u in U:
        if str(u) not in X.points:
            raise InputError(f"unknown point {u!r} in subset")
        mask[X.index(u)] = True
    return mask


def subobject_from_subset(X, U):
    """The subobject of C(X) of functions vanishing on U.

    Returns ``(E, k)`` with E of fiber dimension 1 off U and 0 on U, and
    k: E -> unit the canonical isometry.
    """
    from .hilbmod import HilbertBundle, BundleMorphism, unit_bundle

    mask = _subset_mask(X, U)
    dims = tuple(0 if m else 1 for m in mask)
    E = HilbertBundle(X, dims, (1.0,) * len(X))
    blocks = [np.eye(1, d, dtype=complex) for d in dims]
    return E, BundleMorphism(E, unit_bundle(X), blocks)


def idempotent_from_subset(X, U):
    """Self-adjoint idempotent scalar s = k k^dag: the indicator of X minus U."""
    mask = _subset_mask(X, U)
    return CFunction(X, (~mask).astype(complex))


def subset_from_idempotent(s, tol=DEFAULT_TOL):
    v = s.values
    defect = float(max(np.abs(v * v - v).max(initial=0.0), np.abs(v.imag).max(initial=0.0)))
    if defect > tol:
        raise VerificationError(f"not a self-adjoint idempotent: max|s^2 - s| = {defect:.3e}", defect)
    return frozenset(p for p, x in zip(s.base.points, v) if abs(x) < 0.5)


# -- conditional expectations -----------------------------------------------

@dataclass(frozen=True, eq=False)
class ConditionalExpectation:
    """Expectation C(X) -> C(D) along q: X -> D with kernel K (|D| x |X|).

    f(a)(d) = sum_x K[d, x] a(x) and the inclusion g(b) = b o q.
    """
    source: BaseSpace
    target: BaseSpace
    q: tuple
    kernel: np.ndarray

    def apply(self, a):
        return CFunction(self.target, self.kernel @ np.asarray(getattr(a, "values", a)))

    def pullback(self, b):
        b = np.asarray(getattr(b, "values", b))
        return CFunction(self.source, b[list(self.q)])

    def support(self, d):
        return [x for x in range(len(self.source)) if self.kernel[d, x] > 0]


def make_conditional_expectation(X, D, q, K, tol=DEFAULT_TOL):
    """Validate and build a conditional expectation.

    q may be a sequence of target indices/labels or a mapping from X labels to
    D labels. K is a |D| x |X| nonnegative matrix whose rows sum to one and
    vanish off the fibers of q.
    """
    if isinstance(q, dict):
        q = [D.index(q[x]) for x in X.points]
    else:
        q = [D.index(v) if isinstance(v, str) else int(v) for v in q]
    if len(q) != len(X):
        raise InputError("q must assign a target point to every source point", "q")
    if any(not 0 <= v < len(D) for v in q):
        raise InputError("q has values outside the target base", "q")
    if set(q) != set(range(len(D))):
        raise InputError("q must be surjective", "q")
    K = np.asarray(K, dtype=float)
    if K.shape != (len(D), len(X)):
        raise InputError(f"kernel must have shape {(len(D), len(X))}", "kernel")
    if (K < 0).any():
        raise InputError("kernel weights must be nonnegative", "kernel")
    for d, label in enumerate(D.points):
        off = [x for x in range(len(X)) if q[x] != d and K[d, x] != 0]
        if off:
            raise InputError(f"kernel row {label!r} charges points outside q^-1({label})", "kernel")
        if abs(K[d].sum() - 1) > tol:
            raise InputError(f"kernel row {label!r} sums to {K[d].sum():.6g}, not 1", "kernel")
    return ConditionalExpectation(X, D, tuple(q), K)


def identity_expectation(X):
    return make_conditional_expectation(X, X, range(len(X)), np.eye(len(X)))


def is_strict(ce):
    """Strict iff every fiber of q carries a single point of positive weight."""
    return all(len(ce.support(d)) == 1 for d in range(len(ce.target)))


def strictness_witness(ce):
    """A pair of coordinate indicators (a, b) with f(ab) = 0 but f(a)f(b) != 0, or None."""
    n = len(ce.source)
    for d in range(len(ce.target)):
        s = ce.support(d)
        if len(s) > 1:
            a, b = np.zeros(n), np.zeros(n)
            a[s[0]] = b[s[1]] = 1
            return CFunction(ce.source, a), CFunction(ce.source, b)
    return None


# -- finite Radon kernels ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class StochasticKernel:
    """x -> finite measure on Y, stored as a |X| x |Y| nonnegative matrix."""
    source: BaseSpace
    target: BaseSpace
    weight: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=float)
        if w.shape != (len(self.source), len(self.target)):
            raise InputError(f"weight must have shape {(len(self.source), len(self.target))}", "weight")
        if (w < 0).any():
            raise InputError("measure weights must be nonnegative", "weight")
        object.__setattr__(self, "weight", w)


def identity_kernel(X):
    return StochasticKernel(X, X, np.eye(len(X)))


def radon_compose(f, g):
    """g o f for f: X -> Y and g: Y -> Z."""
    if f.target != g.source:
        raise InputError("kernel composition: target of f differs from source of g")
    return StochasticKernel(f.source, g.target, f.weight @ g.weight)


@dataclass(frozen=True, eq=False)
class PositiveMap:
    """Positive linear map C(source) -> C(target), h -> matrix @ h."""
    source: BaseSpace
    target: BaseSpace
    matrix: np.ndarray

    def __call__(self, h):
        return CFunction(self.target, self.matrix @ np.asarray(getattr(h, "values", h)))

    def __matmul__(self, other):
        if other.target != self.source:
            raise InputError("positive map composition: endpoints differ")
        return PositiveMap(other.source, self.target, self.matrix @ other.matrix)


def radon_to_cp(f):
    """F(f)(h)(x) = sum_y h(y) f(x, y); contravariant, so F(g o f) = F(f) o F(g)."""
    return PositiveMap(f.target, f.source, f.weight.astype(complex))


def ce_to_radon(ce):
    """Kernel D -> X with f(d)(x) = K(d, x), together with q: X -> D."""
    return StochasticKernel(ce.target, ce.source, ce.kernel), ce.q


def satisfies_support_condition(kernel, q):
    """supp f(d) is contained in q^-1(d) for every d (exact)."""
    return all(q[x] == d
               for d in range(len(kernel.source))
               for x in range(len(kernel.target)) if kernel.weight[d, x] != 0)


def indicator_products(X):
    """All pairs of coordinate indicator functions on X, as arrays."""
    eye = np.eye(len(X))
    return [(eye[i], eye[j]) for i, j in product(range(len(X)), repeat=2)]
