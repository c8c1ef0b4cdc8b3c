"""Finite coverings and commutative Frobenius structures.

A covering p: Y -> X induces the structure whose fiber over t is the algebra
of functions on p^-1(t), with inner product sum(conj(f) g) / |p^-1(t)|.
Conversely the minimal idempotents of a commutative structure recover the
covering (its Gelfand spectrum).
"""
from dataclasses import dataclass

import numpy as np

from . import _fiber
from .base import BaseSpace, CFunction
from .errors import InputError, VerificationError
from .frobenius import (FrobeniusStructure, require_laws, specialise, star_isomorphism_residual)
from .hilbmod import BundleMorphism, bundle, tensor


@dataclass(frozen=True, eq=False)
class Covering:
    total: BaseSpace
    base: BaseSpace
    proj: tuple

    def __post_init__(self):
        proj = tuple(int(v) for v in self.proj)
        if len(proj) != len(self.total):
            raise InputError("proj must send every point of the total space somewhere", "proj")
        if any(not 0 <= v < len(self.base) for v in proj):
            raise InputError("proj has values outside the base", "proj")
        object.__setattr__(self, "proj", proj)

    def fiber(self, t):
        return [y for y, v in enumerate(self.proj) if v == t]

    def fiber_sizes(self):
        return tuple(len(self.fiber(t)) for t in range(len(self.base)))

    def is_surjective(self):
        return set(self.proj) == set(range(len(self.base)))


def make_covering(total, base, proj):
    """proj may be a dict {y_label: x_label} or a sequence of base labels or indices."""
    if not isinstance(total, BaseSpace):
        total = BaseSpace(total)
    if not isinstance(base, BaseSpace):
        base = BaseSpace(base)
    if isinstance(proj, dict):
        missing = [y for y in total.points if y not in proj]
        if missing:
            raise InputError(f"proj misses point {missing[0]!r}", "proj")
        proj = [proj[y] for y in total.points]
    proj = [base.index(v) if isinstance(v, str) else int(v) for v in proj]
    return Covering(total, base, tuple(proj))


def identity_covering(X):
    return Covering(X, X, tuple(range(len(X))))


@dataclass(frozen=True, eq=False)
class CoveringMorphism:
    source: Covering
    target: Covering
    map: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        if self.source.base != self.target.base:
            raise InputError("covering morphism between different bases")
        if len(m) != len(self.source.total):
            raise InputError("map must be defined on the whole source total space", "map")
        for y, v in enumerate(m):
            if not 0 <= v < len(self.target.total) or self.target.proj[v] != self.source.proj[y]:
                raise InputError(f"map does not commute with the projections at {self.source.total.points[y]!r}", "map")
        object.__setattr__(self, "map", m)


def compose_coverings(n, m):
    """n o m."""
    return CoveringMorphism(m.source, n.target, [n.map[v] for v in m.map])


def frobenius_from_covering(p, allow_degenerate=False):
    if not p.is_surjective() and not allow_degenerate:
        raise InputError("proj is not surjective")
    sizes = p.fiber_sizes()
    E = bundle(p.base, sizes, [1 / n if n else 1.0 for n in sizes])
    mult = []
    for n in sizes:
        m = np.zeros((n, n, n))
        m[np.arange(n), np.arange(n), np.arange(n)] = 1
        mult.append(m)
    return FrobeniusStructure(E, mult, [np.ones(n) for n in sizes])


def fiber_product(p, q):
    """Y x_X Z, ordered so that each fiber is lexicographic in (y, z)."""
    if p.base != q.base:
        raise InputError("fiber product of coverings of different bases")
    pairs = [(y, z) for y in range(len(p.total)) for z in range(len(q.total)) if p.proj[y] == q.proj[z]]
    labels = [f"({p.total.points[y]},{q.total.points[z]})" for y, z in pairs]
    cov = Covering(BaseSpace(labels), p.base, tuple(p.proj[y] for y, _ in pairs))
    return cov, pairs


def _by_fiber(cov):
    """Total-space points grouped per base point, in fiber order."""
    return [cov.fiber(t) for t in range(len(cov.base))]


def pullback(p):
    """(Y x_X Y, indicator of the diagonal)."""
    cov, pairs = fiber_product(p, p)
    return cov, CFunction(cov.total, [1.0 if a == b else 0.0 for a, b in pairs])


def fiber_product_isomorphism(p, q):
    """f (x) g |-> ((y, z) |-> f(y) g(z)): tensor of the two carriers -> carrier of the fiber product.

    Both sides use the lexicographic fiber order, so the blocks are identities.
    """
    cov, _ = fiber_product(p, q)
    src = tensor(frobenius_from_covering(p, True).carrier, frobenius_from_covering(q, True).carrier)
    tgt = frobenius_from_covering(cov, True).carrier
    return BundleMorphism(src, tgt, [np.eye(d) for d in tgt.dims])


def pullback_isomorphism(p):
    return fiber_product_isomorphism(p, p)


def covering_bijection(p, q):
    """A proj-commuting bijection Y_p -> Y_q (as an index tuple), or None."""
    if p.base != q.base or p.fiber_sizes() != q.fiber_sizes():
        return None
    out = [0] * len(p.total)
    for a, b in zip(_by_fiber(p), _by_fiber(q)):
        for y, z in zip(a, b):
            out[y] = z
    return tuple(out)


def covering_to_star_hom(m):
    """Pullback h |-> h o map, from the target covering's algebra to the source's."""
    P = frobenius_from_covering(m.source, True).carrier
    Q = frobenius_from_covering(m.target, True).carrier
    blocks = []
    for t in range(len(m.source.base)):
        rows, cols = m.source.fiber(t), m.target.fiber(t)
        b = np.zeros((len(rows), len(cols)))
        for i, y in enumerate(rows):
            b[i, cols.index(m.map[y])] = 1
        blocks.append(b)
    return BundleMorphism(Q, P, blocks)


def character_label(point, j):
    return f"{point}#{j}"


def idempotents(F, seed=0):
    """Canonically ordered minimal idempotents per point, in standard coordinates."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(len(F.base)):
        mu, eta = F.ortho(t)
        s = np.sqrt(F.carrier.weights[t])
        out.append([e / s for e in _fiber.central_idempotents(mu, eta, rng)])
    return out


def spectrum(F, seed=0, tol=1e-9):
    """Covering whose sheets over t are the characters of the fiber algebra at t."""
    rep = require_laws(F, ("unit", "associativity", "frobenius", "commutative"), tol)
    if not rep.verdicts["nondegenerate"]:
        raise InputError("spectrum needs a nondegenerate structure")
    idem = idempotents(F, seed)
    labels, proj = [], []
    for t, es in enumerate(idem):
        for j in range(len(es)):
            labels.append(character_label(F.base.points[t], j))
            proj.append(t)
    return Covering(BaseSpace(labels), F.base, tuple(proj))


def spectrum_isomorphism(F, seed=0, tol=1e-9):
    """(covering, U, residual): U a unitary *-isomorphism from the specialised
    covering structure of spectrum(F) onto specialise(F)."""
    cov = spectrum(F, seed, tol)
    A = specialise(frobenius_from_covering(cov), tol)
    B = specialise(F, tol)
    ea, eb = idempotents(A, seed), idempotents(B, seed)
    blocks = []
    for t in range(len(F.base)):
        if not eb[t]:
            blocks.append(np.zeros((0, 0)))
            continue
        Ma, Mb = np.array(ea[t]).T, np.array(eb[t]).T
        blocks.append(Mb @ np.linalg.inv(Ma))
    U = BundleMorphism(A.carrier, B.carrier, blocks)
    r = star_isomorphism_residual(U, A, B)
    if not np.isfinite(r):
        raise VerificationError("spectrum isomorphism is not finite", r)
    return cov, U, r
