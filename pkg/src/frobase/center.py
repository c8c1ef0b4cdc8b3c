"""Center/commutator splitting and rebasing a structure over its center.

For a dagger Frobenius structure each fiber splits orthogonally as
Z(E_t) + [E_t, E_t]. The minimal central idempotents e_j cut the fiber into
simple blocks e_j E_t; taking those blocks as fibers over a new base (one
point per (t, j)) gives a central structure, and pushing it forward along the
covering (t, j) -> t recovers the original.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _fiber
from .base import BaseSpace
from .covering import Covering, character_label
from .errors import InputError, VerificationError
from .frobenius import FrobeniusStructure, from_ortho, require_laws, verify_laws
from .hilbmod import BundleMorphism, HilbertBundle, dagger

BIPRODUCT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CenterDecomposition:
    Z: HilbertBundle
    commutator: HilbertBundle
    i1: BundleMorphism
    p1: BundleMorphism
    i2: BundleMorphism
    p2: BundleMorphism
    idempotents: tuple = field(default=())   # per point, orthonormal coordinates


def decompose(F, seed=0, tol=1e-9):
    """E = Z(E) + [E, E] as a dagger biproduct.

    The center is the joint null space of x |-> xb - bx; its basis is then
    replaced by the normalized minimal central idempotents, which span the same
    space and fix phases canonically.
    """
    require_laws(F, tol=tol)
    rng = np.random.default_rng(seed)
    zs, cs, idems = [], [], []
    for t in range(len(F.base)):
        mu, eta = F.ortho(t)
        null = _fiber.center(mu)
        idem = _fiber.central_idempotents(mu, eta, rng)
        Qz = np.array([e / np.linalg.norm(e) for e in idem]).T.reshape(mu.shape[0], len(idem))
        Qc = _fiber.commutators(mu)
        if Qz.shape[1] != null.shape[1] or np.linalg.norm(Qz - null @ (null.conj().T @ Qz)) > 1e-8:
            raise VerificationError(f"central idempotents do not span the center at {F.base.points[t]!r}")
        overlap = np.abs(Qz.conj().T @ Qc).max(initial=0.0)
        if overlap > 1e-8 or Qz.shape[1] + Qc.shape[1] != mu.shape[0]:
            raise VerificationError(f"center and commutators are not complementary at {F.base.points[t]!r}", overlap)
        zs.append(Qz)
        cs.append(Qc)
        idems.append(idem)
    E = F.carrier
    Z = HilbertBundle(F.base, tuple(q.shape[1] for q in zs), E.weights)
    C = HilbertBundle(F.base, tuple(q.shape[1] for q in cs), E.weights)
    i1 = BundleMorphism(Z, E, zs)
    i2 = BundleMorphism(C, E, cs)
    return CenterDecomposition(Z, C, i1, dagger(i1), i2, dagger(i2), tuple(idems))


def center_frobenius(F, dec):
    """Z(E) with the restricted multiplication and the inherited inner product."""
    mus, etas = [], []
    for t in range(len(F.base)):
        mu, eta = F.ortho(t)
        Q = dec.i1.blocks[t]
        mus.append(np.einsum("ak,abc,bi,cj->kij", Q.conj(), mu, Q, Q, optimize=True))
        etas.append(Q.conj().T @ eta)
    return from_ortho(dec.Z, mus, etas)


@dataclass(frozen=True, eq=False)
class RebasedStructure:
    new_base: BaseSpace
    covering: Covering          # new_base -> old base
    structure: FrobeniusStructure
    block_bases: tuple          # per old point, list of orthonormal block bases


def rebase_over_center(F, seed=0, tol=1e-9):
    """Split each fiber along its minimal central idempotents.

    The block over the new point (t, j) is e_j E_t with the inner product of
    E_t restricted to it, i.e. <x, y>(t, j) = |e_j|^2 chi_j(p1(x* y)).
    """
    require_laws(F, tol=tol)
    rng = np.random.default_rng(seed)
    labels, proj, dims, weights, mus, etas, bases = [], [], [], [], [], [], []
    for t, point in enumerate(F.base.points):
        mu, eta = F.ortho(t)
        here = []
        for j, e in enumerate(_fiber.central_idempotents(mu, eta, rng)):
            B = _fiber.block_basis(mu, e)
            labels.append(character_label(point, j))
            proj.append(t)
            dims.append(B.shape[1])
            weights.append(F.carrier.weights[t])
            mus.append(np.einsum("ak,abc,bi,cj->kij", B.conj(), mu, B, B, optimize=True))
            etas.append(B.conj().T @ e)
            here.append(B)
        bases.append(here)
    Y = BaseSpace(labels)
    structure = from_ortho(HilbertBundle(Y, tuple(dims), tuple(weights)), mus, etas)
    return RebasedStructure(Y, Covering(Y, F.base, tuple(proj)), structure, tuple(bases))


def compose_external(inner, q):
    """Push a structure over Y forward along q: Y -> X by direct sums over fibers.

    A fiber keeps its weight when all summands share it, otherwise the
    summands are rescaled to weight 1 first.
    """
    if inner.base != q.total:
        raise InputError("inner structure does not live over the total space of the covering")
    dims, weights, mus, etas = [], [], [], []
    for t in range(len(q.base)):
        ys = q.fiber(t)
        ws = {inner.carrier.weights[y] for y in ys if inner.carrier.dims[y] > 0}
        w = ws.pop() if len(ws) == 1 else 1.0
        n = sum(inner.carrier.dims[y] for y in ys)
        mu = np.zeros((n, n, n), dtype=complex)
        eta = np.zeros(n, dtype=complex)
        off = 0
        for y in ys:
            m, e = inner.ortho(y)
            d = m.shape[0]
            s = slice(off, off + d)
            mu[s, s, s] = m
            eta[s] = e
            off += d
        dims.append(n)
        weights.append(w)
        mus.append(mu)
        etas.append(eta)
    return from_ortho(HilbertBundle(q.base, tuple(dims), tuple(weights)), mus, etas)


def rebase_isomorphism(F, rb, composed=None):
    """The unitary F.carrier -> compose_external(rb) splitting each fiber into its blocks."""
    if composed is None:
        composed = compose_external(rb.structure, rb.covering)
    blocks = []
    for t, bases in enumerate(rb.block_bases):
        d = F.carrier.dims[t]
        Uo = np.vstack([B.conj().T for B in bases]) if bases else np.zeros((0, d))
        blocks.append(Uo * np.sqrt(F.carrier.weights[t] / composed.carrier.weights[t]))
    return BundleMorphism(F.carrier, composed.carrier, blocks), composed


@dataclass(frozen=True)
class TransitivityReport:
    side_i: bool
    side_ii: bool
    residuals: dict
    covering: tuple = ()
    reason: str = ""

    @property
    def agree(self):
        return self.side_i == self.side_ii

    def as_dict(self):
        return {"side_i": self.side_i, "side_ii": self.side_ii, "agree": self.agree,
                "residuals": self.residuals, "covering": list(self.covering), "reason": self.reason}


SPECIAL_FROBENIUS = ("unit", "associativity", "frobenius", "special")


def check_transitivity(F, tol=1e-9, seed=0):
    """Compare (i) F special over C(X) with (ii) F special over its center and
    the center specialisable over C(X)."""
    rep = verify_laws(F, tol)
    side_i = rep.ok(*SPECIAL_FROBENIUS)
    residuals = {"i": {k: rep.residuals[k] for k in SPECIAL_FROBENIUS}}
    try:
        dec = decompose(F, seed, tol)
        rb = rebase_over_center(F, seed, tol)
    except VerificationError as exc:
        return TransitivityReport(side_i, False, residuals, reason=f"center decomposition unavailable: {exc}")
    rrep = verify_laws(rb.structure, tol)
    zrep = verify_laws(center_frobenius(F, dec), tol)
    zlaws = ("unit", "associativity", "frobenius", "specialisable")
    residuals["rebased"] = {k: rrep.residuals[k] for k in SPECIAL_FROBENIUS}
    residuals["center"] = {k: zrep.residuals[k] for k in zlaws}
    side_ii = rrep.ok(*SPECIAL_FROBENIUS) and zrep.ok(*zlaws)
    cov = tuple((y, rb.covering.base.points[t]) for y, t in zip(rb.new_base.points, rb.covering.proj))
    return TransitivityReport(side_i, side_ii, residuals, cov)
