"""Dagger Frobenius structures on Hilbert bundles.

A structure stores, per point t, the multiplication tensor mu_t[k, i, j]
(coefficient of e_k in e_i e_j, standard coordinates of the carrier) and the
unit vector eta_t. Law checks and the algebraic helpers work in orthonormal
coordinates, which differ from the standard ones by the factor sqrt(w(t)).
"""
import weakref
from dataclasses import dataclass, field

import numpy as np

from . import _fiber
from ._linalg import opnorm, psd_power
from .base import BaseSpace, CFunction
from .errors import InputError, NotSpecialisable, VerificationError
from .hilbmod import (BundleMorphism, HilbertBundle, Section, associator, bundle,
                      dagger, distance, dual, identity, left_unitor, right_unitor,
                      scalar_values, tensor, tensor_mor)

LAWS = ("unit", "associativity", "frobenius", "strong_frobenius", "special",
        "commutative", "nondegenerate")
FROBENIUS_LAWS = ("unit", "associativity", "frobenius")


@dataclass(frozen=True, eq=False)
class FrobeniusStructure:
    carrier: HilbertBundle
    mult: tuple
    unit: tuple

    def __post_init__(self):
        E = self.carrier
        if len(self.mult) != len(E.dims) or len(self.unit) != len(E.dims):
            raise InputError("need one multiplication tensor and one unit per point")
        mult, unit = [], []
        for t, d in enumerate(E.dims):
            m = np.asarray(self.mult[t], dtype=complex)
            u = np.asarray(self.unit[t], dtype=complex).reshape(-1)
            if m.size != d ** 3 or u.size != d:
                raise InputError(f"shape mismatch at point {E.base.points[t]!r}: "
                                 f"mult {m.shape}, unit {u.shape}, dim {d}")
            mult.append(m.reshape(d, d, d))
            unit.append(u)
        object.__setattr__(self, "mult", tuple(mult))
        object.__setattr__(self, "unit", tuple(unit))

    @property
    def base(self):
        return self.carrier.base

    def ortho(self, t):
        """(mu, eta) at point t in orthonormal coordinates."""
        s = np.sqrt(self.carrier.weights[t])
        return self.mult[t] / s, self.unit[t] * s

    def mult_morphism(self):
        E = self.carrier
        return BundleMorphism(tensor(E, E), E, [m.reshape(d, d * d) for m, d in zip(self.mult, E.dims)])

    def unit_morphism(self):
        E = self.carrier
        return BundleMorphism(bundle(E.base, (1,) * len(E.dims)), E, [u.reshape(-1, 1) for u in self.unit])

    def product(self, x, y):
        return Section(self.carrier, [_fiber.prod(m, a, b) for m, a, b in zip(self.mult, x.vectors, y.vectors)])

    def unit_section(self):
        return Section(self.carrier, self.unit)


def from_ortho(carrier, mus, etas):
    """Build a structure from orthonormal-coordinate fibers."""
    s = np.sqrt(np.asarray(carrier.weights))
    return FrobeniusStructure(carrier, [m * r for m, r in zip(mus, s)], [e / r for e, r in zip(etas, s)])


def orthos(F):
    return [F.ortho(t) for t in range(len(F.base))]


# -- law verification ---------------------------------------------------------

@dataclass(frozen=True)
class LawReport:
    residuals: dict
    verdicts: dict
    tol: float
    counit: tuple = field(default=())

    def ok(self, *laws):
        return all(self.verdicts[law] for law in (laws or LAWS))

    def failing(self, *laws):
        return [law for law in (laws or LAWS) if not self.verdicts[law]]

    def as_dict(self):
        return {"tolerance": self.tol,
                "laws": {k: {"residual": self.residuals[k], "pass": self.verdicts[k]} for k in self.residuals}}


def _fiber_defects(mu, eta):
    d = mu.shape[0]
    out = dict.fromkeys(LAWS[:-1], 0.0)
    if d == 0:
        return out, None
    eye = np.eye(d)
    out["unit"] = max(opnorm(_fiber.lmul(mu, eta) - eye), opnorm(_fiber.rmul(mu, eta) - eye))
    a = np.einsum("lmk,mij->lijk", mu, mu, optimize=True)
    b = np.einsum("lim,mjk->lijk", mu, mu, optimize=True)
    out["associativity"] = opnorm((a - b).reshape(d, -1))
    mc = mu.conj()
    L = np.einsum("axi,yib->abxy", mu, mc, optimize=True).reshape(d * d, d * d)
    R = np.einsum("xai,biy->abxy", mc, mu, optimize=True).reshape(d * d, d * d)
    S = np.einsum("mab,mxy->abxy", mc, mu, optimize=True).reshape(d * d, d * d)
    out["frobenius"] = opnorm(L - R)
    out["strong_frobenius"] = max(opnorm(L - S), opnorm(R - S))
    out["special"] = opnorm(np.einsum("aij,bij->ab", mu, mc) - eye)
    out["commutative"] = opnorm((mu - mu.transpose(0, 2, 1)).reshape(d, -1))
    return out, float(np.vdot(eta, eta).real)


def _specialisable_defect(mu, tol):
    d = mu.shape[0]
    if d == 0:
        return 0.0
    T = mu.reshape(d, -1) @ mu.reshape(d, -1).conj().T
    if np.linalg.eigvalsh((T + T.conj().T) / 2).min() <= tol:
        return np.inf
    return _centrality_defect(mu, T)


def _centrality_defect(mu, T):
    eye = np.eye(mu.shape[0])
    r = 0.0
    for b in eye:
        Lb, Rb = _fiber.lmul(mu, b), _fiber.rmul(mu, b)
        r = max(r, opnorm(T @ Lb - Lb @ T), opnorm(T @ Rb - Rb @ T))
    return r


_LAW_CACHE = weakref.WeakKeyDictionary()


def verify_laws(F, tol=1e-9):
    """Residual and verdict for every law, maximized over points.

    Reports are cached per structure object and tolerance, since structures
    are immutable and the pipelines re-check the same structure repeatedly.
    """
    cached = _LAW_CACHE.setdefault(F, {})
    if tol not in cached:
        cached[tol] = _verify_laws(F, tol)
    return cached[tol]


def _verify_laws(F, tol):
    res = dict.fromkeys(LAWS[:-1], 0.0)
    counit, spec_defect = [], 0.0
    for t in range(len(F.base)):
        mu, eta = F.ortho(t)
        defects, c = _fiber_defects(mu, eta)
        for k, v in defects.items():
            res[k] = max(res[k], float(v))
        counit.append(c if c is not None else 0.0)
        spec_defect = max(spec_defect, _specialisable_defect(mu, tol))
    live = [c for c, d in zip(counit, F.carrier.dims) if d > 0]
    res["nondegenerate"] = max(0.0, 2 * tol - min(live)) if live else 0.0
    res["specialisable"] = float(spec_defect)
    verdicts = {k: bool(v < tol) for k, v in res.items()}
    return LawReport(res, verdicts, tol, tuple(counit))


def require_laws(F, laws=FROBENIUS_LAWS, tol=1e-9):
    rep = verify_laws(F, tol)
    bad = rep.failing(*laws)
    if bad:
        err = VerificationError(f"structure fails {', '.join(bad)}", max(rep.residuals[b] for b in bad))
        err.report = rep
        raise err
    return rep


# -- involution ------------------------------------------------------------------

def involution(F):
    """(i, star): i = (id (x) eta^dag)(id (x) mu)(zeta (x) id): E -> E*, and x* = conj(i(x)).

    E* has conjugate coordinates, so the induced antilinear map on sections is
    complex conjugation of i's output.
    """
    require_laws(F)
    E = F.carrier
    Es, zeta, _ = dual(E)
    step1 = tensor_mor(zeta, identity(E)) @ dagger(left_unitor(E))
    step2 = tensor_mor(identity(Es), F.mult_morphism()) @ associator(Es, E, E)
    step3 = right_unitor(Es) @ tensor_mor(identity(Es), dagger(F.unit_morphism()))
    i = step3 @ step2 @ step1

    def star(x):
        return Section(E, [v.conj() for v in i(x).vectors])

    return i, star


def star_section(F, x):
    return Section(F.carrier, [_fiber.star(m, u, v) for m, u, v in zip(F.mult, F.unit, x.vectors)])


# -- specialisation ----------------------------------------------------------------

def specialiser(F, tol=1e-9):
    """The central positive d = (mu mu^dag)^(-1/2), as a BundleMorphism E -> E."""
    require_laws(F, tol=tol)
    blocks = []
    for t in range(len(F.base)):
        mu, _ = F.ortho(t)
        d = mu.shape[0]
        if d == 0:
            blocks.append(np.zeros((0, 0)))
            continue
        T = mu.reshape(d, -1) @ mu.reshape(d, -1).conj().T
        lo = np.linalg.eigvalsh((T + T.conj().T) / 2).min()
        if lo <= tol:
            raise NotSpecialisable(f"mu mu^dag is singular at {F.base.points[t]!r} (min eigenvalue {lo:.3e})", lo)
        c = _centrality_defect(mu, T)
        if c > tol:
            raise NotSpecialisable(f"mu mu^dag is not central at {F.base.points[t]!r}", c)
        blocks.append(psd_power(T, -0.5))
    return BundleMorphism(F.carrier, F.carrier, blocks)


def specialise(F, tol=1e-9):
    """(E, d o mu, d^-1 o eta)."""
    d = specialiser(F, tol)
    mus, etas = [], []
    for t, D in enumerate(d.blocks):
        mu, eta = F.ortho(t)
        mus.append(np.einsum("kl,lij->kij", D, mu))
        etas.append(np.linalg.solve(D, eta) if D.size else eta)
    return from_ortho(F.carrier, mus, etas)


# -- constructors --------------------------------------------------------------

def _matrix_block_fiber(blocks, normalization):
    """Orthonormal-coordinate (mu, eta) of the direct sum of M_n.

    Basis b_ab = E_ab / sqrt(c) with c = n ("special") or c = 1 ("trace");
    the inner product is c * tr(a^* b) on each block.
    """
    dim = sum(n * n for n in blocks)
    mu = np.zeros((dim, dim, dim))
    eta = np.zeros(dim)
    off = 0
    for n in blocks:
        c = n if normalization == "special" else 1.0
        s = 1 / np.sqrt(c)
        for a in range(n):
            eta[off + a * n + a] = np.sqrt(c)
            for b in range(n):
                for d in range(n):
                    mu[off + a * n + d, off + a * n + b, off + b * n + d] = s
        off += n * n
    return mu, eta


def block_frobenius(X, blocks_per_point, normalization="special"):
    """Fiber at each point is the direct sum of M_n over the given block sizes.

    ``normalization`` is "special" (inner product n tr(a^* b) on M_n, which is
    special) or "trace" (plain tr(a^* b)).
    """
    if normalization not in ("special", "trace"):
        raise InputError("normalization must be 'special' or 'trace'")
    if len(blocks_per_point) != len(X):
        raise InputError("need a block list for every point")
    fibers = [_matrix_block_fiber([int(n) for n in b], normalization) for b in blocks_per_point]
    E = bundle(X, [len(e) for _, e in fibers])
    return FrobeniusStructure(E, [m for m, _ in fibers], [e for _, e in fibers])


def trivial_frobenius(X, blocks, normalization="special"):
    if not blocks or any(int(n) < 1 for n in blocks):
        raise InputError("blocks must be a nonempty list of positive integers")
    return block_frobenius(X, [list(blocks)] * len(X), normalization)


def endomorphism_frobenius(E):
    """E* (x) E with multiplication id (x) eps (x) id and unit zeta."""
    Es, zeta, eps = dual(E)
    carrier = tensor(Es, E)
    m = tensor_mor(tensor_mor(identity(Es), eps), identity(E))
    mult = [b.reshape(d, d, d) for b, d in zip(m.blocks, carrier.dims)]
    return FrobeniusStructure(carrier, mult, [b[:, 0] for b in zeta.blocks])


def tensor_frobenius(F, G):
    E = tensor(F.carrier, G.carrier)
    mult = []
    for a, b in zip(F.mult, G.mult):
        m, n = a.shape[0], b.shape[0]
        mult.append(np.einsum("kij,lpq->klipjq", a, b).reshape(m * n, m * n, m * n))
    return FrobeniusStructure(E, mult, [np.kron(u, v) for u, v in zip(F.unit, G.unit)])


def conjugate(F, unitaries):
    """Transport F along per-point unitaries U_t (a unitary *-isomorphism F -> result)."""
    mus, etas = [], []
    for t, U in enumerate(unitaries):
        mu, eta = F.mult[t], F.unit[t]
        Uc = np.asarray(U).conj()
        mus.append(np.einsum("ka,abc,ib,jc->kij", U, mu, Uc, Uc, optimize=True))
        etas.append(U @ eta)
    return FrobeniusStructure(F.carrier, mus, etas)


def restrict(F, labels):
    idx = F.base.indices(labels)
    X = BaseSpace([F.base.points[i] for i in idx])
    E = HilbertBundle(X, tuple(F.carrier.dims[i] for i in idx), tuple(F.carrier.weights[i] for i in idx))
    return FrobeniusStructure(E, [F.mult[i] for i in idx], [F.unit[i] for i in idx])


# -- C*-structure and classification ------------------------------------------------

def cstar_norm(F, x):
    """Per-point operator norm of left multiplication by x."""
    require_laws(F)
    return CFunction(F.base, [_fiber.operator_norm(F.mult[t], v) for t, v in enumerate(x.vectors)])


def wedderburn_data(F, seed=0):
    """Per point: block sizes and the *-isomorphism from the block algebra (orthonormal coordinates)."""
    require_laws(F)
    rng = np.random.default_rng(seed)
    return [_fiber.wedderburn(*F.ortho(t), rng) for t in range(len(F.base))]


def classify_fibers(F, seed=0):
    return {p: sizes for p, (sizes, _) in zip(F.base.points, wedderburn_data(F, seed))}


def center_dims(F):
    return [_fiber.center(F.ortho(t)[0]).shape[1] for t in range(len(F.base))]


def is_central(F, tol=1e-9):
    require_laws(F, ("unit", "associativity"), tol)
    if any(np.linalg.norm(u) <= tol for u in F.unit):
        return False
    return all(z == 1 for z, d in zip(center_dims(F), F.carrier.dims) if d > 0)


def phase_residuals(F, phi):
    """(equation residual, unitarity residual) for a candidate phase phi, maximized over points.

    The equation is (phi^dag (x) id) mu^dag phi = eta; unitarity is phi* phi = phi phi* = eta.
    """
    eq = un = 0.0
    for t in range(len(F.base)):
        mu, eta = F.ortho(t)
        s = np.sqrt(F.carrier.weights[t])
        p = phi.vectors[t] * s
        if mu.shape[0] == 0:
            continue
        lhs = np.einsum("a,k,kab->b", p.conj(), p, mu.conj(), optimize=True)
        eq = max(eq, np.linalg.norm(lhs - eta))
        ps = _fiber.star(mu, eta, p)
        un = max(un, np.linalg.norm(_fiber.prod(mu, ps, p) - eta), np.linalg.norm(_fiber.prod(mu, p, ps) - eta))
    return float(eq), float(un)


def is_phase(F, phi, tol=1e-10):
    require_laws(F, FROBENIUS_LAWS + ("special",), max(tol, 1e-9))
    return phase_residuals(F, phi)[0] < tol


def star_homomorphism_residuals(f, F1, F2):
    """Residuals of multiplicativity, involution preservation, unitality and unitarity of f."""
    mult = distance(F2.mult_morphism() @ tensor_mor(f, f), f @ F1.mult_morphism())
    st = 0.0
    for t, A in enumerate(f.blocks):
        mu1, eta1 = F1.mult[t], F1.unit[t]
        mu2, eta2 = F2.mult[t], F2.unit[t]
        for j in range(A.shape[1]):
            e = np.eye(A.shape[1])[j]
            lhs = A @ _fiber.star(mu1, eta1, e)
            rhs = _fiber.star(mu2, eta2, A @ e)
            st = max(st, np.linalg.norm(lhs - rhs) * np.sqrt(F2.carrier.weights[t]))
    unit = distance(f @ F1.unit_morphism(), F2.unit_morphism())
    unitary = max(distance(dagger(f) @ f, identity(f.source)), distance(f @ dagger(f), identity(f.target)))
    return {"mult": float(mult), "star": float(st), "unit": float(unit), "unitary": float(unitary)}


def is_star_homomorphism(f, F1, F2, tol=1e-10):
    r = star_homomorphism_residuals(f, F1, F2)
    return r["mult"] < tol and r["star"] < tol


def star_isomorphism_residual(U, F1, F2):
    """Largest defect of U as a unital unitary *-isomorphism F1 -> F2."""
    return max(star_homomorphism_residuals(U, F1, F2).values())


def support_restriction(F, tol=1e-9):
    """(U, F|U, s): U the points of nonzero fiber and s = eta^dag mu mu^dag eta."""
    require_laws(F, tol=tol)
    U = tuple(p for p, d in zip(F.base.points, F.carrier.dims) if d > 0)
    m, u = F.mult_morphism(), F.unit_morphism()
    s = scalar_values(dagger(u) @ m @ dagger(m) @ u)
    supp = tuple(p for p, v in zip(F.base.points, s.values) if abs(v) > tol)
    if supp != U:
        raise VerificationError("support of eta^dag mu mu^dag eta differs from the support of the carrier")
    return U, restrict(F, U), s
