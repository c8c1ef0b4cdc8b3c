"""A short walk through the package: coverings, matrix blocks, rebasing, CP maps, bimodules."""
import numpy as np

from frobase import bimod
from frobase._linalg import random_unitary
from frobase.acceptance import algebra_map
from frobase.base import BaseSpace
from frobase.center import check_transitivity, rebase_isomorphism, rebase_over_center
from frobase.covering import frobenius_from_covering, make_covering, spectrum_isomorphism
from frobase.cpstar import choi_spectra, has_witness, is_completely_positive
from frobase.frobenius import (block_frobenius, classify_fibers, conjugate, specialise,
                               star_isomorphism_residual, trivial_frobenius, verify_laws)
from frobase.hilbmod import BundleMorphism

rng = np.random.default_rng(0)
X = BaseSpace(["a", "b"])

# A covering with two sheets over a and three over b
p = make_covering(["y1", "y2", "y3", "y4", "y5"], X, ["a", "a", "b", "b", "b"])
C = frobenius_from_covering(p)
rep = verify_laws(C)
print("covering structure, laws passing:", [k for k, v in rep.verdicts.items() if v])
print("  failing:", rep.failing(), "(speciality residual", rep.residuals["special"], ")")
print("  after specialise, special residual:", verify_laws(specialise(C)).residuals["special"])

# Its spectrum gives the covering back
cov, U, r = spectrum_isomorphism(C)
print("spectrum sheets:", cov.total.points, " isomorphism residual:", r)

# M2 + M3 over a, C + C + M2 over b, hidden behind random unitaries
F = block_frobenius(X, [[2, 3], [1, 1, 2]])
F = conjugate(F, [random_unitary(d, rng) for d in F.carrier.dims])
print("\nWedderburn blocks:", classify_fibers(F))

# Split every fiber over its center: one new point per simple block
rb = rebase_over_center(F)
print("new base:", rb.new_base.points)
print("new fiber dims:", rb.structure.carrier.dims)
U, composed = rebase_isomorphism(F, rb)
print("pushing forward recovers F, residual:", star_isomorphism_residual(U, F, composed))
t = check_transitivity(F)
print("special over C(X):", t.side_i, " special over the center:", t.side_ii)

# Transpose on M2 is positive but not completely positive
M2 = trivial_frobenius(BaseSpace(["t"]), [2])
T = BundleMorphism(M2.carrier, M2.carrier, [algebra_map(lambda x: x.T, [2], [2])])
print("\ntranspose Choi spectrum:", np.round(choi_spectra(T, M2, M2)[0], 12))
print("CP:", is_completely_positive(T, M2, M2), " CP* witness:", has_witness(T, M2, M2))
K = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
A = BundleMorphism(M2.carrier, M2.carrier, [algebra_map(lambda x: K @ x @ K.conj().T, [2], [2])])
print("x -> K x K^*, CP:", is_completely_positive(A, M2, M2), " CP* witness:", has_witness(A, M2, M2))

# Bimodules: composition multiplies dimension matrices; coherence is exact
Xs = [BaseSpace([f"{c}{i}" for i in range(n)]) for c, n in zip("wxyz", (2, 3, 2, 2))]
E, G, H = (bimod.random_cell1(Xs[i], Xs[i + 1], rng) for i in range(3))
print("\ndims(E o G) =\n", bimod.hcompose(E, G).dims)
rep = bimod.coherence_check(E, G, H)
print("pentagon:", rep["pentagon"], " triangle:", rep["triangle"], " unitary:", rep["unitary"])
