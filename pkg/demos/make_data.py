"""Write the sample JSON inputs in demos/data used by the README and the CLI tests."""
from pathlib import Path

import numpy as np

from frobase import bimod, io
from frobase._linalg import random_unitary
from frobase.acceptance import algebra_map
from frobase.base import BaseSpace
from frobase.covering import frobenius_from_covering, make_covering
from frobase.frobenius import FrobeniusStructure, block_frobenius, conjugate, trivial_frobenius
from frobase.hilbmod import BundleMorphism

OUT = Path(__file__).parent / "data"


def write(name, obj):
    OUT.mkdir(exist_ok=True)
    (OUT / f"{name}.json").write_text(io.dumps(obj, compact=True))


def main():
    rng = np.random.default_rng(7)

    # two sheets over a, three over b
    p = make_covering(["y1", "y2", "y3", "y4", "y5"], ["a", "b"],
                      {"y1": "a", "y2": "a", "y3": "b", "y4": "b", "y5": "b"})
    write("covering", io.covering_to_json(p))
    write("covering_structure", io.frobenius_to_json(frobenius_from_covering(p)))

    X = BaseSpace(["a", "b"])
    F = trivial_frobenius(X, [1, 2])
    write("trivial_1_2", io.frobenius_to_json(F))
    noisy = [m + 1e-3 * rng.standard_normal(m.shape) for m in F.mult]
    write("perturbed", io.frobenius_to_json(FrobeniusStructure(F.carrier, noisy, F.unit)))

    # M2 + M3 over a, C + C + M2 over b, in a random orthonormal basis
    H = block_frobenius(X, [[2, 3], [1, 1, 2]])
    H = conjugate(H, [random_unitary(d, rng) for d in H.carrier.dims])
    write("blocks_conjugated", io.frobenius_to_json(H))

    M2 = trivial_frobenius(BaseSpace(["t"]), [2])
    write("m2", io.frobenius_to_json(M2))
    transpose = algebra_map(lambda x: x.T, [2], [2])
    write("transpose", io.morphism_to_json(BundleMorphism(M2.carrier, M2.carrier, [transpose])))
    K = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    channel = algebra_map(lambda x: K @ x @ K.conj().T, [2], [2])
    write("conjugation_channel", io.morphism_to_json(BundleMorphism(M2.carrier, M2.carrier, [channel])))

    Xs = [BaseSpace([f"{c}{i}" for i in range(n)]) for c, n in zip("wxyzv", (2, 3, 2, 1, 2))]
    cells = [bimod.random_cell1(Xs[i], Xs[i + 1], rng, 2) for i in range(4)]
    write("cells", {"cells": [io.cell1_to_json(c) for c in cells]})


if __name__ == "__main__":
    main()
