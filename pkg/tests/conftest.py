import numpy as np
from hypothesis import strategies as st

from frobase.base import BaseSpace
from frobase.hilbmod import BundleMorphism, HilbertBundle, Section


def points(n, prefix="t"):
    return BaseSpace([f"{prefix}{i}" for i in range(n)])


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_bundle(rng, X, max_dim=3, weights=True):
    dims = rng.integers(0, max_dim + 1, size=len(X))
    w = rng.uniform(0.3, 3.0, size=len(X)) if weights else np.ones(len(X))
    return HilbertBundle(X, tuple(dims), tuple(w))


def random_morphism(rng, E, F):
    return BundleMorphism(E, F, [crandn(rng, b, a) for a, b in zip(E.dims, F.dims)])


def random_section(rng, E):
    return Section(E, [crandn(rng, d) for d in E.dims])


seeds = st.integers(0, 2 ** 32 - 1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
