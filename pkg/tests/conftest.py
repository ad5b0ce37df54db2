"""Shared algebras, representations, and randomized generators.

Generators are seeded and deterministic: the randomized suites exercise the
same inputs on every run, which keeps machine-readable reports
byte-identical across runs.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pcoho.algebra import (
    PoissonAlgebra,
    Representation,
    adjoint_rep,
    change_basis,
    coadjoint_rep,
    direct_sum,
    trivial_rep,
)
from pcoho.matrix import Matrix, inverse

F = Fraction


def tensor(dim, entries):
    """Build a dim^3 structure tensor from {(i,j,k): value}."""
    t = [[[F(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j, k), val in entries.items():
        t[i][j][k] = F(val)
    return t


def lie_bracket_tensor(dim, brackets):
    """Antisymmetrized tensor from {(i,j): vector} with i < j."""
    t = [[[F(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j), vec in brackets.items():
        for k, val in enumerate(vec):
            t[i][j][k] = F(val)
            t[j][i][k] = -F(val)
    return t


# -- the named algebras used throughout the suite -------------------------------


@pytest.fixture(scope="session")
def a2():
    return PoissonAlgebra.abelian(2)


@pytest.fixture(scope="session")
def fixb():
    # one-dimensional: e.e = e, zero bracket
    return PoissonAlgebra(1, [[[1]]], [[[0]]])


@pytest.fixture(scope="session")
def sl2zero():
    return make_sl2zero()


def make_sl2zero():
    z = tensor(3, {})
    br = lie_bracket_tensor(3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)})
    return PoissonAlgebra(3, z, br, labels=("h", "e", "f"))


def make_aff():
    # 2-dim Lie algebra {s, n} = n with zero multiplication
    return PoissonAlgebra(2, tensor(2, {}), lie_bracket_tensor(2, {(0, 1): (0, 1)}))


def make_heis():
    return PoissonAlgebra(3, tensor(3, {}), lie_bracket_tensor(3, {(0, 1): (0, 0, 1)}))


def make_jet2():
    # k[x]/x^2: basis 1, x
    mult = tensor(2, {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1})
    return PoissonAlgebra(2, mult, tensor(2, {}))


def make_jet3():
    # k[x]/x^3: basis 1, x, x^2
    mult = tensor(3, {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (0, 2, 2): 1,
                      (2, 0, 2): 1, (1, 1, 2): 1})
    return PoissonAlgebra(3, mult, tensor(3, {}))


def make_mixjet():
    # basis 1, x, y with xx = xy = yy = 0 and {x, y} = x: both structures nonzero
    mult = tensor(3, {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (0, 2, 2): 1, (2, 0, 2): 1})
    return PoissonAlgebra(3, mult, lie_bracket_tensor(3, {(1, 2): (0, 1, 0)}))


@pytest.fixture(scope="session")
def mixjet():
    return make_mixjet()


@pytest.fixture(scope="session")
def aff():
    return make_aff()


def algebra_catalog():
    return [
        PoissonAlgebra.abelian(1),
        PoissonAlgebra.abelian(2),
        PoissonAlgebra.abelian(3),
        PoissonAlgebra(1, [[[1]]], [[[0]]]),
        make_jet2(),
        make_jet3(),
        make_sl2zero(),
        make_aff(),
        make_heis(),
        make_mixjet(),
        direct_sum(PoissonAlgebra(1, [[[1]]], [[[0]]]), PoissonAlgebra.abelian(1)),
        direct_sum(PoissonAlgebra(1, [[[1]]], [[[0]]]), make_aff()),
    ]


# -- randomized generation -------------------------------------------------------


def rand_unimodular(rng: random.Random, n: int, spread: int = 2) -> Matrix:
    """Random invertible integer matrix: product of unit triangulars."""
    lo = [[F(1) if i == j else F(0) for j in range(n)] for i in range(n)]
    hi = [[F(1) if i == j else F(0) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            lo[i][j] = F(rng.randint(-spread, spread))
            hi[j][i] = F(rng.randint(-spread, spread))
    g = Matrix(lo) * Matrix(hi)
    assert inverse(g) is not None
    return g


def rand_matrix(rng: random.Random, rows: int, cols: int, spread: int = 2,
                density: float = 0.7) -> Matrix:
    return Matrix([[F(rng.randint(-spread, spread)) if rng.random() < density else F(0)
                    for _ in range(cols)] for _ in range(rows)])


def conjugate_rep(v: Representation, t: Matrix) -> Representation:
    tinv = inverse(t)
    return Representation(v.dim, [tinv * m * t for m in v.mu], [tinv * m * t for m in v.rho])


def transport_rep(v: Representation, g: Matrix) -> Representation:
    """Reindex action matrices along an algebra basis change f_i = sum g[j][i] e_j."""
    n = g.rows
    mu = []
    rho = []
    for i in range(n):
        col = g.column_vector(i)
        mu.append(v.mu_of(col))
        rho.append(v.rho_of(col))
    return Representation(v.dim, mu, rho)


def random_poisson(rng: random.Random, max_dim: int = 3) -> PoissonAlgebra:
    candidates = [p for p in algebra_catalog() if p.dim <= max_dim]
    p = rng.choice(candidates)
    g = rand_unimodular(rng, p.dim)
    return change_basis(p, g)


def random_pair(rng: random.Random, max_dim: int = 3, max_vdim: int = 3):
    """A valid (algebra, representation) pair with small dimensions."""
    candidates = [p for p in algebra_catalog() if p.dim <= max_dim]
    p = rng.choice(candidates)
    g = rand_unimodular(rng, p.dim)
    p2 = change_basis(p, g)
    kind = rng.choice(["trivial1", "trivial2", "adjoint", "coadjoint"])
    if kind == "trivial1":
        v = trivial_rep(p2, 1)
    elif kind == "trivial2":
        v = trivial_rep(p2, 2)
    elif kind == "adjoint":
        v = adjoint_rep(p2)
    else:
        v = coadjoint_rep(p2)
    if v.dim > max_vdim:
        v = trivial_rep(p2, rng.randint(1, max_vdim))
    if v.dim and rng.random() < 0.5:
        t = rand_unimodular(rng, v.dim)
        v = conjugate_rep(v, t)
    return p2, v


def random_cocycle_pair(rng: random.Random, calc, spread: int = 3):
    """A random degree-2 cocycle (h, H) drawn from the kernel of the
    degree-2 coboundary, returned in tensor form."""
    from pcoho.cochain import coords_to_pair
    ker = calc.kernel(2)
    if ker.cols == 0:
        n, vd = calc.complex.p.dim, calc.complex.v.dim
        z = tuple((((F(0),) * vd,) * n,) * n)
        return z, z
    coeffs = [F(rng.randint(-spread, spread)) for _ in range(ker.cols)]
    coords = ker.apply(coeffs)
    return coords_to_pair(calc.complex, coords)
