"""Shared fixtures and the symbolic ring oracle used by the geometry tests.

The oracle reduces products in Z[h, x] modulo (h*x, h^{n+1}, x^n - (-1)^{n-1} h^n)
— h the hyperplane class, x the exceptional divisor — completely independently
of the production multiplication table, and converts back to the E_i = -(-x)^i
basis.
"""

from __future__ import annotations

import pytest

from gwblowup import Engine, Geometry
from gwblowup.geometry import BasisIndex, E, H


def monomials_of(b: BasisIndex) -> dict[tuple[int, int], int]:
    """A basis element as a polynomial in (h-power, x-power) monomials."""
    if b.family == "H":
        return {(b.level, 0): 1}
    # E_i = -(-x)^i = -(-1)^i x^i
    return {(0, b.level): -((-1) ** b.level)}


def reduce_monomial(i: int, j: int, n: int) -> dict[tuple[int, int], int]:
    """Normal form of h^i x^j in the quotient ring."""
    if i > 0 and j > 0:
        return {}
    if i > n or j > n:
        return {}
    if j == n:
        return {(n, 0): (-1) ** (n - 1)}  # x^n = (-1)^{n-1} h^n
    return {(i, j): 1}


def poly_mul(p: dict, q: dict, n: int) -> dict:
    out: dict[tuple[int, int], int] = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            for mono, s in reduce_monomial(i1 + i2, j1 + j2, n).items():
                out[mono] = out.get(mono, 0) + s * c1 * c2
    return {m: c for m, c in out.items() if c}


def to_basis(p: dict, n: int) -> dict[BasisIndex, int]:
    """Convert a reduced polynomial back to basis coordinates."""
    out: dict[BasisIndex, int] = {}
    for (i, j), c in p.items():
        if j == 0:
            b, coeff = H(i), c
        else:
            assert i == 0 and 1 <= j <= n - 1
            # x^j = (-1)^{j+1} E_j
            b, coeff = E(j), c * ((-1) ** (j + 1))
        out[b] = out.get(b, 0) + coeff
    return {b: c for b, c in out.items() if c}


def cup_oracle(n: int, a: BasisIndex, b: BasisIndex) -> dict[BasisIndex, int]:
    return to_basis(poly_mul(monomials_of(a), monomials_of(b), n), n)


@pytest.fixture(scope="session")
def blowup2() -> Engine:
    return Engine(Geometry.blowup(2))


@pytest.fixture(scope="session")
def blowup3() -> Engine:
    return Engine(Geometry.blowup(3))


@pytest.fixture(scope="session")
def plain2() -> Engine:
    return Engine(Geometry.plain(2))


@pytest.fixture(scope="session")
def plain3() -> Engine:
    return Engine(Geometry.plain(3))
