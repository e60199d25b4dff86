"""Ring structure, pairings, curve cone and dimension formulas."""

import itertools

import pytest

from conftest import cup_oracle

from gwblowup.geometry import (
    CohClass,
    CurveClass,
    Geometry,
    E,
    H,
    parse_token,
    sort_classes,
)


def geometries(nmax=5):
    for n in range(2, nmax + 1):
        yield Geometry.plain(n)
        yield Geometry.blowup(n)


# -- basis bookkeeping -------------------------------------------------


def test_geometry_rejects_n_below_2():
    with pytest.raises(ValueError):
        Geometry.blowup(1)
    with pytest.raises(ValueError):
        Geometry.plain(0)
    with pytest.raises(ValueError):
        Geometry("banana", 3)


def test_basis_sizes():
    assert len(Geometry.plain(4).basis()) == 5
    assert len(Geometry.blowup(4).basis()) == 8  # n+1 H's plus n-1 E's


def test_total_order_h_family_first():
    assert sort_classes([E(1), H(2), H(1), E(2)]) == (H(1), H(2), E(1), E(2))


def test_tokens_roundtrip():
    for g in geometries():
        for b in g.basis():
            assert parse_token(b.token) == b
    with pytest.raises(ValueError):
        parse_token("Q3")


def test_exceptional_divisor_is_a_divisor_for_n2():
    g = Geometry.blowup(2)
    assert E(1) in g.basis() and E(1).codim == 1
    assert g.divisors() == (H(1), E(1))


# -- cup product: frozen examples and the symbolic oracle ----------------


def test_cup_examples():
    g2, g3 = Geometry.blowup(2), Geometry.blowup(3)
    assert g2.cup_basis(H(1), H(1)) == (1, H(2))
    assert g3.cup_basis(E(1), E(1)) == (-1, E(2))
    assert g3.cup_basis(E(1), E(2)) == (-1, H(3))  # -E_3 is -pt
    assert g3.cup_basis(H(1), E(1)) == (0, None)
    assert g3.cup_basis(H(0), E(2)) == (1, E(2))


def test_cup_matches_symbolic_oracle_exhaustively():
    for g in geometries():
        for a in g.basis():
            for b in g.basis():
                got = g.cup(a, b).coeffs
                assert got == cup_oracle(g.n, a, b), (g, a, b)


def test_cup_commutative_and_associative_exhaustively():
    for g in geometries():
        basis = g.basis()
        for a, b in itertools.product(basis, repeat=2):
            assert g.cup(a, b) == g.cup(b, a)
        for a, b, c in itertools.product(basis, repeat=3):
            assert g.cup(g.cup(a, b), c) == g.cup(a, g.cup(b, c))


def test_cup_rejects_foreign_classes():
    with pytest.raises(ValueError):
        Geometry.plain(3).cup(E(1), H(1))
    with pytest.raises(ValueError):
        Geometry.blowup(3).cup(E(3), H(1))


def test_degree_examples():
    g3 = Geometry.blowup(3)
    assert g3.degree(H(3)) == 1
    assert g3.degree(E(1)) == 0
    cubed = g3.cup(g3.cup(E(1), E(1)), E(1))
    assert g3.degree(cubed) == 1  # E^3 = +pt for n = 3


def test_cohclass_drops_zeros_and_tests_homogeneity():
    c = CohClass({H(1): 0, H(2): 3})
    assert c.coeffs == {H(2): 3}
    assert c.is_homogeneous()
    assert not CohClass({H(1): 1, H(2): 1}).is_homogeneous()


# -- pairing and diagonal -------------------------------------------------


def test_pairing_examples():
    assert Geometry.blowup(2).pairing(H(1), H(1)) == 1
    assert Geometry.blowup(3).pairing(E(1), E(2)) == -1
    assert Geometry.blowup(3).pairing(H(2), E(1)) == 0


def test_pairing_is_degree_of_cup():
    for g in geometries():
        for a in g.basis():
            for b in g.basis():
                assert g.pairing(a, b) == g.degree(g.cup(a, b))


def test_diagonal_pairs_blowup_n2():
    g = Geometry.blowup(2)
    assert g.diagonal_pairs() == (
        (H(0), H(2), 1),
        (H(1), H(1), 1),
        (H(2), H(0), 1),
        (E(1), E(1), -1),
    )
    assert Geometry.plain(2).diagonal_pairs() == (
        (H(0), H(2), 1),
        (H(1), H(1), 1),
        (H(2), H(0), 1),
    )


def test_diagonal_reproduces_every_basis_element():
    for g in geometries():
        for x in g.basis():
            acc = {}
            for a, b, s in g.diagonal_pairs():
                c = s * g.pairing(x, a)
                if c:
                    acc[b] = acc.get(b, 0) + c
            assert {k: v for k, v in acc.items() if v} == {x: 1}


# -- curve classes ---------------------------------------------------------


def test_curve_pairing_examples():
    g = Geometry.blowup(3)
    assert g.curve_pairing(H(1), CurveClass(3, 2)) == 3
    assert g.curve_pairing(E(1), CurveClass(0, -1)) == -1
    assert g.curve_pairing(E(1), CurveClass(1, 1)) == 1
    with pytest.raises(ValueError):
        g.curve_pairing(H(2), CurveClass(1, 0))


def test_vdim_examples():
    assert Geometry.blowup(2).vdim(CurveClass(3, 2), 6) == 12
    assert Geometry.blowup(3).vdim(CurveClass(1, 0), 2) == 6
    assert Geometry.plain(2).vdim(CurveClass(1, 0), 3) == 5


def test_effectivity_examples():
    g = Geometry.blowup(2)
    assert g.is_effective(CurveClass(1, 1))
    assert not g.is_effective(CurveClass(1, 2))
    assert g.is_effective(CurveClass(0, -1))
    assert g.is_effective(CurveClass(0, 0))
    assert not g.is_effective(CurveClass(-1, -1))
    assert Geometry.plain(2).is_effective(CurveClass(2, 0))
    assert not Geometry.plain(2).is_effective(CurveClass(-1, 0))


def test_mass_examples_and_positivity():
    g = Geometry.blowup(4)
    assert g.mass(CurveClass(1, 0)) == 2
    assert g.mass(CurveClass(0, -1)) == 1
    assert g.mass(CurveClass(1, 1)) == 1
    for d in range(0, 7):
        for e in range(-7, 7):
            beta = CurveClass(d, e)
            if g.is_effective(beta) and beta != CurveClass(0, 0):
                assert g.mass(beta) >= 1


def test_mass_additive_over_splittings():
    g = Geometry.blowup(3)
    for d in range(0, 5):
        for e in range(-4, d + 1):
            beta = CurveClass(d, e)
            if not g.is_effective(beta) or beta == CurveClass(0, 0):
                continue
            for b1, b2 in g.splittings(beta):
                assert g.mass(b1) + g.mass(b2) == g.mass(beta)
                assert g.is_effective(b1) and g.is_effective(b2)


def test_splittings_examples():
    g = Geometry.blowup(2)
    assert g.splittings(CurveClass(1, 1)) == ()
    got = g.splittings(CurveClass(2, 0))
    expect = {
        (CurveClass(0, -1), CurveClass(2, 1)),
        (CurveClass(0, -2), CurveClass(2, 2)),
        (CurveClass(1, -1), CurveClass(1, 1)),
        (CurveClass(1, 0), CurveClass(1, 0)),
        (CurveClass(1, 1), CurveClass(1, -1)),
        (CurveClass(2, 1), CurveClass(0, -1)),
        (CurveClass(2, 2), CurveClass(0, -2)),
    }
    assert set(got) == expect and len(got) == 7
    assert Geometry.plain(2).splittings(CurveClass(2, 0)) == (
        (CurveClass(1, 0), CurveClass(1, 0)),
    )


def test_splittings_symmetric():
    g = Geometry.blowup(3)
    for d in range(0, 5):
        for e in range(-4, d + 1):
            beta = CurveClass(d, e)
            if not g.is_effective(beta) or beta == CurveClass(0, 0):
                continue
            pairs = set(g.splittings(beta))
            assert {(b2, b1) for b1, b2 in pairs} == pairs


def test_decompose_examples_and_exactness():
    g3 = Geometry.blowup(3)
    assert g3.decompose(H(2)) == (H(1), H(1), 1)
    assert g3.decompose(E(2)) == (E(1), E(1), -1)
    assert Geometry.blowup(4).decompose(E(3)) == (E(1), E(2), -1)
    with pytest.raises(ValueError):
        g3.decompose(E(1))
    for g in geometries():
        for gamma in g.basis():
            if gamma.codim < 2:
                continue
            div, head, sign = g.decompose(gamma)
            assert g.cup(div, head) == CohClass({gamma: sign})
