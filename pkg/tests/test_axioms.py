"""Canonicalization pipeline, classical triples, seeds and small-N lifting."""

import random
from fractions import Fraction


from gwblowup.axioms import (
    InvariantKey,
    canonicalize,
    classical_triple,
    initial_three_point,
    lift_small_n,
    normalize_scalar,
    resolve,
)
from gwblowup.geometry import CurveClass, Geometry, E, H

G2 = Geometry.blowup(2)
G3 = Geometry.blowup(3)
P2 = Geometry.plain(2)
P3 = Geometry.plain(3)


def test_normalize_scalar():
    assert normalize_scalar(Fraction(6, 3)) == 2
    assert isinstance(normalize_scalar(Fraction(6, 3)), int)
    assert normalize_scalar(Fraction(1, 2)) == Fraction(1, 2)
    assert normalize_scalar(5) == 5


def test_classical_triple_examples():
    assert classical_triple(P2, H(1), H(1), H(0)) == 1
    assert classical_triple(G3, E(1), E(1), E(1)) == 1  # E^3 = +pt
    assert classical_triple(G3, H(1), E(1), E(1)) == 0
    assert classical_triple(G2, E(1), E(1), H(0)) == -1  # E^2 = -pt


def test_initial_three_point_seeds():
    assert initial_three_point(G2, (H(2), H(2), H(1)), CurveClass(1, 0)) == 1
    assert initial_three_point(G3, (E(2), E(2), E(1)), CurveClass(0, -1)) == -1
    assert initial_three_point(G2, (H(2), H(1), E(1)), CurveClass(1, 1)) == 1
    assert initial_three_point(G3, (H(3), H(1), E(1)), CurveClass(1, 1)) == 1
    # anything else with a divisor slot is zero
    assert initial_three_point(G3, (H(3), H(3), H(1)), CurveClass(2, 0)) == 0
    assert initial_three_point(G3, (E(2), E(2), E(1)), CurveClass(0, -2)) == 0
    assert initial_three_point(P3, (H(3), H(3), H(1)), CurveClass(1, 0)) == 1


def test_initial_three_point_symmetric():
    rng = random.Random(5)
    pool = G3.basis()
    betas = [CurveClass(1, 0), CurveClass(0, -1), CurveClass(1, 1), CurveClass(2, 1)]
    for _ in range(200):
        trio = [rng.choice(pool) for _ in range(3)]
        if not any(b.level == 1 for b in trio):
            continue
        beta = rng.choice(betas)
        vals = {
            initial_three_point(G3, (trio[i], trio[j], trio[k]), beta)
            for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2))
        }
        assert len(vals) == 1


def test_canonicalize_strips_divisors_with_multiplier():
    res = canonicalize(G2, CurveClass(2, 0), (H(1),) + (H(2),) * 5)
    assert res.key == InvariantKey("blowup", 2, 2, 0, (H(2),) * 5)
    assert res.scalar == 2


def test_canonicalize_zero_routes():
    pt = H(2)
    # not effective
    assert canonicalize(G2, CurveClass(1, 2), (pt, pt, pt)).scalar == 0
    # fundamental class with beta != 0
    assert canonicalize(G2, CurveClass(1, 0), (H(0), pt, pt)) == (None, 0)
    # grading violation
    assert canonicalize(G2, CurveClass(1, 0), (pt, pt, pt)).scalar == 0
    # divisor pairing zero: E.beta = 0 kills the query at N >= 4
    res = canonicalize(G2, CurveClass(2, 0), (E(1),) + (pt,) * 5)
    assert res == (None, 0)


def test_canonicalize_grading_soundness_exhaustive():
    import itertools

    pt = H(2)
    pool = G2.basis()
    for beta in (CurveClass(1, 0), CurveClass(2, 1), CurveClass(0, -1)):
        for k in (3, 4):
            for combo in itertools.combinations_with_replacement(pool, k):
                total = sum(b.level for b in combo)
                if total != G2.vdim(beta, k):
                    res = canonicalize(G2, beta, combo)
                    assert res == (None, 0), (beta, combo)


def test_canonicalize_classical_beta_zero():
    assert canonicalize(G3, CurveClass(0, 0), (H(1), H(1), H(1))).scalar == 1
    assert canonicalize(G3, CurveClass(0, 0), (H(0), H(0), H(3))).scalar == 1
    # beta = 0 with N != 3 vanishes (grading can hold only for N = 3 triples here)
    assert canonicalize(G3, CurveClass(0, 0), (H(1), H(1), H(1), H(0))).scalar == 0


def test_canonicalize_permutation_invariant():
    rng = random.Random(11)
    pool = G3.basis()
    for _ in range(300):
        beta = CurveClass(rng.randint(0, 3), rng.randint(-3, 3))
        classes = [rng.choice(pool) for _ in range(rng.randint(3, 8))]
        ref = canonicalize(G3, beta, classes)
        rng.shuffle(classes)
        assert canonicalize(G3, beta, classes) == ref


def test_canonicalize_seed_endpoint():
    # stripping stops at three insertions and reads the seed table
    res = canonicalize(G2, CurveClass(1, 0), (H(1), H(1), H(2), H(2)))
    assert res == (None, 1)  # strip one H (factor 1), then <pt,pt,H> = 1
    res = canonicalize(G2, CurveClass(1, 1), (H(2), H(1), E(1)))
    assert res == (None, 1)  # codims 2+1+1 = n+2


def test_lift_small_n_examples():
    assert resolve(G3, CurveClass(1, 0), (H(3), H(3))) == (None, 1)
    assert resolve(G3, CurveClass(1, 1), (E(2), E(2))) == (None, 1)
    assert resolve(G3, CurveClass(1, 2), ()) == (None, 0)  # not effective
    assert resolve(G2, CurveClass(2, 2), (H(2),)).scalar == 0  # grading fails
    # pure exceptional class lifts through E: seed -1 divided by E.beta = -1
    assert resolve(G2, CurveClass(0, -1), (E(1), E(1))) == (None, 1)


def test_lift_small_n_is_well_defined():
    # lifting <pt,pt> on the line equals stripping the same two divisors back off
    lifted = resolve(G3, CurveClass(1, 0), (H(3), H(3)))
    stripped = canonicalize(G3, CurveClass(1, 0), (H(3), H(3), H(1), H(1)))
    assert lifted.scalar * 1 == stripped.scalar  # both settle to the seed value 1
    assert lifted == stripped


def test_lift_small_n_multiplier_divides():
    # <pt^4 (2,0)> needs one lift through H with factor 2
    inner = canonicalize(G2, CurveClass(2, 0), (H(2),) * 5 + (H(1),))
    outer = lift_small_n(G2, CurveClass(2, 0), ())
    # degenerate call shapes: direct 0-insertion query at (2,0) violates grading
    assert outer == (None, 0)
    assert inner.scalar == 2
