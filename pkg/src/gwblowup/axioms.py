"""Genus-zero axioms: canonical form of invariant queries and seed values.

A raw query (geometry, curve class, multiset of insertions) is reduced by,
in order: effectivity of the curve class, the grading condition, the
fundamental-class axiom, classical evaluation at beta = 0, and the divisor
axiom.  What survives is either one of the degree-one three-point seeds or
a canonical key, i.e. at least three insertions all of codimension >= 2,
which is handed to the reconstruction engine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Union

from .geometry import (
    BLOWUP,
    BasisIndex,
    CurveClass,
    Geometry,
    ZERO_CLASS,
    E,
    H,
    sort_classes,
)

Scalar = Union[int, Fraction]


def normalize_scalar(x: Scalar) -> Scalar:
    """Collapse integral fractions to int; keeps arithmetic on the fast path."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


class InvariantKey(NamedTuple):
    """One canonical invariant: geometry tag, curve class, sorted insertions."""

    kind: str
    n: int
    d: int
    e: int
    classes: tuple[BasisIndex, ...]

    @property
    def beta(self) -> CurveClass:
        return CurveClass(self.d, self.e)

    def render(self) -> str:
        inside = ",".join(b.token for b in self.classes)
        return f"<{inside} | {self.d},{self.e}>{self.kind}P{self.n}"


class EvalResult(NamedTuple):
    """Either a settled value (key is None, scalar is the value) or a
    canonical key together with a nonzero multiplier."""

    key: InvariantKey | None
    scalar: Scalar

    @property
    def is_value(self) -> bool:
        return self.key is None


def value_result(v: Scalar) -> EvalResult:
    return EvalResult(None, v)


def classical_triple(geom: Geometry, a: BasisIndex, b: BasisIndex, c: BasisIndex) -> int:
    """deg(a.b.c), the triple intersection number of the ring itself."""
    s1, z = geom.cup_basis(a, b)
    if z is None:
        return 0
    s2, w = geom.cup_basis(z, c)
    if w is None:
        return 0
    return s1 * s2 * geom.degree(w)


def initial_three_point(
    geom: Geometry, classes: Iterable[BasisIndex], beta: CurveClass
) -> int:
    """Three-point invariants with a divisor insertion: the reconstruction seeds.

    The only nonzero cases are <pt, pt, H> on the line class, the count
    <E_{n-1}, E_{n-1}, E> = -1 on the exceptional line, and every basis
    triple of total codimension n + 2 on the line through the blown-up
    point.  Everything else with a divisor slot vanishes.
    """
    cs = sort_classes(classes)
    assert len(cs) == 3 and any(b.level == 1 for b in cs), "needs a divisor slot"
    n = geom.n
    if beta == CurveClass(1, 0) and cs == (H(1), H(n), H(n)):
        return 1
    if geom.kind == BLOWUP:
        if beta == CurveClass(0, -1) and cs == sort_classes((E(1), E(n - 1), E(n - 1))):
            return -1
        if beta == CurveClass(1, 1) and sum(b.level for b in cs) == n + 2:
            return 1
    return 0


def canonicalize(
    geom: Geometry,
    beta: CurveClass,
    classes: Iterable[BasisIndex],
    trace: list[str] | None = None,
) -> EvalResult:
    """Reduce a raw query by the axioms, in a fixed order.

    Divisors are stripped greatest-first (E before H) and never below three
    insertions; a three-point query that retains a divisor is settled from
    the seed table.  The multiplier collects the divisor-axiom factors.
    """
    cs = sort_classes(classes)
    if not geom.is_effective(beta):
        if trace is not None:
            trace.append(f"effectivity: beta = ({beta.d},{beta.e}) not effective -> 0")
        return value_result(0)
    total = sum(b.level for b in cs)
    if total != geom.vdim(beta, len(cs)):
        if trace is not None:
            trace.append(
                f"grading: total codim {total} != vdim {geom.vdim(beta, len(cs))} -> 0"
            )
        return value_result(0)
    if cs and cs[0].level == 0:  # sorted, so any H0 sits in front
        if beta == ZERO_CLASS and len(cs) == 3:
            v = classical_triple(geom, *cs)
            if trace is not None:
                trace.append(f"classical: deg({'.'.join(b.token for b in cs)}) = {v}")
            return value_result(v)
        if trace is not None:
            trace.append("fundamental class: H0 insertion -> 0")
        return value_result(0)
    if beta == ZERO_CLASS:
        if len(cs) == 3:
            v = classical_triple(geom, *cs)
            if trace is not None:
                trace.append(f"classical: deg({'.'.join(b.token for b in cs)}) = {v}")
            return value_result(v)
        if trace is not None:
            trace.append("beta = 0 with N != 3 -> 0")
        return value_result(0)
    work = list(cs)
    mult = 1
    while len(work) >= 4:
        at = -1
        for i, b in enumerate(work):
            if b.level == 1:
                at = i  # last hit wins: greatest divisor in the total order
        if at < 0:
            break
        div = work.pop(at)
        factor = geom.curve_pairing(div, beta)
        if trace is not None:
            trace.append(f"divisor axiom: strip {div.token}, factor {factor}")
        if factor == 0:
            return value_result(0)
        mult *= factor
    if len(work) == 3 and any(b.level == 1 for b in work):
        seed = initial_three_point(geom, work, beta)
        if trace is not None:
            trace.append(
                f"seed: <{','.join(b.token for b in work)} | "
                f"{beta.d},{beta.e}> = {seed}"
            )
        return value_result(mult * seed)
    key = InvariantKey(geom.kind, geom.n, beta.d, beta.e, tuple(work))
    if trace is not None:
        trace.append(f"canonical: {key.render()} x {mult}")
    return EvalResult(key, mult)


def lift_small_n(
    geom: Geometry,
    beta: CurveClass,
    classes: Iterable[BasisIndex],
    trace: list[str] | None = None,
) -> EvalResult:
    """Resolve a query with fewer than three insertions by inserting divisors.

    The divisor axiom read backwards: insert D and divide by D.beta, with
    D = H when d is nonzero and D = E otherwise, so the factor never
    vanishes on a nonzero effective class.
    """
    cs = sort_classes(classes)
    assert beta != ZERO_CLASS and geom.is_effective(beta) and len(cs) < 3
    total = sum(b.level for b in cs)
    if total != geom.vdim(beta, len(cs)):
        if trace is not None:
            trace.append(
                f"grading: total codim {total} != vdim {geom.vdim(beta, len(cs))} -> 0"
            )
        return value_result(0)
    div = H(1) if beta.d != 0 else E(1)
    factor = geom.curve_pairing(div, beta)
    assert factor != 0
    if trace is not None:
        trace.append(f"lift: insert {div.token}, divide by {factor}")
    inner = resolve(geom, beta, cs + (div,), trace)
    return EvalResult(inner.key, normalize_scalar(inner.scalar * Fraction(1, factor)))


def resolve(
    geom: Geometry,
    beta: CurveClass,
    classes: Iterable[BasisIndex],
    trace: list[str] | None = None,
) -> EvalResult:
    """canonicalize, with small insertion counts lifted through divisors first."""
    cs = tuple(classes)
    if len(cs) < 3 and beta != ZERO_CLASS and geom.is_effective(beta):
        return lift_small_n(geom, beta, cs, trace)
    return canonicalize(geom, beta, cs, trace)
