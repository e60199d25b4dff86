"""Intersection theory of projective n-space and of its blow-up at a point.

The cohomology basis is H_0, ..., H_n, E_1, ..., E_{n-1}: H_i is the i-th
power of the hyperplane class pulled back under the blow-down map, and
E_i = -(-E)^i for the exceptional divisor E, so E_1 = E and every product
of two basis elements is again a basis element up to sign.  The relations
H*E = 0, H^{n+1} = 0 and E^n = (-1)^{n-1} H^n force the whole
multiplication table; E_n coincides with the point class H_n and is folded
into it, so products never leave the span of the basis.

Curve classes are written beta = d*H' - e*E' with H' the class of a line
in P^n and E' a line inside the exceptional divisor (so E' itself is the
pair (0, -1)).  Plain projective space uses the same encoding with e
pinned to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache, lru_cache
from typing import Iterable, NamedTuple

PLAIN = "plain"
BLOWUP = "blowup"

_FAMILIES = ("H", "E")


class BasisIndex(NamedTuple):
    """A basis element H_i or E_i; ``level`` equals the codimension.

    The family is stored as a rank (0 for H, 1 for E) so that plain tuple
    comparison realises the fixed total order: H-family first, then level.
    """

    family_rank: int
    level: int

    @property
    def family(self) -> str:
        return _FAMILIES[self.family_rank]

    @property
    def codim(self) -> int:
        return self.level

    @property
    def token(self) -> str:
        return f"{self.family}{self.level}"

    def __repr__(self) -> str:  # keeps test output readable
        return self.token


@lru_cache(maxsize=None)
def H(level: int) -> BasisIndex:
    return BasisIndex(0, level)


@lru_cache(maxsize=None)
def E(level: int) -> BasisIndex:
    return BasisIndex(1, level)


def parse_token(token: str) -> BasisIndex:
    """Inverse of BasisIndex.token, e.g. "H2" -> H(2)."""
    family, level = token[:1], token[1:]
    if family not in _FAMILIES or not level.isdigit():
        raise ValueError(f"bad class token {token!r}")
    return H(int(level)) if family == "H" else E(int(level))


def sort_classes(classes: Iterable[BasisIndex]) -> tuple[BasisIndex, ...]:
    """Multiset of insertions in the fixed total order."""
    return tuple(sorted(classes))


class CurveClass(NamedTuple):
    """beta = d*H' - e*E'; plain projective space keeps e = 0."""

    d: int
    e: int = 0


ZERO_CLASS = CurveClass(0, 0)


@dataclass(frozen=True, eq=True)
class CohClass:
    """Sparse integer linear combination of basis elements."""

    coeffs: dict[BasisIndex, int]

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {b: c for b, c in self.coeffs.items() if c}
        )

    @classmethod
    def of(cls, b: BasisIndex, coeff: int = 1) -> "CohClass":
        return cls({b: coeff})

    def get(self, b: BasisIndex) -> int:
        return self.coeffs.get(b, 0)

    def is_homogeneous(self) -> bool:
        return len({b.level for b in self.coeffs}) <= 1


@dataclass(frozen=True)
class Geometry:
    """P^n (kind "plain") or P^n blown up at one point (kind "blowup")."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (PLAIN, BLOWUP):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("n >= 2 required; at n = 1 the exceptional basis is empty")

    @classmethod
    def plain(cls, n: int) -> "Geometry":
        return cls(PLAIN, n)

    @classmethod
    def blowup(cls, n: int) -> "Geometry":
        return cls(BLOWUP, n)

    # -- basis and ring -------------------------------------------------

    @property
    def point(self) -> BasisIndex:
        return H(self.n)

    @cache
    def basis(self) -> tuple[BasisIndex, ...]:
        hs = tuple(H(i) for i in range(self.n + 1))
        if self.kind == PLAIN:
            return hs
        return hs + tuple(E(i) for i in range(1, self.n))

    def contains(self, b: BasisIndex) -> bool:
        if b.family_rank == 0:
            return 0 <= b.level <= self.n
        return self.kind == BLOWUP and 1 <= b.level <= self.n - 1

    def check_classes(self, classes: Iterable[BasisIndex]) -> None:
        for b in classes:
            if not self.contains(b):
                raise ValueError(
                    f"{b.token} is not a basis element of {self.kind} P^{self.n}"
                )

    def divisors(self) -> tuple[BasisIndex, ...]:
        return (H(1),) if self.kind == PLAIN else (H(1), E(1))

    def cup_basis(self, a: BasisIndex, b: BasisIndex) -> tuple[int, BasisIndex | None]:
        """Product of two basis elements as (sign, element); (0, None) if zero.

        H_i H_j = H_{i+j}, E_i E_j = -E_{i+j} with E_n read as the point
        class H_n, mixed products vanish, H_0 is the identity.
        """
        if a.level == 0:
            return 1, b
        if b.level == 0:
            return 1, a
        if a.family_rank != b.family_rank:
            return 0, None
        s = a.level + b.level
        if s > self.n:
            return 0, None
        if a.family_rank == 0:
            return 1, H(s)
        return -1, (H(self.n) if s == self.n else E(s))

    def cup(self, a, b) -> CohClass:
        """Bilinear extension of cup_basis to sparse classes."""
        ca = a if isinstance(a, CohClass) else CohClass.of(a)
        cb = b if isinstance(b, CohClass) else CohClass.of(b)
        self.check_classes(ca.coeffs)
        self.check_classes(cb.coeffs)
        out: dict[BasisIndex, int] = {}
        for x, cx in ca.coeffs.items():
            for y, cy in cb.coeffs.items():
                s, z = self.cup_basis(x, y)
                if z is not None:
                    out[z] = out.get(z, 0) + s * cx * cy
        return CohClass(out)

    def degree(self, a) -> int:
        """Coefficient of the point class H_n."""
        if isinstance(a, BasisIndex):
            return 1 if a == self.point else 0
        return a.get(self.point)

    def pairing(self, a: BasisIndex, b: BasisIndex) -> int:
        """Poincare pairing = degree of the cup product of two basis elements."""
        if a.family_rank != b.family_rank or a.level + b.level != self.n:
            return 0
        return 1 if a.family_rank == 0 else -1

    @cache
    def diagonal_pairs(self) -> tuple[tuple[BasisIndex, BasisIndex, int], ...]:
        """Inverse-pairing decomposition of the diagonal class.

        Defining property: x == sum over (a, b, s) of s * pairing(x, a) * b
        for every basis element x.
        """
        pairs = [(H(i), H(self.n - i), 1) for i in range(self.n + 1)]
        if self.kind == BLOWUP:
            pairs += [(E(i), E(self.n - i), -1) for i in range(1, self.n)]
        return tuple(pairs)

    @cache
    def diagonal_by_codim(self, c: int) -> tuple[tuple[BasisIndex, BasisIndex, int], ...]:
        return tuple(p for p in self.diagonal_pairs() if p[0].level == c)

    # -- curve classes ---------------------------------------------------

    def check_beta(self, beta: CurveClass) -> None:
        if self.kind == PLAIN and beta.e != 0:
            raise ValueError("plain projective space has no exceptional curves; e must be 0")

    def curve_pairing(self, div: BasisIndex, beta: CurveClass) -> int:
        """Intersection of a divisor class with beta: H.beta = d, E.beta = e."""
        if div.level != 1:
            raise ValueError(f"{div.token} is not a divisor class")
        return beta.d if div.family_rank == 0 else beta.e

    def vdim(self, beta: CurveClass, npoints: int) -> int:
        """Expected dimension of the npoints-pointed genus-zero moduli space."""
        return (self.n + 1) * beta.d - (self.n - 1) * beta.e + self.n - 3 + npoints

    def is_effective(self, beta: CurveClass) -> bool:
        """Membership in the curve cone (spanned by H'-E' and E' on the blow-up)."""
        d, e = beta
        if self.kind == PLAIN:
            return e == 0 and d >= 0
        if d == 0:
            return e <= 0
        return d > 0 and e <= d

    def mass(self, beta: CurveClass) -> int:
        """Degree against the fixed ample class 2H - E; the induction measure."""
        if self.kind == PLAIN:
            return beta.d
        return 2 * beta.d - beta.e

    @cache
    def splittings(self, beta: CurveClass) -> tuple[tuple[CurveClass, CurveClass], ...]:
        """All ordered decompositions beta = b1 + b2 into nonzero effective parts."""
        if self.kind == PLAIN:
            return tuple(
                (CurveClass(k, 0), CurveClass(beta.d - k, 0))
                for k in range(1, beta.d)
            )
        out = []
        for d1 in range(beta.d + 1):
            d2 = beta.d - d1
            # cone bounds: e1 <= d1 and beta.e - e1 <= d2
            for e1 in range(beta.e - d2, d1 + 1):
                b1 = CurveClass(d1, e1)
                b2 = CurveClass(d2, beta.e - e1)
                if (
                    b1 != ZERO_CLASS
                    and b2 != ZERO_CLASS
                    and self.is_effective(b1)
                    and self.is_effective(b2)
                ):
                    out.append((b1, b2))
        return tuple(out)

    def decompose(self, g: BasisIndex) -> tuple[BasisIndex, BasisIndex, int]:
        """Write g = sign * (divisor cup rest), exactly, for codim >= 2 basis g."""
        if g.level < 2:
            raise ValueError(f"{g.token} has codimension < 2")
        if g.family_rank == 0:
            return H(1), H(g.level - 1), 1
        return E(1), E(g.level - 1), -1
