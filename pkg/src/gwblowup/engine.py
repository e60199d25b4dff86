"""Reconstruction engine: associativity relations, exact level solves, memo.

Canonical invariants are grouped into levels (curve class, insertion
count), ordered by (mass, insertion count).  Splitting the curve class
strictly lowers the mass and stripping a divisor lowers the insertion
count, so each level yields a finite linear system over exact rationals
whose inhomogeneous part only involves strictly smaller levels.  Relations
are generated lazily: targeted at each unknown first, widening to the full
associativity family only while the system stays rank-deficient.

The engine is deterministic and single-threaded; identical queries produce
identical values and byte-identical stores across runs.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterator, NamedTuple

from .axioms import (
    InvariantKey,
    Scalar,
    canonicalize,
    normalize_scalar,
    resolve,
)
from .geometry import (
    BasisIndex,
    CurveClass,
    Geometry,
    ZERO_CLASS,
    parse_token,
    sort_classes,
)

_MISSING = object()

_VALUE_CACHE_LIMIT = 1_500_000  # factor-value cache entries before reset


class UnderdeterminedLevel(RuntimeError):
    """Relation generation was exhausted before a level reached full rank."""


class ConflictingCacheEntry(ValueError):
    """Two sources disagree on the value of a stored invariant."""


class Level(NamedTuple):
    """One block of unknowns: curve class plus insertion count."""

    d: int
    e: int
    size: int

    @property
    def beta(self) -> CurveClass:
        return CurveClass(self.d, self.e)


@dataclass
class Relation:
    """One associativity instance at a level: lhs . unknowns = rhs."""

    lhs: dict[InvariantKey, Scalar]
    rhs: Scalar


class MemoStore:
    """Exact values of canonical invariants; one store may span geometries."""

    def __init__(self) -> None:
        self._entries: dict[InvariantKey, Scalar] = {}
        self.dirty: set[InvariantKey] = set()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: InvariantKey) -> bool:
        return key in self._entries

    def items(self):
        return self._entries.items()

    def get(self, key: InvariantKey, default=None):
        return self._entries.get(key, default)

    def insert(self, key: InvariantKey, value: Scalar) -> None:
        """Insert-if-equal; a differing duplicate signals corruption."""
        old = self._entries.get(key, _MISSING)
        if old is _MISSING:
            self._entries[key] = value
            self.dirty.add(key)
        elif old != value:
            raise ConflictingCacheEntry(f"{key.render()}: {old} vs {value}")

    def merge(self, other: "MemoStore") -> None:
        for key, value in other.items():
            self.insert(key, value)

    @staticmethod
    def format_record(key: InvariantKey, value: Scalar) -> str:
        payload = {
            "space": key.kind,
            "n": key.n,
            "d": key.d,
            "e": key.e,
            "classes": [b.token for b in key.classes],
            "value": f"{value.numerator}/{value.denominator}",
        }
        return json.dumps(payload, separators=(",", ":"))

    @staticmethod
    def parse_record(line: str) -> tuple[InvariantKey, Scalar]:
        rec = json.loads(line)
        key = InvariantKey(
            rec["space"],
            rec["n"],
            rec["d"],
            rec["e"],
            tuple(parse_token(t) for t in rec["classes"]),
        )
        num, den = rec["value"].split("/")
        return key, normalize_scalar(Fraction(int(num), int(den)))

    def dumps(self) -> str:
        lines = sorted(self.format_record(k, v) for k, v in self._entries.items())
        return "".join(line + "\n" for line in lines)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")
        self.dirty.clear()

    @classmethod
    def load(cls, path) -> "MemoStore":
        store = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                key, value = cls.parse_record(line)
                store.insert(key, value)
        store.dirty.clear()
        return store


def _bits(x: Scalar) -> int:
    return abs(x.numerator).bit_length() + x.denominator.bit_length()


def _distinct(classes: tuple[BasisIndex, ...]) -> list[BasisIndex]:
    out: list[BasisIndex] = []
    for b in classes:
        if not out or out[-1] != b:  # input is sorted
            out.append(b)
    return out


def _remove(classes: tuple[BasisIndex, ...], b: BasisIndex) -> tuple[BasisIndex, ...]:
    i = classes.index(b)
    return classes[:i] + classes[i + 1 :]


def _relation_id(quad, rest):
    """Normal form of one relation up to its symmetries, for deduplication."""
    a, b, c, d = quad
    p1 = tuple(sorted((tuple(sorted((a, b))), tuple(sorted((c, d))))))
    p2 = tuple(sorted((tuple(sorted((a, c))), tuple(sorted((b, d))))))
    if p1 == p2:
        return None  # trivially zero relation
    return (tuple(sorted((p1, p2))), rest)


class Engine:
    """Evaluator of genus-zero invariants for one geometry.

    Values are exact (int or Fraction).  A shared MemoStore may be passed
    in to persist canonical values across runs and geometries.
    """

    def __init__(
        self,
        geom: Geometry,
        store: MemoStore | None = None,
        relation_cap: int = 50_000,
    ) -> None:
        self.geom = geom
        self.store = store if store is not None else MemoStore()
        self.relation_cap = relation_cap  # safety knob for the exhaustive fallback
        self._solved: set[Level] = set()
        self._active: list[Level] = []
        self._values: dict[tuple, Scalar] = {}
        self._tsplit_cache: dict[tuple, tuple] = {}
        self._unknown_cache: dict[Level, tuple[InvariantKey, ...]] = {}
        self.stats = {"levels": 0, "relations": 0}
        if sys.getrecursionlimit() < 30_000:
            sys.setrecursionlimit(30_000)

    # -- evaluation -------------------------------------------------------

    def evaluate(self, beta, classes, trace: list[str] | None = None) -> Scalar:
        """Exact value of the invariant with the given insertions."""
        if isinstance(beta, int):
            beta = CurveClass(beta, 0)
        elif not isinstance(beta, CurveClass):
            beta = CurveClass(*beta)
        self.geom.check_beta(beta)
        cs = sort_classes(classes)
        self.geom.check_classes(cs)
        res = resolve(self.geom, beta, cs, trace)
        if res.key is None:
            return res.scalar
        value = self._ensure_key(res.key, trace)
        return normalize_scalar(res.scalar * value)

    def evaluate_key(self, key: InvariantKey) -> Scalar:
        """Value of a stored-format key (must match this engine's geometry)."""
        if key.kind != self.geom.kind or key.n != self.geom.n:
            raise ValueError(f"{key.render()} does not belong to this engine")
        return self.evaluate(key.beta, key.classes)

    def _ensure_key(self, key: InvariantKey, trace: list[str] | None = None) -> Scalar:
        hit = self.store.get(key, _MISSING)
        if hit is not _MISSING:
            return hit
        level = Level(key.d, key.e, len(key.classes))
        self.solve_level(level)
        hit = self.store.get(key, _MISSING)
        if hit is _MISSING:
            raise AssertionError(f"{key.render()} missing after level solve")
        if trace is not None:
            trace.append(
                f"level ({key.d},{key.e}) N={len(key.classes)} solved: "
                f"{key.render()} = {hit}"
            )
        return hit

    def _value(self, beta: CurveClass, classes: tuple[BasisIndex, ...]) -> Scalar:
        """Fully evaluated invariant (memoized); only safe below active levels."""
        key = (beta.d, beta.e, sort_classes(classes))
        hit = self._values.get(key, _MISSING)
        if hit is not _MISSING:
            return hit
        res = canonicalize(self.geom, beta, key[2])
        if res.key is None:
            v = res.scalar
        else:
            v = normalize_scalar(res.scalar * self._ensure_key(res.key))
        if len(self._values) >= _VALUE_CACHE_LIMIT:
            self._values.clear()
        self._values[key] = v
        return v

    # -- levels -------------------------------------------------------------

    def order_key(self, level: Level) -> tuple[int, int]:
        return (self.geom.mass(level.beta), level.size)

    def level_unknowns(self, level: Level) -> tuple[InvariantKey, ...]:
        """All multisets of codim >= 2 basis classes meeting the grading."""
        cached = self._unknown_cache.get(level)
        if cached is not None:
            return cached
        out: list[InvariantKey] = []
        beta = level.beta
        if level.size >= 3 and beta != ZERO_CLASS and self.geom.is_effective(beta):
            need = self.geom.vdim(beta, level.size)
            pool = [b for b in self.geom.basis() if b.level >= 2]
            top = self.geom.n
            kind, n = self.geom.kind, self.geom.n

            def rec(idx: int, slots: int, rem: int, acc: list[BasisIndex]) -> None:
                if slots == 0:
                    if rem == 0:
                        out.append(InvariantKey(kind, n, level.d, level.e, tuple(acc)))
                    return
                if idx == len(pool) or rem < 2 * slots or rem > top * slots:
                    return
                b = pool[idx]
                for cnt in range(slots + 1):
                    c = cnt * b.level
                    if c > rem:
                        break
                    rec(idx + 1, slots - cnt, rem - c, acc + [b] * cnt)

            rec(0, level.size, need, [])
        result = tuple(out)
        self._unknown_cache[level] = result
        return result

    def solve_level(self, level: Level) -> None:
        """Solve every canonical unknown at the level and memoize the values."""
        if level in self._solved:
            return
        if level in self._active:
            raise AssertionError(f"level re-entered: {level}")  # order must drop
        if self._active:
            # nested solves must strictly descend in (mass, insertion count)
            assert self.order_key(level) < self.order_key(self._active[-1]), (
                level,
                self._active[-1],
            )
        self._active.append(level)
        try:
            unknowns = self.level_unknowns(level)
            if unknowns and any(k not in self.store for k in unknowns):
                self._solve_system(level, unknowns)
            self._solved.add(level)
            self.stats["levels"] += 1
        finally:
            self._active.pop()

    def _solve_system(self, level: Level, unknowns: tuple[InvariantKey, ...]) -> None:
        index = {key: i for i, key in enumerate(unknowns)}
        pivots: list[tuple[int, dict[int, Scalar], Scalar]] = []
        generated = 0
        for row, rhs in self._relation_rows(level, unknowns, index):
            generated += 1
            if generated > self.relation_cap:
                break
            self.stats["relations"] += 1
            for pv, prow, prhs in pivots:
                coef = row.get(pv)
                if coef:
                    f = Fraction(coef) / prow[pv]
                    for var, val in prow.items():
                        nv = row.get(var, 0) - f * val
                        if nv:
                            row[var] = nv
                        elif var in row:
                            del row[var]
                    rhs = rhs - f * prhs
            row = {v: c for v, c in row.items() if c}
            if not row:
                if rhs != 0:
                    raise AssertionError(f"inconsistent relation system at {level}")
                continue
            pv = min(row, key=lambda v: (_bits(row[v]), v))
            pivots.append((pv, row, rhs))
            if len(pivots) == len(unknowns):
                break
        if len(pivots) < len(unknowns):
            raise UnderdeterminedLevel(
                f"level {tuple(level)}: rank {len(pivots)} of {len(unknowns)} "
                f"after {generated} relations"
            )
        values: dict[int, Scalar] = {}
        for pv, row, rhs in reversed(pivots):
            acc = rhs
            for var, coef in row.items():
                if var != pv:
                    acc = acc - coef * values[var]
            values[pv] = normalize_scalar(Fraction(acc) / row[pv])
        if level.beta == CurveClass(1, 1) and level.size == 3:
            # three-point invariants on the through-point line are seeded as 1
            # when a divisor slot is present; the derived divisor-free ones
            # must extend that rule, and a mismatch is not recoverable
            for key, i in index.items():
                if values[i] != 1:
                    raise AssertionError(
                        f"derived {key.render()} = {values[i]}, seed rule wants 1"
                    )
        for key, i in index.items():
            self.store.insert(key, values[i])

    # -- relation generation --------------------------------------------

    def _relation_rows(
        self,
        level: Level,
        unknowns: tuple[InvariantKey, ...],
        index: dict[InvariantKey, int],
    ) -> Iterator[tuple[dict[int, Scalar], Scalar]]:
        beta = level.beta
        seen: set = set()

        def build(quad, rest):
            mark = _relation_id(quad, rest)
            if mark is None or mark in seen:
                return None
            seen.add(mark)
            return self._assemble(level, index, beta, quad, rest)

        # Targeted pass: peel a maximal-codimension class off each unknown,
        # then widen to arbitrary peeled classes before the exhaustive family.
        for stage in (0, 1):
            for key in unknowns:
                classes = key.classes
                top = max(b.level for b in classes)
                for g1 in _distinct(classes):
                    if (g1.level == top) != (stage == 0):
                        continue
                    div, head, _sign = self.geom.decompose(g1)
                    rest0 = _remove(classes, g1)
                    for g2 in _distinct(rest0):
                        rest1 = _remove(rest0, g2)
                        for g3 in _distinct(rest1):
                            rel = build((head, div, g2, g3), _remove(rest1, g3))
                            if rel is not None:
                                yield rel
        yield from self._exhaustive_rows(level, build)

    def _exhaustive_rows(self, level: Level, build) -> Iterator:
        """Fallback: every admissible relation instance at this level."""
        size = level.size + 1
        total = self.geom.vdim(level.beta, size) - 1
        pool = [b for b in self.geom.basis() if b.level >= 1]
        top = self.geom.n

        def multisets(idx: int, slots: int, rem: int, acc: tuple) -> Iterator[tuple]:
            if slots == 0:
                if rem == 0:
                    yield acc
                return
            if idx == len(pool) or rem < slots or rem > top * slots:
                return
            b = pool[idx]
            for cnt in range(slots + 1):
                c = cnt * b.level
                if c > rem:
                    break
                yield from multisets(idx + 1, slots - cnt, rem - c, acc + (b,) * cnt)

        def quads(classes: tuple) -> Iterator[tuple]:
            for i, a in enumerate(_distinct(classes)):
                r1 = _remove(classes, a)
                for b in _distinct(r1):
                    if b < a:
                        continue
                    r2 = _remove(r1, b)
                    for c in _distinct(r2):
                        if c < b:
                            continue
                        r3 = _remove(r2, c)
                        for d in _distinct(r3):
                            if d < c:
                                continue
                            yield a, b, c, d, _remove(r3, d)

        for s in multisets(0, size, total, ()):
            for a, b, c, d, rest in quads(s):
                for quad in ((a, b, c, d), (a, b, d, c)):
                    rel = build(quad, rest)
                    if rel is not None:
                        yield rel

    def _tsplits(self, rest: tuple[BasisIndex, ...]) -> tuple:
        """Sub-multiset splittings of the spectator insertions.

        Records (T1, T2, binomial multiplicity, |T1|, total codim of T1);
        the multiplicity counts the ways labelled slots realise the split.
        """
        cached = self._tsplit_cache.get(rest)
        if cached is not None:
            return cached
        groups = [(b, rest.count(b)) for b in _distinct(rest)]
        records: list[tuple] = []

        def rec(idx, t1, t2, mult, l1, sc1):
            if idx == len(groups):
                records.append((tuple(t1), tuple(t2), mult, l1, sc1))
                return
            b, m = groups[idx]
            for j in range(m + 1):
                rec(
                    idx + 1,
                    t1 + [b] * j,
                    t2 + [b] * (m - j),
                    mult * comb(m, j),
                    l1 + j,
                    sc1 + j * b.level,
                )

        rec(0, [], [], 1, 0, 0)
        out = tuple(records)
        self._tsplit_cache[rest] = out
        return out

    def _route(
        self,
        level: Level,
        index: dict[InvariantKey, int],
        row: dict[int, Scalar],
        beta: CurveClass,
        classes: tuple[BasisIndex, ...],
        coef: int,
    ) -> Scalar:
        """File one curve-class-preserving term: into the row if it sits at
        the level being solved, otherwise evaluate it."""
        res = canonicalize(self.geom, beta, classes)
        if res.key is None:
            return coef * res.scalar
        key = res.key
        if Level(key.d, key.e, len(key.classes)) == level:
            i = index[key]
            row[i] = row.get(i, 0) + coef * res.scalar
            return 0
        return coef * res.scalar * self._ensure_key(key)

    def _assemble(
        self,
        level: Level | None,
        index: dict[InvariantKey, int],
        beta: CurveClass,
        quad: tuple[BasisIndex, BasisIndex, BasisIndex, BasisIndex],
        rest: tuple[BasisIndex, ...],
    ) -> tuple[dict[int, Scalar], Scalar]:
        """Expand one associativity relation into (row over unknowns, rhs).

        Both bracketings are expanded over all curve-class splittings,
        spectator splittings and diagonal insertions; the beta_i = 0 ends
        collapse to a single cup-merged insertion by the diagonal identity.
        """
        geom = self.geom
        n = geom.n
        row: dict[int, Scalar] = {}
        known: Scalar = 0
        a, b, c, d = quad
        tsplits = self._tsplits(rest)
        for (p, q, r, s), sigma in (((a, b, c, d), 1), ((a, c, b, d), -1)):
            sg, z = geom.cup_basis(p, q)
            if z is not None:
                known += self._route(level, index, row, beta, (z, r, s) + rest, sigma * sg)
            sg, z = geom.cup_basis(r, s)
            if z is not None:
                known += self._route(level, index, row, beta, (p, q, z) + rest, sigma * sg)
            cp = p.level
            cq = q.level
            for b1, b2 in geom.splittings(beta):
                a1 = geom.vdim(b1, 0)
                for t1, t2, mult, l1, sc1 in tsplits:
                    cx = a1 + l1 + 3 - cp - cq - sc1
                    if cx < 1 or cx > n - 1:
                        continue  # a codim 0 or n partner forces a zero factor
                    for x, y, sdiag in geom.diagonal_by_codim(cx):
                        v1 = self._value(b1, (p, q, x) + t1)
                        if v1 == 0:
                            continue
                        v2 = self._value(b2, (y, r, s) + t2)
                        if v2 == 0:
                            continue
                        known += sigma * sdiag * mult * v1 * v2
        row = {v: cf for v, cf in row.items() if cf}
        return row, -known

    # -- public relation views --------------------------------------------

    def wdvv_relation(self, beta, quad, rest=()) -> Relation:
        """One associativity relation at level (beta, len(rest) + 3).

        lhs maps the level's canonical keys to their coefficients; rhs
        carries the already-known contributions, negated.
        """
        if not isinstance(beta, CurveClass):
            beta = CurveClass(*beta)
        self.geom.check_beta(beta)
        level = Level(beta.d, beta.e, len(rest) + 3)
        unknowns = self.level_unknowns(level)
        index = {k: i for i, k in enumerate(unknowns)}
        row, rhs = self._assemble(level, index, beta, tuple(quad), sort_classes(rest))
        return Relation({unknowns[i]: cf for i, cf in row.items()}, rhs)

    def wdvv_residual(self, beta, quad, rest=()) -> Scalar:
        """Fully evaluated associativity combination; zero when the axioms hold."""
        rel = self.wdvv_relation(beta, quad, rest)
        total: Scalar = 0
        for key, coef in rel.lhs.items():
            total += coef * self._ensure_key(key)
        return normalize_scalar(total - rel.rhs)
