"""Property suites: sampled axiom checks and the independent-oracle run.

Each suite returns a list of CheckResult entries; the CLI and the
acceptance tests both drive these.  Sampling is seeded, so suite output is
reproducible.
"""

from __future__ import annotations

import random

from .engine import Engine, Level
from .geometry import CurveClass, Geometry, ZERO_CLASS, sort_classes
from .tables import CheckResult, consistency_suite, kontsevich_oracle


def _cup_table_checks(nmax: int = 5) -> list[CheckResult]:
    """Commutativity and associativity of the product, exhaustively."""
    results = []
    for n in range(2, nmax + 1):
        for geom in (Geometry.plain(n), Geometry.blowup(n)):
            basis = geom.basis()
            bad = []
            for a in basis:
                for b in basis:
                    if geom.cup(a, b) != geom.cup(b, a):
                        bad.append(f"{a.token}.{b.token}")
                    for c in basis:
                        left = geom.cup(geom.cup(a, b), c)
                        right = geom.cup(a, geom.cup(b, c))
                        if left != right:
                            bad.append(f"({a.token}.{b.token}).{c.token}")
            results.append(
                CheckResult(
                    f"cup ring axioms, {geom.kind} n={n}",
                    not bad,
                    "ok" if not bad else "; ".join(bad[:5]),
                )
            )
    return results


def _diagonal_checks(nmax: int = 5) -> list[CheckResult]:
    """Diagonal reproduction: sum_s s * pairing(x, a) * b recovers x."""
    results = []
    for n in range(2, nmax + 1):
        for geom in (Geometry.plain(n), Geometry.blowup(n)):
            bad = []
            for x in geom.basis():
                acc: dict = {}
                for a, b, s in geom.diagonal_pairs():
                    c = s * geom.pairing(x, a)
                    if c:
                        acc[b] = acc.get(b, 0) + c
                acc = {k: v for k, v in acc.items() if v}
                if acc != {x: 1}:
                    bad.append(x.token)
            results.append(
                CheckResult(
                    f"diagonal reproduction, {geom.kind} n={n}",
                    not bad,
                    "ok" if not bad else "failed on " + ", ".join(bad),
                )
            )
    return results


def _key_pool(engine: Engine, max_mass: int, max_size: int) -> list:
    """Canonical keys of modest mass, for sampling."""
    geom = engine.geom
    pool = []
    for d in range(0, max_mass + 1):
        emin = 2 * d - max_mass if geom.kind == "blowup" else 0
        for e in range(emin, d + 1) if geom.kind == "blowup" else (0,):
            beta = CurveClass(d, e)
            if beta == ZERO_CLASS or not geom.is_effective(beta):
                continue
            for size in range(3, max_size + 1):
                pool.extend(engine.level_unknowns(Level(d, e, size)))
    return pool


def permutation_suite(samples: int = 200, seed: int = 20160913) -> list[CheckResult]:
    """Evaluation is invariant under reordering the insertions."""
    rng = random.Random(seed)
    engines = {n: Engine(Geometry.blowup(n)) for n in (2, 3)}
    failures = []
    checked = 0
    for i in range(samples):
        n = rng.choice((2, 3))
        engine = engines[n]
        pool = _key_pool(engine, max_mass=4, max_size=6)
        if rng.random() < 0.7:
            key = rng.choice(pool)
            beta, classes = key.beta, list(key.classes)
        else:
            # arbitrary (mostly vanishing) queries exercise the zero routes
            beta = CurveClass(rng.randint(0, 3), rng.randint(-3, 3))
            classes = [rng.choice(engine.geom.basis()) for _ in range(rng.randint(3, 7))]
        reference = engine.evaluate(beta, sort_classes(classes))
        shuffled = classes[:]
        rng.shuffle(shuffled)
        got = engine.evaluate(beta, shuffled)
        checked += 1
        if got != reference:
            failures.append(f"#{i}: beta={tuple(beta)}, {classes} -> {reference} vs {got}")
    return [
        CheckResult(
            f"permutation invariance ({checked} samples)",
            not failures,
            "ok" if not failures else "; ".join(failures[:3]),
        )
    ]


def divisor_suite(samples: int = 100, seed: int = 424242) -> list[CheckResult]:
    """Adding a divisor insertion multiplies by its degree against beta."""
    rng = random.Random(seed)
    engines = {n: Engine(Geometry.blowup(n)) for n in (2, 3)}
    failures = []
    for i in range(samples):
        n = rng.choice((2, 3))
        engine = engines[n]
        pool = _key_pool(engine, max_mass=4, max_size=6)
        key = rng.choice(pool)
        div = rng.choice(engine.geom.divisors())
        base = engine.evaluate(key.beta, key.classes)
        lifted = engine.evaluate(key.beta, key.classes + (div,))
        expect = engine.geom.curve_pairing(div, key.beta) * base
        if lifted != expect:
            failures.append(
                f"#{i}: {key.render()} + {div.token}: {lifted} != {expect}"
            )
    return [
        CheckResult(
            f"divisor axiom ({samples} samples)",
            not failures,
            "ok" if not failures else "; ".join(failures[:3]),
        )
    ]


def axiom_suite(seed: int = 7) -> list[CheckResult]:
    """Full axiom battery: ring checks, diagonal, permutation, divisor."""
    results = _cup_table_checks()
    results += _diagonal_checks()
    results += permutation_suite(seed=seed)
    results += divisor_suite(seed=seed + 1)
    return results


def wdvv_suite(samples: int = 100, seed: int = 1996, nmax_mass: int = 4) -> list[CheckResult]:
    """Associativity residuals vanish exactly on random admissible instances."""
    rng = random.Random(seed)
    engines = {n: Engine(Geometry.blowup(n)) for n in (2, 3)}
    failures = []
    produced = 0
    attempts = 0
    while produced < samples and attempts < samples * 60:
        attempts += 1
        n = rng.choice((2, 3))
        engine = engines[n]
        geom = engine.geom
        d = rng.randint(0, nmax_mass)
        e = rng.randint(2 * d - nmax_mass, d)
        beta = CurveClass(d, e)
        if beta == ZERO_CLASS or not geom.is_effective(beta):
            continue
        pool = [b for b in geom.basis() if b.level >= 1]
        rest = sort_classes(rng.choice(pool) for _ in range(rng.randint(0, 2)))
        need = geom.vdim(beta, len(rest) + 4) - 1 - sum(b.level for b in rest)
        quads = [
            (a, b, c, dd)
            for a in pool
            for b in pool
            for c in pool
            for dd in pool
            if a <= b <= c <= dd and a.level + b.level + c.level + dd.level == need
        ]
        if not quads:
            continue
        quad = rng.choice(quads)
        residual = engine.wdvv_residual(beta, quad, rest)
        produced += 1
        if residual != 0:
            failures.append(
                f"beta={tuple(beta)} quad={[b.token for b in quad]} "
                f"T={[b.token for b in rest]}: residual {residual}"
            )
    return [
        CheckResult(
            f"associativity residuals ({produced} instances)",
            produced >= samples and not failures,
            "ok" if not failures else "; ".join(failures[:3]),
        )
    ]


def oracle_suite(dmax: int = 7) -> list[CheckResult]:
    """Plain-plane engine values against the independent recursion."""
    engine = Engine(Geometry.plain(2))
    oracle = kontsevich_oracle(dmax)
    results = []
    for d in range(1, dmax + 1):
        got = engine.evaluate(CurveClass(d, 0), (engine.geom.point,) * (3 * d - 1))
        results.append(
            CheckResult(
                f"plane curve count d={d}",
                got == oracle[d - 1],
                f"engine {got}, recursion {oracle[d - 1]}",
            )
        )
    return results


def remarks_suite(dmax: int = 5) -> list[CheckResult]:
    return consistency_suite(dmax)


SUITES = {
    "axioms": lambda dmax, n: axiom_suite(),
    "wdvv": lambda dmax, n: wdvv_suite(),
    "remarks": lambda dmax, n: remarks_suite(dmax),
    "oracle": lambda dmax, n: oracle_suite(dmax),
}
