"""Command line front end.

Subcommands: ``invariant`` for a single query, ``table`` to reproduce the
published grids, ``check`` for the property suites, ``cache`` for store
maintenance.  Data goes to stdout, logs and traces to stderr.

Exit codes: 2 parse error, 3 engine error, 4 table mismatch under
--diff-paper, 5 suite failure, 6 cache conflict or verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .engine import ConflictingCacheEntry, Engine, MemoStore, UnderdeterminedLevel
from .geometry import BLOWUP, PLAIN, CurveClass, Geometry, parse_token
from .suites import SUITES
from .tables import TABLE_IDS, TableSpec, emit_table
from . import __version__

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ENGINE = 3
EXIT_TABLE_DIFF = 4
EXIT_SUITE = 5
EXIT_CACHE = 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _log(args, message: str) -> None:
    if getattr(args, "verbose", 0):
        print(message, file=sys.stderr)


def _read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    out = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"bad config line: {raw!r}", EXIT_PARSE)
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _cache_path(args, config: dict[str, str]) -> str | None:
    if getattr(args, "cache", None):
        return args.cache
    if "cache_path" in config:
        return config["cache_path"]
    return os.environ.get("GW_CACHE") or None


def _load_store(path: str | None) -> MemoStore:
    if path and Path(path).exists():
        return MemoStore.load(path)
    return MemoStore()


def _save_store(store: MemoStore, path: str | None) -> None:
    if path:
        store.save(path)


def _parse_beta(text: str, space: str) -> CurveClass:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            beta = CurveClass(int(parts[0]), 0)
        elif len(parts) == 2:
            beta = CurveClass(int(parts[0]), int(parts[1]))
        else:
            raise ValueError
    except ValueError:
        raise CliError(f"bad curve class {text!r}; expected d or d,e", EXIT_PARSE)
    if space == PLAIN and beta.e != 0:
        raise CliError("plain space takes --beta d with no e part", EXIT_PARSE)
    return beta


def _parse_classes(text: str, n: int):
    out = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token == "pt":
            out.append(parse_token(f"H{n}"))
            continue
        try:
            out.append(parse_token(token))
        except ValueError as err:
            raise CliError(str(err), EXIT_PARSE)
    return tuple(out)


def _resolve_geometry(args, config: dict[str, str]) -> Geometry:
    space = args.space or config.get("space") or BLOWUP
    if space not in (PLAIN, BLOWUP):
        raise CliError(f"unknown space {space!r}", EXIT_PARSE)
    n = args.n if args.n is not None else int(config.get("n", 0)) or None
    if n is None:
        raise CliError("--n is required (or preset it in the config file)", EXIT_PARSE)
    try:
        return Geometry(space, n)
    except ValueError as err:
        raise CliError(str(err), EXIT_PARSE)


def cmd_invariant(args) -> int:
    config = _read_config(args.config)
    geom = _resolve_geometry(args, config)
    beta = _parse_beta(args.beta, geom.kind)
    classes = _parse_classes(args.classes, geom.n)
    try:
        geom.check_classes(classes)
        geom.check_beta(beta)
    except ValueError as err:
        raise CliError(str(err), EXIT_PARSE)
    cache = _cache_path(args, config)
    engine = Engine(geom, store=_load_store(cache))
    trace: list[str] | None = [] if args.explain else None
    try:
        value = engine.evaluate(beta, classes, trace)
    except UnderdeterminedLevel as err:
        raise CliError(str(err), EXIT_ENGINE)
    if trace is not None:
        for line in trace:
            print(line, file=sys.stderr)
    print(value)
    _save_store(engine.store, cache)
    _log(args, f"store holds {len(engine.store)} canonical values")
    return EXIT_OK


def cmd_table(args) -> int:
    config = _read_config(args.config)
    cache = _cache_path(args, config)
    spec = TableSpec(args.id, args.dmax)
    store = _load_store(cache)
    engine = Engine(Geometry.blowup(spec.definition.n), store=store)
    try:
        table = emit_table(spec, engine)
    except UnderdeterminedLevel as err:
        raise CliError(str(err), EXIT_ENGINE)
    print(table.render(args.format), end="")
    _save_store(engine.store, cache)
    if args.diff_paper:
        problems = table.diff_published()
        if problems:
            for line in problems:
                print(line, file=sys.stderr)
            return EXIT_TABLE_DIFF
        _log(args, "table matches the published values")
    return EXIT_OK


def cmd_check(args) -> int:
    runner = SUITES[args.suite]
    results = runner(args.dmax, args.n)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        payload = {
            "suite": args.suite,
            "results": [
                {"name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
        }
        print(json.dumps(payload))
    else:
        for r in results:
            print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    return EXIT_SUITE if failed else EXIT_OK


def _verify_sample(store: MemoStore, rate: float) -> list[str]:
    keys = sorted(store.items(), key=lambda kv: MemoStore.format_record(*kv))
    if not keys:
        return []
    stride = max(1, round(1 / rate)) if rate > 0 else len(keys)
    engines: dict[tuple[str, int], Engine] = {}
    problems = []
    for key, value in keys[::stride]:
        tag = (key.kind, key.n)
        if tag not in engines:
            engines[tag] = Engine(Geometry(key.kind, key.n))
        fresh = engines[tag].evaluate(key.beta, key.classes)
        if fresh != value:
            problems.append(f"{key.render()}: cached {value}, recomputed {fresh}")
    return problems


def cmd_cache(args) -> int:
    if args.action == "dump":
        store = MemoStore.load(args.paths[0])
        sys.stdout.write(store.dumps())
        return EXIT_OK
    if args.action == "merge":
        if not args.out:
            raise CliError("merge needs --out", EXIT_PARSE)
        merged = MemoStore()
        try:
            for path in args.paths:
                merged.merge(MemoStore.load(path))
        except ConflictingCacheEntry as err:
            print(f"cache conflict: {err}", file=sys.stderr)
            return EXIT_CACHE
        merged.save(args.out)
        return EXIT_OK
    if args.action == "verify":
        store = MemoStore.load(args.paths[0])
        problems = _verify_sample(store, args.sample)
        if problems:
            for line in problems:
                print(line, file=sys.stderr)
            return EXIT_CACHE
        print(f"verified {max(1, round(args.sample * 100))}% resample of {len(store)} entries: ok")
        return EXIT_OK
    raise CliError(f"unknown cache action {args.action!r}", EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwblowup",
        description="Genus-zero Gromov-Witten invariants of P^n and its one-point blow-up",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_inv = sub.add_parser("invariant", help="evaluate a single invariant")
    p_inv.add_argument("--space", choices=(PLAIN, BLOWUP), default=None)
    p_inv.add_argument("--n", type=int, default=None)
    p_inv.add_argument("--beta", required=True, help="curve class, 'd' or 'd,e'")
    p_inv.add_argument(
        "--classes", required=True, help="comma list of H<k>/E<k> tokens; pt = H<n>"
    )
    p_inv.add_argument("--explain", action="store_true", help="trace the axioms applied")
    p_inv.add_argument("--cache", default=None)
    p_inv.add_argument("--config", default=None)
    p_inv.add_argument("-v", "--verbose", action="count", default=0)
    p_inv.set_defaults(func=cmd_invariant)

    p_tab = sub.add_parser("table", help="reproduce one of the published grids")
    p_tab.add_argument("--id", required=True, choices=TABLE_IDS)
    p_tab.add_argument("--dmax", type=int, default=None)
    p_tab.add_argument("--format", choices=("csv", "md", "json"), default="md")
    p_tab.add_argument(
        "--diff-paper",
        action="store_true",
        help="compare against the embedded published values",
    )
    p_tab.add_argument("--cache", default=None)
    p_tab.add_argument("--config", default=None)
    p_tab.add_argument("-v", "--verbose", action="count", default=0)
    p_tab.set_defaults(func=cmd_table)

    p_chk = sub.add_parser("check", help="run a property suite")
    p_chk.add_argument("--suite", required=True, choices=sorted(SUITES))
    p_chk.add_argument("--dmax", type=int, default=5)
    p_chk.add_argument("--n", type=int, default=2)
    p_chk.add_argument("--format", choices=("text", "json"), default="text")
    p_chk.set_defaults(func=cmd_check)

    p_cache = sub.add_parser("cache", help="dump, merge or verify cache files")
    p_cache.add_argument("action", choices=("dump", "merge", "verify"))
    p_cache.add_argument("paths", nargs="+")
    p_cache.add_argument("--out", default=None)
    p_cache.add_argument("--sample", type=float, default=0.05)
    p_cache.set_defaults(func=cmd_cache)

    return parser


_DEFAULT_DMAX = {"P2-points": 7, "P3-points": 8, "P3-exceptional": 3}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "table" and args.dmax is None:
        args.dmax = _DEFAULT_DMAX[args.id]
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except ConflictingCacheEntry as err:
        print(f"cache conflict: {err}", file=sys.stderr)
        return EXIT_CACHE
    except UnderdeterminedLevel as err:
        print(f"engine error: {err}", file=sys.stderr)
        return EXIT_ENGINE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CACHE if args.command == "cache" else EXIT_PARSE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
