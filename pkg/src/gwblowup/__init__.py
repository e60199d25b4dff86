"""Exact genus-zero Gromov-Witten invariants of P^n and its one-point blow-up.

The invariants are reconstructed from a handful of degree-one three-point
seeds through the associativity relations of the quantum product, in exact
rational arithmetic, and interpreted as counts of rational curves of degree
d with an e-fold point at the blown-up position.
"""

from .axioms import (
    EvalResult,
    InvariantKey,
    canonicalize,
    classical_triple,
    initial_three_point,
    lift_small_n,
    resolve,
)
from .engine import (
    ConflictingCacheEntry,
    Engine,
    Level,
    MemoStore,
    Relation,
    UnderdeterminedLevel,
)
from .geometry import (
    BasisIndex,
    CohClass,
    CurveClass,
    Geometry,
    E,
    H,
    parse_token,
    sort_classes,
)
from .tables import (
    PUBLISHED,
    CheckResult,
    CountQuery,
    DimensionMismatch,
    NonIntegralCount,
    Table,
    TableSpec,
    consistency_suite,
    curve_count,
    emit_table,
    expected_dim_p2,
    genus_with_multiple_points,
    kontsevich_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BasisIndex",
    "CheckResult",
    "CohClass",
    "ConflictingCacheEntry",
    "CountQuery",
    "CurveClass",
    "DimensionMismatch",
    "E",
    "Engine",
    "EvalResult",
    "Geometry",
    "H",
    "InvariantKey",
    "Level",
    "MemoStore",
    "NonIntegralCount",
    "PUBLISHED",
    "Relation",
    "Table",
    "TableSpec",
    "UnderdeterminedLevel",
    "canonicalize",
    "classical_triple",
    "consistency_suite",
    "curve_count",
    "emit_table",
    "expected_dim_p2",
    "genus_with_multiple_points",
    "initial_three_point",
    "kontsevich_oracle",
    "lift_small_n",
    "parse_token",
    "resolve",
    "sort_classes",
]
