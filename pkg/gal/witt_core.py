"""Graded structures on the Witt algebra and the identities they are checked against.

A structure is a function φ(a, b) giving the coefficient of W_{a+b} in W_a∘W_b.
It is either symbolic (a polynomial in n for the left index, m for the right
index, and named parameters) or a finite table on a window. Every identity is
written once as a residual over a generic ring, so the same code evaluates it
on integers and on polynomials.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Any, Callable, Literal, Mapping, Optional, Sequence

from gal.config import FAMILY_PARAM
from gal.exact_arith import L, M, N, MultiPoly, Scalar, UnboundVariableError
from gal.expr_parser import GRADING_VARIABLES, ExprSource, format_canonical, parse_expression
from gal.schemas import (
    DiagnosticsReport,
    FitResult,
    IsoResult,
    LawReport,
    QTransformResult,
    StructureSpec,
    SymbolicStructureSpec,
    TableEntry,
    TableStructureSpec,
    Violation,
)

LOG = logging.getLogger(__name__)


class StructureError(ValueError):
    pass


class OutOfWindowError(ValueError):
    def __init__(self, m: int, n: int, radius: int):
        self.m, self.n, self.radius = m, n, radius
        super().__init__(f"pair ({m}, {n}) is outside the window of radius {radius}")


@dataclass(frozen=True)
class Window:
    radius: int

    def __post_init__(self):
        if isinstance(self.radius, bool) or not isinstance(self.radius, int) or self.radius < 1:
            raise ValueError(f"window radius must be a positive integer, got {self.radius!r}")

    @property
    def indices(self) -> range:
        return range(-self.radius, self.radius + 1)

    def contains(self, *indices: int) -> bool:
        return all(-self.radius <= k <= self.radius for k in indices)

    def pairs(self) -> list[tuple[int, int]]:
        """Pairs (m, n) with m, n and m + n all in the window, in lexicographic order."""
        return [(m, n) for m, n in product(self.indices, repeat=2) if self.contains(m + n)]


@dataclass(frozen=True, eq=False)
class GradedStructure:
    kind: Literal["symbolic", "table"]
    expr: Optional[MultiPoly] = None
    params: Mapping[str, Fraction] = field(default_factory=dict)
    window: Optional[Window] = None
    entries: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    origin: Optional[str] = None

    @classmethod
    def symbolic(cls, expr: MultiPoly, params: Optional[Mapping[str, Scalar]] = None, origin: Optional[str] = None):
        for name in ("l", "i"):
            if name in expr.variables:
                raise StructureError(f"structure function may not use the grading variable '{name}'")
        bound = {name: Fraction(value) for name, value in (params or {}).items()}
        return cls("symbolic", expr=expr, params=bound, origin=origin)

    @classmethod
    def table(cls, window: Window, entries: Mapping[tuple[int, int], Scalar], origin: Optional[str] = None):
        values = {}
        for (m, n), value in entries.items():
            if not window.contains(m, n):
                raise OutOfWindowError(m, n, window.radius)
            values[(m, n)] = Fraction(value)
        missing = [pair for pair in window.pairs() if pair not in values]
        if missing:
            raise StructureError(f"table has no value for pair {missing[0]} (and {len(missing) - 1} more)")
        return cls("table", window=window, entries=values, origin=origin)

    @cached_property
    def polynomial(self) -> MultiPoly:
        if self.kind != "symbolic":
            raise StructureError("a table structure has no polynomial form")
        return self.expr.substitute(self.params)

    @property
    def free_params(self) -> tuple[str, ...]:
        if self.kind == "table":
            return ()
        return tuple(v for v in self.polynomial.variables if v not in ("m", "n"))

    @property
    def is_evaluable(self) -> bool:
        return not self.free_params

    def describe(self) -> str:
        if self.origin:
            return self.origin
        if self.kind == "symbolic":
            return f"W_n∘W_m = {format_canonical(self.polynomial)}"
        return f"table on radius {self.window.radius}"


def phi_eval(s: GradedStructure, a: int, b: int) -> Fraction:
    """Coefficient of W_{a+b} in W_a∘W_b."""
    if s.kind == "table":
        try:
            return s.entries[(a, b)]
        except KeyError:
            raise OutOfWindowError(a, b, s.window.radius) from None
    # expressions name the left index n and the right index m
    return s.polynomial.evaluate({"n": a, "m": b})


def _evaluator(s: GradedStructure) -> Callable[[int, int], Fraction]:
    if s.kind == "symbolic" and not s.is_evaluable:
        raise UnboundVariableError(s.free_params[0])
    cache: dict[tuple[int, int], Fraction] = {}

    def phi(m: int, n: int) -> Fraction:
        key = (m, n)
        if key not in cache:
            cache[key] = phi_eval(s, m, n)
        return cache[key]

    return phi


def _symbolic_phi(s: GradedStructure) -> Callable[[Any, Any], MultiPoly]:
    poly = s.polynomial
    return lambda a, b: poly.substitute({"n": a, "m": b})


def _swapped(p: MultiPoly) -> MultiPoly:
    return p.rename({"m": "n", "n": "m"})


# identities


def _all_sums(a, b, c=None):
    if c is None:
        return (a, b, a + b)
    return (a, b, c, a + b, a + c, b + c, a + b + c)


@dataclass(frozen=True)
class _Clause:
    name: str
    names: tuple[str, ...]
    residual: Callable[..., Any]
    involved: Callable[..., tuple[int, ...]] = _all_sums


COMMUTATOR = _Clause("commutator", ("m", "n"), lambda phi, m, n: phi(m, n) - phi(n, m) - (n - m))

ANTI_PRE_LIE = _Clause(
    "anti-pre-lie",
    ("m", "n", "l"),
    lambda phi, m, n, l: (n - m) * phi(m + n, l) - phi(m, l) * phi(n, m + l) + phi(n, l) * phi(m, n + l),
)

PRE_LIE = _Clause(
    "pre-lie",
    ("m", "n", "l"),
    lambda phi, m, n, l: (phi(m, n) * phi(m + n, l) - phi(n, l) * phi(m, n + l))
    - (phi(n, m) * phi(n + m, l) - phi(m, l) * phi(n, m + l)),
)

RIGHT_COMMUTATIVE = _Clause(
    "right-commutative",
    ("m", "n", "l"),
    lambda phi, m, n, l: phi(m, n) * phi(m + n, l) - phi(m, l) * phi(m + l, n),
    involved=lambda m, n, l: (m, n, l, m + n, m + l, m + n + l),
)

ADMISSIBLE = _Clause(
    "admissible",
    ("n", "m", "l"),
    lambda phi, n, m, l: phi(n, m) * phi(n + m, l)
    - phi(n, l) * phi(n + l, m)
    - 2 * phi(n, m + l) * (phi(m, l) - phi(l, m)),
)

JACOBI = _Clause(
    "jacobi",
    ("m", "n", "l"),
    lambda beta, m, n, l: beta(m, n) * beta(m + n, l) + beta(n, l) * beta(n + l, m) + beta(l, m) * beta(l + m, n),
)

_SYMBOLS = {"m": M, "n": N, "l": L}


def _run_clauses(
    law: str, clauses: Sequence[_Clause], s: GradedStructure, w: Window, symbolic: bool = True
) -> LawReport:
    violations: list[Violation] = []
    checked = skipped = 0
    if s.kind == "table" or s.is_evaluable:
        phi = _evaluator(s)
        for clause in clauses:
            for idx in product(w.indices, repeat=len(clause.names)):
                if not w.contains(*clause.involved(*idx)):
                    skipped += 1
                    continue
                checked += 1
                residual = clause.residual(phi, *idx)
                if residual:
                    violations.append(Violation(**dict(zip(clause.names, idx)), residual=residual, clause=clause.name))
    residuals = None
    if s.kind == "symbolic" and symbolic:
        phi_sym = _symbolic_phi(s)
        residuals = [
            format_canonical(_as_multipoly(clause.residual(phi_sym, *(_SYMBOLS[v] for v in clause.names))))
            for clause in clauses
        ]
    passed = not violations and all(r == "0" for r in residuals or [])
    LOG.info("%s on %s: %d checked, %d skipped, %d violations", law, s.describe(), checked, skipped, len(violations))
    return LawReport(
        law=law,
        window=w.radius,
        checked=checked,
        skipped=skipped,
        violations=violations,
        symbolic_residuals=residuals,
        passed=passed,
    )


def _as_multipoly(value) -> MultiPoly:
    return value if isinstance(value, MultiPoly) else MultiPoly.constant(value)


def check_witt_commutator(s: GradedStructure, w: Window) -> LawReport:
    return _run_clauses("witt-commutator", [COMMUTATOR], s, w)


def check_anti_pre_lie(s: GradedStructure, w: Window) -> LawReport:
    return _run_clauses("anti-pre-lie", [COMMUTATOR, ANTI_PRE_LIE], s, w)


def check_pre_lie(s: GradedStructure, w: Window) -> LawReport:
    return _run_clauses("pre-lie", [PRE_LIE], s, w)


def check_right_commutative(s: GradedStructure, w: Window) -> LawReport:
    return _run_clauses("right-commutative", [RIGHT_COMMUTATIVE], s, w)


def check_novikov(s: GradedStructure, w: Window) -> LawReport:
    return _run_clauses("novikov", [PRE_LIE, RIGHT_COMMUTATIVE], s, w)


def check_admissible_novikov(s: GradedStructure, w: Window) -> LawReport:
    return _run_clauses("admissible-novikov", [ADMISSIBLE, ANTI_PRE_LIE], s, w)


def bracket_of(s: GradedStructure) -> GradedStructure:
    """The commutator bracket β(m,n) = φ(m,n) − φ(n,m)."""
    if s.kind == "symbolic":
        return GradedStructure.symbolic(s.expr - _swapped(s.expr), s.params, origin=f"bracket of {s.describe()}")
    entries = {(m, n): s.entries[(m, n)] - s.entries[(n, m)] for m, n in s.window.pairs()}
    return GradedStructure.table(s.window, entries, origin=f"bracket of {s.describe()}")


def check_jacobi(beta: GradedStructure, w: Window) -> LawReport:
    if beta.kind == "symbolic":
        if not (beta.polynomial + _swapped(beta.polynomial)).is_zero():
            raise StructureError("bracket is not antisymmetric")
    else:
        for m, n in beta.window.pairs():
            if beta.entries[(m, n)] + beta.entries[(n, m)] != 0:
                raise StructureError(f"bracket is not antisymmetric at ({m}, {n})")
    return _run_clauses("jacobi", [JACOBI], beta, w)


LAW_CHECKS: dict[str, Callable[[GradedStructure, Window], LawReport]] = {
    "witt-commutator": check_witt_commutator,
    "jacobi": check_jacobi,
    "anti-pre-lie": check_anti_pre_lie,
    "pre-lie": check_pre_lie,
    "right-commutative": check_right_commutative,
    "novikov": check_novikov,
    "admissible-novikov": check_admissible_novikov,
}


# the one-parameter family and what can be done with it


def family_expr() -> MultiPoly:
    return -(MultiPoly.variable(FAMILY_PARAM) + M + 2 * N)


def family_structure(gamma: Optional[Scalar] = None) -> GradedStructure:
    """φ(a,b) = −(γ + b + 2a), written −(g + m + 2*n); leave gamma as None for the formal family."""
    if gamma is None:
        return GradedStructure.symbolic(family_expr(), origin="family(formal)")
    return GradedStructure.symbolic(family_expr(), {FAMILY_PARAM: gamma})


def materialize(s: GradedStructure, w: Window) -> GradedStructure:
    if s.kind == "table" and s.window == w:
        return s
    phi = _evaluator(s)
    return GradedStructure.table(w, {pair: phi(*pair) for pair in w.pairs()}, origin=s.origin)


def fit_family(s: GradedStructure, w: Window) -> FitResult:
    phi = _evaluator(s)
    gamma = -phi(0, 0)
    for a, b in w.pairs():
        residual = phi(a, b) + gamma + b + 2 * a
        if residual:
            LOG.info("pair (%d, %d) is off the family line by %s", a, b, residual)
            return FitResult(window=w.radius, mismatch=Violation(m=a, n=b, residual=residual))
    return FitResult(window=w.radius, gamma=gamma)


def transform_structure(s: GradedStructure, epsilon: int, lam: Scalar, w: Window) -> GradedStructure:
    """Pull back along W_m -> λ^{-1} ε W_{εm}; only ε changes φ."""
    if epsilon not in (1, -1):
        raise ValueError(f"epsilon must be 1 or -1, got {epsilon}")
    if Fraction(lam) == 0:
        raise ValueError("lambda must be nonzero")
    phi = _evaluator(s)
    if epsilon == 1:
        entries = {(a, b): phi(a, b) for a, b in w.pairs()}
    else:
        entries = {(a, b): -phi(-a, -b) for a, b in w.pairs()}
    return GradedStructure.table(w, entries, origin=f"transform(ε={epsilon}, λ={Fraction(lam)}) of {s.describe()}")


def are_isomorphic(s1: GradedStructure, s2: GradedStructure, w: Window) -> IsoResult:
    phi1, phi2 = _evaluator(s1), _evaluator(s2)
    pairs = w.pairs()
    if all(phi1(a, b) == phi2(a, b) for a, b in pairs):
        return IsoResult(window=w.radius, isomorphic=True, epsilon=1)
    if all(phi1(a, b) == -phi2(-a, -b) for a, b in pairs):
        return IsoResult(window=w.radius, isomorphic=True, epsilon=-1)
    return IsoResult(window=w.radius, isomorphic=False)


def _q_map(direction: str, value, swapped):
    if direction == "to_novikov":
        return -Fraction(1, 3) * (value - 2 * swapped)
    if direction == "to_admissible":
        return value + 2 * swapped
    raise ValueError(f"unknown direction '{direction}'")


def q_transform(s: GradedStructure, direction: str, w: Optional[Window] = None) -> QTransformResult:
    """Move between the anti-pre-Lie and admissible Novikov worlds and report which laws hold."""
    if s.kind == "symbolic":
        out = GradedStructure.symbolic(_q_map(direction, s.expr, _swapped(s.expr)), s.params)
    else:
        phi = _evaluator(s)
        entries = {(a, b): _q_map(direction, phi(a, b), phi(b, a)) for a, b in s.window.pairs()}
        out = GradedStructure.table(s.window, entries)
    w = w or s.window
    if w is None:
        raise ValueError("a window is required for a symbolic structure")
    laws = {}
    if out.kind == "table" or out.is_evaluable:
        for name in ("anti-pre-lie", "admissible-novikov", "pre-lie", "right-commutative", "novikov"):
            laws[name] = LAW_CHECKS[name](out, w).passed
    return QTransformResult(direction=direction, structure=structure_to_spec(out), window=w.radius, laws=laws)


# specialised identities


def diagnostics_specializations(s: GradedStructure, w: Window) -> DiagnosticsReport:
    phi = _evaluator(s)
    found: dict[str, list[Violation]] = {"l=0": [], "l=1": [], "l=2": [], "m=0": [], "m=l=0": []}
    for l in (0, 1, 2):
        if not w.contains(l):
            continue
        for m, n in product(w.indices, repeat=2):
            if w.contains(*_all_sums(m, n, l)):
                residual = ANTI_PRE_LIE.residual(phi, m, n, l)
                if residual:
                    found[f"l={l}"].append(Violation(m=m, n=n, l=l, residual=residual))
    for n, l in product(w.indices, repeat=2):
        if w.contains(n + l):
            residual = (phi(0, l) - phi(0, n + l) - n) * phi(n, l)
            if residual:
                found["m=0"].append(Violation(n=n, l=l, residual=residual))
    for n in w.indices:
        residual = (phi(0, 0) - phi(0, n) - n) * phi(n, 0)
        if residual:
            found["m=l=0"].append(Violation(n=n, residual=residual))
    zero_indices = [m for m in w.indices if phi(m, 0) == 0]
    affine_indices = [m for m in w.indices if phi(m, 0) + 2 * m == phi(0, 0)]
    passed = not any(found.values())
    return DiagnosticsReport(
        window=w.radius,
        specializations=found,
        zero_indices=zero_indices,
        affine_indices=affine_indices,
        passed=passed,
    )


# spec conversion


def structure_from_spec(spec: StructureSpec) -> GradedStructure:
    if isinstance(spec, SymbolicStructureSpec):
        allowed = frozenset(spec.params) | frozenset(spec.formal)
        expr = parse_expression(ExprSource(spec.expr, allowed))
        unknown = [v for v in expr.variables if v not in GRADING_VARIABLES and v not in allowed]
        if unknown:
            raise StructureError(f"unknown parameter '{unknown[0]}'")
        return GradedStructure.symbolic(expr, spec.params)
    window = Window(spec.window)
    entries: dict[tuple[int, int], Fraction] = {}
    for entry in spec.entries:
        key = (entry.m, entry.n)
        if key in entries and entries[key] != entry.value:
            raise StructureError(f"conflicting values for pair {key}")
        entries[key] = entry.value
    return GradedStructure.table(window, entries)


def structure_to_spec(s: GradedStructure) -> StructureSpec:
    if s.kind == "symbolic":
        formal = [v for v in s.expr.variables if v not in ("m", "n") and v not in s.params]
        return SymbolicStructureSpec(expr=format_canonical(s.expr), params=dict(s.params), formal=formal)
    entries = [TableEntry(m=m, n=n, value=v) for (m, n), v in sorted(s.entries.items())]
    return TableStructureSpec(window=s.window.radius, entries=entries)
