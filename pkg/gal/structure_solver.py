"""Recover graded anti-pre-Lie structures two independent ways.

``solve_ansatz`` eliminates over the coefficients of a polynomial structure
function; ``solve_table`` propagates the identities over the unknown values of
a window table. Neither calls the other.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

import sympy

from gal.config import DEFAULT_BUDGET
from gal.exact_arith import L, M, N, Monomial, MultiPoly, Scalar
from gal.expr_parser import format_canonical
from gal.schemas import ParametricSolution, SearchLog, SolveOutcome
from gal.witt_core import (
    ANTI_PRE_LIE,
    COMMUTATOR,
    GradedStructure,
    Window,
    check_anti_pre_lie,
    structure_to_spec,
)

LOG = logging.getLogger(__name__)


class BudgetExceeded(Exception):
    def __init__(self, frontier: list[str]):
        self.frontier = frontier
        super().__init__(f"branch budget exhausted with {len(frontier)} open items")


@dataclass
class _Search:
    budget: int
    log: SearchLog = field(default_factory=SearchLog)

    def branch(self, frontier):
        self.log.branches += 1
        if self.log.branches > self.budget:
            raise BudgetExceeded([str(item) for item in frontier])

    def prune(self, reason: str):
        self.log.pruned += 1
        LOG.debug("pruned: %s", reason)


# polynomial ansatz


@dataclass(frozen=True)
class AnsatzProblem:
    max_total_degree: int
    pinned: Optional[Fraction] = None

    def __post_init__(self):
        if self.max_total_degree < 1:
            raise ValueError("the ansatz needs total degree at least 1")
        if self.max_total_degree > 9:
            raise ValueError("the ansatz supports total degree at most 9")


def _coefficient_name(a: int, b: int) -> str:
    return f"c{a}{b}"


def ansatz_polynomial(degree: int) -> MultiPoly:
    """Σ c_ab n^a m^b over a + b ≤ degree, with n the left index."""
    terms: dict[Monomial, int] = {}
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            terms[((_coefficient_name(a, b), 1), ("n", a), ("m", b))] = 1
    return MultiPoly(terms)


def _coefficient_equations(residual: MultiPoly, grading: tuple[str, ...]) -> list[MultiPoly]:
    return [coeff for coeff in residual.collect(grading).values() if not coeff.is_zero()]


def ansatz_equations(problem: AnsatzProblem) -> list[MultiPoly]:
    phi = ansatz_polynomial(problem.max_total_degree)

    def at(a, b):
        return phi.substitute({"n": a, "m": b})

    equations = _coefficient_equations(COMMUTATOR.residual(at, M, N), ("m", "n"))
    equations += _coefficient_equations(ANTI_PRE_LIE.residual(at, M, N, L), ("m", "n", "l"))
    if problem.pinned is not None:
        equations.append(MultiPoly.variable(_coefficient_name(0, 0)) - problem.pinned)
    return equations


def _to_sympy(p: MultiPoly, names: tuple[str, ...]) -> sympy.Poly:
    # Symbol, not symbols(): table unknowns contain commas
    gens = [sympy.Symbol(name) for name in names]
    data = {}
    for mono, coeff in p.terms():
        exps = dict(mono)
        data[tuple(exps.get(name, 0) for name in names)] = sympy.Rational(coeff.numerator, coeff.denominator)
    return sympy.Poly.from_dict(data, *gens, domain="QQ")


def _from_sympy(poly: sympy.Poly, names: tuple[str, ...]) -> MultiPoly:
    terms = {}
    for exps, coeff in poly.as_dict().items():
        terms[tuple(zip(names, exps))] = Fraction(str(coeff))
    return MultiPoly(terms)


def factor_polynomial(p: MultiPoly) -> list[tuple[MultiPoly, int]]:
    """Irreducible factors over the rationals with multiplicities, constants dropped."""
    names = p.variables
    if not names:
        return []
    _, factors = _to_sympy(p, names).factor_list()
    return [(_from_sympy(f, names), mult) for f, mult in factors]


def _linear_pivot(eq: MultiPoly) -> Optional[tuple[str, MultiPoly]]:
    for name in eq.variables:
        if eq.degree_in(name) != 1:
            continue
        coeff = eq.coefficient(name, 1)
        if coeff.is_constant():
            rest = eq.coefficient(name, 0)
            return name, rest * (-1 / coeff.constant_term)
    return None


def _equation_key(eq: MultiPoly):
    return (eq.degree, len(eq), len(eq.variables), format_canonical(eq))


@dataclass
class _Leaf:
    bindings: dict[str, MultiPoly]
    relations: list[MultiPoly]


def _eliminate(equations: list[MultiPoly], bindings: dict[str, MultiPoly], search: _Search) -> list[_Leaf]:
    search.branch(equations)
    unique = {eq for eq in equations if not eq.is_zero()}
    for eq in unique:
        if eq.is_constant():
            search.prune(f"contradiction {format_canonical(eq)} = 0")
            return []
    pending = sorted(unique, key=_equation_key)
    if not pending:
        return [_Leaf(bindings, [])]

    for eq in pending:
        pivot = _linear_pivot(eq)
        if pivot is None:
            continue
        name, value = pivot
        LOG.debug("pivot %s = %s", name, format_canonical(value))
        image = {name: value}
        rest = [other.substitute(image) for other in pending if other is not eq]
        updated = {var: expr.substitute(image) for var, expr in bindings.items()}
        updated[name] = value
        return _eliminate(rest, updated, search)

    for target in pending:
        others = [eq for eq in pending if eq is not target]
        factors = factor_polynomial(target)
        if len(factors) > 1:
            LOG.debug("branching on %d factors of %s", len(factors), format_canonical(target))
            leaves = []
            for factor, _ in factors:
                leaves += _eliminate(others + [factor], dict(bindings), search)
            return leaves
        ((factor, multiplicity),) = factors
        if multiplicity > 1:
            return _eliminate(others + [factor], bindings, search)
        if len(factor.variables) == 1:
            search.prune(f"{format_canonical(factor)} has no rational root")
            return []
    if groebner_basis(pending) is None:
        search.prune("relations have no common zero")
        return []
    LOG.debug("leaving %d relations unsolved", len(pending))
    return [_Leaf(bindings, pending)]


def solve_ansatz(problem: AnsatzProblem, budget: int = DEFAULT_BUDGET) -> SolveOutcome:
    phi = ansatz_polynomial(problem.max_total_degree)
    search = _Search(budget)
    try:
        leaves = _eliminate(ansatz_equations(problem), {}, search)
        status = "complete"
        frontier = None
    except BudgetExceeded as err:
        leaves, status, frontier = [], "budget-exceeded", err.frontier
    solutions, parametric, seen = [], [], set()
    for leaf in leaves:
        expr = phi.substitute(leaf.bindings)
        free = {name for name in expr.variables if name not in ("m", "n")}
        free.update(v for rel in leaf.relations for v in rel.variables)
        text = format_canonical(expr)
        key = (text, tuple(format_canonical(r) for r in leaf.relations))
        if key in seen:
            continue
        seen.add(key)
        if not free:
            structure = GradedStructure.symbolic(expr)
            if not check_anti_pre_lie(structure, Window(3)).passed:
                LOG.warning("discarding unverified ansatz solution %s", text)
                continue
            solutions.append(structure_to_spec(structure))
        else:
            parametric.append(
                ParametricSolution(
                    free_parameters=sorted(free),
                    relations=[format_canonical(r) for r in leaf.relations],
                    expr=text,
                )
            )
    LOG.info(
        "ansatz degree %d: %d solutions, %d parametric, %d branches",
        problem.max_total_degree,
        len(solutions),
        len(parametric),
        search.log.branches,
    )
    return SolveOutcome(
        mode="ansatz",
        status=status,
        solutions=solutions,
        parametric=parametric,
        search_log=search.log,
        frontier=frontier,
    )


# window tables


def _unknown(a: int, b: int) -> str:
    return f"u[{a},{b}]"


def _table_phi(a: int, b: int) -> MultiPoly:
    """φ(a,b) in terms of the representatives u[a,b] with a ≤ b."""
    if a <= b:
        return MultiPoly.variable(_unknown(a, b))
    return MultiPoly.variable(_unknown(b, a)) + (b - a)


def table_equations(w: Window) -> list[MultiPoly]:
    equations = []
    for m, n, l in product(w.indices, repeat=3):
        if w.contains(m + n, m + l, n + l, m + n + l):
            eq = ANTI_PRE_LIE.residual(_table_phi, m, n, l)
            if not eq.is_zero():
                equations.append(eq)
    return equations


def rational_roots(eq: MultiPoly, name: str) -> list[Fraction]:
    """Rational roots of a univariate polynomial, in increasing order."""
    if eq.degree_in(name) > 2:
        roots = set()
        for factor, _ in factor_polynomial(eq):
            if factor.degree == 1:
                roots.add(-factor.coefficient(name, 0).constant_term / factor.coefficient(name, 1).constant_term)
        return sorted(roots)
    a, b, c = (eq.coefficient(name, k).constant_term for k in (2, 1, 0))
    if a == 0:
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    root = math.isqrt(disc.numerator * disc.denominator)
    if root * root != disc.numerator * disc.denominator:
        return []
    sqrt = Fraction(root, disc.denominator)
    return sorted({(-b - sqrt) / (2 * a), (-b + sqrt) / (2 * a)})


def _propagate(equations: list[MultiPoly], values: dict[str, Fraction]) -> Optional[list[MultiPoly]]:
    while True:
        reduced = []
        for eq in equations:
            known = {v: values[v] for v in eq.variables if v in values}
            if known:
                eq = eq.substitute(known)
            if eq.is_zero():
                continue
            if eq.is_constant():
                return None
            reduced.append(eq)
        equations = reduced
        progress = False
        for eq in equations:
            if len(eq.variables) == 1 and eq.degree == 1:
                (name,) = eq.variables
                value = rational_roots(eq, name)[0]
                if values.setdefault(name, value) != value:
                    return None
                progress = True
        if progress:
            continue
        for eq in equations:
            if len(eq.variables) == 1:
                (name,) = eq.variables
                roots = rational_roots(eq, name)
                if not roots:
                    return None
                if len(roots) == 1:
                    values[name] = roots[0]
                    progress = True
                    break
        if not progress:
            return equations


def groebner_basis(equations: list[MultiPoly]) -> Optional[list[MultiPoly]]:
    """Reduced lex Gröbner basis of the equations, or None when they have no common zero."""
    names = tuple(sorted({v for eq in equations for v in eq.variables}))
    if not names:
        return None if any(not eq.is_zero() for eq in equations) else []
    polys = [_to_sympy(eq, names).as_expr() for eq in equations]
    basis = sympy.groebner(polys, *[sympy.Symbol(name) for name in names], order="lex", domain="QQ")
    reduced = [_from_sympy(p, names) for p in basis.polys]
    if any(p.is_constant() and not p.is_zero() for p in reduced):
        return None
    return reduced


def _table_search(
    equations: list[MultiPoly],
    values: dict[str, Fraction],
    unknowns: list[str],
    search: _Search,
    found: list[dict[str, Fraction]],
    stuck: list[list[str]],
):
    search.branch([u for u in unknowns if u not in values])
    remaining = _propagate(equations, values)
    if remaining is None:
        search.prune("table contradiction")
        return
    if remaining and all(len(eq.variables) > 1 for eq in remaining):
        basis = groebner_basis(remaining)
        if basis is None:
            search.prune("remaining equations have no common zero")
            return
        if any(len(eq.variables) == 1 for eq in basis):
            LOG.debug("continuing from a Gröbner basis of %d equations", len(basis))
            remaining = basis
    for eq in remaining:
        if len(eq.variables) == 1:
            (name,) = eq.variables
            roots = rational_roots(eq, name)
            if not roots:
                search.prune(f"{name} has no rational value")
            for root in roots:
                LOG.debug("branch %s = %s", name, root)
                _table_search(remaining, {**values, name: root}, unknowns, search, found, stuck)
            return
    open_unknowns = [u for u in unknowns if u not in values]
    if open_unknowns:
        stuck.append(open_unknowns)
        return
    found.append(values)


def solve_table(w: Window, phi00: Scalar, budget: int = DEFAULT_BUDGET) -> SolveOutcome:
    if w.radius < 3:
        LOG.warning("window radius %d is below 3; expect an underdetermined search", w.radius)
    unknowns = sorted({_unknown(min(a, b), max(a, b)) for a, b in w.pairs()})
    search = _Search(budget)
    found: list[dict[str, Fraction]] = []
    stuck: list[list[str]] = []
    status, frontier = "complete", None
    try:
        _table_search(table_equations(w), {_unknown(0, 0): Fraction(phi00)}, unknowns, search, found, stuck)
    except BudgetExceeded as err:
        status, frontier = "budget-exceeded", err.frontier
    if status == "complete" and stuck:
        status = "underdetermined"
        frontier = stuck[0]
    solutions, seen = [], set()
    for values in found:
        entries = {(a, b): _table_phi(a, b).evaluate(values) for a, b in w.pairs()}
        key = tuple(sorted(entries.items()))
        if key in seen:
            continue
        seen.add(key)
        table = GradedStructure.table(w, entries)
        if not check_anti_pre_lie(table, w).passed:
            LOG.warning("discarding a table that fails the anti-pre-Lie check")
            continue
        solutions.append(structure_to_spec(table))
    LOG.info("table search on radius %d: %d tables, status %s", w.radius, len(solutions), status)
    return SolveOutcome(mode="table", status=status, solutions=solutions, search_log=search.log, frontier=frontier)


def smallest_unique_window(phi00: Scalar, max_radius: int, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Smallest radius on which the table search completes with exactly one table."""
    for radius in range(1, max_radius + 1):
        outcome = solve_table(Window(radius), phi00, budget)
        if outcome.status == "complete" and len(outcome.solutions) == 1:
            return radius
    return None
