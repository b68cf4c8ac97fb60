"""Graded products on the Virasoro algebra with a trivially acting central element.

The W-part of the product is the family −(γ + m + 2n); what is left to choose
is ψ_m, the central coefficient of W_m∘W_{−m}. Every constraint on ψ is linear
and is kept in residual form  Σ_j a_j ψ_j + b = 0.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Literal, Mapping, Optional

from gal.exact_arith import Scalar, format_rational
from gal.schemas import CentralCertificate, CentralRow, CentralSolveResult, LawReport, Violation
from gal.witt_core import Window, check_anti_pre_lie, family_structure

LOG = logging.getLogger(__name__)

Clause = Literal["cocycle", "associator", "zero-mode"]


@dataclass(frozen=True)
class CentralStructure:
    gamma: Fraction
    psi: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        object.__setattr__(self, "psi", {m: Fraction(v) for m, v in self.psi.items()})


@dataclass
class _Row:
    eq: Clause
    m: int
    n: Optional[int]
    coeffs: dict[int, Fraction]
    constant: Fraction

    def residual(self, psi: Mapping[int, Fraction]) -> Fraction:
        return sum((c * psi[j] for j, c in self.coeffs.items()), self.constant)

    def label(self) -> str:
        return f"{self.eq}({self.m})" if self.n is None else f"{self.eq}({self.m},{self.n})"


def _combine(*terms: tuple[int, Scalar]) -> dict[int, Fraction]:
    coeffs: dict[int, Fraction] = {}
    for index, value in terms:
        coeffs[index] = coeffs.get(index, Fraction(0)) + Fraction(value)
    return {j: c for j, c in coeffs.items() if c}


def cocycle_row(m: int) -> _Row:
    """ψ_m − ψ_{−m} − (m³ − m)/12."""
    return _Row("cocycle", m, None, _combine((m, 1), (-m, -1)), -Fraction(m**3 - m, 12))


def associator_row(gamma: Fraction, m: int, n: int) -> _Row:
    """(γ + m − n)ψ_n − (γ + n − m)ψ_m − (m − n)ψ_{m+n}."""
    coeffs = _combine((n, gamma + m - n), (m, -(gamma + n - m)), (m + n, -(m - n)))
    return _Row("associator", m, n, coeffs, Fraction(0))


def zero_mode_row(gamma: Fraction, m: int) -> _Row:
    """(γ + m)ψ_0 − γψ_m."""
    return _Row("zero-mode", m, None, _combine((0, gamma + m), (m, -gamma)), Fraction(0))


def _rows(gamma: Fraction, w: Window, include_cocycle: bool = True) -> Iterator[_Row]:
    if include_cocycle:
        for m in range(1, w.radius + 1):
            yield cocycle_row(m)
    for m in w.indices:
        for n in w.indices:
            if m and n and m != n and w.contains(m + n):
                yield associator_row(gamma, m, n)
    for m in w.indices:
        if m:
            yield zero_mode_row(gamma, m)


def _elimination_order(row: _Row):
    if row.eq == "zero-mode":
        return (0, abs(row.m), row.m < 0)
    if row.eq == "associator" and row.m + row.n == 0:
        return (1, abs(row.m), row.m < 0)
    if row.eq == "cocycle":
        return (2, row.m)
    return (3, abs(row.m) + abs(row.n), not (row.m >= 0 and row.n >= 0), row.m, row.n)


def _unknown_order(w: Window) -> list[int]:
    return sorted(w.indices, key=lambda m: (abs(m), m < 0))


def check_central(c: CentralStructure, w: Window, include_cocycle: bool = True) -> LawReport:
    missing = [m for m in w.indices if m not in c.psi]
    if missing:
        raise ValueError(f"ψ has no value at index {missing[0]}")
    violations = []
    checked = 0
    for row in _rows(c.gamma, w, include_cocycle):
        checked += 1
        residual = row.residual(c.psi)
        if residual:
            violations.append(Violation(m=row.m, n=row.n, residual=residual, clause=row.eq))
    LOG.info("central check at γ=%s: %d rows, %d violations", c.gamma, checked, len(violations))
    return LawReport(
        law="virasoro-central",
        window=w.radius,
        checked=checked,
        skipped=0,
        violations=violations,
        passed=not violations,
    )


def check_central_w_part(gamma: Scalar, w: Window) -> LawReport:
    """The W-part is the Witt family, so its residuals are those of the family."""
    return check_anti_pre_lie(family_structure(gamma), w)


@dataclass
class _Reduced:
    coeffs: dict[int, Fraction]
    constant: Fraction
    combination: dict[int, Fraction]


def _subtract(target: _Reduced, source: _Reduced, factor: Fraction):
    for j, c in source.coeffs.items():
        value = target.coeffs.get(j, Fraction(0)) - factor * c
        if value:
            target.coeffs[j] = value
        else:
            target.coeffs.pop(j, None)
    target.constant -= factor * source.constant
    for k, y in source.combination.items():
        value = target.combination.get(k, Fraction(0)) - factor * y
        if value:
            target.combination[k] = value
        else:
            target.combination.pop(k, None)


def solve_central(gamma: Scalar, w: Window, include_cocycle: bool = True) -> CentralSolveResult:
    """Exact elimination over ψ; either a verified ψ or a certificate of infeasibility."""
    gamma = Fraction(gamma)
    if w.radius < 3:
        LOG.warning("window radius %d is below 3; the system may be too small to be contradictory", w.radius)
    rows = sorted(_rows(gamma, w, include_cocycle), key=_elimination_order)
    rank = {m: position for position, m in enumerate(_unknown_order(w))}
    pivots: dict[int, _Reduced] = {}
    trace: list[str] = []
    for k, row in enumerate(rows):
        current = _Reduced(dict(row.coeffs), row.constant, {k: Fraction(1)})
        for j in sorted(list(current.coeffs), key=rank.__getitem__):
            if j in pivots and j in current.coeffs:
                pivot = pivots[j]
                _subtract(current, pivot, current.coeffs[j] / pivot.coeffs[j])
        if not current.coeffs:
            if current.constant:
                certificate = CentralCertificate(
                    rows=[
                        CentralRow(eq=rows[i].eq, m=rows[i].m, n=rows[i].n, coef=y)
                        for i, y in sorted(current.combination.items())
                    ],
                    contradiction=current.constant,
                    trace=trace,
                )
                LOG.info("central system at γ=%s is infeasible: %s gives %s", gamma, row.label(), current.constant)
                return CentralSolveResult(gamma=gamma, window=w.radius, feasible=False, certificate=certificate)
            continue
        lead = min(current.coeffs, key=rank.__getitem__)
        for other in pivots.values():
            if lead in other.coeffs:
                _subtract(other, current, other.coeffs[lead] / current.coeffs[lead])
        pivots[lead] = current
        trace.append(f"ψ[{lead}] from {row.label()}")
        LOG.debug("pivot ψ[%d] from %s", lead, row.label())
    psi = {m: Fraction(0) for m in w.indices}
    for lead, reduced in pivots.items():
        # other unknowns in a reduced row are free and set to zero
        psi[lead] = -reduced.constant / reduced.coeffs[lead]
    report = check_central(CentralStructure(gamma, psi), w, include_cocycle)
    if not report.passed:
        raise AssertionError(f"central solution fails its own system at γ={format_rational(gamma)}")
    return CentralSolveResult(gamma=gamma, window=w.radius, feasible=True, psi=dict(sorted(psi.items())))


def verify_certificate(certificate: CentralCertificate, gamma: Scalar, w: Window) -> bool:
    """Recombine the cited rows: the ψ side must cancel and the constant must match."""
    gamma = Fraction(gamma)
    coeffs: dict[int, Fraction] = {}
    constant = Fraction(0)
    for cited in certificate.rows:
        if cited.eq == "cocycle":
            row = cocycle_row(cited.m)
        elif cited.eq == "associator":
            row = associator_row(gamma, cited.m, cited.n)
        else:
            row = zero_mode_row(gamma, cited.m)
        if not w.contains(*row.coeffs):
            return False
        for j, c in row.coeffs.items():
            coeffs[j] = coeffs.get(j, Fraction(0)) + cited.coef * c
        constant += cited.coef * row.constant
    return all(c == 0 for c in coeffs.values()) and constant == certificate.contradiction != 0
