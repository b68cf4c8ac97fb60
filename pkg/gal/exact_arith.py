"""Exact rational scalars and multivariate polynomials over the rationals.

Scalars are :class:`fractions.Fraction` (always reduced, denominator > 0).
Polynomials are immutable :class:`MultiPoly` values whose terms are kept in
graded lexicographic order over ASCII-sorted variable names, so two
polynomials compare equal exactly when they are equal as polynomials.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, Literal, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]
Monomial = tuple[tuple[str, int], ...]

_RATIONAL_RE = re.compile(r"\s*(-?\d+)(?:/(\d+))?\s*")


class UnboundVariableError(ValueError):
    """Raised when evaluation meets a variable with no binding."""

    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"unbound variable '{variable}'")


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse "p/q" or "p" (canonical sign on p, q > 0)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    match = _RATIONAL_RE.fullmatch(value)
    if match is None:
        raise ValueError(f"not a rational: {value!r}")
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ValueError(f"zero denominator in {value!r}")
    return Fraction(int(numerator), int(denominator or 1))


def format_rational(q: Scalar) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _canonical_monomial(pairs) -> Monomial:
    exps: dict[str, int] = {}
    for name, exp in pairs:
        if exp < 0:
            raise ValueError(f"negative exponent on {name}")
        exps[name] = exps.get(name, 0) + exp
    return tuple(sorted((name, exp) for name, exp in exps.items() if exp))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return _canonical_monomial(a + b)


def monomial_degree(mono: Monomial) -> int:
    return sum(exp for _, exp in mono)


def _term_key(mono: Monomial):
    # grlex: higher degree first, then larger exponent on the earlier variable
    return (-monomial_degree(mono), tuple((name, -exp) for name, exp in mono))


class MultiPoly:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        merged: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            key = _canonical_monomial(mono)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(coeff)
        ordered = sorted((m for m, c in merged.items() if c != 0), key=_term_key)
        self._terms: dict[Monomial, Fraction] = {m: merged[m] for m in ordered}
        self._hash: int | None = None

    @classmethod
    def constant(cls, value: Scalar) -> "MultiPoly":
        return cls({(): value})

    @classmethod
    def variable(cls, name: str) -> "MultiPoly":
        return cls({((name, 1),): 1})

    @property
    def variables(self) -> tuple[str, ...]:
        names = {name for mono in self._terms for name, _ in mono}
        return tuple(sorted(names))

    @property
    def degree(self) -> int:
        return max((monomial_degree(m) for m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # ring operations

    def __add__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        merged = dict(self._terms)
        for mono, coeff in other._terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + coeff
        return MultiPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "MultiPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        product: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _mono_mul(m1, m2)
                product[mono] = product.get(mono, Fraction(0)) + c1 * c2
        return MultiPoly(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        if not isinstance(exponent, int) or isinstance(exponent, bool):
            raise ValueError(f"exponent must be a non-negative integer, got {exponent!r}")
        if exponent < 0:
            raise ValueError(f"negative exponent {exponent}")
        result = MultiPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"

    def __str__(self) -> str:
        from gal.expr_parser import format_canonical

        return format_canonical(self)

    # evaluation and substitution

    def evaluate(self, bindings: Mapping[str, Scalar]) -> Fraction:
        for name in self.variables:
            if name not in bindings:
                raise UnboundVariableError(name)
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            value = coeff
            for name, exp in mono:
                value *= Fraction(bindings[name]) ** exp
            total += value
        return total

    def substitute(self, bindings: Mapping[str, Union["MultiPoly", Scalar]]) -> "MultiPoly":
        """Simultaneous substitution; unbound variables stay formal."""
        images = {name: _as_poly(value) for name, value in bindings.items()}
        result: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            term = MultiPoly.constant(coeff)
            kept: list[tuple[str, int]] = []
            for name, exp in mono:
                if name in images:
                    term = term * images[name] ** exp
                else:
                    kept.append((name, exp))
            rest = tuple(kept)
            for sub_mono, sub_coeff in term._terms.items():
                key = _mono_mul(sub_mono, rest)
                result[key] = result.get(key, Fraction(0)) + sub_coeff
        return MultiPoly(result)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        return self.substitute({old: MultiPoly.variable(new) for old, new in mapping.items()})

    def degree_in(self, name: str) -> int:
        return max((dict(mono).get(name, 0) for mono in self._terms), default=0)

    def coefficient(self, name: str, power: int) -> "MultiPoly":
        """Coefficient of name**power, as a polynomial in the other variables."""
        picked: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            exps = dict(mono)
            if exps.get(name, 0) == power:
                exps.pop(name, None)
                picked[tuple(sorted(exps.items()))] = coeff
        return MultiPoly(picked)

    def collect(self, names: tuple[str, ...]) -> dict[Monomial, "MultiPoly"]:
        """Split into {monomial in names: coefficient polynomial in the rest}."""
        buckets: dict[Monomial, dict[Monomial, Fraction]] = {}
        chosen = set(names)
        for mono, coeff in self._terms.items():
            outer = tuple((n, e) for n, e in mono if n in chosen)
            inner = tuple((n, e) for n, e in mono if n not in chosen)
            buckets.setdefault(outer, {})[inner] = coeff
        return {outer: MultiPoly(inner) for outer, inner in sorted(buckets.items(), key=lambda kv: _term_key(kv[0]))}


def _as_poly(value) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return MultiPoly.constant(value)
    raise TypeError(f"cannot use {type(value).__name__} as a polynomial")


def normalize(terms: Mapping[Monomial, Scalar]) -> MultiPoly:
    return MultiPoly(terms)


def poly_arith(
    op: Literal["add", "sub", "mul", "pow"],
    p: MultiPoly,
    q: Union[MultiPoly, int],
) -> MultiPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "pow":
        return p ** q
    raise ValueError(f"unknown polynomial operation '{op}'")


def poly_eval(p: MultiPoly, bindings: Mapping[str, Scalar]) -> Fraction:
    return p.evaluate(bindings)


M = MultiPoly.variable("m")
N = MultiPoly.variable("n")
L = MultiPoly.variable("l")
I = MultiPoly.variable("i")
