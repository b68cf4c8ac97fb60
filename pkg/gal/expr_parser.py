"""Expression grammar for structure functions and module coefficients.

    expr   := term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" NAT)?
    atom   := RATIONAL | IDENT | "(" expr ")" | "-" atom

There is no division operator: a slash only appears inside a rational literal
such as ``1/12``. Unary minus applies to an atom, so ``-m^2`` reads as
``(-m)^2`` and ``-(g + m)`` needs its parentheses.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from gal.exact_arith import MultiPoly, format_rational

GRADING_VARIABLES = frozenset({"m", "n", "l", "i"})
_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")

_GRAMMAR = r"""
?start: expr

?expr: term
     | expr "+" term   -> add
     | expr "-" term   -> sub

?term: factor
     | term "*" factor -> mul

?factor: atom
       | atom "^" EXPONENT -> power

?atom: RATIONAL        -> number
     | NAME            -> name
     | "(" expr ")"
     | "-" atom        -> neg

RATIONAL: /\d+(\/\d+)?/
EXPONENT: /-?\d+(\/\d+)?/
NAME: /[A-Za-z][A-Za-z0-9]*/

%import common.WS
%ignore WS
"""

_PARSER = Lark(_GRAMMAR, parser="lalr", lexer="contextual")


class ExprSyntaxError(ValueError):
    """A diagnostic with a 1-based byte offset into the source text."""

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"{message} at offset {position}")


@dataclass(frozen=True)
class ExprSource:
    text: str
    allowed_params: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        params = frozenset(self.allowed_params)
        for name in params:
            if not _IDENT_RE.fullmatch(name):
                raise ValueError(f"invalid parameter name '{name}'")
            if name in GRADING_VARIABLES:
                raise ValueError(f"'{name}' is a reserved grading variable")
        object.__setattr__(self, "allowed_params", params)


def _offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8")) + 1


class _ToPoly(Transformer):
    def __init__(self, text: str, allowed: frozenset[str]):
        super().__init__()
        self._text = text
        self._allowed = allowed | GRADING_VARIABLES

    def _fail(self, token: Token, message: str):
        raise ExprSyntaxError(_offset(self._text, token.start_pos), message)

    def number(self, items):
        (token,) = items
        numerator, _, denominator = token.partition("/")
        if denominator and int(denominator) == 0:
            self._fail(token, f"zero denominator in '{token}'")
        return MultiPoly.constant(Fraction(int(numerator), int(denominator or 1)))

    def name(self, items):
        (token,) = items
        if str(token) not in self._allowed:
            self._fail(token, f"unknown identifier '{token}'")
        return MultiPoly.variable(str(token))

    def neg(self, items):
        return -items[0]

    def add(self, items):
        return items[0] + items[1]

    def sub(self, items):
        return items[0] - items[1]

    def mul(self, items):
        return items[0] * items[1]

    def power(self, items):
        base, token = items
        if not token.isdigit():
            self._fail(token, f"exponent must be a non-negative integer literal, got '{token}'")
        return base ** int(token)


def parse_expression(source: Union[ExprSource, str], params: Iterable[str] = ()) -> MultiPoly:
    """Parse into a canonical MultiPoly, or raise exactly one ExprSyntaxError."""
    if isinstance(source, str):
        source = ExprSource(source, frozenset(params))
    text = source.text
    try:
        tree = _PARSER.parse(text)
    except UnexpectedEOF:
        raise ExprSyntaxError(_offset(text, len(text)), "unexpected end of expression") from None
    except UnexpectedToken as err:
        if err.token.type == "$END":
            raise ExprSyntaxError(_offset(text, len(text)), "unexpected end of expression") from None
        raise ExprSyntaxError(_offset(text, err.token.start_pos), f"unexpected '{err.token}'") from None
    except UnexpectedInput as err:
        pos = getattr(err, "pos_in_stream", None)
        pos = len(text) if pos is None or pos < 0 else pos
        char = text[pos] if pos < len(text) else ""
        raise ExprSyntaxError(_offset(text, pos), f"unexpected character '{char}'") from None
    try:
        result = _ToPoly(text, source.allowed_params).transform(tree)
    except VisitError as err:
        if isinstance(err.orig_exc, ExprSyntaxError):
            raise err.orig_exc from None
        raise
    return result


def _render_term(mono, magnitude) -> str:
    factors = [name if exp == 1 else f"{name}^{exp}" for name, exp in mono]
    if not factors:
        return format_rational(magnitude)
    if magnitude == 1:
        return "*".join(factors)
    return format_rational(magnitude) + "*" + "*".join(factors)


def format_canonical(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    pieces: list[str] = []
    for mono, coeff in p.terms():
        body = _render_term(mono, abs(coeff))
        if not pieces:
            if coeff < 0:
                # "-x^2" would read as (-x)^2
                if abs(coeff) == 1 and mono and mono[0][1] > 1:
                    body = "1*" + body
                body = "-" + body
            pieces.append(body)
        else:
            pieces.append(("- " if coeff < 0 else "+ ") + body)
    return " ".join(pieces)
