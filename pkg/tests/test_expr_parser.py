from fractions import Fraction

import pytest
from hypothesis import given, settings

from gal.exact_arith import M, N, MultiPoly
from gal.expr_parser import ExprSource, ExprSyntaxError, format_canonical, parse_expression
from tests.strategies import polynomials

G = MultiPoly.variable("g")
A = MultiPoly.variable("a")

MALFORMED = [
    "",
    "m +",
    "+ m",
    "m * * n",
    "(m + n",
    "m + n)",
    "m ^ -1",
    "m^1/2",
    "m / 2",
    "(m^3 - m)/12",
    "1/0",
    "x + m",
    "2.5*m",
    "m n",
    "m^",
    "^2",
    "()",
    "m**2",
    "3m",
    "m^2^2",
]


class TestParse:
    def test_family_expression(self):
        assert parse_expression("-(g + m + 2*n)", params={"g"}) == -G - M - 2 * N

    def test_rational_literals(self):
        p = parse_expression("1/12*m^3 - 1/12*m")
        assert p == Fraction(1, 12) * M**3 - Fraction(1, 12) * M

    def test_module_coefficient(self):
        i = MultiPoly.variable("i")
        assert parse_expression("a + i + 2*m", params={"a"}) == A + i + 2 * M

    def test_unary_minus_binds_to_atom(self):
        assert parse_expression("-m^2") == M**2
        assert parse_expression("-1*m^2") == -(M**2)

    def test_source_object(self):
        assert parse_expression(ExprSource("g*n", frozenset({"g"}))) == G * N

    def test_reserved_parameter_name(self):
        with pytest.raises(ValueError):
            ExprSource("m", frozenset({"n"}))

    @pytest.mark.parametrize("text", MALFORMED)
    def test_malformed_inputs_fail_once_with_position(self, text):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression(text)
        assert 1 <= err.value.position <= len(text.encode("utf-8")) + 1
        assert err.value.message

    def test_end_of_input_position(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression("m +")
        assert err.value.position == 4

    def test_unknown_identifier_position(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression("m + x")
        assert err.value.position == 5
        assert "unknown identifier 'x'" in err.value.message

    def test_zero_denominator_message(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression("m + 3/0")
        assert "zero denominator" in err.value.message

    def test_fractional_exponent_message(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression("m^1/2")
        assert "non-negative integer" in err.value.message


class TestCanonicalForm:
    def test_family(self):
        assert format_canonical(-G - M - 2 * N) == "-g - m - 2*n"

    def test_zero(self):
        assert format_canonical(M - M) == "0"

    def test_cubic(self):
        assert format_canonical(Fraction(1, 12) * M**3 - Fraction(1, 12) * M) == "1/12*m^3 - 1/12*m"

    def test_leading_minus_one_on_power(self):
        assert format_canonical(-(M**2) + N) == "-1*m^2 + n"

    @settings(max_examples=1000)
    @given(polynomials())
    def test_print_then_parse_is_identity(self, p):
        assert parse_expression(format_canonical(p), params={"g"}) == p
