from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gal.exact_arith import (
    I,
    L,
    M,
    N,
    MultiPoly,
    UnboundVariableError,
    format_rational,
    normalize,
    parse_rational,
    poly_arith,
    poly_eval,
)
from tests.strategies import monomials, polynomials, rationals

G = MultiPoly.variable("g")


class TestRationals:
    @pytest.mark.parametrize(
        "text, value",
        [("3", Fraction(3)), ("-3/4", Fraction(-3, 4)), ("6/8", Fraction(3, 4)), ("0", Fraction(0))],
    )
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("text", ["1/0", "", "1.5", "3/-4", "a", "1//2"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_format_is_canonical(self):
        assert format_rational(Fraction(6, -8)) == "-3/4"
        assert format_rational(Fraction(10, 5)) == "2"
        assert format_rational(-7) == "-7"

    @given(rationals())
    def test_format_parse_inverse(self, q):
        assert parse_rational(format_rational(q)) == q


class TestPolynomialArithmetic:
    def test_add(self):
        assert poly_arith("add", M, N) == M + N
        assert len(M + N) == 2

    def test_difference_of_squares(self):
        assert poly_arith("mul", M + N, M - N) == M**2 - N**2

    def test_zeroth_power(self):
        assert poly_arith("pow", M + 1, 0) == 1

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValueError):
            M ** -1

    def test_unknown_operation(self):
        with pytest.raises(ValueError):
            poly_arith("div", M, N)

    def test_zero_terms_vanish(self):
        p = M + N - M
        assert p == N
        assert (M - M).is_zero()
        assert str(M - M) == "0"

    def test_terms_in_graded_order(self):
        p = 1 + N + M**2 + M * N
        monos = [mono for mono, _ in p.terms()]
        assert monos == [(("m", 2),), (("m", 1), ("n", 1)), (("n", 1),), ()]

    @given(polynomials(), polynomials())
    def test_addition_commutes(self, p, q):
        assert p + q == q + p

    @given(polynomials(), polynomials(), polynomials())
    def test_multiplication_distributes(self, p, q, r):
        assert p * (q + r) == p * q + p * r

    @given(polynomials(), polynomials())
    def test_equal_polynomials_hash_equal(self, p, q):
        if p == q:
            assert hash(p) == hash(q)


class TestEvaluation:
    def test_family_expression(self):
        assert poly_eval(-(G + M + 2 * N), {"g": 1, "m": 2, "n": 3}) == -9

    def test_symmetric_zero(self):
        assert poly_eval(M**2 - N**2, {"m": 2, "n": 2}) == 0

    def test_cubic_coefficients(self):
        p = Fraction(1, 12) * M**3 - Fraction(1, 12) * M
        assert poly_eval(p, {"m": 3}) == 2

    def test_missing_binding_names_variable(self):
        with pytest.raises(UnboundVariableError) as err:
            (M + G).evaluate({"m": 1})
        assert err.value.variable == "g"

    def test_evaluation_ignores_extra_bindings(self):
        assert M.evaluate({"m": 4, "n": 9}) == 4

    @given(polynomials(), polynomials(), rationals(), rationals(), rationals())
    def test_evaluation_is_a_ring_map(self, p, q, g, m, n):
        at = {"g": g, "m": m, "n": n}
        assert (p * q).evaluate(at) == p.evaluate(at) * q.evaluate(at)
        assert (p - q).evaluate(at) == p.evaluate(at) - q.evaluate(at)


class TestSubstitution:
    def test_simultaneous_swap(self):
        p = M + 2 * N
        assert p.rename({"m": "n", "n": "m"}) == N + 2 * M

    def test_unbound_stay_formal(self):
        p = (M + G) * N
        assert p.substitute({"n": L + I}) == M * L + M * I + G * L + G * I

    def test_collect_by_grading_variables(self):
        p = G * M * N + 3 * M * N - G
        buckets = p.collect(("m", "n"))
        assert buckets[(("m", 1), ("n", 1))] == G + 3
        assert buckets[()] == -G

    def test_coefficient_and_degree(self):
        p = 3 * G**2 * M + G - 5
        assert p.degree == 3
        assert p.degree_in("g") == 2
        assert p.coefficient("g", 1) == 1
        assert p.coefficient("g", 0) == -5
        assert p.variables == ("g", "m")


def vanishes_on_grid(p: MultiPoly, degree: int) -> bool:
    grid = range(degree + 1)
    return all(p.evaluate({"m": m, "n": n, "l": l}) == 0 for m, n, l in product(grid, repeat=3))


class TestNormalize:
    @given(st.dictionaries(monomials(("g", "m", "n")), rationals(), max_size=6))
    def test_idempotent(self, raw):
        once = normalize(raw)
        twice = normalize(dict(once.terms()))
        assert twice == once
        assert list(twice.terms()) == list(once.terms())

    def test_merges_unsorted_monomials(self):
        p = normalize({(("n", 1), ("m", 1)): 2, (("m", 1), ("n", 1)): -2, (("m", 0),): 5})
        assert p == 5


class TestGridZeroTest:
    @settings(max_examples=60, deadline=None)
    @given(polynomials(("m", "n", "l"), max_terms=4))
    def test_zero_iff_vanishes_on_grid(self, p):
        assert p.is_zero() == vanishes_on_grid(p, p.degree)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from([M, N, L]), st.integers(0, 3)), min_size=1, max_size=4))
    def test_product_of_grid_roots_is_detected(self, factors):
        p = MultiPoly.constant(1)
        for var, root in factors:
            p = p * (var - root)
        assert not p.is_zero()
        assert not vanishes_on_grid(p, p.degree)

    def test_zero_polynomial_vanishes(self):
        p = (M + N) * (M - N) - M**2 + N**2
        assert p.is_zero()
        assert vanishes_on_grid(p, 2)

    def test_grid_below_degree_is_not_enough(self):
        p = M * (M - 1) * (M - 2)
        assert vanishes_on_grid(p, 2)
        assert not vanishes_on_grid(p, p.degree)
