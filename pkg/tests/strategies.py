from hypothesis import strategies as st

from gal.exact_arith import MultiPoly
from gal.witt_core import GradedStructure, Window


def rationals(bound: int = 12, max_denominator: int = 12):
    return st.fractions(min_value=-bound, max_value=bound, max_denominator=max_denominator)


def nonzero_rationals(bound: int = 12):
    return rationals(bound).filter(lambda q: q != 0)


def monomials(names=("g", "m", "n"), max_exp: int = 3):
    return st.lists(st.tuples(st.sampled_from(names), st.integers(0, max_exp)), max_size=len(names)).map(tuple)


def polynomials(names=("g", "m", "n"), max_terms: int = 5):
    return st.dictionaries(monomials(names), rationals(), max_size=max_terms).map(MultiPoly)


def window_tables(radius: int = 2):
    w = Window(radius)
    pairs = w.pairs()
    values = st.lists(rationals(6, 4), min_size=len(pairs), max_size=len(pairs))
    return values.map(lambda vs: GradedStructure.table(w, dict(zip(pairs, vs))))


def family_gammas():
    return rationals(20, 6)
