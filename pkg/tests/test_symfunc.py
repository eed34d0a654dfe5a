from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhecke.oracles import alpha_closed_form, complete_as_polynomials
from qhecke.symfunc import (
    SymElement,
    a1_relation_check,
    alpha,
    complete_in_e,
    eh_identity_check,
    parse,
    partitions,
    render,
    series_inverse,
    signed_complete,
)


@pytest.mark.parametrize("m", range(13))
def test_eh_identity(m):
    assert eh_identity_check(m)


@pytest.mark.parametrize("r", range(13))
def test_complete_matches_closed_form(r):
    assert complete_in_e(r).terms == {lam: alpha_closed_form(lam) for lam in partitions(r)}


@pytest.mark.parametrize("r", range(1, 6))
def test_complete_matches_polynomial_expansion(r):
    h, rhs = complete_as_polynomials(r, r)
    assert h == rhs


def test_small_values():
    assert render(complete_in_e(2)) == "-e[2] + e[1,1]"
    assert alpha((2,)) == -1 and alpha((1, 1)) == 1
    assert signed_complete(1) == -SymElement.e(1)
    assert signed_complete(0) == SymElement.one()
    assert signed_complete(-1).is_zero()


def test_e_conventions():
    assert SymElement.e(0) == SymElement.one()
    assert SymElement.e(2, 0, 1) == SymElement.e(2, 1)
    assert SymElement.e(-1).is_zero()


@pytest.mark.parametrize("b", range(8))
def test_a1_relation(b):
    assert a1_relation_check(b, 7)


def test_series_inverse_of_elementary():
    E = [SymElement.e(k) for k in range(9)]
    inv = series_inverse(E, 8)
    assert inv == [signed_complete(k) for k in range(9)]


def test_series_inverse_requires_unit():
    with pytest.raises(ValueError):
        series_inverse([SymElement.e(1)], 3)


sym_elements = st.dictionaries(
    st.lists(st.integers(1, 4), max_size=4).map(lambda xs: tuple(sorted(xs, reverse=True))),
    st.fractions(max_denominator=5).filter(lambda f: f != 0),
    max_size=5,
).map(SymElement)


@settings(max_examples=200, deadline=None)
@given(sym_elements)
def test_render_parse_round_trip(x):
    assert parse(render(x)) == x


@settings(max_examples=60, deadline=None)
@given(sym_elements, sym_elements, sym_elements)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("bad", ["e[2] e[1]", "+", "e[0]", "e[a]"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse(bad)


def test_degree():
    assert (SymElement.e(2, 1) * Fraction(3)).degree() == 6
    assert (SymElement.e(1) + SymElement.one()).degree() is None
