from math import comb, factorial

import pytest

from qhecke.oracles import NilHeckeRep, acts_equal, alpha_closed_form, cyclotomic_nilhecke_dim


@pytest.fixture
def rep3():
    return NilHeckeRep(3)


def test_divided_difference_of_x1(rep3):
    x1, x2 = rep3.xs[:2]
    assert rep3.divided_difference(rep3.poly(x1), 1) == rep3.poly(1)
    assert rep3.divided_difference(rep3.poly(x1 + x2), 1).is_zero


def test_nil_square_and_braid(rep3):
    assert acts_equal(rep3, [(1, [("t", 1), ("t", 1)])], [], 4)
    assert acts_equal(rep3, [(1, [("t", 1), ("t", 2), ("t", 1)])], [(1, [("t", 2), ("t", 1), ("t", 2)])], 4)


def test_dot_slide(rep3):
    # x_1 then psi_1 minus psi_1 then x_2 is the identity (r = 1)
    lhs = [(1, [("x", 1), ("t", 1)]), (-1, [("t", 1), ("x", 2)])]
    assert acts_equal(rep3, lhs, [(1, [])], 4)


def test_r_scales_crossing():
    rep = NilHeckeRep(2, r=3)
    assert rep.apply([("t", 1)], rep.poly(rep.xs[0])) == rep.poly(3)


@pytest.mark.parametrize("N,m,expected", [
    (1, 1, {0: 1}),
    (2, 1, {0: 1, 2: 1}),
    (2, 2, {-2: 1, 0: 2, 2: 1}),
    (1, 2, {}),
    (2, 3, {}),
])
def test_cyclotomic_dims(N, m, expected):
    assert cyclotomic_nilhecke_dim(N, m) == expected


@pytest.mark.parametrize("N,m", [(3, 1), (3, 2), (4, 2)])
def test_cyclotomic_total(N, m):
    # matrices of size m! over a ring of rank binom(N, m)
    assert sum(cyclotomic_nilhecke_dim(N, m).values()) == factorial(m) ** 2 * comb(N, m)


@pytest.mark.parametrize("lam,value", [((1,), 1), ((2,), -1), ((1, 1), 1), ((2, 1), -2), ((1, 1, 1), 1), ((3,), 1)])
def test_alpha_closed_form(lam, value):
    assert alpha_closed_form(lam) == value
