import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhecke.cartan import PRESETS, make_scalars, random_scalars
from qhecke.diagcalc import (
    BoundaryError,
    Calculus,
    DiagramError,
    FuelExhausted,
    Morphism2,
    NotClosedError,
    ParseError,
    Slice,
    bubble_value,
    evaluate_closed,
    fake_bubble,
    from_slices,
    identity,
    parse,
    reduce,
    render,
)
from qhecke.symfunc import SymElement, complete_in_e, parse as sym_parse
from qhecke.verify import curl_rhs, left_curl, random_diagram, right_curl

S = Slice


def test_zigzag_straightens(calc_a1):
    m = parse(calc_a1, "@2: id(Ei) * cupFE(i) ; capEF(i) * id(Ei)")
    out = reduce(m)
    assert out == identity(calc_a1, calc_a1.seq(2, [("i", 1)]))
    assert out.info["rules"] == {"zigzag": 1}


@pytest.mark.parametrize("n", [-4, -3, -2, -1, 1, 2, 3, 4])
def test_bubble_with_minimal_dots_is_one(calc_a1, n):
    # a real bubble of degree zero
    if n > 0:
        text = f"@{n}: cupEF(i) ; " + "dot(i) * id(Fi) ; " * (n - 1) + "capEF(i)"
    else:
        text = f"@{n}: cupFE(i) ; " + "id(Fi) * dot(i) ; " * (-n - 1) + "capFE(i)"
    assert evaluate_closed(parse(calc_a1, text)).as_sym() == SymElement.one()


@pytest.mark.parametrize("n,dots", [(2, 2), (3, 4), (1, 3)])
def test_cw_bubble_values(calc_a1, n, dots):
    text = f"@{n}: cupEF(i) ; " + "dot(i) * id(Fi) ; " * dots + "capEF(i)"
    assert evaluate_closed(parse(calc_a1, text)).as_sym() == SymElement.e(dots - n + 1)


def test_negative_degree_bubbles_vanish(calc_a1):
    assert evaluate_closed(parse(calc_a1, "@3: cupEF(i) ; capEF(i)")).as_sym().is_zero()
    assert evaluate_closed(parse(calc_a1, "@-3: cupFE(i) ; capFE(i)")).as_sym().is_zero()


def test_ccw_value_in_negative_weight(calc_a1):
    text = "@-2: cupFE(i) ; " + "id(Fi) * dot(i) ; " * 3 + "capFE(i)"
    assert evaluate_closed(parse(calc_a1, text)).as_sym() == SymElement.e(2)


def test_bubble_value_free_constant():
    assert bubble_value("ccw", 0, -1, c_minus1=5) == SymElement.scalar(5)
    with pytest.raises(ValueError):
        bubble_value("up", 0, 0)


@pytest.mark.parametrize("r", range(6))
def test_fake_bubble_is_signed_complete(r):
    value = fake_bubble(3, "i", r).value
    assert value == complete_in_e(r).scale((-1) ** r)


def test_fake_bubble_examples():
    assert fake_bubble(0, "i", 0).render() == "1"
    assert fake_bubble(3, "i", 2).render() == "-e[2] + e[1,1]"
    assert fake_bubble(3, "i", 2).value == sym_parse("-e[2] + e[1,1]")
    with pytest.raises(ValueError):
        fake_bubble(3, "i", -1)


@pytest.mark.parametrize("n", range(1, 5))
def test_curls_vanish_on_positive_side(calc_a1, n):
    assert reduce(right_curl(calc_a1, "i", n)).is_zero()
    # the left curl's loop sits in weight base + 2
    assert reduce(left_curl(calc_a1, "i", -n - 2)).is_zero()


@pytest.mark.parametrize("n", range(-4, 3))
@pytest.mark.parametrize("r", [1, -1, 2])
def test_curl_values(n, r):
    calc = Calculus(PRESETS["A1"], make_scalars(PRESETS["A1"], r={"i": r}))
    assert reduce(right_curl(calc, "i", n)) == reduce(curl_rhs(calc, "i", n, "right"))
    assert reduce(left_curl(calc, "i", n)) == reduce(curl_rhs(calc, "i", n, "left"))


def test_degree_preserved_by_reduce(calc_a1):
    m = parse(calc_a1, "@-1: cupEF(i) * id(Ei) ; id(Ei) * xdot(i) * id(Ei) ; id(Ei) * capFE(i)")
    assert reduce(m) == parse(calc_a1, "@-1: dot(i)")
    assert m.degree() == reduce(m).degree() == 2


def test_boundary_errors(calc_a1):
    a = parse(calc_a1, "@2: cupEF(i)")
    b = parse(calc_a1, "@2: dot(i)")
    with pytest.raises(BoundaryError):
        a.then(b)
    with pytest.raises(BoundaryError):
        parse(calc_a1, "@2: dot(i) :: [Ei] -> [Fi]")
    with pytest.raises(BoundaryError):
        a + b


@pytest.mark.parametrize("text", ["@2: dot(", "@2: frob(i)", "@2: dot(j)", "@2: cap(i)"])
def test_parse_errors(calc_a1, text):
    with pytest.raises(DiagramError):
        parse(calc_a1, text)


def test_parse_error_reports_position(calc_a1):
    with pytest.raises(ParseError, match="position"):
        parse(calc_a1, "@2: id(E) * cupFE(i)")


def test_not_closed(calc_a1):
    with pytest.raises(NotClosedError):
        evaluate_closed(right_curl(calc_a1, "i", 0))


def test_fuel():
    calc = Calculus(PRESETS["A1"], fuel=1)
    m = parse(calc, "@-3: cupFE(i) * id(Ei) ; id(Fi) * cr(i,i) ; id(Fi) * dot(i) * id(Ei) ; capFE(i) * id(Ei)")
    part = reduce(m, partial=True)
    assert part.info["exhausted"] and part.info["steps"] == 1
    with pytest.raises(FuelExhausted):
        reduce(m)


def test_fuel_counts_rule_applications_only():
    # a term already in normal form when the budget runs out is not exhausted
    calc = Calculus(PRESETS["A1"], fuel=1)
    out = reduce(right_curl(calc, "i", -2))
    assert out.info == {"steps": 1, "rules": {"curl": 1}, "exhausted": False}


def test_json_round_trip(calc_a1):
    m = parse(calc_a1, "@1: 3/2 * (cupEF(i) * id(Ei) ; dot(i) * id(Fi,Ei)) - cupEF(i) * dot(i)")
    data = json.loads(json.dumps(m.to_json()))
    assert Morphism2.from_json(calc_a1, data) == m


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), name=st.sampled_from(["A1", "A2", "B2", "A1aff"]))
def test_text_round_trip(seed, name):
    rng = random.Random(seed)
    D = PRESETS[name]
    calc = Calculus(D, random_scalars(D, rng), check_degrees=False)
    m = random_diagram(calc, rng)
    assert parse(calc, render(m)) == m


# ---------------------------------------------------------------- rule-order invariance


def _bubble(orient, dots, pos=0):
    if orient == "cw":
        return [S("cupEF", pos, ("i",))] + [S("dot", pos, ("i",))] * dots + [S("capEF", pos, ("i",))]
    return [S("cupFE", pos, ("i",))] + [S("dot", pos + 1, ("i",))] * dots + [S("capFE", pos, ("i",))]


def _closed_corpus(calc, rng, count=60):
    out = []
    for k in range(count):
        kind = k % 4
        if kind == 0:
            sl = []
            for _ in range(rng.randint(1, 3)):
                sl += _bubble(rng.choice(["cw", "ccw"]), rng.randint(0, 3))
        elif kind == 1:
            # a bubble nested inside another
            inner = _bubble(rng.choice(["cw", "ccw"]), rng.randint(0, 2), 1)
            if rng.random() < 0.5:
                sl = ([S("cupEF", 0, ("i",))] + inner + [S("dot", 0, ("i",))] * rng.randint(0, 3)
                      + [S("capEF", 0, ("i",))])
            else:
                sl = ([S("cupFE", 0, ("i",))] + inner + [S("dot", 1, ("i",))] * rng.randint(0, 3)
                      + [S("capFE", 0, ("i",))])
        else:
            # closed curl (one crossing) or two circles crossing twice
            cross = [S("cross", 0, ("i", "i"))] * (kind - 1)
            sl = ([S("cupEF", 0, ("i",)), S("cupEF", 1, ("i",))] + cross
                  + [S("dot", 0, ("i",))] * rng.randint(0, 2) + [S("capEF", 1, ("i",)), S("capEF", 0, ("i",))])
        out.append(from_slices(calc, calc.seq(rng.randint(-3, 3), []), sl))
    return out


def test_rule_order_invariance():
    calc = Calculus(PRESETS["A1"], fuel=20000)
    corpus = _closed_corpus(calc, random.Random(1))
    assert len(corpus) >= 50
    for m in corpus:
        ref = evaluate_closed(m)
        for seed in range(3):
            assert evaluate_closed(m, random.Random(seed)) == ref, render(m)
