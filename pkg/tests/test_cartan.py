import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhecke.cartan import (
    PRESETS,
    CartanDatum,
    CartanError,
    Weight,
    degree_of_generator,
    derive_q_prime,
    load_config,
    make_scalars,
    preset,
    random_scalars,
)


@pytest.mark.parametrize("name,i,j,d", [("A2", "1", "2", 1), ("B2", "1", "2", 1), ("B2", "2", "1", 2),
                                        ("A1aff", "0", "1", 2), ("A1xA1", "i", "j", 0)])
def test_dij(name, i, j, d):
    assert PRESETS[name].dij(i, j) == d


def test_pq_window_only_on_affine():
    assert PRESETS["A1aff"].pq_pairs("0", "1") == [(1, 1)]
    for name in ("A1xA1", "A2", "B2"):
        D = PRESETS[name]
        assert all(not D.pq_pairs(i, j) for i in D.nodes for j in D.nodes if i != j)


@pytest.mark.parametrize("pairing", [[[2, 1], [1, 2]], [[3]], [[2, -1], [-2, 2]], [[2, -1], [-1, 4]]])
def test_invalid_pairings_rejected(pairing):
    nodes = [str(k) for k in range(len(pairing))]
    with pytest.raises(CartanError):
        CartanDatum(tuple(nodes), tuple(map(tuple, pairing)))


def test_unknown_preset():
    with pytest.raises(CartanError):
        preset("E8")


def test_scalar_invariants():
    A2, A1xA1 = PRESETS["A2"], PRESETS["A1xA1"]
    with pytest.raises(CartanError):
        make_scalars(A2, r={"1": 0})
    with pytest.raises(CartanError):
        make_scalars(A2, t={("1", "2"): 0})
    with pytest.raises(CartanError):
        make_scalars(A1xA1, t={("i", "j"): 2, ("j", "i"): 3})
    q = make_scalars(PRESETS["A1aff"], s={("0", "1", 1, 1): 5})
    assert q.sval("1", "0", 1, 1) == 5


def test_s_outside_window_rejected():
    q = make_scalars(PRESETS["A1aff"], s={("0", "1", 0, 2): 1})
    with pytest.raises(CartanError):
        q.validate()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), name=st.sampled_from(sorted(PRESETS)))
def test_random_scalars_valid_and_q_prime_involutive(seed, name):
    q = random_scalars(PRESETS[name], random.Random(seed)).validate()
    qq = derive_q_prime(derive_q_prime(q))
    assert (qq.r, qq.t, qq.s) == (q.r, q.t, q.s)


def test_q_prime_values(a2_q):
    qp = derive_q_prime(a2_q)
    assert qp.r["1"] == -1
    assert qp.t[("1", "2")] == Fraction(1, 3)
    assert qp.t[("2", "1")] == Fraction(1, 2)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_config_round_trip(name):
    q = random_scalars(PRESETS[name], random.Random(7))
    data = {"preset": name, "scalars": json.loads(json.dumps(q.to_json()))}
    D, q2 = load_config(data)
    assert D == PRESETS[name] and q2.fingerprint() == q.fingerprint()


def test_custom_datum_config():
    D, q = load_config({"name": "G", "nodes": ["a"], "pairing": [[2]], "scalars": {"r": {"a": "2/3"}}})
    assert D.nodes == ("a",) and q.r["a"] == Fraction(2, 3)


def test_generator_degrees(a2):
    lam = Weight.from_map(a2, {"1": 3, "2": 0})
    assert degree_of_generator(a2, "dot", ("1",), lam) == 2
    assert degree_of_generator(a2, "cross", ("1", "2"), lam) == 1
    assert degree_of_generator(a2, "cross", ("1", "1"), lam) == -2
    assert degree_of_generator(a2, "cupEF", ("1",), lam) == 1 - 3
    assert degree_of_generator(a2, "capFE", ("1",), lam) == 1 + 3


def test_weight_shift(a2):
    lam = Weight.from_map(a2, {"1": 0, "2": 0}).shift(a2, "1")
    assert lam.as_map(a2) == {"1": 2, "2": -1}
