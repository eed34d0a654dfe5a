import json

import pytest

from qhecke.cartan import PRESETS, make_scalars
from qhecke.diagcalc import Calculus, FuelExhausted
from qhecke.verify import (
    SUITES,
    CheckResult,
    UnknownSuite,
    _Check,
    _diag_eq,
    curl_rhs,
    exit_code,
    fingerprint,
    report,
    report_json,
    right_curl,
    run_checks,
    run_suite,
    summary,
)


@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes(suite):
    results = run_suite(suite)
    assert results and summary(results)["fail"] == 0 and summary(results)["flagged"] == 0


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope")


def test_report_is_deterministic():
    a = report_json(report("a1a5", run_suite("a1a5", seed=3), seed=3))
    b = report_json(report("a1a5", run_suite("a1a5", seed=3), seed=3))
    assert a == b
    data = json.loads(a)
    assert data["suite"] == "a1a5" and "wall_time" not in data["results"][0]


def test_timing_is_opt_in():
    res = run_suite("coeff-lemma")
    assert "wall_time" in report("coeff-lemma", res, timing=True)["results"][0]


def test_explicit_scalars_are_used():
    q = make_scalars(PRESETS["A1"], r={"i": 3})
    results = run_suite("coeff-lemma", q=q)
    assert {r.fingerprint for r in results} == {fingerprint(q)}
    assert exit_code(results) == 0


def _result(status):
    return CheckResult("x", "A1:0", {}, status, None, 0.0)


@pytest.mark.parametrize("statuses,code", [
    (["pass"], 0), (["pass", "flagged"], 2), (["flagged", "fail"], 1), ([], 0),
])
def test_exit_codes(statuses, code):
    assert exit_code([_result(s) for s in statuses]) == code


def test_wrong_identity_fails_with_witness():
    calc = Calculus(PRESETS["A1"])
    # a right curl does not equal the left-curl right-hand side at n = -2
    check = _Check("neg", "A1", {}, lambda: _diag_eq(right_curl(calc, "i", -2), curl_rhs(calc, "i", -2, "left")))
    (res,) = run_checks([check])
    assert res.status == "fail" and res.witness


def test_fuel_exhaustion_is_flagged():
    def boom():
        raise FuelExhausted("out")

    (res,) = run_checks([_Check("fuel", "A1", {}, boom)])
    assert res.status == "flagged" and "fuel" in res.witness["reason"]
