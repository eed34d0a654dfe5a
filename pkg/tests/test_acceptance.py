"""Acceptance gate: one test per criterion, each with its time bound."""

import os
import subprocess
import sys
import time

from qhecke.oracles import alpha_closed_form
from qhecke.symfunc import complete_in_e, eh_identity_check, partitions
from qhecke.verify import (
    checks_for,
    exit_code,
    nilhecke_oracle_checks,
    roundtrip_checks,
    run_checks,
    summary,
)


def _gate(log, n, title, limit, body):
    """Run ``body`` (returning (ok, detail)), record a PASS/FAIL line and assert."""
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    within = limit is None or dt < limit
    bound = "" if limit is None else f" (limit {limit:g}s)"
    verdict = "PASS" if ok and within else "FAIL"
    line = f"C{n:<2d} {verdict}  {title}: {detail}; {dt:.2f}s{bound}"
    log[n] = line
    print(line)
    assert ok, line
    assert within, line


def _suite(checks):
    results = run_checks(checks)
    s = summary(results)
    bad = [r.id for r in results if r.status != "pass"][:5]
    return exit_code(results) == 0 and results != [], f"{s['pass']} pass, {s['fail']} fail, {s['flagged']} flagged" + (
        f" e.g. {bad}" if bad else "")


def test_c1_symmetric_functions(acceptance_log):
    def body():
        eh = all(eh_identity_check(m) for m in range(13))
        closed = all(complete_in_e(r).terms == {lam: alpha_closed_form(lam) for lam in partitions(r)}
                     for r in range(13))
        return eh and closed, f"e/h identity m<=12 {eh}, closed form r<=12 {closed}"

    _gate(acceptance_log, 1, "symmetric functions", 1, body)


def test_c2_grassmannian(acceptance_log):
    checks = checks_for("grassmannian", order=10, nmax=5)
    ids = {c.id for c in checks}
    assert all(f"grass.series.{o}[n={n:+d}]" in ids for o in ("cw-ccw", "ccw-cw") for n in range(-5, 6))
    _gate(acceptance_log, 2, "infinite Grassmannian to t^10, |n|<=5", 5, lambda: _suite(checks))


def test_c3_klr_relations(acceptance_log):
    def body():
        checks = checks_for("klr-relations", oracle=False, q_count=2)
        per_datum: dict[str, set] = {}
        for c in checks:
            name, fp = c.fingerprint.split(":")
            per_datum.setdefault(name, set()).add(fp)
        covered = all(len(per_datum.get(d, ())) >= 2 for d in ("A1", "A1xA1", "A2", "B2"))
        assoc = sum(".assoc[" in c.id for c in checks)
        ok, detail = _suite(checks)
        return ok and covered and assoc >= 200, f"{detail}, {assoc} associativity triples, two Q per datum {covered}"

    _gate(acceptance_log, 3, "KLR relations", 30, body)


def test_c4_nilhecke_oracle(acceptance_log):
    def body():
        checks = nilhecke_oracle_checks(degree=10, max_m=3, pairs=12)
        assert any(c.id.startswith("oracle.model.") for c in checks)
        return _suite(checks)

    _gate(acceptance_log, 4, "nilHecke oracle, m<=3, degree 10", 20, body)


def test_c5_extended_sl2(acceptance_log):
    checks = checks_for("a1a5", nmax=6)
    ns = {c.params["n"] for c in checks}
    assert ns >= set(range(-6, 7))
    _gate(acceptance_log, 5, "A1-A5 and curls, |n|<=6", 30, lambda: _suite(checks))


def test_c6_coefficient_lemma(acceptance_log):
    checks = checks_for("coeff-lemma", r_values=(1, -1, 2))
    assert {c.id.split(".")[1] for c in checks} == {"r=1", "r=-1", "r=2"}
    _gate(acceptance_log, 6, "coefficient lemma, r in {1,-1,2}", 10, lambda: _suite(checks))


def test_c7_mixed(acceptance_log):
    checks = checks_for("mixed", wmax=4)
    kinds = {c.id.split("[")[0] for c in checks}
    assert {"mixed.beta", "mixed.gamma", "mixed.b"} <= kinds
    _gate(acceptance_log, 7, "mixed coefficients on A2, t12=2, t21=3, |w|<=4", 10, lambda: _suite(checks))


def test_c8_bubble_slides(acceptance_log):
    checks = checks_for("bubble-slide", mmax=4)
    assert all(c.fingerprint.startswith("A2:") for c in checks)
    _gate(acceptance_log, 8, "bubble slides on A2, m<=4", 10, lambda: _suite(checks))


def test_c9_cyclotomic(acceptance_log):
    checks = checks_for("cyclotomic", nmax=4, oracle_N=4)
    _gate(acceptance_log, 9, "cyclotomic quotients, N<=4", 20, lambda: _suite(checks))


def _cli_report(suite, hash_seed):
    env = {**os.environ, "PYTHONHASHSEED": str(hash_seed)}
    cmd = [sys.executable, "-m", "qhecke.cli", "--json", "--seed", "7", "verify", suite]
    return subprocess.run(cmd, capture_output=True, env=env, check=True).stdout


def test_c10_determinism_and_round_trip(acceptance_log):
    def body():
        # separate processes with different hash seeds
        identical = all(_cli_report(s, 1) == _cli_report(s, 2) for s in ("klr-relations", "a1a5"))
        rt = run_checks(roundtrip_checks(seed=11, count=500))
        kinds = {r.id.split(".")[1].split("[")[0] for r in rt}
        ok = identical and exit_code(rt) == 0 and len(rt) == 500 and kinds == {"klr", "diagram", "sym"}
        return ok, f"reports identical {identical}, round trip {summary(rt)['pass']}/500 over {sorted(kinds)}"

    _gate(acceptance_log, 10, "determinism and round trip", None, body)
