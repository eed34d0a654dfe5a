import json

import pytest
from click.testing import CliRunner

from qhecke.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_reduce_klr():
    res = run("reduce", "e(i); x(1); x(1)")
    assert res.exit_code == 0
    assert res.output.splitlines()[:2] == ["x(1)^2 e(i)", "degree: 4"]


def test_reduce_zigzag():
    res = run("reduce", "@2: id(Ei) * cupFE(i) ; capEF(i) * id(Ei)")
    assert res.exit_code == 0
    assert res.output.splitlines()[0] == "@2: id(Ei) :: [Ei] -> [Ei]"
    assert "zigzag=1" in res.output


def test_reduce_vanishing_curl():
    res = run("reduce", "@3: id(Ei) * cupEF(i) ; cr(i,i) * id(Fi) ; id(Ei) * capEF(i)")
    assert res.exit_code == 0
    assert res.output.startswith("@3: 0 ::")


def test_eval():
    res = run("eval", "@2: cupEF(i) ; dot(i) * id(Fi) ; dot(i) * id(Fi) ; capEF(i)")
    assert res.exit_code == 0 and res.output.strip() == "e[1]"


def test_fake():
    res = run("fake", "--n", "3", "--r", "2")
    assert res.exit_code == 0 and res.output.strip() == "-e[2] + e[1,1]"


def test_fake_json():
    res = run("--json", "fake", "--n", "3", "--r", "2")
    data = json.loads(res.output)
    assert data["value"] == "-e[2] + e[1,1]"
    assert {(e["coef"], tuple(e["dots"])) for e in data["real_bubbles"]} == {("1", (3, 3)), ("-1", (4,))}


def test_cyclotomic():
    res = run("cyclotomic", "--L", "2", "--labels", "i", "--cutoff", "8")
    assert res.exit_code == 0 and res.output.strip() == "1 + q^2 (stable)"


def test_klr_dim():
    res = run("klr-dim", "--labels", "i,i", "--cutoff", "4")
    assert res.output.strip() == "q^-2 + 3 + 5*q^2 + 7*q^4"


def test_q_prime():
    res = run("--datum", "A2", "--scalars", '{"t": {"1,2": 2, "2,1": 3}}', "q-prime")
    assert res.exit_code == 0
    assert res.output.split() == ["r_1", "=", "-1", "r_2", "=", "-1", "t_12", "=", "1/3", "t_21", "=", "1/2"]


def test_datum_file(tmp_path):
    cfg = tmp_path / "d.json"
    cfg.write_text(json.dumps({"name": "G", "nodes": ["a"], "pairing": [[2]]}))
    res = run("--datum", str(cfg), "fake", "--n", "1", "--r", "1")
    assert res.exit_code == 0 and res.output.strip() == "-e[1]"


@pytest.mark.parametrize("args,code", [
    (["reduce", "e(i"], 64),
    (["reduce", "@2: dot("], 64),
    (["--scalars", "{bad", "q-prime"], 64),
    (["--datum", "E8", "fake", "--n", "1", "--r", "1"], 65),
    (["reduce", "e(k)"], 65),
    (["cyclotomic", "--L", "-1", "--labels", "i"], 65),
    (["eval", "@2: dot(i)"], 65),
    (["verify", "bogus"], 65),
    (["--fuel", "1", "reduce", "e(i,i,i); x(1); x(1); t(1); t(2); t(1); x(3)"], 66),
    (["--fuel", "1", "reduce",
      "@-3: cupFE(i) * id(Ei) ; id(Fi) * cr(i,i) ; id(Fi) * dot(i) * id(Ei) ; capFE(i) * id(Ei)"], 66),
])
def test_exit_codes(args, code):
    assert run(*args).exit_code == code


def test_error_as_json():
    res = run("--json", "reduce", "e(i")
    data = json.loads(res.output)
    assert data["exit_code"] == 64 and "error" in data


def test_verify_a1a5():
    res = run("verify", "a1a5")
    assert res.exit_code == 0
    assert res.output.strip().splitlines()[-1].endswith("0 fail, 0 flagged")


def test_verify_json_is_reproducible(tmp_path):
    out = tmp_path / "r.json"
    a = run("--json", "--seed", "5", "verify", "coeff-lemma", "--output", str(out))
    b = run("--json", "--seed", "5", "verify", "coeff-lemma")
    assert a.exit_code == b.exit_code == 0
    assert a.output == b.output == out.read_text()
