"""Named check batteries over cartan, symfunc, klr and diagcalc with JSON reports.

Every check is a thunk returning ``(ok, witness)``.  The witness holds the two
sides as text (KLR expressions or diagram expressions) so that a failure can
be reproduced with ``qhecke reduce``.  Results are sorted by check id; wall
times are measured but left out of reports unless asked for, so that two runs
with the same seed produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from . import klr as klr_mod
from .cartan import PRESETS, CartanDatum, ScalarsQ, default_scalars, make_scalars, preset, random_scalars, scalar_str
from .diagcalc import (
    DOWN,
    UP,
    Calculus,
    EvaluationStuck,
    FuelExhausted,
    Morphism2,
    Slice,
    bubble_value,
    compose_vertical,
    down_crossing_left,
    down_crossing_right,
    down_dot_left,
    down_dot_right,
    evaluate_closed,
    from_slices,
    identity,
    reduce,
    render,
    zero,
    zeta,
    zeta_inverse,
)
from .diagcalc.bubbles import a_coeff, c_coeff
from .klr import KlrAlgebra, KlrElement
from .oracles import NilHeckeRep, acts_equal, cyclotomic_nilhecke_dim, element_terms
from .symfunc import SymElement, multiply as sym_mul

SUITES = ("klr-relations", "grassmannian", "a1a5", "coeff-lemma", "mixed", "bubble-slide", "cyclotomic")


class UnknownSuite(KeyError):
    pass


@dataclass
class CheckResult:
    id: str
    fingerprint: str
    params: dict
    status: str  # "pass" | "fail" | "flagged"
    witness: dict | None = None
    wall_time: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = {"id": self.id, "fingerprint": self.fingerprint, "params": self.params, "status": self.status,
               "witness": self.witness}
        if timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


@dataclass
class _Check:
    id: str
    fingerprint: str
    params: dict
    run: Callable[[], tuple[bool, dict | None]]


@dataclass
class _Ctx:
    datum: CartanDatum
    q: ScalarsQ
    fp: str = field(init=False)

    def __post_init__(self) -> None:
        self.fp = fingerprint(self.q)


def fingerprint(q: ScalarsQ) -> str:
    return q.datum.name + ":" + hashlib.sha256(q.fingerprint().encode()).hexdigest()[:12]


def _datum(d) -> CartanDatum:
    return preset(d) if isinstance(d, str) else d


def _sides(lhs: str, rhs: str, **extra) -> dict:
    return {"lhs": lhs, "rhs": rhs, **extra}


def _klr_eq(A: KlrAlgebra, lhs: KlrElement, rhs: KlrElement, lhs_text: str | None = None,
            rhs_text: str | None = None):
    ok = lhs == rhs
    return ok, None if ok else _sides(lhs_text or A.render(lhs), rhs_text or A.render(rhs))


def _diag_eq(lhs: Morphism2, rhs: Morphism2):
    """Compare normal forms; the witness carries the unreduced sides."""
    ok = reduce(lhs) == reduce(rhs)
    return ok, None if ok else _sides(render(lhs), render(rhs))


def _solve(make: Callable[[Fraction], dict]):
    """Solve ``make(p) == 0`` for a scalar p, given that make is affine in p.

    Returns the value, None when p is unconstrained, or "inconsistent".
    """
    d1, d2 = make(Fraction(1)), make(Fraction(2))
    sol = None
    for k in set(d1) | set(d2):
        b = d2.get(k, Fraction(0)) - d1.get(k, Fraction(0))
        a = d1.get(k, Fraction(0)) - b
        if b == 0:
            if a != 0:
                return "inconsistent"
            continue
        v = -a / b
        if sol is None:
            sol = v
        elif sol != v:
            return "inconsistent"
    return sol


def _solved(found, expected: Fraction, **extra):
    ok = found == expected
    shown = found if isinstance(found, str) or found is None else scalar_str(found)
    return ok, None if ok else {"expected": scalar_str(expected), "found": str(shown), **extra}


def _sym_slices(pos: int, label: str, value: SymElement) -> list[tuple[Fraction, list]]:
    return [(c, [Slice("sym", pos, (label,), lam)] if lam else []) for lam, c in sorted(value.terms.items())]


def _sum(calc: Calculus, dom, pieces: Iterable[tuple[Fraction, list]]) -> Morphism2:
    out = None
    for c, sl in pieces:
        t = from_slices(calc, dom, sl, c)
        out = t if out is None else out + t
    if out is None:
        return zero(calc, dom, dom)
    return out


# ---------------------------------------------------------------- klr-relations


def _klr_relation_checks(ctx: _Ctx, tag: str) -> list[_Check]:
    D, q = ctx.datum, ctx.q
    A = KlrAlgebra(D, q)
    nodes = D.nodes
    out: list[_Check] = []

    def add(name: str, params: dict, fn):
        out.append(_Check(f"klr.{D.name}.{tag}.{name}", ctx.fp, params, fn))

    def dots(labels, *exps):
        return A.element({A.basis(labels, (), tuple(exps)): 1})

    out.append(_Check(f"klr.{D.name}.{tag}.pq-window", ctx.fp, {},
                      lambda: (not q.window_violations(), None if not q.window_violations()
                               else {"violations": [list(map(str, v)) for v in q.window_violations()]})))
    for i in nodes:
        for j in nodes:
            lab = (i, j)
            for k in nodes:
                for m in nodes:
                    def idem(lab=lab, other=(k, m)):
                        lhs = A.multiply(A.idempotent(lab), A.idempotent(other))
                        rhs = A.idempotent(lab) if lab == other else A.zero()
                        return _klr_eq(A, lhs, rhs, f"e({','.join(lab)}) ; e({','.join(other)})")
                    add(f"idempotent[{i},{j}|{k},{m}]", {"labels": [i, j, k, m]}, idem)
            if i == j:
                r = q.r[i]

                def nil_square(lab=lab, i=i):
                    return _klr_eq(A, A.from_gens(lab, [("t", 1), ("t", 1)]), A.zero(),
                                   f"e({i},{i}) ; t(1) ; t(1)", "0")
                add(f"nil-square[{i}]", {"labels": [i, i]}, nil_square)

                for a in range(1, 4):
                    def ind(a=a, lab=lab, r=r, i=i):
                        rhs = A.zero()
                        for l1 in range(a):
                            rhs = rhs + dots(lab, l1, a - 1 - l1).scale(r)
                        up = A.from_gens(lab, [("x", 1)] * a + [("t", 1)]) - A.from_gens(lab, [("t", 1)] + [("x", 2)] * a)
                        down = A.from_gens(lab, [("t", 1)] + [("x", 1)] * a) - A.from_gens(lab, [("x", 2)] * a + [("t", 1)])
                        xs1, xs2 = " ; ".join(["x(1)"] * a), " ; ".join(["x(2)"] * a)
                        ok1, w1 = _klr_eq(A, up, rhs, f"e({i},{i}) ; {xs1} ; t(1) - e({i},{i}) ; t(1) ; {xs2}")
                        ok2, w2 = _klr_eq(A, down, rhs, f"e({i},{i}) ; t(1) ; {xs1} - e({i},{i}) ; {xs2} ; t(1)")
                        return ok1 and ok2, w1 or w2
                    add(f"nil-dotslide[{i}]^{a}", {"labels": [i, i], "power": a}, ind)
            else:
                def r2(i=i, j=j, lab=lab):
                    lhs = A.from_gens(lab, [("t", 1), ("t", 1)])
                    if D.B(i, j) == 0:
                        rhs = A.idempotent(lab).scale(q.t[(i, j)])
                    else:
                        rhs = dots(lab, D.dij(i, j), 0).scale(q.t[(i, j)]) + dots(lab, 0, D.dij(j, i)).scale(q.t[(j, i)])
                        for p, qq, v in q.s_terms(i, j):
                            rhs = rhs + dots(lab, p, qq).scale(v)
                    return _klr_eq(A, lhs, rhs, f"e({i},{j}) ; t(1) ; t(1)")
                add(f"r2[{i},{j}]", {"labels": [i, j]}, r2)

                def slide(lab=lab, i=i, j=j):
                    ok1, w1 = _klr_eq(A, A.from_gens(lab, [("x", 1), ("t", 1)]), A.from_gens(lab, [("t", 1), ("x", 2)]),
                                      f"e({i},{j}) ; x(1) ; t(1)", f"e({i},{j}) ; t(1) ; x(2)")
                    ok2, w2 = _klr_eq(A, A.from_gens(lab, [("x", 2), ("t", 1)]), A.from_gens(lab, [("t", 1), ("x", 1)]),
                                      f"e({i},{j}) ; x(2) ; t(1)", f"e({i},{j}) ; t(1) ; x(1)")
                    return ok1 and ok2, w1 or w2
                add(f"dotslide[{i},{j}]", {"labels": [i, j]}, slide)
            for k in nodes:
                lab3 = (i, j, k)
                text = f"e({i},{j},{k})"
                if i == k and i != j and D.B(i, j) != 0:
                    def hard(i=i, j=j, lab3=lab3, text=text):
                        lhs = (A.from_gens(lab3, [("t", 1), ("t", 2), ("t", 1)])
                               - A.from_gens(lab3, [("t", 2), ("t", 1), ("t", 2)])).scale(1 / q.r[i])
                        rhs = A.zero()
                        d = D.dij(i, j)
                        for l1 in range(d):
                            rhs = rhs + dots(lab3, l1, 0, d - 1 - l1).scale(q.t[(i, j)])
                        for p, qq, v in q.s_terms(i, j):
                            for l1 in range(p):
                                rhs = rhs + dots(lab3, l1, qq, p - 1 - l1).scale(v)
                        lhs_text = f"{scalar_str(1 / q.r[i])}*({text} ; t(1) ; t(2) ; t(1) - {text} ; t(2) ; t(1) ; t(2))"
                        return _klr_eq(A, lhs, rhs, lhs_text)
                    add(f"r3-hard[{i},{j},{k}]", {"labels": list(lab3)}, hard)
                else:
                    def easy(lab3=lab3, text=text):
                        return _klr_eq(A, A.from_gens(lab3, [("t", 1), ("t", 2), ("t", 1)]),
                                       A.from_gens(lab3, [("t", 2), ("t", 1), ("t", 2)]),
                                       f"{text} ; t(1) ; t(2) ; t(1)", f"{text} ; t(2) ; t(1) ; t(2)")
                    add(f"r3-easy[{i},{j},{k}]", {"labels": list(lab3)}, easy)
    return out


def _gens_text(labels, gens) -> str:
    return " ; ".join([f"e({','.join(labels)})"] + [f"{g}({k})" for g, k in gens])


def _top_labels(labels: tuple, gens) -> tuple:
    cur = list(labels)
    for g, k in gens:
        if g == "t":
            cur[k - 1], cur[k] = cur[k], cur[k - 1]
    return tuple(cur)


def _random_word(rng: random.Random, m: int, max_len: int = 4, max_dots: int = 2) -> list:
    word = []
    ndots = 0
    for _ in range(rng.randint(0, max_len)):
        if m > 1 and (ndots >= max_dots or rng.random() < 0.6):
            word.append(("t", rng.randint(1, m - 1)))
        else:
            word.append(("x", rng.randint(1, m)))
            ndots += 1
    return word


def _random_sum(A: KlrAlgebra, rng: random.Random, labels: tuple):
    """A small random element with fixed endpoints: one crossing word with a few dot variants."""
    m = len(labels)
    base = [g for g in _random_word(rng, m) if g[0] == "t"]
    elem = A.zero()
    texts = []
    for _ in range(rng.randint(1, 2)):
        gens = list(base)
        for _ in range(rng.randint(0, 1)):
            gens.insert(rng.randint(0, len(gens)), ("x", rng.randint(1, m)))
        c = Fraction(rng.choice([-2, -1, 1, 2, 3]))
        elem = elem + A.from_gens(labels, gens).scale(c)
        texts.append((c, gens))
    return elem, texts, _top_labels(labels, base)


def _texts_str(labels, texts) -> str:
    return " + ".join(f"{scalar_str(c)}*({_gens_text(labels, g)})" for c, g in texts)


def _assoc_checks(ctx: _Ctx, tag: str, rng: random.Random, count: int) -> list[_Check]:
    A = KlrAlgebra(ctx.datum, ctx.q)
    out = []
    for n in range(count):
        m = rng.randint(1, 4)
        labels = tuple(rng.choice(ctx.datum.nodes) for _ in range(m))
        x, xt, top = _random_sum(A, rng, labels)
        y, yt, top2 = _random_sum(A, rng, top)
        z, zt, _ = _random_sum(A, rng, top2)

        def run(x=x, y=y, z=z, xt=xt, yt=yt, zt=zt, labels=labels, top=top, top2=top2):
            lhs = A.multiply(A.multiply(x, y), z)
            rhs = A.multiply(x, A.multiply(y, z))
            ok = lhs == rhs
            return ok, None if ok else {"x": _texts_str(labels, xt), "y": _texts_str(top, yt),
                                        "z": _texts_str(top2, zt), "lhs": A.render(lhs), "rhs": A.render(rhs)}
        out.append(_Check(f"klr.{ctx.datum.name}.{tag}.assoc[{n:03d}]", ctx.fp,
                          {"labels": list(labels)}, run))
    return out


def nilhecke_oracle_checks(r=1, seed: int = 0, pairs: int = 12, degree: int = 10, max_m: int = 3,
                           label: str = "i") -> list[_Check]:
    """Normal-form equality against equality of divided-difference actions.

    First the polynomial model is checked against the single-label relations,
    then random pairs (equal by construction or perturbed) are compared.
    """
    D = PRESETS["A1"] if label == "i" else None
    if D is None:
        raise ValueError("the nilHecke oracle runs on the A1 datum")
    q = make_scalars(D, r={"i": r})
    A = KlrAlgebra(D, q)
    fp = fingerprint(q)
    rng = random.Random(seed)
    out: list[_Check] = []
    r = q.r["i"]

    def model_rel(name, m, lhs, rhs):
        rep = NilHeckeRep(m, r)

        def run():
            ok = acts_equal(rep, lhs, rhs, degree)
            return ok, None if ok else {"lhs": repr(lhs), "rhs": repr(rhs)}
        out.append(_Check(f"oracle.model.{name}", fp, {"m": m, "degree": degree}, run))

    one = Fraction(1)
    model_rel("nil-square", 2, [(one, [("t", 1), ("t", 1)])], [])
    model_rel("dotslide-up", 2, [(one, [("x", 1), ("t", 1)]), (-one, [("t", 1), ("x", 2)])], [(r, [])])
    model_rel("dotslide-down", 2, [(one, [("t", 1), ("x", 1)]), (-one, [("x", 2), ("t", 1)])], [(r, [])])
    model_rel("braid", 3, [(one, [("t", 1), ("t", 2), ("t", 1)])], [(one, [("t", 2), ("t", 1), ("t", 2)])])

    for n in range(pairs):
        m = 1 + n % max_m
        labels = ("i",) * m
        terms = [(Fraction(rng.choice([-2, -1, 1, 2])), _random_word(rng, m, max_len=5, max_dots=3))
                 for _ in range(rng.randint(1, 3))]
        a = A.zero()
        for c, g in terms:
            a = a + A.from_gens(labels, g).scale(c)
        other = element_terms(a)
        if n % 2:
            other = other + [(Fraction(rng.choice([-1, 1])), _random_word(rng, m, max_len=4, max_dots=2))]
        b = A.zero()
        for c, g in other:
            b = b + A.from_gens(labels, g).scale(c)

        def run(a=a, b=b, terms=terms, other=other, m=m):
            rep = NilHeckeRep(m, r)
            same_nf = a == b
            same_act = acts_equal(rep, terms, other, degree)
            ok = same_nf == same_act
            return ok, None if ok else {"lhs": _texts_str(labels, terms), "rhs": _texts_str(labels, other),
                                        "normal_forms_equal": same_nf, "actions_equal": same_act}
        out.append(_Check(f"oracle.pair[{n:03d}]", fp, {"m": m, "degree": degree}, run))
    return out


def _suite_klr(datum, q, seed, window) -> list[_Check]:
    rng = random.Random(seed)
    datums = [datum] if datum is not None else [preset(n) for n in ("A1", "A1xA1", "A2", "B2", "A1aff")]
    n_q = window.get("q_count", 2)
    per = window.get("assoc_per_q", 25)
    checks: list[_Check] = []
    for D in datums:
        qs = [q] if q is not None else [random_scalars(D, rng) for _ in range(n_q)]
        for k, qk in enumerate(qs):
            ctx = _Ctx(D, qk)
            tag = f"q{k}"
            checks += _klr_relation_checks(ctx, tag)
            checks += _assoc_checks(ctx, tag, rng, per)
    if window.get("oracle", True):
        checks += nilhecke_oracle_checks(r=window.get("oracle_r", 1), seed=seed, pairs=window.get("oracle_pairs", 9),
                                         degree=window.get("oracle_degree", 8))
    return checks


# ---------------------------------------------------------------- grassmannian


def _suite_grassmannian(datum, q, seed, window) -> list[_Check]:
    D = _datum(datum or "A1")
    q = q or default_scalars(D)
    i = window.get("label", D.nodes[0])
    K = window.get("order", 10)
    nmax = window.get("nmax", 5)
    diag_order = window.get("diagram_order", 4)
    fp = fingerprint(q)
    calc = Calculus(D, q)
    out: list[_Check] = []
    for n in range(-nmax, nmax + 1):
        def series(n=n, flip=False):
            for j in range(K + 1):
                acc = SymElement.zero()
                for a in range(j + 1):
                    cw, ccw = c_coeff(n, a), a_coeff(n, j - a)
                    acc = acc + (sym_mul(ccw, cw) if flip else sym_mul(cw, ccw))
                want = SymElement.one() if j == 0 else SymElement.zero()
                if acc != want:
                    return False, {"order": j, "found": str(acc), "expected": str(want)}
            return True, None
        out.append(_Check(f"grass.series.cw-ccw[n={n:+d}]", fp, {"n": n, "order": K}, series))
        out.append(_Check(f"grass.series.ccw-cw[n={n:+d}]", fp, {"n": n, "order": K},
                          lambda n=n: series(n, True)))
        for j in range(diag_order + 1):
            def diagram(n=n, j=j):
                base = _weight_for(D, i, n)
                dom = calc.seq(base, [])
                pieces = []
                for l1 in range(j + 1):
                    d1, d2 = n - 1 + l1, -n - 1 + (j - l1)
                    for c1, s1 in _bubble_pieces(i, "cw", d1, n):
                        for c2, s2 in _bubble_pieces(i, "ccw", d2, n):
                            pieces.append((c1 * c2, s1 + s2))
                lhs = _sum(calc, dom, pieces)
                val = evaluate_closed(lhs)
                want = {(): Fraction(1)} if j == 0 else {}
                ok = val.as_dict() == want
                return ok, None if ok else _sides(render(lhs), "@0: id()" if j == 0 else "0", value=val.render())
            out.append(_Check(f"grass.diagram[n={n:+d},j={j}]", fp, {"n": n, "order": j}, diagram))
    return out


def _weight_for(D: CartanDatum, i: str, n: int) -> dict:
    return {k: (n if k == i else 0) for k in D.nodes}


def _bubble_pieces(i: str, orient: str, dots: int, n: int) -> list[tuple[Fraction, list]]:
    """A real bubble as slices, or a fake one as a region decoration."""
    if dots < 0:
        return _sym_slices(0, i, bubble_value(orient, dots, n))
    if orient == "cw":
        return [(Fraction(1), [Slice("cupEF", 0, (i,))] + [Slice("dot", 0, (i,))] * dots + [Slice("capEF", 0, (i,))])]
    return [(Fraction(1), [Slice("cupFE", 0, (i,))] + [Slice("dot", 1, (i,))] * dots + [Slice("capFE", 0, (i,))])]


# ---------------------------------------------------------------- a1a5


def _suite_a1a5(datum, q, seed, window) -> list[_Check]:
    D = _datum(datum or "A1")
    i = window.get("label", D.nodes[0])
    nmax = window.get("nmax", 6)
    qs = [q] if q is not None else [make_scalars(D, r={i: r}) for r in window.get("r_values", (1, -1, 2))]
    out: list[_Check] = []
    for qk in qs:
        calc = Calculus(D, qk)
        fp = fingerprint(qk)
        tag = f"r={scalar_str(qk.r[i])}"
        for n in range(-nmax, nmax + 1):
            base = _weight_for(D, i, n)
            out += _zeta_checks(calc, fp, tag, i, n, base)
            out += _curl_checks(calc, fp, tag, i, n, base)
    return out


def _zeta_checks(calc: Calculus, fp: str, tag: str, i: str, n: int, base) -> list[_Check]:
    params = {"n": n, "label": i}
    key = f"a1a5.{tag}[n={n:+d}]"
    V = compose_vertical

    def mats():
        return zeta(calc, i, base), zeta_inverse(calc, i, base)

    def a1():
        z, zi = mats()
        for a, sa in enumerate(z.summands):
            for b, sb in enumerate(zi.summands):
                lhs = V(sa, sb)
                want = identity(calc, lhs.dom) if a == b else zero(calc, lhs.dom, lhs.cod)
                ok, w = _diag_eq(lhs, want)
                if not ok:
                    return ok, {**w, "entry": [a, b]}
        return True, None

    def a2():
        z, zi = mats()
        lhs = V(z.cross, zi.cross)
        return _diag_eq(lhs, identity(calc, lhs.dom))

    def a3():
        z, zi = mats()
        for a, sa in enumerate(z.summands):
            lhs = V(sa, zi.cross)
            ok, w = _diag_eq(lhs, zero(calc, lhs.dom, lhs.cod))
            if not ok:
                return ok, {**w, "entry": a}
        return True, None

    def a4():
        z, zi = mats()
        for a, sa in enumerate(zi.summands):
            lhs = V(z.cross, sa)
            ok, w = _diag_eq(lhs, zero(calc, lhs.dom, lhs.cod))
            if not ok:
                return ok, {**w, "entry": a}
        return True, None

    def a5():
        z, zi = mats()
        tot = V(zi.cross, z.cross)
        for a in range(len(z.summands)):
            tot = tot + V(zi.summands[a], z.summands[a])
        return _diag_eq(tot, identity(calc, tot.dom))

    return [_Check(f"{key}.A{k}", fp, params, fn) for k, fn in enumerate((a1, a2, a3, a4, a5), 1)]


def right_curl(calc: Calculus, i: str, base) -> Morphism2:
    """Upward i strand with a loop on its right; ``base`` is the weight right of the strand."""
    dom = calc.seq(base, [(i, UP)])
    return from_slices(calc, dom, [Slice("cupEF", 1, (i,)), Slice("cross", 0, (i, i)), Slice("capEF", 1, (i,))])


def left_curl(calc: Calculus, i: str, base) -> Morphism2:
    """Upward i strand with a loop on its left; ``base`` is the weight right of the strand."""
    dom = calc.seq(base, [(i, UP)])
    return from_slices(calc, dom, [Slice("cupFE", 0, (i,)), Slice("cross", 1, (i, i)), Slice("capFE", 0, (i,))])


def curl_rhs(calc: Calculus, i: str, base, side: str) -> Morphism2:
    """Bubble-and-dot sum that a dot-free curl reduces to."""
    dom = calc.seq(base, [(i, UP)])
    right_n, left_n = (w.pair(calc.datum, i) for w in reversed(dom.region_weights(calc.datum)))
    r = calc.r(i)
    pieces = []
    if side == "right":
        n = right_n
        coef = -r if n != 0 else -calc.curl_plus0(i)
        for f1 in range(-n + 1):
            for c, sl in _sym_slices(1, i, bubble_value("cw", n - 1 + (-n - f1), n, calc.c_minus1)):
                pieces.append((coef * c, [Slice("dot", 0, (i,))] * f1 + sl))
    else:
        n = left_n
        coef = r if n != 0 else calc.curl_minus0(i)
        for g1 in range(n + 1):
            for c, sl in _sym_slices(0, i, bubble_value("ccw", -n - 1 + (n - g1), n, calc.c_minus1)):
                pieces.append((coef * c, sl + [Slice("dot", 0, (i,))] * g1))
    return _sum(calc, dom, pieces)


def _curl_checks(calc: Calculus, fp: str, tag: str, i: str, n: int, base) -> list[_Check]:
    out = []
    for side, make in (("right", right_curl), ("left", left_curl)):
        def run(side=side, make=make):
            return _diag_eq(make(calc, i, base), curl_rhs(calc, i, base, side))
        out.append(_Check(f"a1a5.{tag}[n={n:+d}].curl-{side}", fp, {"n": n, "label": i}, run))
    return out


# ---------------------------------------------------------------- coeff-lemma


def _suite_coeff_lemma(datum, q, seed, window) -> list[_Check]:
    D = _datum(datum or "A1")
    i = window.get("label", D.nodes[0])
    qs = [q] if q is not None else [make_scalars(D, r={i: r}) for r in window.get("r_values", (1, -1, 2))]
    out: list[_Check] = []
    S = Slice
    for qk in qs:
        fp = fingerprint(qk)
        r = qk.r[i]
        tag = f"r={scalar_str(r)}"

        def diff(calc, base, first, second):
            dom = calc.seq(_weight_for(D, i, base), [(i, UP)])
            return (reduce(from_slices(calc, dom, first)) - reduce(from_slices(calc, dom, second))).terms

        def c_minus1(qk=qk):
            def make(p):
                calc = Calculus(D, qk, c_minus1=p)
                a = [S("cupFE", 0, (i,)), S("cross", 1, (i, i)), S("cross", 1, (i, i)), S("capFE", 0, (i,))]
                b = [S("cupFE", 1, (i,)), S("cross", 0, (i, i)), S("cross", 0, (i, i)), S("capFE", 1, (i,))]
                return diff(calc, -1, a, b)
            return _solved(_solve(make), Fraction(1))
        out.append(_Check(f"lemma.{tag}.c_minus1", fp, {"n": -1}, c_minus1))

        def plus_sides(n):
            dots = [S("dot", 0, (i,))] * (n + 1)
            a = [S("cupEF", 1, (i,)), S("cross", 0, (i, i))] + dots + [S("cross", 0, (i, i)), S("capEF", 1, (i,))]
            b = [S("cupEF", 0, (i,)), S("cross", 1, (i, i))] + dots + [S("cross", 1, (i, i)), S("capEF", 0, (i,))]
            return a, b

        def minus_sides(n):
            dots = [S("dot", 2, (i,))] * (-n - 1)
            a = [S("cupFE", 0, (i,)), S("cross", 1, (i, i))] + dots + [S("cross", 1, (i, i)), S("capFE", 0, (i,))]
            b = [S("cupFE", 1, (i,)), S("cross", 0, (i, i))] + dots + [S("cross", 0, (i, i)), S("capFE", 1, (i,))]
            return a, b

        def c0(which, qk=qk, r=r):
            n = 0 if which == "plus" else -2
            sides = plus_sides(n) if which == "plus" else minus_sides(n)

            def make(p):
                kw = {"c0plus": p} if which == "plus" else {"c0minus": p}
                return diff(Calculus(D, qk, **kw), n, *sides)
            return _solved(_solve(make), r, base=n)
        out.append(_Check(f"lemma.{tag}.c0_plus", fp, {"n": 0}, lambda c0=c0: c0("plus")))
        out.append(_Check(f"lemma.{tag}.c0_minus", fp, {"n": -2}, lambda c0=c0: c0("minus")))

        nmax = window.get("nmax", 3)
        for n in list(range(0, nmax + 1)) + list(range(-2, -nmax - 2, -1)):
            def beta(n=n, qk=qk, r=r):
                sides = plus_sides(n) if n >= 0 else minus_sides(n)

                def make(p):
                    b = {(i, k): 1 / p for k in range(-40, 41)}
                    return diff(Calculus(D, qk, beta=b), n, *sides)
                found = _solve(make)
                if isinstance(found, Fraction):
                    found = 1 / found
                return _solved(found, -1 / (r * r))
            out.append(_Check(f"lemma.{tag}.beta[n={n:+d}]", fp, {"n": n}, beta))
    return out


# ---------------------------------------------------------------- mixed


def _a2_default():
    D = preset("A2")
    return D, make_scalars(D, t={("1", "2"): 2, ("2", "1"): 3})


def _mixed_closure(calc: Calculus, base, left, right, side: str, m: int) -> Morphism2:
    """Close one strand of a sideways double crossing into a loop carrying m dots."""
    S = Slice
    (a, oa), (b, ob) = left, right
    if side == "L":
        dom = calc.seq(base, [right])
        kind = "FE" if oa == UP else "EF"
        dpos = 1 if oa == UP else 0
        sl = [S("cup" + kind, 0, (a,))] + [S("dot", dpos, (a,))] * m + [S("cross", 1, (a, b)), S("cross", 1, (b, a)),
                                                                       S("cap" + kind, 0, (a,))]
    else:
        dom = calc.seq(base, [left])
        kind = "FE" if ob == DOWN else "EF"
        dpos = 2 if ob == DOWN else 1
        sl = [S("cup" + kind, 1, (b,))] + [S("dot", dpos, (b,))] * m + [S("cross", 0, (a, b)), S("cross", 0, (b, a)),
                                                                       S("cap" + kind, 1, (b,))]
    return from_slices(calc, dom, sl)


def _cross_closure(calc: Calculus, dc: Morphism2, i: str, j: str, base, m1: int, m2: int) -> Morphism2:
    """Close both strands of a downward crossing composite into a diagram with empty boundary."""
    S = Slice
    out = None
    for key, c in dc.terms.items():
        sl = ([S("cupFE", 0, (i,)), S("cupFE", 1, (j,))] + list(key) + [S("cross", 2, (j, i))]
              + [S("dot", 2, (i,))] * m1 + [S("dot", 3, (j,))] * m2 + [S("capFE", 1, (i,)), S("capFE", 0, (j,))])
        t = from_slices(calc, calc.seq(base, []), sl, c)
        out = t if out is None else out + t
    return out


def _suite_mixed(datum, q, seed, window) -> list[_Check]:
    if datum is None:
        D, q0 = _a2_default()
        q = q or q0
    else:
        D = _datum(datum)
        q = q or default_scalars(D)
    fp = fingerprint(q)
    wmax = window.get("wmax", 4)
    mmax = window.get("mmax", 4)
    out: list[_Check] = []
    pairs = [(a, b) for a in D.nodes for b in D.nodes if a != b]
    for a, b in pairs:
        # DOWN a left of UP b, closing a: beta_ab; UP a left of DOWN b, closing b: gamma_ba
        for name, left, right, side, expected in (
            (f"beta[{a},{b}]", (a, DOWN), (b, UP), "L", q.t[(a, b)]),
            (f"gamma[{b},{a}]", (a, UP), (b, DOWN), "R", q.t[(b, a)]),
        ):
            closed = a if side == "L" else b
            for w in range(-wmax, wmax + 1):
                base = {k: (w if k == closed else 0) for k in D.nodes}

                def run(left=left, right=right, side=side, base=base, expected=expected):
                    for m in range(mmax + 1):
                        ref = reduce(_mixed_closure(Calculus(D, q, expand_sideways=True), base, left, right, side, m))

                        def make(p, m=m):
                            calc = Calculus(D, q, mixed={(left[0], right[0], left[1], "*"): p})
                            return (reduce(_mixed_closure(calc, base, left, right, side, m)) - ref).terms
                        found = _solve(make)
                        if found is not None:
                            return _solved(found, expected, dots=m,
                                           diagram=render(_mixed_closure(Calculus(D, q), base, left, right, side, m)))
                    return False, {"reason": f"no constraint for dot counts up to {mmax}"}
                out.append(_Check(f"mixed.{name}[w={w:+d}]", fp, {"weight": base, "closed": closed}, run))
    # b_ij from closed composites of the two rotations of a downward crossing
    dmax = window.get("closure_dots", 4)
    for i, j in pairs:
        for w in range(-wmax, wmax + 1):
            base = {k: (w if k == i else 1) for k in D.nodes}

            def run_b(i=i, j=j, base=base):
                calc = Calculus(D, q)
                zero_w = {k: 0 for k in D.nodes}
                rot1 = down_crossing_left(calc, i, j, zero_w).scale(q.t[(i, j)])
                rot2 = down_crossing_right(calc, i, j, zero_w).scale(q.t[(j, i)])
                for m1 in range(dmax + 1):
                    for m2 in range(dmax + 1):
                        v1 = evaluate_closed(_cross_closure(calc, rot1, i, j, base, m1, m2)).as_dict()
                        v2 = evaluate_closed(_cross_closure(calc, rot2, i, j, base, m1, m2)).as_dict()
                        found = _solve(lambda p: {k: v1.get(k, 0) - p * v2.get(k, 0) for k in set(v1) | set(v2)})
                        if found is not None:
                            return _solved(found, q.t[(i, j)] / q.t[(j, i)], dots=[m1, m2])
                return False, {"reason": "no constraint from the sampled closures"}
            out.append(_Check(f"mixed.b[{i},{j}][w={w:+d}]", fp, {"weight": base}, run_b))
    # cyclicity of downward dots
    for i in D.nodes:
        for w in range(-wmax, wmax + 1):
            base = _weight_for(D, i, w)

            def run_dot(i=i, base=base):
                calc = Calculus(D, q)
                return _diag_eq(down_dot_left(calc, i, base), down_dot_right(calc, i, base))
            out.append(_Check(f"mixed.down-dot[{i}][w={w:+d}]", fp, {"weight": base}, run_dot))
    return out


# ---------------------------------------------------------------- bubble-slide


def _suite_bubble_slide(datum, q, seed, window) -> list[_Check]:
    if datum is None:
        D, q0 = _a2_default()
        q = q or q0
    else:
        D = _datum(datum)
        q = q or default_scalars(D)
    fp = fingerprint(q)
    calc = Calculus(D, q)
    S = Slice
    wmax = window.get("wmax", 4)
    mmax = window.get("mmax", 4)
    out: list[_Check] = []

    def rhs(dom, i, parts, pos_sym):
        pieces = []
        for c, xd, orient, bd, n in parts:
            for cv, sl in _sym_slices(pos_sym, i, bubble_value(orient, bd, n, calc.c_minus1)):
                pieces.append((c * cv, [S("dot", 0, (dom.strands[0][0],))] * xd + sl))
        return _sum(calc, dom, pieces)

    for i in D.nodes:
        for j in D.nodes:
            if i == j or D.B(i, j) == 0:
                continue
            dij, dji = D.dij(i, j), D.dij(j, i)
            tij, tji = q.t[(i, j)], q.t[(j, i)]
            for w in range(-wmax, wmax + 1):
                base = {k: (w if k == i else 0) for k in D.nodes}
                dom = calc.seq(base, [(j, UP)])
                n = calc.weight(base).pair(D, i)
                nl = dom.region_weights(D)[0].pair(D, i)
                for m in range(mmax + 1):
                    if m >= max(-nl + 1, 0):
                        def lr(i=i, j=j, dom=dom, n=n, nl=nl, m=m, dij=dij, dji=dji, tij=tij, tji=tji):
                            lhs = from_slices(calc, dom, [S("cupEF", 0, (i,))] + [S("dot", 0, (i,))] * (nl - 1 + m)
                                              + [S("capEF", 0, (i,))], tij)
                            parts = [(tij, 0, "cw", n - 1 + m, n), (tji, dji, "cw", n - 1 + m - dij, n)]
                            parts += [(v, p, "cw", n - 1 + m + qq - dij, n) for p, qq, v in q.s_terms(j, i)]
                            return _diag_eq(lhs, rhs(dom, i, parts, 1))
                        out.append(_Check(f"slide.lr[{i},{j}][w={w:+d},m={m}]", fp, {"weight": base, "m": m}, lr))
                    if m >= max(n + 1, 0):
                        def rl(i=i, j=j, dom=dom, n=n, nl=nl, m=m, dij=dij, dji=dji, tij=tij, tji=tji):
                            lhs = from_slices(calc, dom, [S("cupFE", 1, (i,))] + [S("dot", 2, (i,))] * (-n - 1 + m)
                                              + [S("capFE", 1, (i,))], tij)
                            parts = [(tij, 0, "ccw", -nl - 1 + m, nl), (tji, dji, "ccw", -nl - 1 + m - dij, nl)]
                            parts += [(v, p, "ccw", -nl - 1 + m + qq - dij, nl) for p, qq, v in q.s_terms(i, j)]
                            return _diag_eq(lhs, rhs(dom, i, parts, 0))
                        out.append(_Check(f"slide.rl[{i},{j}][w={w:+d},m={m}]", fp, {"weight": base, "m": m}, rl))
    return out


# ---------------------------------------------------------------- cyclotomic


def _suite_cyclotomic(datum, q, seed, window) -> list[_Check]:
    D = _datum(datum or "A1")
    q = q or default_scalars(D)
    fp = fingerprint(q)
    A = KlrAlgebra(D, q)
    i = window.get("label", D.nodes[0])
    nmax = window.get("nmax", 4)
    out: list[_Check] = []

    def gd_witness(g, want: dict) -> dict:
        return {"found": g.render(), "expected": klr_mod.GradedDim.from_map(g.cutoff, want, True).render()}

    for N in range(1, nmax + 1):
        def single(N=N):
            g = A.cyclotomic_dim({i: N}, (i,))
            want = {2 * D.d(i) * k: 1 for k in range(N)}
            ok = g.stable is True and g.as_map() == want
            return ok, None if ok else gd_witness(g, want)
        out.append(_Check(f"cyc.single[N={N}]", fp, {"N": N, "labels": [i]}, single))

    def below():
        g = A.cyclotomic_dim({i: 1}, (i, i))
        ok = g.stable is True and g.as_map() == {}
        return ok, None if ok else gd_witness(g, {})
    out.append(_Check("cyc.below-lowest[N=1,m=2]", fp, {"N": 1, "labels": [i, i]}, below))

    if D.B(i, i) == 2:
        for m in range(1, window.get("oracle_m", 2) + 1):
            for N in range(1, window.get("oracle_N", 4) + 1):
                def oracle(m=m, N=N):
                    g = A.cyclotomic_dim({i: N}, (i,) * m)
                    want = {d: c for d, c in cyclotomic_nilhecke_dim(N, m).items() if d <= g.cutoff}
                    ok = g.stable is True and g.as_map() == want
                    return ok, None if ok else gd_witness(g, want)
                out.append(_Check(f"cyc.oracle[m={m},N={N}]", fp, {"N": N, "m": m}, oracle))
    return out


# ---------------------------------------------------------------- round trip


def random_diagram(calc: Calculus, rng: random.Random, max_slices: int = 6) -> Morphism2:
    """A random valid slice stack (with a random second term of the same boundary)."""
    from .diagcalc.core import CUP_LEGS, BoundaryError, apply_slice

    D = calc.datum
    nodes = D.nodes
    strands = tuple((rng.choice(nodes), rng.choice((UP, DOWN))) for _ in range(rng.randint(0, 3)))
    base = {k: rng.randint(-3, 3) for k in nodes}
    dom = calc.seq(base, strands)

    def stack():
        cur, sl = strands, []
        for _ in range(rng.randint(0, max_slices)):
            kind = rng.choice(("dot", "cross", "cupFE", "cupEF", "capFE", "capEF", "sym"))
            n = len(cur)
            if kind == "dot" and n:
                p = rng.randrange(n)
                s = Slice("dot", p, (cur[p][0],))
            elif kind == "cross" and n >= 2:
                p = rng.randrange(n - 1)
                s = Slice("cross", p, (cur[p][0], cur[p + 1][0]))
            elif kind.startswith("cup"):
                s = Slice(kind, rng.randint(0, n), (rng.choice(nodes),))
            elif kind.startswith("cap") and n >= 2:
                p = rng.randrange(n - 1)
                if (cur[p][1], cur[p + 1][1]) != CUP_LEGS[kind] or cur[p][0] != cur[p + 1][0]:
                    continue
                s = Slice(kind, p, (cur[p][0],))
            elif kind == "sym":
                s = Slice("sym", rng.randint(0, n), (rng.choice(nodes),),
                          tuple(sorted((rng.randint(1, 3) for _ in range(rng.randint(1, 2))), reverse=True)))
            else:
                continue
            try:
                cur = apply_slice(cur, s)
            except BoundaryError:
                continue
            sl.append(s)
        return sl

    first = stack()
    c = Fraction(rng.choice([-3, -1, 1, 2]), rng.choice([1, 1, 2, 3]))
    m = from_slices(calc, dom, first, c)
    # a second term with the same boundary: the first stack with a dot added
    if rng.random() < 0.5 and m.cod.strands:
        from .diagcalc.core import walk

        top = walk(dom.strands, first)[-1]
        p = rng.randrange(len(top))
        m = m + from_slices(calc, dom, first + [Slice("dot", p, (top[p][0],))], rng.choice([-1, 2]))
    return m


def roundtrip_checks(seed: int = 0, count: int = 500) -> list[_Check]:
    """parse(render(x)) == x for random KLR elements, diagrams and Sym values."""
    from .diagcalc import parse as diag_parse
    from .symfunc import parse as sym_parse, render as sym_render

    rng = random.Random(seed)
    out: list[_Check] = []
    for n in range(count):
        name = rng.choice(("A1", "A2", "B2", "A1aff"))
        D = preset(name)
        q = random_scalars(D, rng)
        kind = ("klr", "diagram", "sym")[n % 3]
        if kind == "klr":
            A = KlrAlgebra(D, q)
            labels = tuple(rng.choice(D.nodes) for _ in range(rng.randint(1, 3)))
            x, _, _ = _random_sum(A, rng, labels)
            text = A.render(x)
            check = (lambda x=x, text=text, A=A: (A.parse(text) == x, None if A.parse(text) == x
                                                  else _sides(text, A.render(A.parse(text)))))
        elif kind == "diagram":
            calc = Calculus(D, q, check_degrees=False)
            m = random_diagram(calc, rng)
            text = render(m)
            check = (lambda m=m, text=text, calc=calc: (diag_parse(calc, text) == m, None if diag_parse(calc, text) == m
                                                        else _sides(text, render(diag_parse(calc, text)))))
        else:
            x = SymElement({tuple(sorted((rng.randint(1, 4) for _ in range(rng.randint(0, 3))), reverse=True)):
                            Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(rng.randint(0, 4))})
            text = sym_render(x)
            check = (lambda x=x, text=text: (sym_parse(text) == x, None if sym_parse(text) == x
                                             else _sides(text, sym_render(sym_parse(text)))))
        out.append(_Check(f"roundtrip.{kind}[{n:03d}]", name, {"text": text}, check))
    return out


# ---------------------------------------------------------------- runner


_BUILDERS = {
    "klr-relations": _suite_klr,
    "grassmannian": _suite_grassmannian,
    "a1a5": _suite_a1a5,
    "coeff-lemma": _suite_coeff_lemma,
    "mixed": _suite_mixed,
    "bubble-slide": _suite_bubble_slide,
    "cyclotomic": _suite_cyclotomic,
}


def checks_for(suite: str, datum=None, q: ScalarsQ | None = None, seed: int = 0, **window) -> list[_Check]:
    if suite not in _BUILDERS:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if q is not None and datum is None:
        datum = q.datum
    return _BUILDERS[suite](_datum(datum) if datum is not None else None, q, seed, window)


def run_checks(checks: Iterable[_Check]) -> list[CheckResult]:
    results = []
    for c in checks:
        t0 = time.perf_counter()
        try:
            ok, witness = c.run()
            status = "pass" if ok else "fail"
        except (FuelExhausted, klr_mod.FuelExhausted) as exc:
            status, witness = "flagged", {"reason": f"fuel exhausted: {exc}"}
        except EvaluationStuck as exc:
            status, witness = "flagged", {"reason": str(exc), "residue": render(exc.residue)}
        results.append(CheckResult(c.id, c.fingerprint, c.params, status, witness, time.perf_counter() - t0))
    return sorted(results, key=lambda r: r.id)


def run_suite(suite: str, datum=None, q: ScalarsQ | None = None, seed: int = 0, **window) -> list[CheckResult]:
    return run_checks(checks_for(suite, datum, q, seed, **window))


def report(suite: str, results: list[CheckResult], datum=None, seed: int = 0, timing: bool = False) -> dict:
    if datum is None:
        names = sorted({r.fingerprint.split(":")[0] for r in results})
        name = names[0] if len(names) == 1 else names
    else:
        name = datum if isinstance(datum, str) else datum.name
    return {"suite": suite, "datum": name, "seed": seed, "results": [r.to_json(timing) for r in results]}


def report_json(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=True)


def exit_code(results: list[CheckResult]) -> int:
    if any(r.status == "fail" for r in results):
        return 1
    if any(r.status == "flagged" for r in results):
        return 2
    return 0


def summary(results: list[CheckResult]) -> dict[str, int]:
    out = {"pass": 0, "fail": 0, "flagged": 0}
    for r in results:
        out[r.status] += 1
    return out
