"""Derived oracles that do not go through the KLR rewriting code.

The nilHecke algebra acts on the polynomial ring in the dot variables by
multiplication and divided differences.  Generators act bottom to top, so
``x(1) ; t(1)`` first multiplies by x_1 and then applies the divided difference.
With the crossing acting as ``r * (f - s_k f) / (x_k - x_{k+1})`` the single-label
relations hold with the same normalization as the rewriting system; the test
suite machine-checks this before the model is trusted.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial
from typing import Iterable, Sequence

import sympy

Gen = tuple  # ("x", k) or ("t", k), 1-based


class NilHeckeRep:
    """Polynomial representation of the nilHecke algebra on m strands."""

    def __init__(self, m: int, r=1):
        self.m = m
        self.r = sympy.Rational(Fraction(r).numerator, Fraction(r).denominator)
        self.xs = sympy.symbols(f"x1:{m + 1}")

    def poly(self, expr) -> sympy.Poly:
        return sympy.Poly(expr, *self.xs, domain="QQ")

    def monomial(self, exps: Sequence[int]) -> sympy.Poly:
        return self.poly(sympy.Mul(*[x**e for x, e in zip(self.xs, exps)]))

    def swap(self, f: sympy.Poly, k: int) -> sympy.Poly:
        out = {}
        for mono, c in f.as_dict().items():
            e = list(mono)
            e[k - 1], e[k] = e[k], e[k - 1]
            out[tuple(e)] = c
        return sympy.Poly.from_dict(out, *self.xs, domain="QQ")

    def divided_difference(self, f: sympy.Poly, k: int) -> sympy.Poly:
        num = f - self.swap(f, k)
        if num.is_zero:
            return num
        return num.exquo(self.poly(self.xs[k - 1] - self.xs[k]))

    def apply(self, gens: Iterable[Gen], f: sympy.Poly) -> sympy.Poly:
        for kind, k in gens:
            if kind == "x":
                f = f * self.poly(self.xs[k - 1])
            else:
                f = self.divided_difference(f, k) * self.r
        return f

    def apply_terms(self, terms: Iterable[tuple[Fraction, Sequence[Gen]]], f: sympy.Poly) -> sympy.Poly:
        out = self.poly(0)
        for c, gens in terms:
            out = out + self.apply(gens, f) * sympy.Rational(c.numerator, c.denominator)
        return out

    def test_polys(self, degree: int) -> list[sympy.Poly]:
        """All monomials of total degree <= ``degree``."""
        out = []
        for exps in product(range(degree + 1), repeat=self.m):
            if sum(exps) <= degree:
                out.append(self.monomial(exps))
        return out


def element_terms(elem) -> list[tuple[Fraction, list[Gen]]]:
    """A KlrElement as (coefficient, generator list) pairs: crossings, then dots on top."""
    out = []
    for b, c in sorted(elem.terms.items()):
        gens = [("t", k) for k in b.word]
        for s, e in enumerate(b.dots):
            gens += [("x", s + 1)] * e
        out.append((c, gens))
    return out


def acts_equal(rep: NilHeckeRep, a: Sequence, b: Sequence, degree: int) -> bool:
    """Whether two formal sums of generator words act identically on polynomials up to ``degree``."""
    neg = [(-c, g) for c, g in b]
    for f in rep.test_polys(degree):
        if not rep.apply_terms(list(a) + neg, f).is_zero:
            return False
    return True


# ---------------------------------------------------------------- symmetric functions


def alpha_closed_form(lam: Sequence[int]) -> Fraction:
    """Coefficient of e_lambda in h_|lambda| from the closed form, not the recursion.

    h_n = sum over lambda of (-1)^(n - l) * l! / prod(m_k!) * e_lambda, with l the
    number of parts and m_k the multiplicities.
    """
    n, parts = sum(lam), len(lam)
    out = Fraction(factorial(parts))
    for k in set(lam):
        out /= factorial(list(lam).count(k))
    return out * (-1) ** (n - parts)


def complete_as_polynomials(r: int, variables: int) -> tuple[sympy.Poly, sympy.Poly]:
    """h_r and sum_lambda alpha_lambda e_lambda as polynomials in ``variables`` variables.

    h_r is summed over monomials directly; the e_lambda are products of elementary
    polynomials.  Equal polynomials in at least r variables mean equal symmetric functions.
    """
    xs = sympy.symbols(f"y1:{variables + 1}")
    h = sympy.Poly(0, *xs)
    for exps in product(range(r + 1), repeat=variables):
        if sum(exps) == r:
            h += sympy.Poly(sympy.Mul(*[x**e for x, e in zip(xs, exps)]), *xs)
    elem = [sympy.Poly(1, *xs)]
    for k in range(1, r + 1):
        terms = [sympy.Mul(*c) for c in combinations(xs, k)]
        elem.append(sympy.Poly(sympy.Add(*terms), *xs) if terms else sympy.Poly(0, *xs))
    rhs = sympy.Poly(0, *xs)
    for lam in _partitions(r):
        term = sympy.Poly(1, *xs)
        for p in lam:
            term *= elem[p]
        rhs += term * sympy.Rational(alpha_closed_form(lam).numerator, alpha_closed_form(lam).denominator)
    return h, rhs


def _partitions(n: int, top: int | None = None):
    top = n if top is None else top
    if n == 0:
        yield ()
        return
    for first in range(min(n, top), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


# ---------------------------------------------------------------- cyclotomic nilHecke


def _reduced_word(arr: Sequence[int]) -> list[int]:
    """Bubble-sort word (1-based) of a permutation given as a one-line arrangement."""
    cur = list(range(len(arr)))
    word = []
    target = list(arr)
    for pos in range(len(target)):
        j = cur.index(target[pos])
        while j > pos:
            cur[j - 1], cur[j] = cur[j], cur[j - 1]
            word.append(j)
            j -= 1
    return word


def _vec(f: sympy.Poly) -> dict:
    return {mono: Fraction(int(c.p), int(c.q)) for mono, c in f.terms() if c != 0}


class _Span:
    """Row-echelon span of sparse rational vectors, keyed by monomial tuples."""

    def __init__(self):
        self.rows: dict = {}

    def reduce(self, v: dict) -> dict:
        v = dict(v)
        for piv in sorted(self.rows, reverse=True):
            c = v.get(piv)
            if c:
                for k, x in self.rows[piv].items():
                    nv = v.get(k, Fraction(0)) - c * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def add(self, v: dict) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        piv = max(v)
        c = v[piv]
        row = {k: x / c for k, x in v.items()}
        for other in self.rows.values():
            d = other.get(piv)
            if d:
                for k, x in row.items():
                    nv = other.get(k, Fraction(0)) - d * x
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        self.rows[piv] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def cyclotomic_nilhecke_dim(N: int, m: int) -> dict[int, int]:
    """Graded dimension of the cyclotomic nilHecke algebra NH_m / (x_1^N), dot degree 2.

    The quotient acts faithfully on the module M = Pol_m / K, where K is the
    smallest nilHecke submodule containing x_1^N Pol_m.  Its dimension in each
    degree is the rank of the operators x^a psi_w of that degree on M.
    """
    rep = NilHeckeRep(m)
    # M is the cohomology of a partial flag variety: nothing above degree m*N - m(m+1)/2
    top = max(m * N - m * (m + 1) // 2, 0) + 1
    gen_top = top + m * (m - 1) // 2
    words = [_reduced_word(a) for a in permutations(range(m))]
    # K: close x_1^N Pol under multiplication and divided differences
    K: dict[int, _Span] = {}
    todo = []
    for exps in product(range(gen_top + 1), repeat=m):
        if N + sum(exps) <= gen_top:
            todo.append(rep.poly(rep.xs[0] ** N) * rep.monomial(exps))
    while todo:
        f = todo.pop()
        if f.is_zero:
            continue
        d = f.total_degree()
        if d > gen_top:
            continue
        if not K.setdefault(d, _Span()).add(_vec(f)):
            continue
        for k in range(1, m):
            todo.append(rep.divided_difference(f, k))
        for k in range(m):
            todo.append(f * rep.poly(rep.xs[k]))
    basis: list[sympy.Poly] = []
    for exps in product(range(top + 1), repeat=m):
        if sum(exps) <= top:
            basis.append(rep.monomial(exps))
    quot = {d: K.get(d, _Span()) for d in range(gen_top + 1)}
    # choose a basis of M per degree
    mbasis: dict[int, list] = {}
    for f in basis:
        d = f.total_degree()
        span = mbasis.setdefault(d, (_Span(), []))
        v = quot[d].reduce(_vec(f))
        probe = span[0].reduce(v)
        if probe:
            span[0].add(v)
            span[1].append(f)
    mdeg = max((d for d, (_, fs) in mbasis.items() if fs), default=0)
    # operators: x^a psi_w, polynomial degree |a| - len(w), acting on every basis vector of M
    counts: dict[int, int] = {}
    ops: dict[int, _Span] = {}
    for w in words:
        for a in product(range(mdeg + 1), repeat=m):
            if sum(a) > mdeg + len(w):
                continue
            deg = sum(a) - len(w)
            gens = [("t", k) for k in w] + [g for s, e in enumerate(a) for g in [("x", s + 1)] * e]
            vec: dict = {}
            for d, (_, fs) in sorted(mbasis.items()):
                for idx, f in enumerate(fs):
                    img = rep.apply(gens, f)
                    dd = d + deg
                    if img.is_zero or dd > top or dd < 0:
                        continue
                    red = quot[dd].reduce(_vec(img))
                    for mono, c in red.items():
                        vec[(d, idx, mono)] = c
            if vec and ops.setdefault(deg, _Span()).add(vec):
                counts[2 * deg] = counts.get(2 * deg, 0) + 1
    return counts
