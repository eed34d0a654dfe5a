"""KLR (quiver Hecke) algebras: normal forms, products, graded and cyclotomic dimensions.

A basis term is ``(word, dots, labels)``: the lexicographically least reduced
word of a permutation (letters applied bottom to top), a dot multidegree placed
at the top, and the label sequence at the bottom.  ``multiply(x, y)`` stacks
``y`` on top of ``x`` (the ``;`` order of the text grammar).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .cartan import CartanDatum, ScalarsQ, default_scalars, scalar_str, to_scalar

Gen = tuple[str, int]  # ("x", k) dot on strand k, ("t", k) crossing of strands k, k+1 (1-based)


class KlrError(ValueError):
    """Invalid KLR input."""


class KlrParseError(KlrError):
    """Malformed KLR expression text."""


class FuelExhausted(RuntimeError):
    """Rewriting exceeded its step budget."""


# ---------------------------------------------------------------- permutations


def arrangement(word: Sequence[int], m: int) -> tuple[int, ...]:
    """arr[p] = bottom index of the strand that sits at position p after ``word``."""
    arr = list(range(m))
    for k in word:
        arr[k - 1], arr[k] = arr[k], arr[k - 1]
    return tuple(arr)


def canonical_word(arr: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least reduced word reaching the arrangement ``arr``."""
    target = {s: p for p, s in enumerate(arr)}
    cur = list(range(len(arr)))
    word = []
    while True:
        for k in range(1, len(cur)):
            if target[cur[k - 1]] > target[cur[k]]:
                cur[k - 1], cur[k] = cur[k], cur[k - 1]
                word.append(k)
                break
        else:
            return tuple(word)


def inversions(arr: Sequence[int]) -> int:
    return sum(1 for a in range(len(arr)) for b in range(a + 1, len(arr)) if arr[a] > arr[b])


def is_reduced(word: Sequence[int], m: int) -> bool:
    return inversions(arrangement(word, m)) == len(word)


@lru_cache(maxsize=None)
def _braid_path(word: tuple[int, ...], goal: tuple[int, ...]) -> tuple[tuple[str, int], ...]:
    """Shortest sequence of moves turning one reduced word into another.

    A move is ("c", p) (swap letters p, p+1) or ("b", p) (rewrite letters p..p+2).
    """
    if word == goal:
        return ()
    prev: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[str, int]]] = {word: (word, ("", -1))}
    queue = deque([word])
    while queue:
        w = queue.popleft()
        for nxt, move in _neighbours(w):
            if nxt in prev:
                continue
            prev[nxt] = (w, move)
            if nxt == goal:
                path = []
                cur = nxt
                while cur != word:
                    cur, mv = prev[cur][0], prev[cur][1]
                    path.append(mv)
                return tuple(reversed(path))
            queue.append(nxt)
    raise KlrError(f"no braid path from {word} to {goal}")


def _neighbours(w: tuple[int, ...]):
    for p in range(len(w) - 1):
        a, b = w[p], w[p + 1]
        if abs(a - b) > 1:
            yield w[:p] + (b, a) + w[p + 2 :], ("c", p)
        elif p + 2 < len(w) and abs(a - b) == 1 and w[p + 2] == a:
            yield w[:p] + (b, a, b) + w[p + 3 :], ("b", p)


# ---------------------------------------------------------------- basis terms


@dataclass(frozen=True, order=True)
class KlrBasisTerm:
    labels: tuple[str, ...]
    word: tuple[int, ...]
    dots: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.labels)

    def top_labels(self) -> tuple[str, ...]:
        arr = arrangement(self.word, self.m)
        return tuple(self.labels[s] for s in arr)


Element = dict  # KlrBasisTerm -> Fraction


def _add_into(acc: dict, other: Mapping, c: Fraction = Fraction(1)) -> None:
    for k, v in other.items():
        nv = acc.get(k, Fraction(0)) + c * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


class KlrElement:
    """Immutable linear combination of basis terms of a fixed algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: "KlrAlgebra", terms: Mapping[KlrBasisTerm, Fraction] | None = None):
        self.algebra = algebra
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, KlrElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "KlrElement") -> "KlrElement":
        acc = dict(self.terms)
        _add_into(acc, other.terms)
        return KlrElement(self.algebra, acc)

    def __neg__(self) -> "KlrElement":
        return self.scale(-1)

    def __sub__(self, other: "KlrElement") -> "KlrElement":
        return self + (-other)

    def scale(self, c) -> "KlrElement":
        c = to_scalar(c)
        return KlrElement(self.algebra, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c) -> "KlrElement":
        return self.scale(c)

    def then(self, other: "KlrElement") -> "KlrElement":
        """Stack ``other`` on top of ``self``."""
        return self.algebra.multiply(self, other)

    def degrees(self) -> set[int]:
        return {self.algebra.degree(b) for b in self.terms}

    def __repr__(self) -> str:
        return f"KlrElement({self.algebra.render(self)!r})"

    def __str__(self) -> str:
        return self.algebra.render(self)


@dataclass(frozen=True)
class GradedDim:
    """Truncated Laurent polynomial in q: degree -> multiplicity, valid for degrees <= cutoff."""

    cutoff: int
    coeffs: tuple[tuple[int, int], ...]
    stable: bool | None = None

    @staticmethod
    def from_map(cutoff: int, coeffs: Mapping[int, int], stable: bool | None = None) -> "GradedDim":
        return GradedDim(cutoff, tuple(sorted((d, c) for d, c in coeffs.items() if c)), stable)

    def as_map(self) -> dict[int, int]:
        return dict(self.coeffs)

    def total(self) -> int:
        return sum(c for _, c in self.coeffs)

    def render(self) -> str:
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for d, c in self.coeffs:
                mono = "1" if d == 0 else ("q" if d == 1 else f"q^{d}")
                if d == 0:
                    parts.append(str(c))
                else:
                    parts.append(mono if c == 1 else f"{c}*{mono}")
            body = " + ".join(parts)
        if self.stable is None:
            return body
        return f"{body} ({'stable' if self.stable else 'not stable'})"


# ---------------------------------------------------------------- algebra


class KlrAlgebra:
    """R_Q for a Cartan datum and scalar family."""

    def __init__(self, datum: CartanDatum, q: ScalarsQ | None = None, fuel: int = 10**6):
        self.datum = datum
        self.q = q or default_scalars(datum)
        self.fuel = fuel
        self.steps = 0
        self._cache_gen: dict = {}
        self._cache_cross: dict = {}

    # -- construction

    def _check_labels(self, labels: Iterable[str]) -> tuple[str, ...]:
        labels = tuple(str(x) for x in labels)
        for x in labels:
            self.datum.check_node(x)
        return labels

    def basis(self, labels, word=(), dots=None) -> KlrBasisTerm:
        labels = self._check_labels(labels)
        dots = tuple(dots) if dots is not None else (0,) * len(labels)
        return KlrBasisTerm(labels, tuple(word), dots)

    def element(self, terms: Mapping[KlrBasisTerm, object]) -> KlrElement:
        return KlrElement(self, {k: to_scalar(v) for k, v in terms.items()})

    def zero(self) -> KlrElement:
        return KlrElement(self)

    def idempotent(self, labels) -> KlrElement:
        return KlrElement(self, {self.basis(labels): Fraction(1)})

    def generator_dot(self, labels, k: int) -> KlrElement:
        labels = self._check_labels(labels)
        if not 1 <= k <= len(labels):
            raise KlrError(f"dot index {k} out of range 1..{len(labels)}")
        dots = [0] * len(labels)
        dots[k - 1] = 1
        return KlrElement(self, {KlrBasisTerm(labels, (), tuple(dots)): Fraction(1)})

    def generator_crossing(self, labels, k: int) -> KlrElement:
        labels = self._check_labels(labels)
        if not 1 <= k <= len(labels) - 1:
            raise KlrError(f"crossing index {k} out of range 1..{len(labels) - 1}")
        return KlrElement(self, {KlrBasisTerm(labels, (k,), (0,) * len(labels)): Fraction(1)})

    # -- degrees

    def crossing_degree(self, labels: Sequence[str], word: Sequence[int]) -> int:
        cur = list(labels)
        deg = 0
        for k in word:
            deg -= self.datum.B(cur[k - 1], cur[k])
            cur[k - 1], cur[k] = cur[k], cur[k - 1]
        return deg

    def degree(self, b: KlrBasisTerm) -> int:
        top = b.top_labels()
        return self.crossing_degree(b.labels, b.word) + sum(a * self.datum.B(i, i) for a, i in zip(b.dots, top))

    def word_degree(self, labels: Sequence[str], gens: Sequence[Gen]) -> int:
        cur = list(labels)
        deg = 0
        for kind, k in gens:
            if kind == "x":
                deg += self.datum.B(cur[k - 1], cur[k - 1])
            else:
                deg -= self.datum.B(cur[k - 1], cur[k])
                cur[k - 1], cur[k] = cur[k], cur[k - 1]
        return deg

    # -- reduction core

    def _tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.fuel:
            raise FuelExhausted(f"KLR rewriting exceeded fuel {self.fuel}")

    def normalize(self, labels, gens: Sequence[Gen]) -> dict:
        """Normal form of the diagram e(labels) followed by ``gens`` (bottom to top)."""
        labels = self._check_labels(labels)
        m = len(labels)
        cur = {KlrBasisTerm(labels, (), (0,) * m): Fraction(1)}
        for g in gens:
            kind, k = g
            if kind == "x" and not 1 <= k <= m or kind == "t" and not 1 <= k < m:
                raise KlrError(f"generator {kind}({k}) out of range for {m} strands")
            cur = self._times_gen(cur, g)
            if not cur:
                break
        return cur

    def _times_gen(self, elem: Mapping, g: Gen) -> dict:
        acc: dict = {}
        for b, c in elem.items():
            _add_into(acc, self._basis_times_gen(b, g), c)
        return acc

    def _basis_times_gen(self, b: KlrBasisTerm, g: Gen) -> dict:
        key = (b, g)
        hit = self._cache_gen.get(key)
        if hit is not None:
            return hit
        self._tick()
        kind, k = g
        if kind == "x":
            dots = list(b.dots)
            dots[k - 1] += 1
            out = {KlrBasisTerm(b.labels, b.word, tuple(dots)): Fraction(1)}
        else:
            out = self._basis_times_crossing(b, k)
        self._cache_gen[key] = out
        return out

    def _basis_times_crossing(self, b: KlrBasisTerm, k: int) -> dict:
        top = b.top_labels()
        a = list(b.dots)
        # dots f below psi_k:  f ; psi_k = psi_k ; s_k f  (+ r * divided difference when labels agree)
        sa = list(a)
        sa[k - 1], sa[k] = a[k], a[k - 1]
        out: dict = {}
        main = self._word_times_crossing(b.labels, b.word, k)
        for t, c in main.items():
            dots = tuple(x + y for x, y in zip(t.dots, sa))
            _add_into(out, {KlrBasisTerm(t.labels, t.word, dots): Fraction(1)}, c)
        if top[k - 1] == top[k]:
            r = self.q.r[top[k - 1]]
            p, q = a[k - 1], a[k]
            lo, hi, sign = (q, p, 1) if p > q else (p, q, -1)
            for c in range(hi - lo):
                dots = list(a)
                dots[k - 1] = lo + c
                dots[k] = hi - 1 - c
                _add_into(out, {KlrBasisTerm(b.labels, b.word, tuple(dots)): Fraction(1)}, sign * r)
        return out

    def _word_times_crossing(self, labels: tuple[str, ...], word: tuple[int, ...], k: int) -> dict:
        key = (labels, word, k)
        hit = self._cache_cross.get(key)
        if hit is not None:
            return hit
        self._tick()
        m = len(labels)
        arr = arrangement(word, m)
        zeros = (0,) * m
        out: dict = {}
        if arr[k - 1] < arr[k]:
            new = word + (k,)
            canon = canonical_word(arrangement(new, m))
            main, corr = self._apply_path(labels, new, _braid_path(new, canon))
            out[KlrBasisTerm(labels, main, zeros)] = Fraction(1)
            for c, gens in corr:
                _add_into(out, self.normalize(labels, gens), c)
        else:
            arr2 = list(arr)
            arr2[k - 1], arr2[k] = arr2[k], arr2[k - 1]
            shorter = canonical_word(arr2)
            target = shorter + (k,)
            main, corr = self._apply_path(labels, word, _braid_path(word, target))
            assert main == target
            top = tuple(labels[s] for s in arr2)
            for c, dots in self._r2_poly(top[k - 1], top[k], k, m):
                _add_into(out, {KlrBasisTerm(labels, shorter, dots): Fraction(1)}, c)
            for c, gens in corr:
                _add_into(out, self.normalize(labels, tuple(gens) + (("t", k),)), c)
        self._cache_cross[key] = out
        return out

    def _r2_poly(self, i: str, j: str, k: int, m: int) -> list[tuple[Fraction, tuple[int, ...]]]:
        """psi_k psi_k on labels (i, j) at positions k, k+1, as dot monomials."""

        def mono(p: int, q: int) -> tuple[int, ...]:
            d = [0] * m
            d[k - 1], d[k] = p, q
            return tuple(d)

        if i == j:
            return []
        D, Q = self.datum, self.q
        if D.B(i, j) == 0:
            return [(Q.t[(i, j)], mono(0, 0))]
        out = [(Q.t[(i, j)], mono(D.dij(i, j), 0)), (Q.t[(j, i)], mono(0, D.dij(j, i)))]
        out += [(v, mono(p, q)) for p, q, v in Q.s_terms(i, j)]
        return out

    def _r3_correction(self, i: str, j: str, pos: int, m: int) -> list[tuple[Fraction, tuple[int, ...]]]:
        """psi_{121} - psi_{212} on labels (i, j, i) at positions pos..pos+2."""
        D, Q = self.datum, self.q
        r = Q.r[i]
        out = []

        def mono(a: int, b: int, c: int) -> tuple[int, ...]:
            d = [0] * m
            d[pos - 1], d[pos], d[pos + 1] = a, b, c
            return tuple(d)

        dij = D.dij(i, j)
        for l1 in range(dij):
            out.append((r * Q.t[(i, j)], mono(l1, 0, dij - 1 - l1)))
        for p, q, v in Q.s_terms(i, j):
            for l1 in range(p):
                out.append((r * v, mono(l1, q, p - 1 - l1)))
        return out

    def _apply_path(self, labels: tuple[str, ...], word: tuple[int, ...], path) -> tuple[tuple[int, ...], list]:
        """Rewrite ``word`` along braid moves; returns final word and correction words."""
        m = len(labels)
        cur = list(word)
        corrections = []
        for kind, p in path:
            if kind == "c":
                cur[p], cur[p + 1] = cur[p + 1], cur[p]
                continue
            a, b = cur[p], cur[p + 1]
            mid = min(a, b)
            below = [labels[s] for s in arrangement(cur[:p], m)]
            i, j, k = below[mid - 1], below[mid], below[mid + 1]
            if i == k and i != j and self.datum.B(i, j) < 0:
                sign = 1 if a == mid else -1  # psi_121 = psi_212 + C ; psi_212 = psi_121 - C
                for c, dots in self._r3_correction(i, j, mid, m):
                    gens = [("t", x) for x in cur[:p]]
                    for s, e in enumerate(dots):
                        gens += [("x", s + 1)] * e
                    gens += [("t", x) for x in cur[p + 3 :]]
                    corrections.append((sign * c, tuple(gens)))
            cur[p : p + 3] = [b, a, b]
        return tuple(cur), corrections

    # -- public algebra operations

    def multiply(self, x: KlrElement, y: KlrElement) -> KlrElement:
        """x ; y  (y stacked on top of x)."""
        acc: dict = {}
        for b1, c1 in x.terms.items():
            top = b1.top_labels()
            for b2, c2 in y.terms.items():
                if b2.labels != top:
                    continue
                gens = [("t", k) for k in b1.word]
                for s, e in enumerate(b1.dots):
                    gens += [("x", s + 1)] * e
                gens += [("t", k) for k in b2.word]
                for s, e in enumerate(b2.dots):
                    gens += [("x", s + 1)] * e
                _add_into(acc, self.normalize(b1.labels, gens), c1 * c2)
        return KlrElement(self, acc)

    def from_gens(self, labels, gens: Sequence[Gen]) -> KlrElement:
        return KlrElement(self, self.normalize(labels, gens))

    def act_gen(self, x: KlrElement, g: Gen) -> KlrElement:
        """Stack one generator on top of ``x``."""
        return KlrElement(self, self._times_gen(x.terms, g))

    # -- enumeration

    def basis_terms(self, labels_in, labels_out, max_degree: int) -> list[KlrBasisTerm]:
        labels_in = self._check_labels(labels_in)
        labels_out = self._check_labels(labels_out)
        m = len(labels_in)
        if sorted(labels_in) != sorted(labels_out):
            return []
        out = []
        seen = set()
        for arr in permutations(range(m)):
            if tuple(labels_in[s] for s in arr) != labels_out or arr in seen:
                continue
            seen.add(arr)
            word = canonical_word(arr)
            base = self.crossing_degree(labels_in, word)
            dot_deg = [self.datum.B(x, x) for x in labels_out]
            budget = max_degree - base
            if budget < 0:
                continue
            ranges = [range(budget // d + 1) for d in dot_deg]
            for dots in product(*ranges):
                if sum(a * d for a, d in zip(dots, dot_deg)) <= budget:
                    out.append(KlrBasisTerm(labels_in, word, tuple(dots)))
        return sorted(out)

    def graded_dim(self, labels_in, labels_out, D: int) -> GradedDim:
        counts: dict[int, int] = {}
        for b in self.basis_terms(labels_in, labels_out, D):
            d = self.degree(b)
            counts[d] = counts.get(d, 0) + 1
        return GradedDim.from_map(D, counts)

    def min_degree(self, labels_in, labels_out) -> int:
        terms = self.basis_terms(labels_in, labels_out, self._word_bound(labels_in))
        return min((self.degree(b) for b in terms), default=0)

    def _word_bound(self, labels) -> int:
        # every reduced word has degree at most this, so dot-free terms are all enumerated
        m = len(labels)
        worst = max((-self.datum.B(a, b) for a in labels for b in labels), default=0)
        return max(0, worst) * m * m

    # -- cyclotomic quotients

    def cyclotomic_dim(self, lam: Mapping[str, int], labels, D: int | None = None) -> GradedDim:
        """Graded dimension of e(labels) R^Lambda e(labels) in degrees <= D."""
        labels = self._check_labels(labels)
        lam = {i: int(lam.get(i, 0)) for i in self.datum.nodes}
        if any(v < 0 for v in lam.values()):
            raise KlrError("Lambda must be dominant")
        m = len(labels)
        if D is None:
            D = 2 * m * max(max(lam.values()), 1)
        first = self._cyclotomic_at(lam, labels, D)
        second = self._cyclotomic_at(lam, labels, D + 2)
        stable = {d: c for d, c in second.items() if d <= D} == first and all(
            c == 0 for d, c in second.items() if d > D
        )
        return GradedDim.from_map(D, first, stable)

    def _cyclotomic_at(self, lam: Mapping[str, int], labels: tuple[str, ...], D: int) -> dict[int, int]:
        m = len(labels)
        seqs = sorted(set(permutations(labels)))
        ambient = self.basis_terms(labels, labels, D)
        spans: dict[int, _Echelon] = {}
        lows = {}
        for j in seqs:
            lows[("in", j)] = self.min_degree(labels, j)
            lows[("out", j)] = self.min_degree(j, labels)
        for j in seqs:
            power = lam[j[0]]
            gdots = [0] * m
            gdots[0] = power
            g = KlrElement(self, {KlrBasisTerm(j, (), tuple(gdots)): Fraction(1)})
            gdeg = power * self.datum.B(j[0], j[0])
            a_max = D - gdeg - lows[("out", j)]
            b_max = D - gdeg - lows[("in", j)]
            lefts = self.basis_terms(labels, j, a_max)
            rights = self.basis_terms(j, labels, b_max)
            # a basis of the left products a*g keeps the right products few
            left_span: dict[int, _Echelon] = {}
            for a in lefts:
                ag = self.multiply(KlrElement(self, {a: Fraction(1)}), g)
                if not ag.is_zero():
                    left_span.setdefault(self.degree(a) + gdeg, _Echelon()).add(ag.terms)
            for da, ech in left_span.items():
                for row in ech.rows.values():
                    ag = KlrElement(self, dict(row))
                    for b in rights:
                        if da + self.degree(b) > D:
                            continue
                        prod = self.multiply(ag, KlrElement(self, {b: Fraction(1)}))
                        by_deg: dict[int, dict] = {}
                        for t, c in prod.terms.items():
                            by_deg.setdefault(self.degree(t), {})[t] = c
                        for d, vec in by_deg.items():
                            if d <= D:
                                spans.setdefault(d, _Echelon()).add(vec)
        counts: dict[int, int] = {}
        for b in ambient:
            d = self.degree(b)
            counts[d] = counts.get(d, 0) + 1
        out = {}
        for d, c in counts.items():
            rest = c - (spans[d].rank if d in spans else 0)
            if rest:
                out[d] = rest
        return out

    # -- text form

    def render_term(self, b: KlrBasisTerm) -> str:
        pieces = []
        for s, e in enumerate(b.dots):
            if e:
                pieces.append(f"x({s + 1})" + (f"^{e}" if e > 1 else ""))
        pieces += [f"t({k})" for k in reversed(b.word)]
        pieces.append("e(" + ",".join(b.labels) + ")")
        return " ".join(pieces)

    def render(self, x: KlrElement) -> str:
        if x.is_zero():
            return "0"
        out = []
        for n, b in enumerate(sorted(x.terms, key=lambda b: (self.degree(b), b))):
            c = x.terms[b]
            body = self.render_term(b)
            mag = abs(c)
            text = body if mag == 1 else f"{scalar_str(mag)}*{body}"
            if n == 0:
                out.append(("-" if c < 0 else "") + text)
            else:
                out.append((" - " if c < 0 else " + ") + text)
        return "".join(out)

    def parse(self, text: str) -> KlrElement:
        return _KlrParser(self, text).parse()


class _Echelon:
    """Incremental row-echelon basis of sparse rational vectors."""

    def __init__(self):
        self.rows: dict = {}  # pivot -> row (pivot coefficient 1)
        self.rank = 0

    def reduce(self, vec: Mapping) -> dict:
        v = dict(vec)
        while v:
            piv = min(v)
            row = self.rows.get(piv)
            if row is None:
                return v
            c = v[piv]
            for k, val in row.items():
                nv = v.get(k, Fraction(0)) - c * val
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: Mapping) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        c = v[piv]
        self.rows[piv] = {k: val / c for k, val in v.items()}
        self.rank += 1
        return True


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[ext])\s*\(|(?P<sym>[-+;*()^,])|(?P<word>[A-Za-z0-9_]+))")


class _KlrParser:
    def __init__(self, algebra: KlrAlgebra, text: str):
        self.alg = algebra
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise KlrParseError(f"parse error at position {self.pos}: {msg}")

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch: str) -> None:
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def number(self) -> Fraction:
        m = re.compile(r"\d+(?:/\d+)?").match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return Fraction(m.group(0))

    def integer(self) -> int:
        self.peek()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group(0))

    def parse(self) -> KlrElement:
        val = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return val

    def expr(self) -> KlrElement:
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        acc = self.term().scale(sign)
        while self.peek() in ("+", "-") and self.peek():
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
            acc = acc + self.term().scale(sign)
        return acc

    def term(self) -> KlrElement:
        coef = Fraction(1)
        if self.peek().isdigit():
            coef = self.number()
            if self.peek() == "*":
                self.pos += 1
            if not self.peek() or self.peek() in "+-)":
                return self._scalar_only(coef)
        items = [self.product()]
        while self.peek() == ";":
            self.pos += 1
            items.append(self.product())
        # items are bottom-to-top; each is a list of atoms in product order
        atoms = []
        for prod in items:
            atoms.extend(reversed(prod))
        return self._evaluate(atoms).scale(coef)

    def _scalar_only(self, coef):
        if coef == 0:
            return self.alg.zero()
        self.error("a coefficient must multiply a diagram")

    def product(self) -> list:
        atoms = [self.atom()]
        while self.peek() and self.peek() not in "+-;)":
            atoms.append(self.atom())
        return atoms

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            val = self.expr()
            self.eat(")")
            return ("elem", val)
        if ch in ("e", "x", "t"):
            self.pos += 1
            self.eat("(")
            if ch == "e":
                labels = []
                while True:
                    self.peek()
                    m = re.compile(r"[A-Za-z0-9_]+").match(self.text, self.pos)
                    if not m:
                        self.error("expected a label")
                    labels.append(m.group(0))
                    self.pos = m.end()
                    if self.peek() == ",":
                        self.pos += 1
                        continue
                    break
                self.eat(")")
                return ("e", tuple(labels))
            k = self.integer()
            self.eat(")")
            power = 1
            if self.peek() == "^":
                self.pos += 1
                power = self.integer()
            return (ch, k, power)
        self.error(f"unexpected {ch!r}" if ch else "unexpected end of input")

    def _evaluate(self, atoms: list) -> KlrElement:
        cur: KlrElement | None = None
        for atom in atoms:
            if atom[0] == "e":
                idem = self.alg.idempotent(atom[1])
                cur = idem if cur is None else self.alg.multiply(cur, idem)
            elif atom[0] == "elem":
                cur = atom[1] if cur is None else self.alg.multiply(cur, atom[1])
            else:
                if cur is None:
                    self.error("a dot or crossing needs an idempotent e(...) below it")
                kind, k, power = atom
                for _ in range(power):
                    cur = self._apply(cur, (kind, k))
        if cur is None:
            self.error("empty term")
        return cur

    def _apply(self, cur: KlrElement, g: Gen) -> KlrElement:
        for b in cur.terms:
            m = b.m
            if g[0] == "x" and not 1 <= g[1] <= m or g[0] == "t" and not 1 <= g[1] < m:
                self.error(f"generator {g[0]}({g[1]}) out of range for {m} strands")
        return self.alg.act_gen(cur, g)
