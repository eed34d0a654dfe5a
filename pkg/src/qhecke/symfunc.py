"""Symmetric functions in the elementary basis."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .cartan import scalar_str, to_scalar

Partition = tuple[int, ...]


def partition(parts: Iterable[int]) -> Partition:
    out = tuple(sorted((int(p) for p in parts), reverse=True))
    if any(p <= 0 for p in out):
        raise ValueError(f"partition parts must be positive: {out}")
    return out


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


class SymElement:
    """Finite linear combination of e_lambda with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Partition, object] | None = None):
        clean: dict[Partition, Fraction] = {}
        for lam, c in (terms or {}).items():
            c = to_scalar(c)
            if c:
                key = partition(lam)
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    @staticmethod
    def one() -> "SymElement":
        return SymElement({(): 1})

    @staticmethod
    def zero() -> "SymElement":
        return SymElement()

    @staticmethod
    def e(*parts: int) -> "SymElement":
        """e_lambda; any zero part gives e_0 = 1, a negative part gives 0."""
        if any(p < 0 for p in parts):
            return SymElement()
        return SymElement({tuple(p for p in parts if p): 1})

    @staticmethod
    def scalar(c) -> "SymElement":
        return SymElement({(): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SymElement.scalar(other)
        return isinstance(other, SymElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "SymElement") -> "SymElement":
        out = dict(self.terms)
        for lam, c in other.terms.items():
            out[lam] = out.get(lam, Fraction(0)) + c
        return SymElement(out)

    def __neg__(self) -> "SymElement":
        return SymElement({lam: -c for lam, c in self.terms.items()})

    def __sub__(self, other: "SymElement") -> "SymElement":
        return self + (-other)

    def scale(self, c) -> "SymElement":
        c = to_scalar(c)
        return SymElement({lam: c * v for lam, v in self.terms.items()})

    def __mul__(self, other) -> "SymElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SymElement":
        out = SymElement.one()
        for _ in range(k):
            out = out * self
        return out

    def degree(self) -> int | None:
        """Common grading 2|lambda|, or None when zero or inhomogeneous."""
        degs = {2 * sum(lam) for lam in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def max_weight(self) -> int:
        return max((sum(lam) for lam in self.terms), default=0)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def __repr__(self) -> str:
        return f"SymElement({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


def multiply(a: SymElement, b: SymElement) -> SymElement:
    out: dict[Partition, Fraction] = {}
    for la, ca in a.terms.items():
        for lb, cb in b.terms.items():
            key = tuple(sorted(la + lb, reverse=True))
            out[key] = out.get(key, Fraction(0)) + ca * cb
    return SymElement(out)


@lru_cache(maxsize=None)
def _complete(r: int) -> SymElement:
    # h_r = sum_{k=1}^r (-1)^{k+1} e_k h_{r-k}
    if r == 0:
        return SymElement.one()
    acc = SymElement.zero()
    for k in range(1, r + 1):
        acc = acc + (SymElement.e(k) * _complete(r - k)).scale((-1) ** (k + 1))
    return acc


def complete_in_e(r: int) -> SymElement:
    """h_r = sum_{|lambda| = r} alpha_lambda e_lambda."""
    if r < 0:
        return SymElement.zero()
    return _complete(r)


def alpha(lam: Partition) -> Fraction:
    """The coefficient alpha_lambda of e_lambda in h_{|lambda|}."""
    return complete_in_e(sum(lam)).terms.get(partition(lam), Fraction(0))


def signed_complete(r: int) -> SymElement:
    """(-1)^r h_r, the value of the degree-r fake bubble."""
    return complete_in_e(r).scale((-1) ** r) if r >= 0 else SymElement.zero()


def eh_identity_check(m: int) -> bool:
    """sum_{a+b=m} (-1)^b e_a h_b == delta_{m,0}."""
    acc = SymElement.zero()
    for b in range(m + 1):
        acc = acc + (SymElement.e(m - b) * complete_in_e(b)).scale((-1) ** b)
    return acc == (SymElement.one() if m == 0 else SymElement.zero())


def a1_relation_check(b: int, ell: int) -> bool:
    """delta_{b,0} == sum_{s<=b} (-1)^s h_s e_{b-s}; vacuous when b > ell."""
    if b > ell:
        return True
    acc = SymElement.zero()
    for s in range(b + 1):
        acc = acc + (complete_in_e(s) * SymElement.e(b - s)).scale((-1) ** s)
    return acc == (SymElement.one() if b == 0 else SymElement.zero())


# ---------------------------------------------------------------- power series helpers


def series_inverse(coeffs: list[SymElement], order: int) -> list[SymElement]:
    """Inverse of a power series with constant term 1, truncated at t^order."""
    if not coeffs or coeffs[0] != SymElement.one():
        raise ValueError("series must have constant term 1")
    inv = [SymElement.one()]
    for k in range(1, order + 1):
        acc = SymElement.zero()
        for a in range(1, k + 1):
            if a < len(coeffs):
                acc = acc + coeffs[a] * inv[k - a]
        inv.append(-acc)
    return inv


# ---------------------------------------------------------------- text form

_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(e\[([0-9,\s]*)\])?")


def render(x: SymElement) -> str:
    """Deterministic text form, e.g. "e[2,1] - 3*e[1,1,1]"."""
    if not x.terms:
        return "0"
    keys = sorted(x.terms, key=lambda lam: (sum(lam), lam), reverse=True)
    pieces = []
    for n, lam in enumerate(keys):
        c = x.terms[lam]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if lam:
            mono = "e[" + ",".join(map(str, lam)) + "]"
            body = mono if mag == 1 else f"{scalar_str(mag)}*{mono}"
        else:
            body = scalar_str(mag)
        if n == 0:
            pieces.append(("-" if sign == "-" else "") + body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


def parse(text: str) -> SymElement:
    """Inverse of :func:`render`."""
    src = text.strip()
    if src == "0":
        return SymElement.zero()
    pos = 0
    out = SymElement.zero()
    first = True
    while pos < len(src):
        m = _TERM.match(src, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse symmetric function at position {pos}: {src[pos:]!r}")
        sign, coef, mono, parts = m.group(1), m.group(2), m.group(3), m.group(4)
        if not first and sign is None:
            raise ValueError(f"expected '+' or '-' at position {pos}")
        if coef is None and mono is None:
            raise ValueError(f"empty term at position {pos}")
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        if mono:
            nums = [int(p) for p in parts.split(",") if p.strip()]
            lam = partition(nums)
        else:
            lam = ()
        out = out + SymElement({lam: c})
        pos = m.end()
        first = False
    return out
