"""Bubble values, fake bubbles and bubble-slide generating functions.

A region of weight n carries, for each label i, the ring Sym through the map
phi^n.  Writing C^n(t) for the clockwise series (coefficient of t^r is the
clockwise bubble with n-1+r dots) and A^n(t) for the counterclockwise series
(coefficient of t^r is the ccw bubble with -n-1+r dots), C^n A^n = 1 and

    n >= 0:  C^n = E(t) = sum e_r t^r,      A^n = sum (-1)^r h_r t^r
    n <  0:  C^n = sum (-1)^r h_r t^r,      A^n = E(t)

so real and fake bubbles are uniformly coefficients of these series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..cartan import CartanDatum, ScalarsQ
from ..symfunc import SymElement, render, signed_complete

Poly = dict  # x-power -> SymElement


def c_coeff(n: int, r: int) -> SymElement:
    """[t^r] C^n."""
    if r < 0:
        return SymElement.zero()
    return SymElement.e(r) if n >= 0 else signed_complete(r)


def a_coeff(n: int, r: int) -> SymElement:
    """[t^r] A^n."""
    if r < 0:
        return SymElement.zero()
    return signed_complete(r) if n >= 0 else SymElement.e(r)


def bubble_value(orient: str, dots: int, n: int, c_minus1: Fraction = Fraction(1)) -> SymElement:
    """Value of a (possibly fake) bubble with ``dots`` dots in a region of weight n.

    ``orient`` is "cw" or "ccw".  The degree-zero ccw bubble at n = -1 is the
    free constant c_{-1}.
    """
    if orient == "cw":
        return c_coeff(n, dots - n + 1)
    if orient == "ccw":
        r = dots + n + 1
        if n == -1 and r == 0:
            return SymElement.scalar(c_minus1)
        return a_coeff(n, r)
    raise ValueError(f"orientation must be 'cw' or 'ccw', got {orient!r}")


@dataclass(frozen=True)
class BubbleExpr:
    """A Sym value for label ``label`` attached to a region of weight ``n``."""

    n: int
    label: str
    value: SymElement

    def real_bubbles(self) -> list[tuple[Fraction, tuple[int, ...]]] | None:
        """Expansion into products of clockwise (n >= 0) or ccw (n < 0) real bubbles.

        Each entry is (coefficient, dot counts); None when some dot count is negative.
        """
        out = []
        for lam, c in sorted(self.value.terms.items()):
            if self.n >= 0:
                dots = tuple(self.n - 1 + p for p in lam)
            else:
                dots = tuple(-self.n - 1 + p for p in lam)
            if any(d < 0 for d in dots):
                return None
            out.append((c, dots))
        return out

    def render(self) -> str:
        return render(self.value)


def fake_bubble(n: int, label: str, r: int) -> BubbleExpr:
    """The degree-2r fake bubble in weight n: (-1)^r h_r."""
    if r < 0:
        raise ValueError("r must be non-negative")
    return BubbleExpr(n, label, signed_complete(r))


# ---------------------------------------------------------------- series in t over Sym[x]


def _padd(a: Poly, b: Poly, c: Fraction = Fraction(1)) -> Poly:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, SymElement.zero()) + v.scale(c)
        if nv.is_zero():
            out.pop(k, None)
        else:
            out[k] = nv
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            out = _padd(out, {ka + kb: va * vb})
    return out


def _smul(a: list, b: list, order: int) -> list:
    out = [dict() for _ in range(order + 1)]
    for i, ai in enumerate(a[: order + 1]):
        if not ai:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            if bj:
                out[i + j] = _padd(out[i + j], _pmul(ai, bj))
    return out


def _sinv(a: list, order: int) -> list:
    """Inverse of a series whose constant term is the polynomial 1."""
    inv = [{0: SymElement.one()}]
    for k in range(1, order + 1):
        acc: Poly = {}
        for m in range(1, k + 1):
            if m < len(a) and a[m]:
                acc = _padd(acc, _pmul(a[m], inv[k - m]))
        inv.append({p: -v for p, v in acc.items()})
    return inv


def slide_kernel(datum: CartanDatum, q: ScalarsQ, i: str, j: str, order: int) -> list:
    """K_ij(t, x) with C_i^H = C_i^L K_ij, x a dot on the j strand.

    H is the region to the left of an upward j strand, or to the right of a
    downward one; L is the other side.
    """
    ser = [dict() for _ in range(order + 1)]
    ser[0] = {0: SymElement.one()}
    if i == j:
        for r in range(1, order + 1):
            ser[r] = {r: SymElement.scalar(r + 1)}
        return ser
    if datum.B(i, j) == 0:
        return ser
    dij, dji = datum.dij(i, j), datum.dij(j, i)
    tij, tji = q.t[(i, j)], q.t[(j, i)]
    if dij <= order:
        ser[dij] = _padd(ser[dij], {dji: SymElement.scalar(tji / tij)})
    for p, qq, v in q.s_terms(i, j):
        k = dij - p
        if 0 <= k <= order:
            ser[k] = _padd(ser[k], {qq: SymElement.scalar(v / tij)})
    return ser


def _c_series(n: int, order: int) -> list:
    return [{0: c_coeff(n, r)} if c_coeff(n, r) else {} for r in range(order + 1)]


def slide_across(datum: CartanDatum, q: ScalarsQ, value_parts: tuple[int, ...], i: str,
                 j: str, src_is_high: bool, n_src: int, n_dst: int) -> Poly:
    """Rewrite e_lambda (label i, region n_src) as a polynomial in the dot x of the
    crossed j strand with Sym coefficients in the destination region n_dst."""
    order = max(value_parts, default=0)
    kern = slide_kernel(datum, q, i, j, order)
    if not src_is_high:
        kern = _sinv(kern, order)
    c_src = _smul(_c_series(n_dst, order), kern, order)
    gens = c_src if n_src >= 0 else _sinv(c_src, order)
    out: Poly = {0: SymElement.one()}
    for part in value_parts:
        out = _pmul(out, gens[part])
    return out
