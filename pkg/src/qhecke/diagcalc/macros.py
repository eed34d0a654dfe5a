"""Composite diagrams: downward and sideways generators written through cups,
caps and upward generators, and the components of the maps zeta and zeta^{-1}."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..symfunc import signed_complete
from .core import DOWN, UP, Calculus, DiagramError, Morphism2, Slice, from_slices, generator


def _dom(calc: Calculus, base, strands) -> object:
    return calc.seq(base, strands)


def down_dot_left(calc: Calculus, i: str, base) -> Morphism2:
    """A dot on a downward strand, drawn by rotating an upward dot with a left cup."""
    sl = [Slice("cupFE", 0, (i,)), Slice("dot", 1, (i,)), Slice("capEF", 1, (i,))]
    return from_slices(calc, _dom(calc, base, [(i, DOWN)]), sl)


def down_dot_right(calc: Calculus, i: str, base) -> Morphism2:
    """A dot on a downward strand, drawn by rotating an upward dot with a right cup."""
    sl = [Slice("cupEF", 1, (i,)), Slice("dot", 1, (i,)), Slice("capFE", 0, (i,))]
    return from_slices(calc, _dom(calc, base, [(i, DOWN)]), sl)


def down_crossing(calc: Calculus, i: str, j: str, base) -> Morphism2:
    return generator(calc, "cross", (i, j), base, (DOWN, DOWN))


def down_crossing_left(calc: Calculus, i: str, j: str, base) -> Morphism2:
    """Downward crossing on [F_i, F_j] rotated from an upward one with left cups.

    Includes the factor t_ij^{-1} (none when i = j).
    """
    sl = [Slice("cupFE", 0, (j,)), Slice("cupFE", 1, (i,)), Slice("cross", 2, (i, j)),
          Slice("capEF", 3, (i,)), Slice("capEF", 2, (j,))]
    c = Fraction(1) if i == j else 1 / calc.q.t[(i, j)]
    return from_slices(calc, _dom(calc, base, [(i, DOWN), (j, DOWN)]), sl, c)


def down_crossing_right(calc: Calculus, i: str, j: str, base) -> Morphism2:
    """Downward crossing on [F_i, F_j] rotated with right cups, factor t_ji^{-1}."""
    sl = [Slice("cupEF", 2, (i,)), Slice("cupEF", 3, (j,)), Slice("cross", 2, (i, j)),
          Slice("capFE", 1, (j,)), Slice("capFE", 0, (i,))]
    c = Fraction(1) if i == j else 1 / calc.q.t[(j, i)]
    return from_slices(calc, _dom(calc, base, [(i, DOWN), (j, DOWN)]), sl, c)


def sideways(calc: Calculus, left: tuple, right: tuple, base) -> Morphism2:
    """The sideways crossing with bottom boundary [left, right] (mixed orientations)."""
    if left[1] == right[1]:
        raise DiagramError("a sideways crossing needs strands of opposite orientation")
    return generator(calc, "cross", (left[0], right[0]), base, (left[1], right[1]))


def sideways_expanded(calc: Calculus, left: tuple, right: tuple, base) -> Morphism2:
    """The sideways crossing written with one cup, one cap and an upward crossing."""
    p = 0
    if left[1] == UP:
        j, i = left[0], right[0]
        sl = [Slice("cupFE", p, (i,)), Slice("cross", p + 1, (i, j)), Slice("capEF", p + 2, (i,))]
    else:
        j, i = left[0], right[0]
        sl = [Slice("cupEF", p + 2, (j,)), Slice("cross", p + 1, (i, j)), Slice("capFE", p, (j,))]
    return from_slices(calc, _dom(calc, base, [left, right]), sl)


# ---------------------------------------------------------------- zeta


@dataclass
class ZetaMatrix:
    """Components of zeta or zeta^{-1} at weight n (the region right of the pair).

    ``cross`` is the sideways-crossing entry; ``summands[k]`` is the entry
    for the k-th copy of the identity 1-morphism.
    """

    n: int
    label: str
    cross: Morphism2
    summands: list


def _check_branch(n: int, branch: str) -> None:
    if branch not in ("plus", "minus"):
        raise DiagramError("branch must be 'plus' (n >= 0) or 'minus' (n <= 0)")
    if (branch == "plus" and n < 0) or (branch == "minus" and n > 0):
        raise DiagramError(f"weight {n} is outside the {branch} branch")


def zeta(calc: Calculus, i: str, base, branch: str | None = None) -> ZetaMatrix:
    """n >= 0: FE + n copies of 1 -> EF.  n <= 0: EF + (-n) copies of 1 -> FE."""
    w = calc.weight(base)
    n = w.pair(calc.datum, i)
    branch = branch or ("plus" if n >= 0 else "minus")
    _check_branch(n, branch)
    empty = calc.seq(w)
    if branch == "plus":
        cross = sideways(calc, (i, DOWN), (i, UP), w)
        summands = [from_slices(calc, empty, [Slice("cupEF", 0, (i,))] + [Slice("dot", 0, (i,))] * k)
                    for k in range(n)]
    else:
        cross = sideways(calc, (i, UP), (i, DOWN), w)
        summands = [from_slices(calc, empty, [Slice("cupFE", 0, (i,))] + [Slice("dot", 1, (i,))] * k)
                    for k in range(-n)]
    return ZetaMatrix(n, i, cross, summands)


def zeta_inverse(calc: Calculus, i: str, base, branch: str | None = None) -> ZetaMatrix:
    """Inverse matrix; summand ell pairs with the summand k = |n| - 1 - ell of zeta."""
    w = calc.weight(base)
    n = w.pair(calc.datum, i)
    branch = branch or ("plus" if n >= 0 else "minus")
    _check_branch(n, branch)
    beta = calc.beta_n(i, n)
    if branch == "plus":
        cross = sideways(calc, (i, UP), (i, DOWN), w).scale(beta)
        dom, cap, dpos, size = calc.seq(w, [(i, UP), (i, DOWN)]), "capEF", 0, n
    else:
        cross = sideways(calc, (i, DOWN), (i, UP), w).scale(beta)
        dom, cap, dpos, size = calc.seq(w, [(i, DOWN), (i, UP)]), "capFE", 1, -n
    summands = []
    for ell in range(size):
        k = size - 1 - ell
        total = None
        for j in range(ell + 1):
            for lam, c in sorted(signed_complete(ell - j).terms.items()):
                sl = [Slice("dot", dpos, (i,))] * j + [Slice(cap, 0, (i,))]
                if lam:
                    sl.append(Slice("sym", 0, (i,), lam))
                term = from_slices(calc, dom, sl, c)
                total = term if total is None else total + term
        summands.append(total)
    # stored in the order of zeta's summands: index k
    summands.reverse()
    return ZetaMatrix(n, i, cross, summands)
