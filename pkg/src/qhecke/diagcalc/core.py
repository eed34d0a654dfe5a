"""Signed sequences, one-generator slices and 2-morphisms as slice stacks.

Strands are listed left to right as drawn.  A strand is (label, orientation)
with orientation +1 for an upward E strand and -1 for a downward F strand.
Slices are applied bottom to top.  Positions are 0-based strand indices of
the slice's leftmost input (or the insertion point for cups and region
decorations).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..cartan import CartanDatum, ScalarsQ, Weight, default_scalars, degree_of_generator, scalar_str, to_scalar

UP, DOWN = 1, -1
Strand = tuple  # (label, orientation)


class DiagramError(ValueError):
    """Malformed diagram or incompatible composition."""


class BoundaryError(DiagramError):
    pass


def strand_token(s: Strand) -> str:
    return ("E" if s[1] == UP else "F") + s[0]


def seq_text(strands: Sequence[Strand]) -> str:
    return ",".join(strand_token(s) for s in strands)


@dataclass(frozen=True)
class SignedSeq:
    """A 1-morphism: strands over a base weight (the rightmost region)."""

    base: Weight
    strands: tuple = ()

    @property
    def width(self) -> int:
        return len(self.strands)

    def region_weights(self, datum: CartanDatum) -> list[Weight]:
        """Weights of regions 0..width; region k lies left of strand k."""
        ws = [self.base]
        for label, o in reversed(self.strands):
            ws.append(ws[-1].shift(datum, label, o))
        return ws[::-1]

    def leftmost(self, datum: CartanDatum) -> Weight:
        return self.region_weights(datum)[0]

    def __str__(self) -> str:
        return f"[{seq_text(self.strands)}]@{self.base.values}"


ARITY = {
    "dot": (1, 1),
    "cross": (2, 2),
    "cupFE": (0, 2),
    "cupEF": (0, 2),
    "capFE": (2, 0),
    "capEF": (2, 0),
    "sym": (0, 0),
}

CUP_LEGS = {"cupFE": (DOWN, UP), "cupEF": (UP, DOWN), "capFE": (DOWN, UP), "capEF": (UP, DOWN)}


@dataclass(frozen=True, order=True)
class Slice:
    """One generator placed at ``pos``.  ``extra`` holds the partition of a
    region decoration (kind "sym": the Sym monomial e_extra for label labels[0])."""

    kind: str
    pos: int
    labels: tuple
    extra: tuple = ()

    @property
    def win(self) -> int:
        return ARITY[self.kind][0]

    @property
    def wout(self) -> int:
        return ARITY[self.kind][1]

    def moved(self, pos: int) -> "Slice":
        return Slice(self.kind, pos, self.labels, self.extra)


def apply_slice(strands: tuple, s: Slice) -> tuple:
    """Codomain strands of ``s`` applied to ``strands``; raises on mismatch."""
    if s.kind not in ARITY:
        raise DiagramError(f"unknown slice kind {s.kind!r}")
    p, n = s.pos, len(strands)
    if p < 0 or p + s.win > n:
        raise BoundaryError(f"{s.kind} at position {p} does not fit [{seq_text(strands)}]")
    if s.kind == "dot":
        if strands[p][0] != s.labels[0]:
            raise BoundaryError(f"dot({s.labels[0]}) on strand {strand_token(strands[p])}")
        return strands
    if s.kind == "cross":
        a, b = strands[p], strands[p + 1]
        if (a[0], b[0]) != tuple(s.labels):
            raise BoundaryError(f"crossing labels {s.labels} on [{seq_text((a, b))}]")
        return strands[:p] + (b, a) + strands[p + 2 :]
    if s.kind == "sym":
        return strands
    i = s.labels[0]
    legs = tuple((i, o) for o in CUP_LEGS[s.kind])
    if s.kind.startswith("cup"):
        return strands[:p] + legs + strands[p:]
    if strands[p : p + 2] != legs:
        raise BoundaryError(f"{s.kind}({i}) on [{seq_text(strands[p:p + 2])}]")
    return strands[:p] + strands[p + 2 :]


def walk(dom: Sequence[Strand], slices: Sequence[Slice]) -> list[tuple]:
    """Strand sequences at every level: levels[k] is the input of slice k."""
    levels = [tuple(dom)]
    for s in slices:
        levels.append(apply_slice(levels[-1], s))
    return levels


def sym_degree(datum: CartanDatum, label: str, partition: tuple) -> int:
    return 2 * datum.d(label) * sum(partition)


def slice_degree(datum: CartanDatum, strands: tuple, base: Weight, s: Slice) -> int:
    if s.kind == "sym":
        return sym_degree(datum, s.labels[0], s.extra)
    if s.kind == "cross":
        a, b = strands[s.pos], strands[s.pos + 1]
        return -datum.B(a[0], b[0]) if a[1] == b[1] else 0
    ws = SignedSeq(base, strands).region_weights(datum)
    right = ws[s.pos + s.win] if s.kind != "sym" else ws[s.pos]
    return degree_of_generator(datum, s.kind, s.labels, right)


def term_degree(datum: CartanDatum, dom: SignedSeq, slices: Sequence[Slice]) -> int:
    deg, cur = 0, dom.strands
    for s in slices:
        deg += slice_degree(datum, cur, dom.base, s)
        cur = apply_slice(cur, s)
    return deg


@dataclass
class Calculus:
    """Cartan datum, scalars and the free constants of the extended sl2 relations.

    ``beta`` maps (label, n) to beta_n (default -r_i^{-2}); ``c_minus1``, ``c0plus``
    and ``c0minus`` default to the values fixed by the coefficient lemma;
    ``mixed`` maps (left label, right label, orientation of left, n) to the scalar
    of a mixed-label double sideways crossing (default t_ij for F_iE_j and t_ji
    for E_iF_j).  ``expand_sideways`` makes reduce expand every sideways
    crossing into cups, caps and an upward crossing before rewriting.
    """

    datum: CartanDatum
    q: ScalarsQ | None = None
    beta: Mapping | None = None
    c_minus1: Fraction = Fraction(1)
    c0plus: Fraction | None = None
    c0minus: Fraction | None = None
    mixed: Mapping | None = None
    expand_sideways: bool = False
    fuel: int = 200_000
    check_degrees: bool = True
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.q is None:
            self.q = default_scalars(self.datum)
        self.c_minus1 = to_scalar(self.c_minus1)

    def r(self, i: str) -> Fraction:
        return self.q.r[i]

    def beta_n(self, i: str, n: int) -> Fraction:
        if self.beta and (i, n) in self.beta:
            return to_scalar(self.beta[(i, n)])
        if self.beta and ("*", n) in self.beta:
            return to_scalar(self.beta[("*", n)])
        return -1 / self.r(i) ** 2

    def curl_plus0(self, i: str) -> Fraction:
        return self.r(i) if self.c0plus is None else to_scalar(self.c0plus)

    def curl_minus0(self, i: str) -> Fraction:
        return self.r(i) if self.c0minus is None else to_scalar(self.c0minus)

    def mixed_scalar(self, left: str, right: str, left_orient: int, n: int) -> Fraction:
        key = (left, right, left_orient, n)
        if self.mixed and key in self.mixed:
            return to_scalar(self.mixed[key])
        if self.mixed and (left, right, left_orient, "*") in self.mixed:
            return to_scalar(self.mixed[(left, right, left_orient, "*")])
        if left_orient == DOWN:
            return self.q.t[(left, right)]
        return self.q.t[(right, left)]

    def weight(self, values: Mapping[str, int] | Weight | int) -> Weight:
        if isinstance(values, Weight):
            return values
        if isinstance(values, int):
            if len(self.datum.nodes) != 1:
                raise DiagramError("an integer weight needs a single-node datum")
            return Weight((values,))
        return Weight.from_map(self.datum, values)

    def seq(self, base, strands: Iterable[Strand] = ()) -> SignedSeq:
        out = tuple((self.datum.check_node(l), int(o)) for l, o in strands)
        return SignedSeq(self.weight(base), out)

    def pairing(self, w: Weight, i: str) -> int:
        return w.pair(self.datum, i)


class Morphism2:
    """Finite sum of slice stacks sharing domain and codomain."""

    __slots__ = ("calc", "dom", "cod", "terms", "info")

    def __init__(self, calc: Calculus, dom: SignedSeq, cod: SignedSeq,
                 terms: Mapping[tuple, object] | None = None, check: bool = True):
        self.calc, self.dom, self.cod = calc, dom, cod
        clean: dict[tuple, Fraction] = {}
        for key, c in (terms or {}).items():
            c = to_scalar(c)
            key = tuple(key)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        if check:
            if dom.base != cod.base:
                raise BoundaryError("domain and codomain have different base weights")
            for key in clean:
                top = walk(dom.strands, key)[-1]
                if top != cod.strands:
                    raise BoundaryError(
                        f"term ends at [{seq_text(top)}], expected [{seq_text(cod.strands)}]")
        self.terms = clean
        self.info: dict = {}

    # -- algebra

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other: "Morphism2") -> None:
        if (self.dom, self.cod) != (other.dom, other.cod):
            raise BoundaryError(
                f"cannot add [{seq_text(self.dom.strands)} -> {seq_text(self.cod.strands)}] and "
                f"[{seq_text(other.dom.strands)} -> {seq_text(other.cod.strands)}]")

    def __add__(self, other: "Morphism2") -> "Morphism2":
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Morphism2(self.calc, self.dom, self.cod, out, check=False)

    def __neg__(self) -> "Morphism2":
        return self.scale(-1)

    def __sub__(self, other: "Morphism2") -> "Morphism2":
        return self + (-other)

    def scale(self, c) -> "Morphism2":
        c = to_scalar(c)
        return Morphism2(self.calc, self.dom, self.cod, {k: c * v for k, v in self.terms.items()}, check=False)

    def __rmul__(self, c) -> "Morphism2":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Morphism2) and self.dom == other.dom and self.cod == other.cod
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, frozenset(self.terms.items())))

    def then(self, other: "Morphism2") -> "Morphism2":
        return compose_vertical(self, other)

    def beside(self, other: "Morphism2") -> "Morphism2":
        return compose_horizontal(self, other)

    def degrees(self) -> set[int]:
        return {term_degree(self.calc.datum, self.dom, k) for k in self.terms}

    def degree(self) -> int | None:
        degs = self.degrees()
        return degs.pop() if len(degs) == 1 else None

    def __repr__(self) -> str:
        from .lang import render

        return f"Morphism2({render(self)!r})"

    def __str__(self) -> str:
        from .lang import render

        return render(self)

    # -- serialization

    def to_json(self) -> dict:
        D = self.calc.datum

        def seq(s: SignedSeq) -> dict:
            return {"base": s.base.as_map(D), "strands": [strand_token(x) for x in s.strands]}

        terms = []
        for key in sorted(self.terms):
            terms.append({
                "coef": scalar_str(self.terms[key]),
                "slices": [
                    {"kind": s.kind, "pos": s.pos, "labels": list(s.labels), "extra": list(s.extra)}
                    for s in key
                ],
            })
        return {"dom": seq(self.dom), "cod": seq(self.cod), "terms": terms}

    @staticmethod
    def from_json(calc: Calculus, data: Mapping) -> "Morphism2":
        def seq(d: Mapping) -> SignedSeq:
            strands = [(tok[1:], UP if tok[0] == "E" else DOWN) for tok in d["strands"]]
            return calc.seq(dict(d["base"]), strands)

        terms = {}
        for t in data["terms"]:
            key = tuple(Slice(s["kind"], int(s["pos"]), tuple(s["labels"]), tuple(s.get("extra", ())))
                        for s in t["slices"])
            terms[key] = Fraction(t["coef"])
        return Morphism2(calc, seq(data["dom"]), seq(data["cod"]), terms)


def identity(calc: Calculus, seq: SignedSeq) -> Morphism2:
    return Morphism2(calc, seq, seq, {(): 1})


def zero(calc: Calculus, dom: SignedSeq, cod: SignedSeq) -> Morphism2:
    return Morphism2(calc, dom, cod, {})


def compose_vertical(f: Morphism2, g: Morphism2) -> Morphism2:
    """f below g (f first)."""
    if f.cod != g.dom:
        raise BoundaryError(
            f"vertical composition mismatch: [{seq_text(f.cod.strands)}] @ {f.cod.base.values} "
            f"vs [{seq_text(g.dom.strands)}] @ {g.dom.base.values}")
    out: dict[tuple, Fraction] = {}
    for k1, c1 in f.terms.items():
        for k2, c2 in g.terms.items():
            key = k1 + k2
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return Morphism2(f.calc, f.dom, g.cod, out, check=False)


def compose_horizontal(f: Morphism2, g: Morphism2) -> Morphism2:
    """f drawn to the left of g; g's slices run first."""
    D = f.calc.datum
    if f.dom.base != g.dom.leftmost(D):
        raise BoundaryError(
            f"horizontal composition mismatch: left factor has base {f.dom.base.values}, "
            f"right factor has leftmost weight {g.dom.leftmost(D).values}")
    shift = f.dom.width
    dom = SignedSeq(g.dom.base, f.dom.strands + g.dom.strands)
    cod = SignedSeq(g.cod.base, f.cod.strands + g.cod.strands)
    out: dict[tuple, Fraction] = {}
    for kf, cf in f.terms.items():
        for kg, cg in g.terms.items():
            key = tuple(s.moved(s.pos + shift) for s in kg) + kf
            out[key] = out.get(key, Fraction(0)) + cf * cg
    return Morphism2(f.calc, dom, cod, out, check=False)


GEN_DOMAIN = {
    "cupFE": lambda i: (),
    "cupEF": lambda i: (),
    "capFE": lambda i: ((i, DOWN), (i, UP)),
    "capEF": lambda i: ((i, UP), (i, DOWN)),
}


def generator(calc: Calculus, kind: str, labels: Sequence[str], base, orient: Sequence[int] = (),
              extra: tuple = ()) -> Morphism2:
    """A single generator over ``base``.

    kinds: dot (orient gives the strand direction), cross (orient gives both
    directions), cupFE, cupEF, capFE, capEF, sym (a Sym monomial e_extra).
    """
    base = calc.weight(base)
    labels = tuple(calc.datum.check_node(l) for l in labels)
    if kind == "dot":
        dom = ((labels[0], orient[0] if orient else UP),)
    elif kind == "cross":
        o = tuple(orient) if orient else (UP, UP)
        dom = ((labels[0], o[0]), (labels[1], o[1]))
    elif kind in GEN_DOMAIN:
        dom = GEN_DOMAIN[kind](labels[0])
    elif kind == "sym":
        dom = ()
    else:
        raise DiagramError(f"unknown generator {kind!r}")
    s = Slice(kind, 0, labels, tuple(extra))
    dseq = SignedSeq(base, dom)
    cod = SignedSeq(base, apply_slice(dom, s))
    return Morphism2(calc, dseq, cod, {(s,): 1})


def from_slices(calc: Calculus, dom: SignedSeq, slices: Sequence[Slice], coef=1) -> Morphism2:
    top = walk(dom.strands, slices)[-1]
    return Morphism2(calc, dom, SignedSeq(dom.base, top), {tuple(slices): coef})
