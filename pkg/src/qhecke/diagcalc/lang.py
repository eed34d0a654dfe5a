"""Text language for 2-morphisms.

    @2: cupEF(i) * id(Ei) ; id(Ei) * capFE(i)
    @1=0,2=1: cr(1,2) ; dot(2) * id(E1) :: [E1,E2] -> [E2,E1]

``*`` places diagrams side by side (left factor drawn on the left), ``;``
stacks them bottom to top, ``+``/``-`` add, and a rational coefficient is
written ``3/2 * (...)``.  The header gives the weight of the rightmost
region; a single-node datum accepts a bare integer.  Generators:
``dot(i)`` and ``xdot(i)`` (up and down dots), ``cr(i,j)`` and ``crd(i,j)``
(upward and downward crossings), ``cr(+i,-j)`` and ``cr(-i,+j)`` (sideways
crossings), ``cupFE(i)``, ``cupEF(i)``, ``capFE(i)``, ``capEF(i)``,
``id(Ei,Fj)`` and ``sym(i:2,1)`` (the Sym monomial e_2 e_1 of label i in the
region where it is drawn).  The optional ``:: dom -> cod`` suffix states and
checks the boundary; it is required for the literal ``0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..cartan import scalar_str
from .core import (
    DOWN,
    UP,
    BoundaryError,
    Calculus,
    DiagramError,
    Morphism2,
    SignedSeq,
    compose_horizontal,
    compose_vertical,
    generator,
    identity,
    seq_text,
    strand_token,
    walk,
    zero,
)


class ParseError(DiagramError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<<here>>{text[pos:]}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(::|->)|([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([()\[\],;*+\-/:@=]))")


@dataclass
class _Tok:
    kind: str  # "name", "int", "sym", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            out.append(_Tok("end", "", pos))
            return out
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1) or m.group(4):
            out.append(_Tok("sym", m.group(m.lastindex), start))
        elif m.group(2):
            out.append(_Tok("name", m.group(2), start))
        else:
            out.append(_Tok("int", m.group(3), start))
        pos = m.end()


class _Parser:
    def __init__(self, calc: Calculus, text: str):
        self.calc, self.text = calc, text
        self.toks = _tokenize(text)
        self.k = 0

    # -- token helpers

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def error(self, msg: str):
        raise ParseError(msg, self.tok.pos, self.text)

    def at(self, text: str) -> bool:
        return self.tok.kind == "sym" and self.tok.text == text

    def eat(self, text: str) -> None:
        if not self.at(text):
            self.error(f"expected {text!r}")
        self.k += 1

    def integer(self) -> int:
        sign = 1
        if self.at("-"):
            self.k += 1
            sign = -1
        elif self.at("+"):
            self.k += 1
        if self.tok.kind != "int":
            self.error("expected an integer")
        v = int(self.tok.text)
        self.k += 1
        return sign * v

    def label(self) -> str:
        if self.tok.kind not in ("name", "int"):
            self.error("expected a node label")
        lab = self.tok.text
        if lab not in self.calc.datum.nodes:
            self.error(f"unknown node {lab!r}")
        self.k += 1
        return lab

    def strand(self) -> tuple:
        t = self.tok
        if t.kind != "name" or t.text[0] not in "EF" or len(t.text) < 2:
            if t.kind == "name" and t.text in ("E", "F") and self.toks[self.k + 1].kind == "int":
                o = UP if t.text == "E" else DOWN
                self.k += 1
                return (self.label_int(), o)
            self.error("expected a strand such as Ei or F2")
        lab = t.text[1:]
        if lab not in self.calc.datum.nodes:
            self.error(f"unknown node {lab!r}")
        self.k += 1
        return (lab, UP if t.text[0] == "E" else DOWN)

    def label_int(self) -> str:
        lab = self.tok.text
        if lab not in self.calc.datum.nodes:
            self.error(f"unknown node {lab!r}")
        self.k += 1
        return lab

    def strands(self, close: str) -> tuple:
        out = []
        if not self.at(close):
            out.append(self.strand())
            while self.at(","):
                self.k += 1
                out.append(self.strand())
        return tuple(out)

    # -- grammar

    def parse(self) -> Morphism2:
        base = self.header()
        if self.tok.kind == "int" and self.tok.text == "0" and self._zero_ahead():
            self.k += 1
            body = None
        else:
            body = self.sum()
        bound = None
        if self.at("::"):
            self.k += 1
            self.eat("[")
            dom = self.strands("]")
            self.eat("]")
            self.eat("->")
            self.eat("[")
            cod = self.strands("]")
            self.eat("]")
            bound = (SignedSeq(base, dom), SignedSeq(base, cod))
        if self.tok.kind != "end":
            self.error("unexpected trailing input")
        if body is None:
            if bound is None:
                raise ParseError("the literal 0 needs a ':: dom -> cod' boundary", self.tok.pos, self.text)
            return zero(self.calc, *bound)
        m = body(base)
        if bound is not None and (m.dom, m.cod) != bound:
            raise BoundaryError(
                f"stated boundary [{seq_text(bound[0].strands)}] -> [{seq_text(bound[1].strands)}] "
                f"differs from [{seq_text(m.dom.strands)}] -> [{seq_text(m.cod.strands)}]")
        return m

    def _zero_ahead(self) -> bool:
        nxt = self.toks[self.k + 1]
        return nxt.kind == "end" or (nxt.kind == "sym" and nxt.text == "::")

    def header(self):
        if not self.at("@"):
            if len(self.calc.datum.nodes) == 1:
                return self.calc.weight(0)
            self.error("expected a weight header '@...:'")
        self.k += 1
        nxt = self.toks[self.k + 1]
        if self.tok.kind in ("name", "int") and nxt.kind == "sym" and nxt.text == "=":
            vals = {}
            while True:
                lab = self.label()
                self.eat("=")
                vals[lab] = self.integer()
                if not self.at(","):
                    break
                self.k += 1
            self.eat(":")
            return self.calc.weight(vals)
        v = self.integer()
        self.eat(":")
        try:
            return self.calc.weight(v)
        except DiagramError as exc:
            self.error(str(exc))

    def sum(self):
        terms = []
        sign = 1
        if self.at("-"):
            self.k += 1
            sign = -1
        terms.append((sign, self.vert()))
        while self.at("+") or self.at("-"):
            sign = 1 if self.at("+") else -1
            self.k += 1
            terms.append((sign, self.vert()))

        def build(base):
            out = None
            for s, t in terms:
                m = t(base)
                m = m if s == 1 else -m
                out = m if out is None else out + m
            return out

        return build

    def vert(self):
        parts = [self.hprod()]
        while self.at(";"):
            self.k += 1
            parts.append(self.hprod())

        def build(base):
            out = parts[0](base)
            for p in parts[1:]:
                out = compose_vertical(out, p(base))
            return out

        return build

    def hprod(self):
        parts = [self.factor()]
        while self.at("*"):
            self.k += 1
            parts.append(self.factor())

        def build(base):
            out = None
            cur = base
            for p in reversed(parts):
                m = p(cur)
                cur = m.dom.leftmost(self.calc.datum)
                out = m if out is None else compose_horizontal(m, out)
            return out

        return build

    def factor(self):
        if self.tok.kind == "int":
            num = Fraction(int(self.tok.text))
            self.k += 1
            if self.at("/"):
                self.k += 1
                if self.tok.kind != "int" or int(self.tok.text) == 0:
                    self.error("expected a nonzero denominator")
                num /= int(self.tok.text)
                self.k += 1
            self.eat("*")
            inner = self.factor()
            return lambda base: inner(base).scale(num)
        if self.at("("):
            self.k += 1
            inner = self.sum()
            self.eat(")")
            return inner
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind != "name":
            self.error("expected a generator")
        name = t.text
        self.k += 1
        self.eat("(")
        calc = self.calc
        if name == "id":
            st = self.strands(")")
            self.eat(")")
            return lambda base: identity(calc, calc.seq(base, st))
        if name in ("dot", "xdot"):
            lab = self.label()
            self.eat(")")
            o = UP if name == "dot" else DOWN
            return lambda base: generator(calc, "dot", (lab,), base, (o,))
        if name in ("cr", "crd"):
            signs = []
            labs = []
            for n_ in range(2):
                if n_:
                    self.eat(",")
                sgn = None
                if self.at("+") or self.at("-"):
                    sgn = UP if self.at("+") else DOWN
                    self.k += 1
                signs.append(sgn)
                labs.append(self.label())
            self.eat(")")
            if signs == [None, None]:
                o = (UP, UP) if name == "cr" else (DOWN, DOWN)
            elif None in signs or name == "crd":
                self.error("sideways crossings need a sign on both labels, as in cr(+i,-j)")
            else:
                o = tuple(signs)
            return lambda base: generator(calc, "cross", tuple(labs), base, o)
        if name in ("cupFE", "cupEF", "capFE", "capEF"):
            lab = self.label()
            self.eat(")")
            return lambda base: generator(calc, name, (lab,), base)
        if name == "sym":
            lab = self.label()
            self.eat(":")
            parts = []
            if self.tok.kind == "int":
                parts.append(self.integer())
                while self.at(","):
                    self.k += 1
                    parts.append(self.integer())
            self.eat(")")
            if any(p <= 0 for p in parts):
                self.error("partition parts must be positive")
            lam = tuple(sorted(parts, reverse=True))
            if not lam:
                return lambda base: identity(calc, calc.seq(base))
            return lambda base: generator(calc, "sym", (lab,), base, (), lam)
        self.k -= 2
        self.error(f"unknown generator {name!r}")


def parse(calc: Calculus, text: str) -> Morphism2:
    """Parse a diagram expression (see module docstring)."""
    return _Parser(calc, text).parse()


# ---------------------------------------------------------------- printing


def _weight_text(calc: Calculus, w) -> str:
    if len(calc.datum.nodes) == 1:
        return str(w.values[0])
    return ",".join(f"{i}={v}" for i, v in zip(calc.datum.nodes, w.values))


def _gen_text(s, strands) -> str:
    if s.kind == "dot":
        return ("dot" if strands[s.pos][1] == UP else "xdot") + f"({s.labels[0]})"
    if s.kind == "cross":
        a, b = strands[s.pos], strands[s.pos + 1]
        if a[1] == b[1]:
            return ("cr" if a[1] == UP else "crd") + f"({a[0]},{b[0]})"
        sg = {UP: "+", DOWN: "-"}
        return f"cr({sg[a[1]]}{a[0]},{sg[b[1]]}{b[0]})"
    if s.kind == "sym":
        return f"sym({s.labels[0]}:{','.join(map(str, s.extra))})"
    return f"{s.kind}({s.labels[0]})"


def render_term(dom: SignedSeq, key: tuple) -> str:
    if not key:
        return f"id({seq_text(dom.strands)})"
    levels = walk(dom.strands, key)
    layers = []
    for s, st in zip(key, levels):
        left, right = st[: s.pos], st[s.pos + s.win :]
        parts = []
        if left:
            parts.append(f"id({seq_text(left)})")
        parts.append(_gen_text(s, st))
        if right:
            parts.append(f"id({seq_text(right)})")
        layers.append(" * ".join(parts))
    return " ; ".join(layers)


def render(m: Morphism2) -> str:
    """Deterministic text form; ``parse(render(m))`` rebuilds ``m``."""
    head = f"@{_weight_text(m.calc, m.dom.base)}: "
    tail = f" :: [{seq_text(m.dom.strands)}] -> [{seq_text(m.cod.strands)}]"
    if not m.terms:
        return head + "0" + tail
    out = []
    for n, key in enumerate(sorted(m.terms)):
        c = m.terms[key]
        body = render_term(m.dom, key)
        mag = abs(c)
        text = body if mag == 1 else f"{scalar_str(mag)} * ({body})"
        if n == 0:
            out.append(text if c > 0 else "-" + text)
        else:
            out.append((" + " if c > 0 else " - ") + text)
    return head + "".join(out) + tail


__all__ = ["ParseError", "parse", "render", "render_term", "strand_token"]
