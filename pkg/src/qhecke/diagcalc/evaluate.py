"""Evaluation of closed diagrams into tensor products of Sym (one factor per label)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..cartan import scalar_str
from ..symfunc import SymElement, render as sym_render
from .core import DiagramError, Morphism2
from .rewrite import reduce


class NotClosedError(DiagramError):
    pass


class EvaluationStuck(DiagramError):
    """Some term kept strands after reduction (or fuel ran out)."""

    def __init__(self, msg: str, residue: Morphism2):
        super().__init__(msg)
        self.residue = residue


@dataclass(frozen=True)
class MultiSym:
    """Element of the tensor product of Sym over labels.

    Keys are tuples of (label, partition) pairs sorted by label; the empty key is 1.
    """

    terms: tuple  # sorted ((key, coef), ...)

    @staticmethod
    def from_dict(d: dict) -> "MultiSym":
        return MultiSym(tuple(sorted((k, v) for k, v in d.items() if v)))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def labels(self) -> set:
        return {lab for key, _ in self.terms for lab, _ in key}

    def as_sym(self, label: str | None = None) -> SymElement:
        """The value as a single SymElement (requires at most one label to occur)."""
        labs = self.labels()
        if len(labs) > 1 or (label is not None and labs - {label}):
            raise DiagramError(f"value involves labels {sorted(labs)}; not a single Sym factor")
        out: dict = {}
        for key, c in self.terms:
            lam = key[0][1] if key else ()
            out[lam] = out.get(lam, Fraction(0)) + c
        return SymElement(out)

    def render(self) -> str:
        if not self.terms:
            return "0"
        labs = self.labels()
        if len(labs) <= 1:
            return sym_render(self.as_sym())
        parts = []
        for key, c in self.terms:
            mono = "*".join(f"e[{','.join(map(str, lam))}]_{lab}" for lab, lam in key) or "1"
            parts.append(f"{scalar_str(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.render()


def evaluate_closed(m: Morphism2, rng=None) -> MultiSym:
    """Reduce an endomorphism of the empty sequence and read off its Sym value."""
    if m.dom.strands or m.cod.strands:
        raise NotClosedError("evaluate_closed needs empty domain and codomain")
    red = reduce(m, partial=True, rng=rng)
    if red.info.get("exhausted"):
        raise EvaluationStuck("fuel exhausted during evaluation", red)
    out: dict = {}
    for key, c in red.terms.items():
        if any(s.kind != "sym" for s in key):
            raise EvaluationStuck("a term kept strands after reduction", red)
        mono: dict = {}
        for s in key:
            lab = s.labels[0]
            mono[lab] = tuple(sorted(mono.get(lab, ()) + s.extra, reverse=True))
        k = tuple(sorted(mono.items()))
        out[k] = out.get(k, Fraction(0)) + c
    return MultiSym.from_dict(out)
