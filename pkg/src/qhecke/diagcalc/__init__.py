"""String-diagram 2-morphisms of the categorified quantum group: slice stacks,
the rewrite engine, bubbles, composite macros and closed evaluation."""

from .bubbles import BubbleExpr, bubble_value, fake_bubble, slide_across
from .core import (
    DOWN,
    UP,
    BoundaryError,
    Calculus,
    DiagramError,
    Morphism2,
    SignedSeq,
    Slice,
    compose_horizontal,
    compose_vertical,
    from_slices,
    generator,
    identity,
    zero,
)
from .evaluate import EvaluationStuck, MultiSym, NotClosedError, evaluate_closed
from .lang import ParseError, parse, render
from .macros import (
    ZetaMatrix,
    down_crossing,
    down_crossing_left,
    down_crossing_right,
    down_dot_left,
    down_dot_right,
    sideways,
    sideways_expanded,
    zeta,
    zeta_inverse,
)
from .rewrite import FuelExhausted, reduce

__all__ = [
    "DOWN", "UP", "BoundaryError", "BubbleExpr", "Calculus", "DiagramError", "EvaluationStuck",
    "FuelExhausted", "Morphism2", "MultiSym", "NotClosedError", "ParseError", "SignedSeq", "Slice",
    "ZetaMatrix", "bubble_value", "compose_horizontal", "compose_vertical", "down_crossing",
    "down_crossing_left", "down_crossing_right", "down_dot_left", "down_dot_right",
    "evaluate_closed", "fake_bubble", "from_slices", "generator", "identity", "parse", "reduce",
    "render", "sideways", "sideways_expanded", "slide_across", "zero", "zeta", "zeta_inverse",
]
