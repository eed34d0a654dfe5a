"""Cartan data, weights, the scalar families Q and Q', and generator degrees."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

Scalar = Fraction


def to_scalar(value: object) -> Fraction:
    """Parse an exact rational from an int, Fraction or an "a/b" string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"decimal values are not accepted: {value!r}")
        return Fraction(text)
    raise ValueError(f"not a rational: {value!r}")


def scalar_str(value: Fraction) -> str:
    """Render as "a/b" (or "a" when integral)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class CartanError(ValueError):
    """Invalid Cartan datum or scalar family."""


@dataclass(frozen=True)
class CartanDatum:
    """Index set with a symmetric pairing B[i][j] = (alpha_i, alpha_j)."""

    nodes: tuple[str, ...]
    pairing: tuple[tuple[int, ...], ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        n = len(self.nodes)
        if n == 0 or len(set(self.nodes)) != n:
            raise CartanError("nodes must be non-empty and distinct")
        if len(self.pairing) != n or any(len(row) != n for row in self.pairing):
            raise CartanError("pairing must be a square table matching the nodes")
        for a in range(n):
            b_aa = self.pairing[a][a]
            if b_aa <= 0 or b_aa % 2:
                raise CartanError(f"(alpha_i, alpha_i) must be a positive even integer, got {b_aa}")
            for b in range(n):
                if self.pairing[a][b] != self.pairing[b][a]:
                    raise CartanError("pairing must be symmetric")
                if a != b:
                    if self.pairing[a][b] > 0:
                        raise CartanError("(alpha_i, alpha_j) must be <= 0 for i != j")
                    if (2 * self.pairing[a][b]) % b_aa:
                        raise CartanError("pairing is not a symmetrized Cartan matrix")

    def index(self, i: str) -> int:
        try:
            return self.nodes.index(i)
        except ValueError:
            raise CartanError(f"unknown node {i!r}") from None

    def check_node(self, i: str) -> str:
        self.index(i)
        return i

    def B(self, i: str, j: str) -> int:
        return self.pairing[self.index(i)][self.index(j)]

    def d(self, i: str) -> int:
        return self.B(i, i) // 2

    def cartan_entry(self, i: str, j: str) -> int:
        """<i, alpha_j> = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i)."""
        return 2 * self.B(i, j) // self.B(i, i)

    def dij(self, i: str, j: str) -> int:
        return -self.cartan_entry(i, j)

    def pq_pairs(self, i: str, j: str) -> list[tuple[int, int]]:
        """(p, q) in the s-window 0 <= p < d_ij, 0 <= q < d_ji satisfying the degree constraint."""
        if i == j or self.B(i, j) == 0:
            return []
        out = []
        for p in range(self.dij(i, j)):
            for q in range(self.dij(j, i)):
                if self.B(i, i) * p + self.B(j, j) * q == -2 * self.B(i, j):
                    out.append((p, q))
        return out

    def to_json(self) -> dict:
        return {"name": self.name, "nodes": list(self.nodes), "pairing": [list(r) for r in self.pairing]}


@dataclass(frozen=True)
class Weight:
    """A weight stored through its pairings <i, lambda>."""

    values: tuple[int, ...]

    @staticmethod
    def from_map(datum: CartanDatum, pairing: Mapping[str, int]) -> "Weight":
        return Weight(tuple(int(pairing.get(i, 0)) for i in datum.nodes))

    @staticmethod
    def zero(datum: CartanDatum) -> "Weight":
        return Weight((0,) * len(datum.nodes))

    def pair(self, datum: CartanDatum, i: str) -> int:
        return self.values[datum.index(i)]

    def inner(self, datum: CartanDatum, i: str) -> int:
        """(lambda, alpha_i) = d_i <i, lambda>."""
        return datum.d(i) * self.pair(datum, i)

    def shift(self, datum: CartanDatum, j: str, sign: int = 1) -> "Weight":
        return Weight(tuple(v + sign * datum.cartan_entry(i, j) for v, i in zip(self.values, datum.nodes)))

    def as_map(self, datum: CartanDatum) -> dict[str, int]:
        return dict(zip(datum.nodes, self.values))


def _datum(name: str, nodes: Iterable[str], pairing: Iterable[Iterable[int]]) -> CartanDatum:
    return CartanDatum(tuple(nodes), tuple(tuple(r) for r in pairing), name)


PRESETS: dict[str, CartanDatum] = {
    "A1": _datum("A1", ["i"], [[2]]),
    "A1xA1": _datum("A1xA1", ["i", "j"], [[2, 0], [0, 2]]),
    "A2": _datum("A2", ["1", "2"], [[2, -1], [-1, 2]]),
    "B2": _datum("B2", ["1", "2"], [[4, -2], [-2, 2]]),
    # affine A1: the only preset with a non-empty s-window (s^{11})
    "A1aff": _datum("A1aff", ["0", "1"], [[2, -2], [-2, 2]]),
}


def preset(name: str) -> CartanDatum:
    try:
        return PRESETS[name]
    except KeyError:
        raise CartanError(f"unknown datum preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class ScalarsQ:
    """Scalars r_i, t_ij, s_ij^{pq}; s is stored on both (i,j,p,q) and (j,i,q,p)."""

    datum: CartanDatum
    r: Mapping[str, Fraction]
    t: Mapping[tuple[str, str], Fraction]
    s: Mapping[tuple[str, str, int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        D = self.datum
        r = {i: to_scalar(self.r.get(i, 1)) for i in D.nodes}
        t: dict[tuple[str, str], Fraction] = {}
        for i in D.nodes:
            for j in D.nodes:
                t[(i, j)] = Fraction(0) if i == j else to_scalar(self.t.get((i, j), 1))
        s: dict[tuple[str, str, int, int], Fraction] = {}
        for (i, j, p, q), v in self.s.items():
            v = to_scalar(v)
            D.check_node(i)
            D.check_node(j)
            if v == 0:
                continue
            for key, val in (((i, j, p, q), v), ((j, i, q, p), v)):
                if key in s and s[key] != val:
                    raise CartanError(f"s_{i}{j}^{p}{q} must equal s_{j}{i}^{q}{p}")
                s[key] = val
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "s", s)
        for i in D.nodes:
            if r[i] == 0:
                raise CartanError(f"r_{i} must be nonzero")
            for j in D.nodes:
                if i != j and t[(i, j)] == 0:
                    raise CartanError(f"t_{i}{j} must be nonzero")
                if i != j and D.dij(i, j) == 0 and t[(i, j)] != t[(j, i)]:
                    raise CartanError(f"t_{i}{j} must equal t_{j}{i} when d_ij = 0")

    def window_violations(self) -> list[tuple[str, str, int, int]]:
        """Stored s-values outside the (p, q) window or off the degree constraint."""
        return [k for k in self.s if (k[2], k[3]) not in self.datum.pq_pairs(k[0], k[1])]

    def validate(self) -> "ScalarsQ":
        bad = self.window_violations()
        if bad:
            i, j, p, q = bad[0]
            raise CartanError(f"s_{i}{j}^{{{p}{q}}} violates the (p, q) window / degree constraint")
        return self

    def sval(self, i: str, j: str, p: int, q: int) -> Fraction:
        return self.s.get((i, j, p, q), Fraction(0))

    def s_terms(self, i: str, j: str) -> list[tuple[int, int, Fraction]]:
        return sorted((k[2], k[3], v) for k, v in self.s.items() if k[0] == i and k[1] == j)

    def to_json(self) -> dict:
        D = self.datum
        return {
            "r": {i: scalar_str(self.r[i]) for i in D.nodes},
            "t": {f"{i},{j}": scalar_str(self.t[(i, j)]) for i in D.nodes for j in D.nodes if i != j},
            "s": [
                {"i": i, "j": j, "p": p, "q": q, "val": scalar_str(v)}
                for (i, j, p, q), v in sorted(self.s.items())
            ],
        }

    def fingerprint(self) -> str:
        return json.dumps({"datum": self.datum.to_json(), "scalars": self.to_json()}, sort_keys=True)


def default_scalars(datum: CartanDatum) -> ScalarsQ:
    """Khovanov-Lauda choice: r_i = 1, t_ij = 1, s = 0."""
    return ScalarsQ(datum, {}, {})


def make_scalars(datum: CartanDatum, r=None, t=None, s=None) -> ScalarsQ:
    return ScalarsQ(datum, dict(r or {}), dict(t or {}), dict(s or {}))


def random_scalars(datum: CartanDatum, rng: random.Random) -> ScalarsQ:
    """A random valid Q with small nonzero rational entries."""

    def nonzero() -> Fraction:
        while True:
            v = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            if v:
                return v

    r = {i: nonzero() for i in datum.nodes}
    t: dict[tuple[str, str], Fraction] = {}
    s: dict[tuple[str, str, int, int], Fraction] = {}
    for a, i in enumerate(datum.nodes):
        for j in datum.nodes[a + 1 :]:
            t[(i, j)] = nonzero()
            t[(j, i)] = t[(i, j)] if datum.dij(i, j) == 0 else nonzero()
            for p, q in datum.pq_pairs(i, j):
                s[(i, j, p, q)] = nonzero()
    return ScalarsQ(datum, r, t, s)


def derive_q_prime(q: ScalarsQ) -> ScalarsQ:
    """Q' with r' = -r, t'_ij = t_ji^{-1}, s'_ij^{pq} = t_ij^{-1} t_ji^{-1} s_ij^{pq}."""
    D = q.datum
    r = {i: -q.r[i] for i in D.nodes}
    t = {(i, j): 1 / q.t[(j, i)] for i in D.nodes for j in D.nodes if i != j}
    s = {k: v / (q.t[(k[0], k[1])] * q.t[(k[1], k[0])]) for k, v in q.s.items()}
    return ScalarsQ(D, r, t, s)


# ---------------------------------------------------------------- degrees

GENERATOR_KINDS = ("dot", "cross", "cupFE", "cupEF", "capFE", "capEF")


def degree_of_generator(datum: CartanDatum, kind: str, labels: tuple[str, ...], lam: Weight) -> int:
    """Degree of a generating 2-morphism.

    ``lam`` is the weight of the region to the right of the generator.
    Cups/caps whose legs read F_i E_i (left to right) have degree d_i + (lam, alpha_i);
    those reading E_i F_i have degree d_i - (lam, alpha_i).
    """
    if kind == "dot":
        (i,) = labels
        return datum.B(i, i)
    if kind == "cross":
        i, j = labels
        return -datum.B(i, j)
    if kind in ("cupFE", "capFE"):
        (i,) = labels
        return datum.d(i) + lam.inner(datum, i)
    if kind in ("cupEF", "capEF"):
        (i,) = labels
        return datum.d(i) - lam.inner(datum, i)
    raise CartanError(f"unknown generator kind {kind!r}")


# ---------------------------------------------------------------- config IO


def load_config(data: Mapping) -> tuple[CartanDatum, ScalarsQ]:
    """Build a datum and scalars from the JSON config mapping."""
    if "preset" in data and "nodes" not in data:
        datum = preset(str(data["preset"]))
    else:
        datum = _datum(str(data.get("name", "custom")), [str(n) for n in data["nodes"]], data["pairing"])
    sc = data.get("scalars", {}) or {}
    r = {str(k): to_scalar(v) for k, v in (sc.get("r") or {}).items()}
    t = {}
    for k, v in (sc.get("t") or {}).items():
        i, j = (part.strip() for part in str(k).split(","))
        t[(i, j)] = to_scalar(v)
    s = {}
    for entry in sc.get("s") or []:
        s[(str(entry["i"]), str(entry["j"]), int(entry["p"]), int(entry["q"]))] = to_scalar(entry["val"])
    return datum, ScalarsQ(datum, r, t, s).validate()


def load_config_file(path: str | Path) -> tuple[CartanDatum, ScalarsQ]:
    return load_config(json.loads(Path(path).read_text()))
