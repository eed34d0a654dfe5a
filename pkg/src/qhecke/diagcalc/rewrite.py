"""Directed rewriting of slice-stack diagrams.

Rules, tried in this order on each term:

    down       expand a downward crossing into its rotated upward crossing
    sideways   (optional) expand every sideways crossing
    slide      move a region decoration one strand to the right (bubble slide)
    bubble     close a dotted circle into a Sym decoration
    zigzag     straighten a cup followed by a cap on one leg
    bigon      two crossings on the same pair of strands: the upward case is
               handed to the KLR normal form, sideways ones use the extended
               sl2 relations or the mixed-label scalars
    curl       replace a curl by dots and a bubble decoration
    expand     expand a sideways crossing sitting on both legs of a cup or cap
    dot        move a dot one step forward along its (open) strand

Terms that no rule changes are put in a canonical slice order so that equal
diagrams compare equal.  Region decorations in the rightmost region are
collected at the top of the stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..klr import KlrAlgebra
from ..symfunc import SymElement
from .bubbles import bubble_value, slide_across
from .core import DOWN, UP, Calculus, Morphism2, SignedSeq, Slice, term_degree, walk


class FuelExhausted(RuntimeError):
    """Raised when reduce runs out of steps and ``partial`` was not requested."""


# ---------------------------------------------------------------- strand graph


@dataclass
class Graph:
    levels: list
    ids: list
    touch: dict = field(default_factory=dict)
    start: dict = field(default_factory=dict)
    end: dict = field(default_factory=dict)
    strand: dict = field(default_factory=dict)
    closed: set = field(default_factory=set)


def build_graph(dom: tuple, slices: Sequence[Slice]) -> Graph:
    levels = walk(dom, slices)
    cur = list(range(len(dom)))
    g = Graph(levels, [list(cur)])
    for sid, st in zip(cur, dom):
        g.start[sid] = ("bottom",)
        g.strand[sid] = st
        g.touch[sid] = []
    nxt = len(dom)
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for k, s in enumerate(slices):
        p = s.pos
        if s.kind == "dot":
            g.touch[cur[p]].append(k)
        elif s.kind == "cross":
            a, b = cur[p], cur[p + 1]
            g.touch[a].append(k)
            g.touch[b].append(k)
            cur[p], cur[p + 1] = b, a
        elif s.kind.startswith("cup"):
            a, b = nxt, nxt + 1
            nxt += 2
            top = levels[k + 1]
            for leg, sid in enumerate((a, b)):
                g.start[sid] = ("cup", k, leg)
                g.strand[sid] = top[p + leg]
                g.touch[sid] = []
            union(a, b)
            cur[p:p] = [a, b]
        elif s.kind.startswith("cap"):
            a, b = cur[p], cur[p + 1]
            g.end[a] = ("cap", k, 0)
            g.end[b] = ("cap", k, 1)
            union(a, b)
            del cur[p : p + 2]
        g.ids.append(list(cur))
    for sid in cur:
        g.end[sid] = ("top",)
    open_roots = {find(s) for s in g.strand if g.start[s][0] == "bottom" or g.end[s][0] == "top"}
    g.closed = {s for s in g.strand if find(s) not in open_roots}
    return g


# ---------------------------------------------------------------- interchange


def commute(a: Slice, b: Slice) -> tuple[Slice, Slice] | None:
    """Swap ``a`` (below) and ``b`` (above) if they act on disjoint strands.

    Returns (b', a') with b' applied first, or None.
    """
    if a.kind == "dot" and b.kind == "dot" and a.pos == b.pos:
        return b, a
    if b.pos + b.win <= a.pos:
        return b, a.moved(a.pos + b.wout - b.win)
    if b.pos >= a.pos + a.wout:
        return b.moved(b.pos - a.wout + a.win), a
    return None


def _move(sl: list, src: int, dst: int) -> bool:
    """Move sl[src] to index dst by adjacent interchanges, in place if possible."""
    work = list(sl)
    k = src
    while k > dst:
        res = commute(work[k - 1], work[k])
        if res is None:
            return False
        work[k - 1], work[k] = res
        k -= 1
    while k < dst:
        res = commute(work[k], work[k + 1])
        if res is None:
            return False
        work[k], work[k + 1] = res
        k += 1
    sl[:] = work
    return True


def make_consecutive(slices: Sequence[Slice], idxs: Sequence[int]) -> tuple[list, int] | None:
    """Reorder so the slices at ``idxs`` become consecutive (keeping their order).

    Returns (new list, index of the first pattern slice) or None.
    """
    sl = list(slices)
    mark = [False] * len(sl)
    for i in idxs:
        mark[i] = True
    while True:
        pat = [k for k, m in enumerate(mark) if m]
        lo, hi = pat[0], pat[-1]
        inter = [k for k in range(lo, hi) if not mark[k]]
        if not inter:
            return sl, lo
        progress = False
        for k in inter:
            if _move(sl, k, lo):
                mark.insert(lo, mark.pop(k))
                progress = True
                break
        if not progress:
            for k in reversed(inter):
                if _move(sl, k, hi):
                    mark.insert(hi, mark.pop(k))
                    progress = True
                    break
        if not progress:
            return None


# ---------------------------------------------------------------- canonical form


_KIND_RANK = {"sym": 0, "cupFE": 1, "cupEF": 2, "dot": 3, "cross": 4, "capFE": 5, "capEF": 6}


def _key(s: Slice) -> tuple:
    return (s.pos, _KIND_RANK[s.kind], s.labels, s.extra)


def canonical_order(slices: Sequence[Slice]) -> tuple:
    rest = list(slices)
    out: list[Slice] = []
    while rest:
        fronts: list[tuple[int, Slice]] = []
        for idx in range(len(rest)):
            cand = rest[idx]
            ok = True
            for j in range(idx - 1, -1, -1):
                res = commute(rest[j], cand)
                if res is None:
                    ok = False
                    break
                cand = res[0]
            if ok:
                fronts.append((idx, cand))
        best_key = min(_key(c) for _, c in fronts)
        tied = [(i, c) for i, c in fronts if _key(c) == best_key]
        choice = tied[0][0]
        if len(tied) > 1:
            # identical generators in one cut: take the leftmost in the plane
            for i, c in tied:
                left_of_all = True
                for i2, c2 in tied:
                    if i2 == i:
                        continue
                    trial = list(rest)
                    _move(trial, i, 0)
                    j2 = i2 + 1 if i2 < i else i2
                    _move(trial, j2, 1)
                    if trial[1].pos < c.pos + c.wout:
                        left_of_all = False
                        break
                if left_of_all:
                    choice = i
                    break
        _move(rest, choice, 0)
        out.append(rest.pop(0))
    return tuple(out)


def collect_right_syms(dom: tuple, slices: Sequence[Slice]) -> tuple:
    """Float decorations of the rightmost region to the top, merged per label."""
    levels = walk(dom, slices)
    keep: list[Slice] = []
    gathered: dict[str, tuple] = {}
    for k, s in enumerate(slices):
        if s.kind == "sym":
            if not s.extra:
                continue
            if s.pos == len(levels[k]):
                lab = s.labels[0]
                gathered[lab] = tuple(sorted(gathered.get(lab, ()) + s.extra, reverse=True))
                continue
        keep.append(s)
    width = len(levels[-1])
    tail = [Slice("sym", width, (lab,), gathered[lab]) for lab in sorted(gathered)]
    return tuple(keep) + tuple(tail)


# ---------------------------------------------------------------- the engine


def _dots(pos: int, label: str, n: int) -> list[Slice]:
    return [Slice("dot", pos, (label,))] * n


def _sym(pos: int, label: str, lam: tuple) -> list[Slice]:
    return [Slice("sym", pos, (label,), lam)] if lam else []


def _sym_terms(value: SymElement) -> list[tuple[Fraction, tuple]]:
    return sorted((c, lam) for lam, c in value.terms.items())


class Engine:
    def __init__(self, calc: Calculus, rng=None):
        self.calc = calc
        self.rng = rng
        self.datum = calc.datum
        self.klr = KlrAlgebra(calc.datum, calc.q)
        self.log: dict[str, int] = {}
        self.steps = 0

    # -- helpers

    def n_at(self, dom: SignedSeq, g: Graph, level: int, region: int, label: str) -> int:
        ws = SignedSeq(dom.base, g.levels[level]).region_weights(self.datum)
        return ws[region].pair(self.datum, label)

    def slide(self, parts, i, j, high, n_src, n_dst):
        key = ("slide", parts, i, j, high, n_src, n_dst)
        cache = self.calc._cache
        if key not in cache:
            cache[key] = slide_across(self.datum, self.calc.q, parts, i, j, high, n_src, n_dst)
        return cache[key]

    # -- rules: each returns a list of (coef, slices) or None

    def rule_down(self, dom, sl, g):
        for k, s in enumerate(sl):
            if s.kind != "cross":
                continue
            a, b = g.levels[k][s.pos], g.levels[k][s.pos + 1]
            if a[1] == DOWN and b[1] == DOWN:
                i, j = a[0], b[0]
                p = s.pos
                rot = [
                    Slice("cupFE", p, (j,)),
                    Slice("cupFE", p + 1, (i,)),
                    Slice("cross", p + 2, (i, j)),
                    Slice("capEF", p + 3, (i,)),
                    Slice("capEF", p + 2, (j,)),
                ]
                c = Fraction(1) if i == j else 1 / self.calc.q.t[(i, j)]
                return [(c, tuple(sl[:k]) + tuple(rot) + tuple(sl[k + 1 :]))]
        return None

    def sideways_expansion(self, s: Slice, a, b) -> list[Slice]:
        p = s.pos
        if a[1] == UP:  # [E_j, F_i] -> [F_i, E_j]
            j, i = a[0], b[0]
            return [Slice("cupFE", p, (i,)), Slice("cross", p + 1, (i, j)), Slice("capEF", p + 2, (i,))]
        j, i = a[0], b[0]  # [F_j, E_i] -> [E_i, F_j]
        return [Slice("cupEF", p + 2, (j,)), Slice("cross", p + 1, (i, j)), Slice("capFE", p, (j,))]

    def rule_sideways_all(self, dom, sl, g):
        for k, s in enumerate(sl):
            if s.kind == "cross":
                a, b = g.levels[k][s.pos], g.levels[k][s.pos + 1]
                if a[1] != b[1]:
                    return [(Fraction(1), tuple(sl[:k]) + tuple(self.sideways_expansion(s, a, b)) + tuple(sl[k + 1 :]))]
        return None

    def rule_slide(self, dom, sl, g):
        for k, s in enumerate(sl):
            if s.kind != "sym" or s.pos >= len(g.levels[k]):
                continue
            i = s.labels[0]
            j, o = g.levels[k][s.pos]
            n_src = self.n_at(dom, g, k, s.pos, i)
            n_dst = self.n_at(dom, g, k, s.pos + 1, i)
            poly = self.slide(s.extra, i, j, o == UP, n_src, n_dst)
            out = []
            for xp, val in sorted(poly.items()):
                for c, lam in _sym_terms(val):
                    new = _dots(s.pos, j, xp) + _sym(s.pos + 1, i, lam)
                    out.append((c, tuple(sl[:k]) + tuple(new) + tuple(sl[k + 1 :])))
            return out
        return None

    def rule_bubble(self, dom, sl, g):
        for k, s in enumerate(sl):
            if not s.kind.startswith("cup"):
                continue
            a, b = g.ids[k + 1][s.pos], g.ids[k + 1][s.pos + 1]
            ea, eb = g.end[a], g.end[b]
            if not (ea[0] == "cap" and eb[0] == "cap" and ea[1] == eb[1] and ea[2] == 0):
                continue
            drop = g.touch[a] + g.touch[b]
            if any(sl[t].kind != "dot" for t in drop):
                continue
            k2 = ea[1]
            ndots = len(drop)
            dropset = set(drop)
            new = [x for t, x in enumerate(sl) if t not in dropset]
            k2 -= sum(1 for t in drop if t < k2)
            res = make_consecutive(new, [k, k2])
            if res is None:
                continue
            new, at = res
            i = s.labels[0]
            lv = walk(dom.strands, new[:at])[-1]
            n = SignedSeq(dom.base, lv).region_weights(self.datum)[new[at].pos].pair(self.datum, i)
            orient = "cw" if s.kind == "cupEF" else "ccw"
            val = bubble_value(orient, ndots, n, self.calc.c_minus1)
            pos = new[at].pos
            return [(c, tuple(new[:at]) + tuple(_sym(pos, i, lam)) + tuple(new[at + 2 :]))
                    for c, lam in _sym_terms(val)]
        return None

    def rule_zigzag(self, dom, sl, g):
        for k, s in enumerate(sl):
            if not s.kind.startswith("cup"):
                continue
            a, b = g.ids[k + 1][s.pos], g.ids[k + 1][s.pos + 1]
            for middle, survivor, leg in ((b, a, 0), (a, b, 1)):
                e = g.end[middle]
                if not (e[0] == "cap" and e[2] == leg):
                    continue
                if g.end[survivor] == e:
                    continue  # a bubble
                touches = g.touch[middle]
                if any(sl[t].kind != "dot" for t in touches):
                    continue
                k2 = e[1]
                lab = g.strand[survivor][0]
                spos = s.pos if survivor == a else s.pos + 1
                dropset = set(touches)
                new = list(sl[: k + 1]) + _dots(spos, lab, len(touches))
                new += [x for t, x in enumerate(sl) if t > k and t not in dropset]
                res = make_consecutive(new, [k, k2])
                if res is None:
                    continue
                new, at = res
                return [(Fraction(1), tuple(new[:at]) + tuple(new[at + 2 :]))]
        return None

    def _klr_block(self, dom, sl, k1, k2, dots, g):
        res = make_consecutive(sl, [k1] + dots + [k2])
        if res is None:
            return None
        new, at = res
        block = new[at : at + len(dots) + 2]
        p = block[0].pos
        lv = walk(dom.strands, new[:at])[-1]
        labels = (lv[p][0], lv[p + 1][0])
        gens = [("t", 1)] + [("x", d.pos - p + 1) for d in block[1:-1]] + [("t", 1)]
        nf = self.klr.normalize(labels, gens)
        out = []
        for bt, c in sorted(nf.items()):
            cur = list(labels)
            rep: list[Slice] = []
            for t in bt.word:
                rep.append(Slice("cross", p + t - 1, (cur[t - 1], cur[t])))
                cur[t - 1], cur[t] = cur[t], cur[t - 1]
            for s_, e in enumerate(bt.dots):
                rep += _dots(p + s_, cur[s_], e)
            out.append((c, tuple(new[:at]) + tuple(rep) + tuple(new[at + len(block) :])))
        return out

    def _sideways_pair(self, dom, sl, k1, k2):
        res = make_consecutive(sl, [k1, k2])
        if res is None:
            return None
        new, at = res
        lv = walk(dom.strands, new[:at])[-1]
        p = new[at].pos
        (l0, o0), (l1, o1) = lv[p], lv[p + 1]
        ws = SignedSeq(dom.base, lv).region_weights(self.datum)
        head, tail = tuple(new[:at]), tuple(new[at + 2 :])
        if l0 != l1:
            n = ws[p + 2].pair(self.datum, l0)
            return [(self.calc.mixed_scalar(l0, l1, o0, n), head + tail)]
        i = l0
        n = ws[p + 2].pair(self.datum, i)
        inv = 1 / self.calc.beta_n(i, n)
        out = [(inv, head + tail)]
        if o0 == UP and n > 0:
            for f1 in range(n):
                for f2 in range(n - f1):
                    f3 = n - 1 - f1 - f2
                    val = bubble_value("ccw", -n - 1 + f2, n)
                    for c, lam in _sym_terms(val):
                        mid = (_dots(p, i, f3) + [Slice("capEF", p, (i,))] + _sym(p, i, lam)
                               + [Slice("cupEF", p, (i,))] + _dots(p, i, f1))
                        out.append((-inv * c, head + tuple(mid) + tail))
        if o0 == DOWN and n < 0:
            for g1 in range(-n):
                for g2 in range(-n - g1):
                    g3 = -n - 1 - g1 - g2
                    val = bubble_value("cw", n - 1 + g2, n)
                    for c, lam in _sym_terms(val):
                        mid = (_dots(p + 1, i, g3) + [Slice("capFE", p, (i,))] + _sym(p, i, lam)
                               + [Slice("cupFE", p, (i,))] + _dots(p + 1, i, g1))
                        out.append((-inv * c, head + tuple(mid) + tail))
        return out

    def rule_bigon(self, dom, sl, g):
        for k1, s in enumerate(sl):
            if s.kind != "cross":
                continue
            p = s.pos
            u, v = g.ids[k1 + 1][p], g.ids[k1 + 1][p + 1]
            nu = [t for t in g.touch[u] if t > k1 and sl[t].kind != "dot"]
            nv = [t for t in g.touch[v] if t > k1 and sl[t].kind != "dot"]
            if not nu or not nv or nu[0] != nv[0]:
                continue
            k2 = nu[0]
            if g.ids[k2][sl[k2].pos] != u:
                continue
            dots = sorted(t for t in g.touch[u] + g.touch[v] if k1 < t < k2)
            ou, ov = g.strand[u][1], g.strand[v][1]
            if ou == UP and ov == UP:
                out = self._klr_block(dom, sl, k1, k2, dots, g)
            elif ou != ov and not dots:
                out = self._sideways_pair(dom, sl, k1, k2)
            else:
                continue
            if out is not None:
                return out
        return None

    def rule_curl(self, dom, sl, g):
        out = self._curl(dom, sl, g, False)
        return out if out is not None else self._curl(dom, sl, g, True)

    def _curl(self, dom, sl, g, move_dots):
        """Evaluate a dot-free curl, or with ``move_dots`` push a dot off a curl's loop."""
        r = self.calc.r
        for k, s in enumerate(sl):
            if s.kind != "cross":
                continue
            p = s.pos
            x, y = g.ids[k][p], g.ids[k][p + 1]
            if g.strand[x][1] != UP or g.strand[y][1] != UP or s.labels[0] != s.labels[1]:
                continue
            i = s.labels[0]
            # right curl: the right input comes from a cupEF, the crossing's right output goes into its capEF
            st = g.start[y]
            if st[0] == "cup" and st[2] == 0 and sl[st[1]].kind == "cupEF":
                k1 = st[1]
                f = g.ids[k1 + 1][sl[k1].pos + 1]
                e = g.end[x]
                if move_dots and e[0] == "cap" and e[2] == 0 and g.end[f] == ("cap", e[1], 1):
                    out = self._loop_dot(dom, sl, g, k, y, x, f, e)
                    if out is not None:
                        return out
                if (e[0] == "cap" and e[2] == 0 and g.touch[y][0] == k and g.touch[x][-1] == k
                        and g.end[f] == ("cap", e[1], 1) and not g.touch[f]):
                    res = make_consecutive(sl, [k1, k, e[1]])
                    if res is not None:
                        new, at = res
                        q = new[at + 1].pos
                        lv = walk(dom.strands, new[:at])[-1]
                        n = SignedSeq(dom.base, lv).region_weights(self.datum)[q + 1].pair(self.datum, i)
                        out = []
                        head, tail = tuple(new[:at]), tuple(new[at + 3 :])
                        for f1 in range(-n + 1):
                            val = bubble_value("cw", n - 1 + (-n - f1), n)
                            for c, lam in _sym_terms(val):
                                coef = -r(i) * c if n != 0 else -self.calc.curl_plus0(i) * c
                                out.append((coef, head + tuple(_dots(q, i, f1) + _sym(q + 1, i, lam)) + tail))
                        return out
            # left curl: the left input comes from a cupFE, the crossing's left output goes into its capFE
            st = g.start[x]
            if st[0] == "cup" and st[2] == 1 and sl[st[1]].kind == "cupFE":
                k1 = st[1]
                f = g.ids[k1 + 1][sl[k1].pos]
                e = g.end[y]
                if move_dots and e[0] == "cap" and e[2] == 1 and g.end[f] == ("cap", e[1], 0):
                    out = self._loop_dot(dom, sl, g, k, x, y, f, e)
                    if out is not None:
                        return out
                if (e[0] == "cap" and e[2] == 1 and g.touch[x][0] == k and g.touch[y][-1] == k
                        and g.end[f] == ("cap", e[1], 0) and not g.touch[f]):
                    res = make_consecutive(sl, [k1, k, e[1]])
                    if res is not None:
                        new, at = res
                        c0 = new[at].pos
                        lv = walk(dom.strands, new[:at])[-1]
                        n = SignedSeq(dom.base, lv).region_weights(self.datum)[c0].pair(self.datum, i)
                        out = []
                        head, tail = tuple(new[:at]), tuple(new[at + 3 :])
                        for g1 in range(n + 1):
                            val = bubble_value("ccw", -n - 1 + (n - g1), n)
                            for c, lam in _sym_terms(val):
                                coef = r(i) * c if n != 0 else self.calc.curl_minus0(i) * c
                                out.append((coef, head + tuple(_sym(c0, i, lam) + _dots(c0, i, g1)) + tail))
                        return out
        return None

    def _loop_dot(self, dom, sl, g, k, inp, outp, f, cap):
        """Move one dot off the loop of a curl at crossing k, following the loop's direction.

        ``inp`` enters the crossing from the cup, ``outp`` leaves it into the cap and
        ``f`` is the downward arc joining them.  Returns None when the loop has no dots
        or carries anything other than dots.
        """
        below = [t for t in g.touch[inp] if t < k]
        above = [t for t in g.touch[outp] if t > k]
        on_f = list(g.touch[f])
        if k not in g.touch[inp] or k not in g.touch[outp]:
            return None
        if any(sl[t].kind != "dot" for t in below + above + on_f):
            return None
        if above:
            return self._dot_over_cap(dom, sl, above[-1], cap, outp, g)
        if on_f:
            return self._dot_under_cup(dom, sl, on_f[0], g.start[f], f, g)
        if below:
            return self._dot_up_through(dom, sl, below[-1], k, inp, g)
        return None

    def rule_expand(self, dom, sl, g):
        for k, s in enumerate(sl):
            if s.kind != "cross":
                continue
            p = s.pos
            a, b = g.ids[k][p], g.ids[k][p + 1]
            if g.strand[a][1] == g.strand[b][1]:
                continue
            sa, sb = g.start[a], g.start[b]
            from_cup = (sa[0] == "cup" and sb[0] == "cup" and sa[1] == sb[1]
                        and g.touch[a][0] == k and g.touch[b][0] == k)
            u, v = g.ids[k + 1][p], g.ids[k + 1][p + 1]
            eu, ev = g.end[u], g.end[v]
            to_cap = (eu[0] == "cap" and ev[0] == "cap" and eu[1] == ev[1]
                      and g.touch[u][-1] == k and g.touch[v][-1] == k)
            if from_cup or to_cap:
                exp = self.sideways_expansion(s, g.levels[k][p], g.levels[k][p + 1])
                return [(Fraction(1), tuple(sl[:k]) + tuple(exp) + tuple(sl[k + 1 :]))]
        return None

    def rule_dot(self, dom, sl, g):
        for k, s in enumerate(sl):
            if s.kind != "dot":
                continue
            sid = g.ids[k][s.pos]
            if sid in g.closed:
                continue
            lab, o = g.strand[sid]
            touches = g.touch[sid]
            if o == UP:
                later = [t for t in touches if t > k]
                if later and sl[later[0]].kind == "dot":
                    continue  # move the frontmost dot of a run first
                if later:
                    out = self._dot_up_through(dom, sl, k, later[0], sid, g)
                elif g.end[sid][0] == "cap":
                    out = self._dot_over_cap(dom, sl, k, g.end[sid], sid, g)
                else:
                    continue
            else:
                earlier = [t for t in touches if t < k]
                if earlier and sl[earlier[-1]].kind == "dot":
                    continue
                if earlier:
                    out = self._dot_down_through(dom, sl, k, earlier[-1], sid, g)
                elif g.start[sid][0] == "cup":
                    out = self._dot_under_cup(dom, sl, k, g.start[sid], sid, g)
                else:
                    continue
            if out is not None:
                return out
        return None

    def _dot_over_cap(self, dom, sl, k, end, sid, g):
        k3, leg = end[1], end[2]
        cap = sl[k3]
        other_pos = cap.pos + (1 - leg)
        new = list(sl[:k]) + list(sl[k + 1 : k3]) + [Slice("dot", other_pos, cap.labels)] + list(sl[k3:])
        return [(Fraction(1), tuple(new))]

    def _dot_under_cup(self, dom, sl, k, start, sid, g):
        k1, leg = start[1], start[2]
        cup = sl[k1]
        other_pos = cup.pos + (1 - leg)
        new = list(sl[: k1 + 1]) + [Slice("dot", other_pos, cup.labels)] + list(sl[k1 + 1 : k]) + list(sl[k + 1 :])
        return [(Fraction(1), tuple(new))]

    def _dot_up_through(self, dom, sl, k, kc, sid, g):
        """Dot on an upward strand directly below crossing kc."""
        cr = sl[kc]
        p = cr.pos
        a, b = g.levels[kc][p], g.levels[kc][p + 1]
        at_left = g.ids[kc][p] == sid
        lab = a[0] if at_left else b[0]
        head = tuple(sl[:k]) + tuple(sl[k + 1 : kc])
        tail = tuple(sl[kc + 1 :])
        r = self.calc.r(lab)
        if a[1] == UP and b[1] == UP:
            main = (Fraction(1), head + (cr, Slice("dot", p + 1 if at_left else p, (lab,))) + tail)
            if a[0] != b[0]:
                return [main]
            return [main, (r if at_left else -r, head + tail)]
        if a[1] == UP:  # sideways [E, F] -> [F, E]; E leaves at p + 1
            main = (Fraction(1), head + (cr, Slice("dot", p + 1, (lab,))) + tail)
            if a[0] != b[0]:
                return [main]
            saddle = (Slice("capEF", p, (lab,)), Slice("cupFE", p, (lab,)))
            return [main, (-r, head + saddle + tail)]
        main = (Fraction(1), head + (cr, Slice("dot", p, (lab,))) + tail)  # [F, E] -> [E, F]
        if a[0] != b[0]:
            return [main]
        saddle = (Slice("capFE", p, (lab,)), Slice("cupEF", p, (lab,)))
        return [main, (r, head + saddle + tail)]

    def _dot_down_through(self, dom, sl, k, kc, sid, g):
        """Dot on a downward strand directly above crossing kc."""
        cr = sl[kc]
        p = cr.pos
        a, b = g.levels[kc][p], g.levels[kc][p + 1]
        head = tuple(sl[:kc])
        tail = tuple(sl[kc + 1 : k]) + tuple(sl[k + 1 :])
        if a[1] == UP and b[1] == UP or a[1] == DOWN and b[1] == DOWN:
            return None
        if a[1] == UP:  # [E, F] -> [F, E]; F enters at p + 1
            lab = b[0]
            main = (Fraction(1), head + (Slice("dot", p + 1, (lab,)), cr) + tail)
            if a[0] != b[0]:
                return [main]
            saddle = (Slice("capEF", p, (lab,)), Slice("cupFE", p, (lab,)))
            return [main, (self.calc.r(lab), head + saddle + tail)]
        lab = a[0]  # [F, E] -> [E, F]; F enters at p
        main = (Fraction(1), head + (Slice("dot", p, (lab,)), cr) + tail)
        if a[0] != b[0]:
            return [main]
        saddle = (Slice("capFE", p, (lab,)), Slice("cupEF", p, (lab,)))
        return [main, (-self.calc.r(lab), head + saddle + tail)]

    RULES = ("down", "sideways_all", "slide", "bubble", "zigzag", "bigon", "curl", "expand", "dot")

    def step(self, dom: SignedSeq, sl: tuple, log: bool = True):
        g = build_graph(dom.strands, sl)
        names = list(self.RULES)
        if self.rng is not None:
            self.rng.shuffle(names)
        for name in names:
            if name == "sideways_all" and not self.calc.expand_sideways:
                continue
            out = getattr(self, "rule_" + name)(dom, sl, g)
            if out is not None:
                if log:
                    self.log[name] = self.log.get(name, 0) + 1
                return out
        return None

    def _probe(self, dom: SignedSeq, sl: tuple):
        """Whether some rule applies, without counting or logging it."""
        return self.step(dom, sl, log=False)

    def finalize(self, dom: SignedSeq, sl: tuple) -> list[tuple[Fraction, tuple]]:
        sl = collect_right_syms(dom.strands, sl)
        body = [s for s in sl if s.kind != "sym"]
        syms = tuple(s for s in sl if s.kind == "sym")
        if all(o == UP for _, o in dom.strands) and all(s.kind in ("dot", "cross") for s in body) and body:
            labels = tuple(l for l, _ in dom.strands)
            gens = [("t", s.pos + 1) if s.kind == "cross" else ("x", s.pos + 1) for s in body]
            out = []
            for bt, c in sorted(self.klr.normalize(labels, gens).items()):
                cur = list(labels)
                rep: list[Slice] = []
                for t in bt.word:
                    rep.append(Slice("cross", t - 1, (cur[t - 1], cur[t])))
                    cur[t - 1], cur[t] = cur[t], cur[t - 1]
                for pos, e in enumerate(bt.dots):
                    rep += _dots(pos, cur[pos], e)
                out.append((c, canonical_order(rep) + syms))
            return out
        return [(Fraction(1), canonical_order(body) + syms)]

    def reduce(self, m: Morphism2, partial: bool = False) -> Morphism2:
        dom = m.dom
        pending: dict[tuple, Fraction] = {}
        for key, c in m.terms.items():
            key = collect_right_syms(dom.strands, key)
            pending[key] = pending.get(key, Fraction(0)) + c
        done: dict[tuple, Fraction] = {}
        exhausted = False
        while pending:
            key, coef = pending.popitem()
            if not coef:
                continue
            out = self.step(dom, key) if self.steps < self.calc.fuel else self._probe(dom, key)
            if out is None:
                for c, fk in self.finalize(dom, key):
                    done[fk] = done.get(fk, Fraction(0)) + coef * c
                continue
            if self.steps >= self.calc.fuel:
                exhausted = True
                done[key] = done.get(key, Fraction(0)) + coef
                continue
            self.steps += 1
            if self.calc.check_degrees:
                d0 = term_degree(self.datum, dom, key)
                for _, nk in out:
                    d1 = term_degree(self.datum, dom, nk)
                    if d1 != d0:
                        raise AssertionError(f"rule changed degree {d0} -> {d1}: {key} -> {nk}")
            for c, nk in out:
                nk = collect_right_syms(dom.strands, nk)
                pending[nk] = pending.get(nk, Fraction(0)) + coef * c
                if not pending[nk]:
                    del pending[nk]
        if exhausted and not partial:
            raise FuelExhausted(f"diagram rewriting exceeded fuel {self.calc.fuel}")
        out = Morphism2(self.calc, m.dom, m.cod, done, check=False)
        out.info = {"steps": self.steps, "rules": dict(sorted(self.log.items())), "exhausted": exhausted}
        return out


def reduce(m: Morphism2, partial: bool = False, rng=None) -> Morphism2:
    """Normal form of ``m`` under the directed rules (see module docstring).

    With ``rng`` (a random.Random) the rules are tried in a shuffled order at every step.
    """
    return Engine(m.calc, rng).reduce(m, partial=partial)
