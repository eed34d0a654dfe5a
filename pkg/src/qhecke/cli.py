"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 a check was flagged,
64 parse error, 65 math-domain error, 66 fuel exhausted.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import verify as verify_mod
from .cartan import CartanError, default_scalars, derive_q_prime, load_config, preset
from .diagcalc import Calculus, DiagramError, FuelExhausted, ParseError, evaluate_closed, fake_bubble, parse, reduce, render
from .diagcalc.evaluate import EvaluationStuck
from .klr import FuelExhausted as KlrFuelExhausted
from .klr import KlrAlgebra, KlrError, KlrParseError

EXIT_PARSE, EXIT_DOMAIN, EXIT_FUEL = 64, 65, 66


class Failure(Exception):
    def __init__(self, code: int, msg: str, payload: dict | None = None):
        super().__init__(msg)
        self.code = code
        self.payload = payload or {}


def _load_datum(source: str | None, scalars: str | None):
    """Datum from a preset name or a JSON config file; scalars from a file or inline JSON."""
    if source is None:
        data: dict = {"preset": "A1"}
    elif Path(source).is_file():
        data = json.loads(Path(source).read_text())
    else:
        data = {"preset": source}
    if scalars is not None:
        sc = Path(scalars).read_text() if Path(scalars).is_file() else scalars
        data = {**data, "scalars": json.loads(sc)}
    if "nodes" not in data and "scalars" not in data:
        D = preset(str(data["preset"]))
        return D, default_scalars(D)
    return load_config(data)


class Ctx:
    def __init__(self, datum, scalars, fuel, seed, as_json):
        self.datum_spec = datum
        self.scalars_spec = scalars
        self.fuel = fuel
        self.seed = seed
        self.as_json = as_json
        self._dq = None

    @property
    def dq(self):
        if self._dq is None:
            self._dq = _load_datum(self.datum_spec, self.scalars_spec)
        return self._dq

    def emit(self, text: str, payload: dict) -> None:
        click.echo(json.dumps(payload, indent=2, sort_keys=True) if self.as_json else text)


def _run(ctx: Ctx, fn) -> None:
    """Run a command body, mapping errors to the documented exit codes."""
    try:
        fn()
    except Failure as exc:
        _fail(ctx, exc.code, str(exc), exc.payload)
    except (ParseError, KlrParseError, json.JSONDecodeError) as exc:
        _fail(ctx, EXIT_PARSE, str(exc))
    except (FuelExhausted, KlrFuelExhausted) as exc:
        _fail(ctx, EXIT_FUEL, f"fuel exhausted: {exc}")
    except EvaluationStuck as exc:
        _fail(ctx, EXIT_FUEL, str(exc), {"residue": render(exc.residue)})
    except (CartanError, KlrError, DiagramError, ValueError, KeyError) as exc:
        _fail(ctx, EXIT_DOMAIN, str(exc.args[0]) if exc.args else str(exc))


def _fail(ctx: Ctx, code: int, msg: str, payload: dict | None = None) -> None:
    if ctx.as_json:
        click.echo(json.dumps({"error": msg, "exit_code": code, **(payload or {})}, indent=2, sort_keys=True))
    else:
        click.echo(f"error: {msg}", err=True)
        for k, v in (payload or {}).items():
            click.echo(f"{k}: {v}", err=True)
    sys.exit(code)


def _calc(ctx: Ctx) -> Calculus:
    D, q = ctx.dq
    return Calculus(D, q, fuel=ctx.fuel)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--datum", default=None, help="Preset name (A1, A1xA1, A2, B2, A1aff) or JSON config file. Default A1.")
@click.option("--scalars", default=None, help="Scalars Q as inline JSON or a JSON file: {\"r\":{..},\"t\":{\"i,j\":..},\"s\":[..]}.")
@click.option("--fuel", default=200_000, show_default=True, help="Rewrite step budget.")
@click.option("--seed", default=0, show_default=True, help="Seed for randomized checks.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def main(click_ctx, datum, scalars, fuel, seed, as_json):
    """Exact KLR algebras and the diagram calculus of categorified quantum groups."""
    click_ctx.obj = Ctx(datum, scalars, fuel, seed, as_json)


@main.command("reduce")
@click.argument("expr")
@click.pass_obj
def cmd_reduce(ctx: Ctx, expr: str):
    """Normal form of a KLR expression, or of a diagram expression starting with '@'."""

    def body():
        D, q = ctx.dq
        if expr.lstrip().startswith("@"):
            m = parse(_calc(ctx), expr)
            red = reduce(m, partial=True)
            info = red.info or {}
            payload = {"kind": "diagram", "normal_form": render(red),
                       "degree": m.degree() if red.is_zero() else red.degree(),
                       "steps": info.get("steps", 0), "rules": info.get("rules", {})}
            if info.get("exhausted"):
                raise Failure(EXIT_FUEL, "fuel exhausted; partial result shown", payload)
        else:
            A = KlrAlgebra(D, q, fuel=ctx.fuel)
            x = A.parse(expr)
            degs = sorted(x.degrees())
            payload = {"kind": "klr", "normal_form": A.render(x), "degree": degs[0] if len(degs) == 1 else degs,
                       "steps": A.steps}
        rules = "".join(f" {k}={v}" for k, v in payload.get("rules", {}).items())
        text = f"{payload['normal_form']}\ndegree: {payload['degree']}\nsteps: {payload['steps']}{rules}"
        ctx.emit(text, payload)

    _run(ctx, body)


@main.command("eval")
@click.argument("expr")
@click.pass_obj
def cmd_eval(ctx: Ctx, expr: str):
    """Value of a closed diagram in the tensor product of Sym over labels."""

    def body():
        val = evaluate_closed(parse(_calc(ctx), expr))
        payload = {"value": val.render(),
                   "terms": [{"key": [[lab, list(lam)] for lab, lam in k], "coef": str(c)} for k, c in val.terms]}
        ctx.emit(val.render(), payload)

    _run(ctx, body)


@main.command("fake")
@click.option("--n", "n", type=int, required=True, help="Region weight <i, lambda>.")
@click.option("--r", "r", type=int, required=True, help="Half the bubble degree.")
@click.option("--label", default=None, help="Node label (default: first node).")
@click.pass_obj
def cmd_fake(ctx: Ctx, n: int, r: int, label: str | None):
    """Degree-2r fake bubble in weight n as a Sym value."""

    def body():
        D, _ = ctx.dq
        lab = D.check_node(label) if label is not None else D.nodes[0]
        b = fake_bubble(n, lab, r)
        real = b.real_bubbles()
        orient = "cw" if n >= 0 else "ccw"
        payload = {"n": n, "r": r, "label": lab, "value": b.render(),
                   "real_bubbles": None if real is None else
                   [{"coef": str(c), "orientation": orient, "dots": list(d)} for c, d in real]}
        ctx.emit(b.render(), payload)

    _run(ctx, body)


def _labels(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


@main.command("klr-dim")
@click.option("--labels", required=True, help="Bottom label sequence, e.g. i,j.")
@click.option("--out", "out_labels", default=None, help="Top label sequence (default: same as bottom).")
@click.option("--cutoff", type=int, default=6, show_default=True, help="Largest degree counted.")
@click.pass_obj
def cmd_klr_dim(ctx: Ctx, labels: str, out_labels: str | None, cutoff: int):
    """Graded dimension of e(out) R e(labels) up to a degree cutoff."""

    def body():
        D, q = ctx.dq
        A = KlrAlgebra(D, q, fuel=ctx.fuel)
        lin = _labels(labels)
        lout = _labels(out_labels) if out_labels else lin
        g = A.graded_dim(lin, lout, cutoff)
        ctx.emit(g.render(), {"labels": list(lin), "out": list(lout), "cutoff": cutoff,
                              "coeffs": {str(d): c for d, c in g.coeffs}, "text": g.render()})

    _run(ctx, body)


def _lambda(text: str, nodes) -> dict[str, int]:
    text = text.strip()
    if "=" not in text:
        if len(nodes) != 1:
            raise ValueError("give Lambda as i=N,j=M for a datum with several nodes")
        return {nodes[0]: int(text)}
    out = {}
    for part in text.split(","):
        k, v = part.split("=")
        out[k.strip()] = int(v)
    return out


@main.command("cyclotomic")
@click.option("--L", "lam", required=True, help="Dominant weight: N for one node, or i=N,j=M.")
@click.option("--labels", required=True, help="Label sequence, e.g. i,i.")
@click.option("--cutoff", type=int, default=None, help="Largest degree counted (default 2*m*max Lambda).")
@click.pass_obj
def cmd_cyclotomic(ctx: Ctx, lam: str, labels: str, cutoff: int | None):
    """Graded dimension of e(labels) R^Lambda e(labels), with a stability flag."""

    def body():
        D, q = ctx.dq
        A = KlrAlgebra(D, q, fuel=ctx.fuel)
        L = _lambda(lam, D.nodes)
        for k in L:
            D.check_node(k)
        g = A.cyclotomic_dim(L, _labels(labels), cutoff)
        ctx.emit(g.render(), {"lambda": L, "labels": list(_labels(labels)), "cutoff": g.cutoff,
                              "coeffs": {str(d): c for d, c in g.coeffs}, "stable": g.stable, "text": g.render()})

    _run(ctx, body)


@main.command("verify")
@click.argument("suite")
@click.option("--timing", is_flag=True, help="Include wall times in the report (breaks byte-identical reruns).")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Also write the JSON report here.")
@click.pass_obj
def cmd_verify(ctx: Ctx, suite: str, timing: bool, output: str | None):
    """Run a check suite: klr-relations, grassmannian, a1a5, coeff-lemma, mixed, bubble-slide, cyclotomic."""
    if suite not in verify_mod.SUITES:
        _fail(ctx, EXIT_DOMAIN, f"unknown suite {suite!r}; choose from {', '.join(verify_mod.SUITES)}")
    state = {}

    def body():
        explicit = ctx.datum_spec is not None or ctx.scalars_spec is not None
        D, q = ctx.dq if explicit else (None, None)
        results = verify_mod.run_suite(suite, D, q, seed=ctx.seed)
        rep = verify_mod.report(suite, results, D, ctx.seed, timing)
        text = verify_mod.report_json(rep)
        if output:
            Path(output).write_text(text + "\n")
        if ctx.as_json:
            click.echo(text)
        else:
            for r in results:
                click.echo(f"{r.status.upper():8s} {r.id}")
                if r.witness and r.status != "pass":
                    click.echo(f"         {json.dumps(r.witness, sort_keys=True)}")
            s = verify_mod.summary(results)
            click.echo(f"{suite}: {s['pass']} pass, {s['fail']} fail, {s['flagged']} flagged")
        state["code"] = verify_mod.exit_code(results)

    _run(ctx, body)
    sys.exit(state.get("code", 0))


@main.command("q-prime")
@click.pass_obj
def cmd_q_prime(ctx: Ctx):
    """The companion scalars Q' governing downward strands."""

    def body():
        _, q = ctx.dq
        qp = derive_q_prime(q).to_json()
        lines = [f"r_{i} = {v}" for i, v in qp["r"].items()]
        lines += [f"t_{k.replace(',', '')} = {v}" for k, v in qp["t"].items()]
        lines += [f"s_{e['i']}{e['j']}^({e['p']},{e['q']}) = {e['val']}" for e in qp["s"]]
        ctx.emit("\n".join(lines), qp)

    _run(ctx, body)


if __name__ == "__main__":
    main()
