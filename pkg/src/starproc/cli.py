"""Command-line front end.

Exit codes: 0 affirmative, 1 negative verdict, 2 usage or input error,
3 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bisim, chart, elevation, extract, gen, llee, mil, transform
from .errors import CrystallizationFailed, ProofError, StarprocError
from .expr import DEFAULT_VERTEX_CAP, chart_of, parse, terminates, to_str

OK, NEGATIVE, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Output:
    def __init__(self, args):
        self.json = args.json
        self.dot = args.dot

    def emit(self, doc: dict, text: str):
        if self.json:
            print(json.dumps(doc, indent=2, ensure_ascii=False))
        else:
            print(text)

    def write_dot(self, c, marking=None):
        if self.dot:
            with open(self.dot, "w", encoding="utf-8") as fh:
                fh.write(chart.to_dot(c, marking))


# ----------------------------------------------------------------- inputs

def _load_chart(path):
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    return chart.load_chart(path)


def _load_witness(path):
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON in {path}: {exc}") from None
    return llee.witness_from_dict(doc)


def _operand(text, cap):
    """A chart file, or else a star expression interpreted as a chart."""
    if text.endswith(".json") or os.path.exists(text):
        return _load_chart(text), None
    e = parse(text)
    return chart_of(e, cap), e


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def _vertex_list(text):
    return [v for v in (text or "").split(",") if v]


def _vertex_map(text):
    out = {}
    for item in _vertex_list(text):
        if ":" not in item:
            raise UsageError(f"map entries look like src:dst, got {item!r}")
        src, dst = item.split(":", 1)
        out[src] = dst
    return out


# --------------------------------------------------------------- commands

def cmd_parse(args, out):
    e = parse(args.expr, _vertex_list(args.alphabet) or None)
    out.emit({"expr": to_str(e), "size": e.size, "terminates": terminates(e)}, to_str(e))
    return OK


def cmd_chart(args, out):
    c = chart_of(parse(args.expr), args.max_vertices)
    doc = chart.chart_to_dict(c)
    if args.out:
        _write_json(args.out, doc)
    out.write_dot(c)
    out.emit(doc, json.dumps(doc, indent=2, ensure_ascii=False) if not args.out else
             f"{len(c.vertices)} vertices, {len(c.transitions)} transitions -> {args.out}")
    return OK


def cmd_bisim(args, out):
    c, _ = _operand(args.left, args.max_vertices)
    d, _ = _operand(args.right, args.max_vertices)
    same = bisim.onebisimilar(c, d)
    out.emit({"bisimilar": same}, "bisimilar" if same else "not bisimilar")
    return OK if same else NEGATIVE


def cmd_collapse(args, out):
    c = _load_chart(args.chart)
    target, rep = bisim.collapse(c)
    if not bisim.check_transfer_function(rep, c, target):
        raise CrystallizationFailed("class map is not a transfer function")
    doc = chart.chart_to_dict(target)
    if args.out:
        _write_json(args.out, doc)
    out.write_dot(target)
    out.emit({"chart": doc, "classes": rep},
             f"{len(c.vertices)} -> {len(target.vertices)} vertices")
    return OK


def cmd_lee(args, out):
    c = _load_chart(args.chart)
    w = llee.llee_witness(c, budget=args.budget)
    lee = w is not None or llee.lee_holds(c, budget=args.budget)
    doc = {"lee": lee, "llee": w is not None}
    if w is not None:
        report = llee.validate_witness(w)
        if not report.valid:
            raise CrystallizationFailed(f"search produced an invalid witness: {report.reason}")
        doc.update(guarded=report.guarded, one_transition_limited=report.one_transition_limited)
        if args.witness_out:
            _write_json(args.witness_out, llee.witness_to_dict(w))
        out.write_dot(c, w.marking)
    text = "LLEE holds" if w is not None else ("LEE holds, no layered witness found" if lee else "fails LEE")
    if w is None:
        cycle = llee.lee_refutation(c)
        doc["unbreakable_cycle"] = [list(t) for t in cycle] if cycle else None
        if cycle:
            text += "; unbreakable cycle " + " ".join(f"{s}-{a}->{t}" for s, a, t in cycle)
    out.emit(doc, text)
    return OK if w is not None else NEGATIVE


def cmd_witness_validate(args, out):
    w = _load_witness(args.witness)
    report = llee.validate_witness(w)
    doc = {"valid": report.valid, "guarded": report.guarded,
           "one_transition_limited": report.one_transition_limited, "reason": report.reason}
    out.write_dot(w.base, w.marking)
    text = "valid" if report.valid else f"invalid: {report.reason}"
    if report.valid:
        text += f" (guarded={report.guarded}, 1-limited={report.one_transition_limited})"
    out.emit(doc, text)
    return OK if report.valid else NEGATIVE


def cmd_extract(args, out):
    if args.witness:
        w = _load_witness(args.witness)
    elif args.chart:
        c = _load_chart(args.chart)
        w = llee.llee_witness(c)
        if w is None:
            out.emit({"error": "no LLEE witness"}, "no LLEE witness found")
            return NEGATIVE
    else:
        raise UsageError("give --witness FILE or a chart file")
    sol = extract.extract_solution(w)
    if not extract.check_semantic_solution(sol, w.base, args.max_vertices):
        raise CrystallizationFailed("extracted values fail the solution check")
    out.emit(sol.to_dict(), to_str(sol.principal) if sol.start else json.dumps(sol.to_dict()["values"]))
    return OK


def cmd_verify_solution(args, out):
    c = _load_chart(args.chart)
    with open(args.solution, encoding="utf-8") as fh:
        doc = json.load(fh)
    values = {v: parse(e) for v, e in doc.get("values", doc).items()}
    sol = extract.SolutionFn(values, c.start)
    ok = extract.check_semantic_solution(sol, c, args.max_vertices)
    result = {"solution": ok}
    if ok and args.complete:
        result["complete"] = extract.check_complete_solution(sol, c, args.max_vertices)
        ok = result["complete"]
    if not result["solution"]:
        result["failing"] = extract.failing_vertices(sol, c, args.max_vertices)
    out.emit(result, "solution" + (" (complete)" if result.get("complete") else "") if ok
             else f"not accepted: {result}")
    return OK if ok else NEGATIVE


def cmd_connect_through(args, out):
    c = _load_chart(args.chart)
    result = transform.connect_through(c, args.w1, args.w2)
    w = llee.llee_witness(result)
    doc = {"chart": chart.chart_to_dict(result), "llee": w is not None,
           "one_collapsed": bisim.is_one_collapsed(result)}
    if args.out:
        _write_json(args.out, doc["chart"])
    out.write_dot(result)
    out.emit(doc, f"{len(result.vertices)} vertices, LLEE {'kept' if w else 'lost'}")
    return OK


def cmd_crystallize(args, out):
    c = _load_chart(args.chart)
    w = _load_witness(args.input_witness) if args.input_witness else None
    res = transform.crystallize(c, w)
    checks = transform.crystallized_checks(res.chart, res.witness)
    if not all(checks.values()) or not bisim.onebisimilar(c, res.chart):
        raise CrystallizationFailed(f"output fails its own checks: {checks}")
    if args.out:
        _write_json(args.out, chart.chart_to_dict(res.chart))
    if args.witness:
        _write_json(args.witness, llee.witness_to_dict(res.witness))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            for step in res.trace:
                fh.write(json.dumps(step) + "\n")
    out.write_dot(res.chart, res.witness.marking)
    doc = {"vertices": len(res.chart.vertices), "steps": len(res.trace), "checks": checks,
           "used_collapse": res.used_collapse}
    out.emit(doc, f"{len(c.vertices)} -> {len(res.chart.vertices)} vertices in {len(res.trace)} step(s)")
    return OK


def cmd_twin_crystal(args, out):
    w = _load_witness(args.witness)
    c = w.base
    carriers = [_vertex_list(args.carrier)] if args.carrier else [
        comp for comp in chart.sccs(c) if not bisim.is_one_collapsed(c, comp)
    ]
    reports = [transform.is_twin_crystal(c, w, comp) for comp in carriers]
    ok = bool(reports) and all(r.positive for r in reports)
    out.emit({"reports": [r.to_dict() for r in reports]},
             "\n".join(f"{sorted(r.carrier)}: {'twin-crystal' if r.positive else 'no'}" for r in reports)
             or "no redundant scc")
    return OK if ok else NEGATIVE


def cmd_near_collapsed(args, out):
    c = _load_chart(args.chart)
    ok = transform.is_near_collapsed(c)
    out.emit({"near_collapsed": ok}, "near-collapsed" if ok else "not near-collapsed")
    return OK if ok else NEGATIVE


def cmd_elevate(args, out):
    c = _load_chart(args.chart)
    phi = _vertex_map(args.map)
    if phi:
        elev, lifted = elevation.lift_local_transfer(phi, c)
        report = elevation.verify_elevation(phi, c)
        doc = {"chart": chart.chart_to_dict(elev.lifted), "lifted_map": lifted,
               "projection_is_transfer": report.projection_is_transfer,
               "lift_is_transfer": report.lift_is_transfer, "square_commutes": report.square_commutes}
        ok = report.ok
        text = f"{len(elev.lifted.vertices)} vertices; checks: {report}"
    else:
        elev = elevation.elevate(c, _vertex_list(args.wset))
        doc = {"chart": chart.chart_to_dict(elev.lifted)}
        ok = True
        text = f"{len(elev.lifted.vertices)} vertices"
    if args.out:
        _write_json(args.out, doc["chart"])
    out.write_dot(elev.lifted)
    out.emit(doc, text)
    return OK if ok else NEGATIVE


def cmd_check_proof(args, out):
    p = mil.load_proof(args.proof)
    try:
        eq = mil.check_proof(p, args.system)
    except ProofError as exc:
        out.emit({"accepted": False, "error": type(exc).__name__, "message": str(exc)}, f"rejected: {exc}")
        return NEGATIVE
    sound = bisim.exprs_bisimilar(eq.lhs, eq.rhs, args.max_vertices)
    if not sound:
        raise CrystallizationFailed(f"accepted equation {eq} is not sound")
    out.emit({"accepted": True, "equation": str(eq)}, str(eq))
    return OK


def cmd_gen(args, out):
    p = gen.GenParams(seed=args.seed, max_size=args.max_size, alphabet_size=args.alphabet_size,
                      empty_step_density=args.empty_step_density, loop_depth=args.loop_depth)
    if args.kind == "expr":
        e = gen.gen_expr(p)
        print(json.dumps({"expr": to_str(e), "seed": args.seed}, ensure_ascii=False))
        return OK
    c, w = gen.gen_llee_onechart(p)
    doc = llee.witness_to_dict(w)
    out.write_dot(c, w.marking)
    print(json.dumps(doc, indent=2, ensure_ascii=False))
    return OK


def cmd_expressible(args, out):
    c = _load_chart(args.chart)
    result = extract.expressible(c, args.max_vertices)
    text = result.verdict + (f": {to_str(result.expr)}" if result.expr is not None else f" ({result.diagnostic})")
    out.emit(result.to_dict(), text)
    return OK if result.verdict == extract.EXPRESSIBLE else NEGATIVE


def cmd_suite(args, out):
    from . import fixtures, suite

    numbers = [int(x) for x in _vertex_list(args.only)] or None
    results = suite.run_suite(numbers)
    lines = ["check\tpassed\tseconds\tlimit\ttitle"]
    lines += [f"{r.number}\t{r.passed}\t{r.seconds:.3f}\t{r.limit}\t{r.title}" for r in results]
    if args.report_dir:
        from .report import write_report

        drawings = [(name, fixtures.load(name), None) for name in ("fig1", "fig4", "fig5", "g1")]
        for name in ("fig1_witness1", "fig5_witness"):
            w = fixtures.load_witness(name)
            drawings.append((name, w.base, w.marking))
        write_report(results, args.report_dir, drawings)
    out.emit({"results": [r.__dict__ for r in results]}, "\n".join(lines))
    return OK if all(r.passed and r.in_time for r in results) else NEGATIVE


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="JSON output")
    common.add_argument("--dot", metavar="FILE", default=argparse.SUPPRESS, help="also write Graphviz source")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-vertices", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="starproc", parents=[common],
                                     description="Process semantics of star expressions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("parse", cmd_parse, "parse and normalize an expression")
    p.add_argument("expr")
    p.add_argument("--alphabet", help="comma-separated allowed letters")
    p = add("chart", cmd_chart, "chart interpretation of an expression")
    p.add_argument("expr")
    p.add_argument("--out")
    p = add("bisim", cmd_bisim, "1-bisimilarity of two expressions or chart files")
    p.add_argument("left")
    p.add_argument("right")
    p = add("collapse", cmd_collapse, "bisimulation collapse of a chart")
    p.add_argument("chart")
    p.add_argument("--out")
    p = add("lee", cmd_lee, "loop elimination analysis")
    p.add_argument("chart")
    p.add_argument("--witness-out")
    p.add_argument("--budget", type=int, default=llee.DEFAULT_BUDGET)
    p = add("witness-validate", cmd_witness_validate, "replay a recorded witness")
    p.add_argument("witness")
    p = add("extract", cmd_extract, "extract a star-expression solution")
    p.add_argument("chart", nargs="?")
    p.add_argument("--witness")
    p = add("verify-solution", cmd_verify_solution, "check a solution file against a chart")
    p.add_argument("chart")
    p.add_argument("solution")
    p.add_argument("--complete", action="store_true")
    p = add("connect-through", cmd_connect_through, "redirect all transitions from w1 to w2")
    p.add_argument("chart")
    p.add_argument("w1")
    p.add_argument("w2")
    p.add_argument("--out")
    p = add("crystallize", cmd_crystallize, "rewrite into crystallized form")
    p.add_argument("chart")
    p.add_argument("--input-witness")
    p.add_argument("--out")
    p.add_argument("--witness", help="where to write the output witness")
    p.add_argument("--trace", help="JSON-lines file of accepted rewrite steps")
    p = add("twin-crystal", cmd_twin_crystal, "twin-crystal analysis of redundant sccs")
    p.add_argument("witness")
    p.add_argument("--carrier", help="comma-separated vertices (default: each redundant scc)")
    p = add("near-collapsed", cmd_near_collapsed, "near-collapsedness check")
    p.add_argument("chart")
    p = add("elevate", cmd_elevate, "elevation and lifted local transfer function")
    p.add_argument("chart")
    p.add_argument("--map", help="local transfer map as src:dst,...")
    p.add_argument("--wset", help="vertex set to elevate when no map is given")
    p.add_argument("--out")
    p = add("check-proof", cmd_check_proof, "check a Mil proof term")
    p.add_argument("proof")
    p.add_argument("--system", choices=[mil.MIL, mil.MIL_MINUS], default=mil.MIL)
    p = add("gen", cmd_gen, "generate an expression or an LLEE-1-chart with witness")
    p.add_argument("--kind", choices=["expr", "chart"], default="chart")
    p.add_argument("--max-size", type=int, default=20)
    p.add_argument("--alphabet-size", type=int, default=2)
    p.add_argument("--empty-step-density", type=float, default=0.25)
    p.add_argument("--loop-depth", type=int, default=2)
    p = add("expressible", cmd_expressible, "is the chart denoted by some expression?")
    p.add_argument("chart")
    p = add("suite", cmd_suite, "run the built-in checks")
    p.add_argument("--only", help="comma-separated check numbers")
    p.add_argument("--report-dir", help="write results.tsv and figures here")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    for name, default in (("json", False), ("dot", None), ("seed", 0), ("max_vertices", DEFAULT_VERTEX_CAP)):
        if not hasattr(args, name):
            setattr(args, name, default)
    out = Output(args)
    try:
        return args.func(args, out)
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except CrystallizationFailed as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return INTERNAL
    except StarprocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort guard for the exit code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


def main():
    sys.exit(run())
