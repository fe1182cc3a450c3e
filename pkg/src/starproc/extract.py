"""Solutions of 1-charts: extraction from witnesses, semantic checks, certificates.

Equality of star expressions is decided semantically throughout: two
expressions count as equal when their chart interpretations are bisimilar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bisim import bisimilarity_partition, collapse, disjoint_union, expr_partition
from .chart import OneChart
from .errors import InvalidWitness, NotASolution, PartialMapGap, UnguardedWitness
from .expr import EMPTY_STEP, ONE, ZERO, Act, Prod, Star, StarExpr, chart_of, sum_of, to_str
from .llee import Witness, llee_witness, validate_witness


@dataclass(frozen=True)
class SolutionFn:
    values: dict
    start: str | None = None

    @property
    def principal(self) -> StarExpr | None:
        return None if self.start is None else self.values[self.start]

    def __getitem__(self, v):
        return self.values[v]

    def to_dict(self) -> dict:
        doc = {"values": {v: to_str(e) for v, e in sorted(self.values.items())}}
        if self.start is not None:
            doc["start"] = self.start
            doc["principal"] = to_str(self.principal)
        return doc


def label_expr(label: str) -> StarExpr:
    return ONE if label == EMPTY_STEP else Act(label)


def extract_solution(w: Witness) -> SolutionFn:
    """Star-expression solution read off a valid guarded witness."""
    report = validate_witness(w)
    if not report.valid:
        raise InvalidWitness(report.reason)
    if not report.guarded:
        raise UnguardedWitness("the witness marks a 1-transition as a loop entry")
    c = w.base
    entries = {v: [t for t in c.out[v] if w.marking[t] > 0] for v in c.vertices}
    body = {v: [t for t in c.out[v] if w.marking[t] == 0] for v in c.vertices}
    loop_memo: dict = {}
    path_memo: dict = {}
    sol_memo: dict = {}

    def loop_star(u):
        e = loop_memo.get(u)
        if e is None:
            terms = [Prod(Act(a), ONE if x == u else path(u, x)) for _, a, x in entries[u]]
            e = Star(sum_of(terms))
            loop_memo[u] = e
        return e

    def path(v, u):
        # from u inside v's loop body back to v
        key = (v, u)
        e = path_memo.get(key)
        if e is None:
            terms = [Prod(label_expr(a), ONE if x == v else path(v, x)) for _, a, x in body[u]]
            e = Prod(loop_star(u), sum_of(terms))
            path_memo[key] = e
        return e

    def solve(v):
        e = sol_memo.get(v)
        if e is None:
            terms = [ONE] if v in c.terminating else []
            terms += [Prod(label_expr(a), solve(x)) for _, a, x in body[v]]
            e = Prod(loop_star(v), sum_of(terms))
            sol_memo[v] = e
        return e

    values = {v: solve(v) for v in c.order}
    return SolutionFn(values, c.start)


def _check_total(s: SolutionFn, c: OneChart):
    missing = [v for v in c.order if v not in s.values]
    if missing:
        raise PartialMapGap(f"no solution value for vertex {missing[0]!r}")


def solution_equations(s: SolutionFn, c: OneChart) -> dict:
    """Right-hand side of the solution condition at every vertex."""
    _check_total(s, c)
    rhs = {}
    for v in c.order:
        terms = [ONE] if v in c.terminating else []
        terms += [Prod(label_expr(a), s.values[x]) for _, a, x in c.out[v]]
        rhs[v] = sum_of(terms) if terms else ZERO
    return rhs


def check_semantic_solution(s: SolutionFn, c: OneChart, max_vertices: int | None = None) -> bool:
    rhs = solution_equations(s, c)
    classes = expr_partition(list(s.values[v] for v in c.order) + list(rhs.values()), max_vertices)
    return all(classes[s.values[v]] == classes[rhs[v]] for v in c.order)


def failing_vertices(s: SolutionFn, c: OneChart, max_vertices: int | None = None) -> list:
    rhs = solution_equations(s, c)
    classes = expr_partition(list(s.values[v] for v in c.order) + list(rhs.values()), max_vertices)
    return [v for v in c.order if classes[s.values[v]] != classes[rhs[v]]]


def check_complete_solution(s: SolutionFn, c: OneChart, max_vertices: int | None = None) -> bool:
    """Whether 1-bisimilar vertices receive semantically equal values."""
    if not check_semantic_solution(s, c, max_vertices):
        raise NotASolution("not a solution of the chart")
    part = bisimilarity_partition(c)
    classes = expr_partition([s.values[v] for v in c.order], max_vertices)
    return all(classes[s.values[u]] == classes[s.values[v]] for u, v in part.pairs())


def collapse_solution(s: SolutionFn, c: OneChart):
    """Induced solution on the bisimulation collapse; returns (solution, collapsed chart)."""
    if not check_complete_solution(s, c):
        raise NotASolution("the solution is not complete, so it does not induce one on the collapse")
    target, rep = collapse(c)
    values = {}
    for v in c.order:
        values.setdefault(rep[v], s.values[v])
    return SolutionFn(values, target.start), target


# ------------------------------------------------------------ certificates

NOT_BISIMILAR = "NotBisimilar"
CERTIFICATE = "Certificate"
NO_CERTIFICATE = "BisimilarNoCertificate"


@dataclass
class Certificate:
    status: str
    e0: StarExpr | None = None
    checks: list = field(default_factory=list)
    strategy: str = ""

    def to_dict(self) -> dict:
        doc = {"status": self.status, "checks": self.checks}
        if self.e0 is not None:
            doc["e0"] = to_str(self.e0)
        if self.strategy:
            doc["strategy"] = self.strategy
        return doc


def _guarded_solution(c: OneChart):
    w = llee_witness(c)
    if w is None:
        return None
    report = validate_witness(w)
    if not (report.valid and report.guarded):
        return None
    return extract_solution(w)


def equiv_certificate(e1: StarExpr, e2: StarExpr, max_vertices: int | None = None) -> Certificate:
    """Decide bisimilarity of e1, e2 and, if they are, try to name a common form e0."""
    kw = {} if max_vertices is None else {"max_vertices": max_vertices}
    c1 = chart_of(e1, **kw)
    c2 = chart_of(e2, **kw)
    joint = disjoint_union(c1, c2)
    part = bisimilarity_partition(joint)
    if not part.same("L:" + c1.start, "R:" + c2.start):
        return Certificate(NOT_BISIMILAR, checks=["chart_of(e1) ~ chart_of(e2): false"])

    candidates = []
    c0, _ = collapse(joint, part)
    candidates.append(("joint-collapse", lambda: c0.prune()))
    for tag, c in (("e1", c1), ("e2", c2)):
        candidates.append((f"crystallize-{tag}", lambda c=c: _crystallized(c)))
    for strategy, build in candidates:
        chart = build()
        if chart is None:
            continue
        sol = _guarded_solution(chart)
        if sol is None:
            continue
        e0 = sol.principal
        classes = expr_partition([e0, e1, e2], max_vertices)
        verdicts = {
            "chart_of(e0) ~ chart_of(e1)": classes[e0] == classes[e1],
            "chart_of(e0) ~ chart_of(e2)": classes[e0] == classes[e2],
            "chart_of(e1) ~ chart_of(e2)": classes[e1] == classes[e2],
        }
        checks = [f"{name}: {str(ok).lower()}" for name, ok in verdicts.items()]
        if all(verdicts.values()):
            return Certificate(CERTIFICATE, e0, checks, strategy)
    return Certificate(NO_CERTIFICATE, checks=["chart_of(e1) ~ chart_of(e2): true"])


def _crystallized(c: OneChart):
    from .transform import crystallize

    if llee_witness(c) is None:
        return None
    try:
        return crystallize(c).chart
    except Exception:  # noqa: BLE001 - any failure just rules this strategy out
        return None


EXPRESSIBLE = "EXPRESSIBLE"
NOT_EXPRESSIBLE_1FREE = "NOT_EXPRESSIBLE_1FREE"
UNKNOWN = "UNKNOWN"


@dataclass
class Expressibility:
    verdict: str
    expr: StarExpr | None = None
    diagnostic: str = ""

    def to_dict(self) -> dict:
        doc = {"verdict": self.verdict, "diagnostic": self.diagnostic}
        if self.expr is not None:
            doc["expr"] = to_str(self.expr)
        return doc


def expressible(c: OneChart, max_vertices: int | None = None) -> Expressibility:
    """Three-valued answer to whether some star expression denotes ``c`` up to 1-bisimilarity.

    A positive answer always comes with an expression whose chart
    interpretation has been checked to be 1-bisimilar to ``c``.
    """
    from .bisim import onebisimilar

    kw = {} if max_vertices is None else {"max_vertices": max_vertices}
    target, _ = collapse(c)
    target = target.prune()
    for source, chart in (("collapse", target), ("input", c)):
        sol = _guarded_solution(chart)
        if sol is None:
            continue
        e = sol.principal
        if onebisimilar(chart_of(e, **kw), c):
            return Expressibility(EXPRESSIBLE, e, f"extracted from a witness of the {source}")
    if not c.one_transitions:
        return Expressibility(NOT_EXPRESSIBLE_1FREE, diagnostic="collapsed chart fails LEE")
    return Expressibility(UNKNOWN, diagnostic="no LLEE witness for the collapse or the input")
