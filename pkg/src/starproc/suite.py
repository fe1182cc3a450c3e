"""Self-check suite: the reference fixtures plus the generated property runs.

Each check returns ``(passed, detail)``; ``run_suite`` times them.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from . import fixtures, proofs
from .bisim import (
    bisimilarity_partition,
    check_grounded_slice,
    check_transfer_function,
    collapse,
    exprs_bisimilar,
    onebisimilar,
    is_one_collapsed,
)
from .chart import sccs
from .elevation import lift_local_transfer, verify_elevation
from .errors import GuardViolation, ProofError
from .expr import parse
from .extract import (
    CERTIFICATE,
    NOT_BISIMILAR,
    NOT_EXPRESSIBLE_1FREE,
    check_complete_solution,
    check_semantic_solution,
    collapse_solution,
    equiv_certificate,
    expressible,
    extract_solution,
)
from .gen import GenParams, axiom_rewrite, gen_expr, gen_llee_onechart
from .llee import lee_holds, llee_witness, validate_witness
from .mil import AXIOMS, check_proof, instantiate_axiom
from .transform import (
    connect_through,
    counterpart_function,
    crystallize,
    is_near_collapsed,
    is_twin_crystal,
)

LIMITS = {1: 5, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1, 7: 60, 8: 120, 9: 60, 10: 5}

TITLES = {
    1: "axiom soundness",
    2: "FIG1 loop elimination and markings",
    3: "non-expressible and trivial appendix charts",
    4: "FIG4 loses LLEE under connect-through",
    5: "FIG5 counterpart and twin-crystal",
    6: "elevation of FIG5",
    7: "extraction soundness at scale",
    8: "crystallization suite",
    9: "equivalence certificates",
    10: "Mil proof corpus",
}


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    seconds: float
    limit: float
    detail: str

    @property
    def in_time(self) -> bool:
        return self.seconds < self.limit


def check_axioms():
    bad = []
    for k, name in enumerate(sorted(AXIOMS, key=lambda n: int(n[1:]))):
        for j in range(3):
            seed = 100 * k + j
            sub = {m: gen_expr(GenParams(seed=seed * 7 + i, max_size=5)) for i, m in enumerate("efg")}
            eq = instantiate_axiom(name, sub)
            if not exprs_bisimilar(eq.lhs, eq.rhs):
                bad.append(f"{name}#{j}")
    control = exprs_bisimilar(parse("a·(b+c)"), parse("a·b+a·c"))
    return not bad and not control, f"33 instances, failures={bad}, distributivity control bisimilar={control}"


def check_fig1():
    c = fixtures.load("fig1")
    w = llee_witness(c)
    reports = [validate_witness(fixtures.load_witness(f"fig1_witness{i}")) for i in (1, 2, 3)]
    ok = lee_holds(c) and w is not None and validate_witness(w).valid and all(r.valid for r in reports)
    return ok, f"markings valid={[r.valid for r in reports]}, search found={w is not None}"


def check_appendix():
    g1, g2 = fixtures.load("g1"), fixtures.load("g2")
    verdict = expressible(g1)
    sols = []
    for name, expected in (("g1a", "a*·0"), ("g2a", "a*")):
        target, _ = collapse(fixtures.load(name))
        w = llee_witness(target)
        sol = extract_solution(w) if w else None
        sols.append(
            len(target.vertices) == 1 and sol is not None and exprs_bisimilar(sol.principal, parse(expected))
        )
    ok = not lee_holds(g1) and not lee_holds(g2) and verdict.verdict == NOT_EXPRESSIBLE_1FREE and all(sols)
    return ok, f"g1 verdict={verdict.verdict}, g1a/g2a solutions={sols}"


def check_fig4():
    c = fixtures.load("fig4")
    r = validate_witness(fixtures.load_witness("fig4_witness"))
    part = bisimilarity_partition(c)
    joined = connect_through(c, "abcd1", "abcd2", part)
    ok = (
        r.valid and r.guarded and r.one_transition_limited and part.same("abcd1", "abcd2")
        and is_one_collapsed(joined) and llee_witness(joined) is None
    )
    return ok, f"witness={r}, joined vertices={len(joined.vertices)}"


def check_fig5():
    c = fixtures.load("fig5")
    w = fixtures.load_witness("fig5_witness")
    (carrier,) = sccs(c)
    cp = counterpart_function(c, carrier)
    swap = cp == {"abcd1": "abcd2", "abcd2": "abcd1"}
    grounded = check_grounded_slice(set(cp.items()), c.as_lts())
    whole = check_transfer_function(cp, c, c)
    twin = is_twin_crystal(c, w, carrier).positive
    ok = swap and grounded and not whole and is_near_collapsed(c) and twin
    return ok, f"cp={cp}, grounded={grounded}, extends={whole}, twin-crystal={twin}"


def check_elevation():
    c = fixtures.load("fig5")
    cp = {"abcd1": "abcd2", "abcd2": "abcd1"}
    report = verify_elevation(cp, c)
    elev, _ = lift_local_transfer(cp, c)
    doubled = len(elev.lifted.vertices) == 2 * len(c.vertices)
    has_witness = llee_witness(elev.lifted) is not None
    return report.ok and doubled and has_witness, f"{report}, doubled={doubled}, llee={has_witness}"


def check_extraction(n: int = 200, second: int = 50):
    bad, differ = [], []
    for seed in range(n):
        c, w = gen_llee_onechart(GenParams(seed=seed, max_size=30))
        s = extract_solution(w)
        if not check_semantic_solution(s, c):
            bad.append(seed)
        if seed < second:
            w2 = llee_witness(c, order_key=lambda v: tuple(-ord(ch) for ch in v))
            s2 = extract_solution(w2)
            if not all(exprs_bisimilar(s.values[v], s2.values[v]) for v in c.order):
                differ.append(seed)
    return not bad and not differ, f"{n} charts, unsound={bad}, differing second solutions={differ}"


def check_crystallization(n: int = 100):
    failures = []
    for seed in range(n):
        c, w = gen_llee_onechart(GenParams(seed=seed, max_size=30))
        try:
            res = crystallize(c, w)
        except Exception as exc:  # noqa: BLE001 - reported per seed
            failures.append((seed, type(exc).__name__))
            continue
        out, ow = res.chart, res.witness
        part = bisimilarity_partition(out)
        target, _ = collapse(out, part)
        sol = extract_solution(ow)
        checks = [
            onebisimilar(c, out),
            validate_witness(ow).valid,
            is_near_collapsed(out, part),
            all(is_one_collapsed(out, comp, part) or is_twin_crystal(out, ow, comp, part).positive
                for comp in sccs(out)),
            len(out.vertices) <= 2 * len(target.vertices),
            check_complete_solution(sol, out),
        ]
        if all(checks):
            csol, cchart = collapse_solution(sol, out)
            checks.append(check_semantic_solution(csol, cchart))
        if not all(checks):
            failures.append((seed, checks))
    return not failures, f"{n} charts, failures={failures}"


def check_certificates(n: int = 50):
    rng = random.Random(9)
    bad_pos, bad_neg = [], []
    for seed in range(n):
        e = gen_expr(GenParams(seed=seed, max_size=10))
        e2 = axiom_rewrite(e, rng, steps=2)
        cert = equiv_certificate(e, e2)
        if cert.status != CERTIFICATE:
            bad_pos.append(seed)
    found, seed = 0, 1000
    while found < n:
        e = gen_expr(GenParams(seed=seed, max_size=8))
        f = gen_expr(GenParams(seed=seed + 50_000, max_size=8))
        seed += 1
        if exprs_bisimilar(e, f):
            continue
        found += 1
        if equiv_certificate(e, f).status != NOT_BISIMILAR:
            bad_neg.append(seed - 1)
    return not bad_pos and not bad_neg, f"rewrites without certificate={bad_pos}, misjudged pairs={bad_neg}"


def check_mil_corpus():
    accepted, rsp_used, problems = 0, False, []
    for name in proofs.names():
        p = proofs.load(name)
        try:
            eq = check_proof(p)
        except GuardViolation:
            if name != "guard_violation":
                problems.append(name)
            continue
        except ProofError:
            if name != "bad_transitivity":
                problems.append(name)
            continue
        accepted += 1
        rsp_used = rsp_used or p["rule"] == "rsp"
        if not exprs_bisimilar(eq.lhs, eq.rhs):
            problems.append(f"{name}: unsound")
    ok = accepted >= 10 and rsp_used and not problems
    return ok, f"accepted={accepted}, rsp used={rsp_used}, problems={problems}"


CHECKS = {
    1: check_axioms,
    2: check_fig1,
    3: check_appendix,
    4: check_fig4,
    5: check_fig5,
    6: check_elevation,
    7: check_extraction,
    8: check_crystallization,
    9: check_certificates,
    10: check_mil_corpus,
}


def run_suite(numbers=None) -> list:
    results = []
    for k in numbers or sorted(CHECKS):
        t0 = time.perf_counter()
        try:
            passed, detail = CHECKS[k]()
        except Exception as exc:  # noqa: BLE001 - a crash is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - t0
        results.append(CheckResult(k, TITLES[k], passed, seconds, LIMITS[k], detail))
    return results

