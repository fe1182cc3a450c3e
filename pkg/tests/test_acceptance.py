"""End-to-end acceptance checks, one test per criterion.

Each test times itself, records a line for the terminal summary and then
asserts both the outcome and the time limit.
"""

import random
import time
from contextlib import contextmanager

from starproc import fixtures, proofs
from starproc.bisim import (
    bisimilarity_partition,
    check_grounded_slice,
    check_transfer_function,
    collapse,
    exprs_bisimilar,
    is_one_collapsed,
    onebisimilar,
)
from starproc.chart import sccs
from starproc.cli import NEGATIVE, run
from starproc.elevation import lift_local_transfer, verify_elevation
from starproc.errors import GuardViolation, ProofError
from starproc.expr import chart_of, parse
from starproc.extract import (
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
from starproc.gen import GenParams, axiom_rewrite, gen_expr, gen_llee_onechart
from starproc.llee import lee_holds, llee_witness, validate_witness
from starproc.mil import AXIOMS, check_proof, instantiate_axiom
from starproc.transform import (
    connect_through,
    counterpart_function,
    crystallize,
    is_near_collapsed,
    is_twin_crystal,
)

RESULTS = []


@contextmanager
def criterion(number, title, limit):
    state = {"ok": False}
    start = time.perf_counter()
    try:
        yield state
    finally:
        seconds = time.perf_counter() - start
        passed = state["ok"] and seconds < limit
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {seconds:8.3f} s (limit {limit} s)  {title}"
        RESULTS.append(line)
        print(line)
    assert state["ok"], f"criterion {number} outcome failed"
    assert seconds < limit, f"criterion {number} took {seconds:.2f} s, limit {limit} s"


def test_criterion_01_axiom_soundness():
    with criterion(1, "axiom instances bisimilar; distributivity control is not", 5) as c:
        failures = []
        for k, name in enumerate(sorted(AXIOMS, key=lambda n: int(n[1:]))):
            seen = set()
            for j in range(3):
                seed = 1000 + 10 * k + j
                sub = {m: gen_expr(GenParams(seed=seed, max_size=6 + i)) for i, m in enumerate("efg")}
                eq = instantiate_axiom(name, sub)
                seen.add((eq.lhs, eq.rhs))
                if not onebisimilar(chart_of(eq.lhs), chart_of(eq.rhs)):
                    failures.append((name, j))
            assert len(seen) == 3, f"{name} instances are not distinct"
        control = onebisimilar(chart_of(parse("a·(b+c)")), chart_of(parse("a·b+a·c")))
        c["ok"] = not failures and not control


def test_criterion_02_fig1():
    with criterion(2, "FIG1 has LEE and LLEE; all three markings valid", 1) as c:
        chart = fixtures.load("fig1")
        markings = [validate_witness(fixtures.load_witness(f"fig1_witness{i}")).valid for i in (1, 2, 3)]
        found = llee_witness(chart)
        c["ok"] = lee_holds(chart) and all(markings) and found is not None and validate_witness(found).valid


def test_criterion_03_appendix(capsys):
    with criterion(3, "G1/G2 fail LEE; g1 not expressible; G1a/G2a solutions", 1) as c:
        g1, g2 = fixtures.load("g1"), fixtures.load("g2")
        code = run(["expressible", str(fixtures.fixture_path("g1"))])
        printed = capsys.readouterr().out
        verdict = expressible(g1).verdict
        solved = []
        for name, expected in (("g1a", "a*·0"), ("g2a", "a*")):
            target, _ = collapse(fixtures.load(name))
            w = llee_witness(target)
            solved.append(len(target.vertices) == 1 and w is not None
                          and exprs_bisimilar(extract_solution(w).principal, parse(expected)))
        c["ok"] = (
            not lee_holds(g1) and not lee_holds(g2)
            and verdict == NOT_EXPRESSIBLE_1FREE and code == NEGATIVE and NOT_EXPRESSIBLE_1FREE in printed
            and all(solved)
        )


def test_criterion_04_fig4():
    with criterion(4, "FIG4 witness; connect-through gives a collapsed chart without LLEE", 1) as c:
        chart = fixtures.load("fig4")
        report = validate_witness(fixtures.load_witness("fig4_witness"))
        joined = connect_through(chart, "abcd1", "abcd2")
        c["ok"] = (
            report.valid and report.guarded and report.one_transition_limited
            and bisimilarity_partition(chart).same("abcd1", "abcd2")
            and is_one_collapsed(joined) and llee_witness(joined) is None
        )


def test_criterion_05_fig5():
    with criterion(5, "FIG5 counterpart, grounded slice, near-collapsed, twin-crystal", 1) as c:
        chart = fixtures.load("fig5")
        w = fixtures.load_witness("fig5_witness")
        (carrier,) = sccs(chart)
        cp = counterpart_function(chart, carrier)
        c["ok"] = (
            cp == {"abcd1": "abcd2", "abcd2": "abcd1"}
            and check_grounded_slice(set(cp.items()), chart.as_lts())
            and not check_transfer_function(cp, chart, chart)
            and is_near_collapsed(chart)
            and is_twin_crystal(chart, w, carrier).positive
        )


def test_criterion_06_elevation():
    with criterion(6, "elevation of FIG5 along cp", 1) as c:
        chart = fixtures.load("fig5")
        cp = {"abcd1": "abcd2", "abcd2": "abcd1"}
        report = verify_elevation(cp, chart)
        elev, _ = lift_local_transfer(cp, chart)
        w = llee_witness(elev.lifted)
        c["ok"] = (
            report.projection_is_transfer and report.lift_is_transfer and report.square_commutes
            and len(elev.lifted.vertices) == 2 * len(chart.vertices)
            and w is not None and validate_witness(w).valid
        )


def test_criterion_07_extraction_at_scale():
    with criterion(7, "extraction sound on 200 charts; 50 second witnesses agree", 60) as c:
        unsound, differing, sizes = [], [], []
        for seed in range(200):
            chart, w = gen_llee_onechart(GenParams(seed=5000 + seed, max_size=30))
            sizes.append(len(chart.vertices))
            s = extract_solution(w)
            if not check_semantic_solution(s, chart):
                unsound.append(seed)
            if seed < 50:
                other = llee_witness(chart, order_key=lambda v: tuple(-ord(ch) for ch in v))
                s2 = extract_solution(other)
                if not all(exprs_bisimilar(s[v], s2[v]) for v in chart.order):
                    differing.append(seed)
        c["ok"] = not unsound and not differing and max(sizes) <= 30


def test_criterion_08_crystallization():
    with criterion(8, "crystallization of 100 charts meets every postcondition", 120) as c:
        failures = []
        for seed in range(100):
            chart, w = gen_llee_onechart(GenParams(seed=7000 + seed, max_size=30))
            res = crystallize(chart, w)
            out, ow = res.chart, res.witness
            part = bisimilarity_partition(out)
            target, _ = collapse(out, part)
            sol = extract_solution(ow)
            checks = [
                onebisimilar(chart, out),
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
                failures.append(seed)
        c["ok"] = not failures


def test_criterion_09_certificates():
    with criterion(9, "certificates for 50 rewrites; 50 non-bisimilar pairs rejected", 60) as c:
        rng = random.Random(2024)
        missing = []
        for seed in range(50):
            e = gen_expr(GenParams(seed=9000 + seed, max_size=10))
            e2 = axiom_rewrite(e, rng, steps=2)
            cert = equiv_certificate(e, e2)
            if cert.status != CERTIFICATE or not all(line.endswith("true") for line in cert.checks):
                missing.append(seed)
        wrong, found, seed = [], 0, 0
        while found < 50:
            e = gen_expr(GenParams(seed=20_000 + seed, max_size=8))
            f = gen_expr(GenParams(seed=40_000 + seed, max_size=8))
            seed += 1
            if onebisimilar(chart_of(e), chart_of(f)):
                continue
            found += 1
            if equiv_certificate(e, f).status != NOT_BISIMILAR:
                wrong.append(seed)
        c["ok"] = not missing and not wrong


def test_criterion_10_mil_corpus():
    with criterion(10, "proof corpus checks, guard violation rejected, soundness bridge", 5) as c:
        accepted, rsp, unsound = 0, False, []
        guard_rejected = False
        for name in proofs.names():
            p = proofs.load(name)
            try:
                eq = check_proof(p)
            except GuardViolation:
                guard_rejected = guard_rejected or name == "guard_violation"
                continue
            except ProofError:
                continue
            accepted += 1
            rsp = rsp or p["rule"] == "rsp"
            if not onebisimilar(chart_of(eq.lhs), chart_of(eq.rhs)):
                unsound.append(name)
        c["ok"] = accepted >= 10 and rsp and guard_rejected and not unsound
