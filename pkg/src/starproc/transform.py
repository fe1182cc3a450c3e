"""Redundancy-removing rewrites of LLEE-1-charts and the crystallization driver.

Every rewrite redirects transitions to 1-bisimilar targets and prunes, so it
preserves 1-bisimilarity; each operation re-checks that before returning.
The driver accepts a rewrite only if the result still has a guarded,
1-transition-limited witness.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field

from .bisim import (
    Partition,
    bisimilarity_partition,
    check_grounded_slice,
    collapse,
    is_one_collapsed,
    onebisimilar,
)
from .chart import OneChart, sccs
from .errors import (
    AmbiguousCounterpart,
    CrystallizationFailed,
    InvalidWitness,
    NoBisimilarTarget,
    NotBisimilarVertices,
    PreconditionUnmet,
    TransformError,
    UnguardedWitness,
)
from .expr import EMPTY_STEP
from .llee import Witness, _loops_back_to, llee_witness, sections, validate_witness

log = logging.getLogger(__name__)

DRIVER_BUDGET = 3000


def _checked(before: OneChart, after: OneChart) -> OneChart:
    if not onebisimilar(before, after):
        raise TransformError("rewrite broke 1-bisimilarity")
    return after


def _redirect(c: OneChart, changes: dict) -> OneChart:
    """Replace each transition key of ``changes`` by the same step to the new target."""
    trans = set(c.transitions)
    for t, y in changes.items():
        trans.discard(t)
        trans.add((t[0], t[1], y))
    return c.replace(transitions=frozenset(trans)).prune()


def _levels(w: Witness) -> dict:
    out = {v: 0 for v in w.base.vertices}
    for t, n in w.marking.items():
        out[t[0]] = max(out[t[0]], n)
    return out


def _best_partner(candidates, key):
    return min(candidates, key=key) if candidates else None


# ---------------------------------------------------------- basic rewrites

def connect_through(c: OneChart, w1, w2, partition: Partition | None = None) -> OneChart:
    """Redirect every transition into w1 to w2 (and move the start along)."""
    c.check_vertex(w1)
    c.check_vertex(w2)
    if w1 == w2:
        raise NotBisimilarVertices("connect-through needs two distinct vertices")
    part = partition or bisimilarity_partition(c)
    if not part.same(w1, w2):
        raise NotBisimilarVertices(f"{w1!r} and {w2!r} are not 1-bisimilar")
    changes = {t: w2 for t in c.transitions if t[2] == w1}
    out = _redirect(c.replace(start=w2 if c.start == w1 else c.start), changes)
    return _checked(c, out)


def unravel_above(c: OneChart, w: Witness, v, partition: Partition | None = None) -> OneChart:
    """Move transitions into v that come from loops above v to a partner outside them."""
    c.check_vertex(v)
    rel = _loops_back_to(w)
    secs = sections(w, rel)
    above = [a for a in w.base.order if a != v and v in secs[a] and a in c.vertices]
    if not above:
        return c
    inside = set().union(*(secs[a] for a in above))
    part = partition or bisimilarity_partition(c)
    partners = [x for x in part.blocks[part.block_of[v]] if x != v]
    if not partners:
        raise NoBisimilarTarget(f"{v!r} has no 1-bisimilar partner")
    levels = _levels(w)
    outside = [x for x in partners if x not in inside] or partners
    target = _best_partner(outside, key=lambda x: (levels.get(x, 0), x))
    changes = {t: target for t in c.transitions if t[2] == v and t[0] in inside}
    if not changes:
        return c
    return _checked(c, _redirect(c, changes))


def insulate(c: OneChart, w: Witness, v, partition: Partition | None = None) -> OneChart:
    """Keep every step from v inside v's loops-back-to part where a bisimilar target exists."""
    c.check_vertex(v)
    part = partition or bisimilarity_partition(c)
    if not any(n > 0 for t, n in w.marking.items() if t[0] == v):
        raise PreconditionUnmet(f"{v!r} is not a loop vertex")
    from .bisim import substate

    secs = sections(w)
    desc = secs[v]
    if not any(u != v and substate(c, v, u, part) for u in desc):
        raise PreconditionUnmet(f"{v!r} is not a substate of a vertex in its loops-back-to part")
    levels = _levels(w)

    def inside(y):
        inner = [z for z in desc if part.same(z, y)]
        return _best_partner(inner, key=lambda z: (levels.get(z, 0), z)) if inner else y

    trans = set(c.transitions)
    for t in c.out[v]:
        _, label, x = t
        if x in desc:
            continue
        if label != EMPTY_STEP:
            trans.discard(t)
            trans.add((v, label, inside(x)))
            continue
        if x in c.induced_terminating and v not in c.terminating:
            raise PreconditionUnmet("cannot drop a 1-transition to a terminating vertex")
        trans.discard(t)
        for a, y in c.induced[x]:
            trans.add((v, a, inside(y)))
    if trans == set(c.transitions):
        return c
    return _checked(c, c.replace(transitions=frozenset(trans)).prune())


def _depths(w: Witness) -> dict:
    secs = sections(w)
    depth = {v: 0 for v in w.base.vertices}
    for a, members in secs.items():
        for u in members:
            if u != a:
                depth[u] += 1
    return depth


def make_parsimonious(c: OneChart, w: Witness, v, partition: Partition | None = None) -> OneChart:
    """Redirect proper steps from v (and its body boundary) away from deeper duplicates."""
    c.check_vertex(v)
    part = partition or bisimilarity_partition(c)
    depth = _depths(w)
    levels = _levels(w)
    boundary = {v} | {t[2] for t in c.out[v]}

    def key(x):
        return (depth.get(x, 0), levels.get(x, 0), x)

    changes = {}
    for u in sorted(boundary):
        for t in c.out[u]:
            if t[1] == EMPTY_STEP:
                continue
            x = t[2]
            best = _best_partner(list(part.blocks[part.block_of[x]]), key)
            if best != x and key(best)[0] < key(x)[0]:
                changes[t] = best
    if not changes:
        return c
    return _checked(c, _redirect(c, changes))


def is_grounded(c: OneChart, carrier, partition: Partition | None = None) -> bool:
    carrier = set(carrier)
    part = partition or bisimilarity_partition(c)
    seen = {}
    for u in carrier:
        for _, _, x in c.out[u]:
            if x in carrier:
                continue
            b = part.block_of[x]
            if seen.setdefault(b, x) != x:
                return False
    return True


def ground_scc(c: OneChart, carrier, partition: Partition | None = None) -> OneChart:
    """Make exits from ``carrier`` to 1-bisimilar outside targets share one target."""
    carrier = set(carrier)
    part = partition or bisimilarity_partition(c)
    exits = sorted(t for u in carrier for t in c.out[u] if t[2] not in carrier)
    chosen = {}
    for t in exits:
        b = part.block_of[t[2]]
        chosen[b] = min(chosen.get(b, t[2]), t[2])
    changes = {t: chosen[part.block_of[t[2]]] for t in exits if chosen[part.block_of[t[2]]] != t[2]}
    if not changes:
        return c
    return _checked(c, _redirect(c, changes))


def counterpart_function(c: OneChart, carrier, partition: Partition | None = None) -> dict:
    carrier = set(carrier)
    part = partition or bisimilarity_partition(c)
    cp = {}
    for v in sorted(carrier):
        partners = [u for u in part.blocks[part.block_of[v]] if u != v and u in carrier]
        if len(partners) > 1:
            raise AmbiguousCounterpart(f"{v!r} has {len(partners)} 1-bisimilar partners")
        if partners:
            cp[v] = partners[0]
    return cp


# ---------------------------------------------------------------- analysis

@dataclass
class TwinCrystalReport:
    carrier: frozenset
    pivot: str | None = None
    top: str | None = None
    p1: frozenset = frozenset()
    p2: frozenset = frozenset()
    e2: tuple = ()
    checks: dict = field(default_factory=dict)

    @property
    def positive(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "positive": self.positive,
            "carrier": sorted(self.carrier),
            "pivot": self.pivot,
            "top": self.top,
            "P1": sorted(self.p1),
            "P2": sorted(self.p2),
            "E2": [list(t) for t in self.e2],
            "checks": self.checks,
        }


def _loops_back_via(w: Witness, v, entries) -> set:
    """Vertices that loop back to v along a path starting with one of ``entries``."""
    c = w.base
    body_succ = {x: [] for x in c.vertices}
    body_pred = {x: [] for x in c.vertices}
    for t in c.transitions:
        if w.marking[t] == 0:
            body_succ[t[0]].append(t[2])
            body_pred[t[2]].append(t[0])
    starts = [t[2] for t in entries if t[2] != v]
    forward = set(starts)
    queue = deque(starts)
    while queue:
        x = queue.popleft()
        for y in body_succ[x]:
            if y != v and y not in forward:
                forward.add(y)
                queue.append(y)
    back = set()
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in body_pred[x]:
            if y != v and y in forward and y not in back:
                back.add(y)
                queue.append(y)
    return back


def _twin_checks(c, w, carrier, part, rel, secs, top, pivot, e2):
    p1 = secs[pivot]
    direct = _loops_back_via(w, top, e2)
    p2 = {top}
    for x in direct:
        p2 |= secs[x]
    p2 = frozenset(p2)
    checks = {}
    checks["tc1"] = secs[top] == carrier and not rel[top]
    checks["tc2"] = (not (p1 & p2)) and (p1 | p2) == carrier and pivot in p1 and top in p2
    checks["tc3"] = not is_one_collapsed(c, carrier, part)
    pairs = [(u, x) for u, x in part.pairs() if u in carrier and x in carrier]
    checks["tc4"] = all((u in p1) != (x in p1) and (u in p2) != (x in p2) for u, x in pairs)

    def favours(src, side):
        for _, label, x in c.out[src]:
            if label == EMPTY_STEP:
                continue
            if any(part.same(x, y) for y in side) and x not in side:
                return False
        return True

    checks["tc5"] = favours(pivot, p1)
    checks["tc6"] = favours(top, p2)
    outside = [x for x in c.vertices if x not in carrier]
    checks["tc7"] = not any(part.same(u, x) for u in carrier for x in outside)
    checks["tc8"] = is_grounded(c, carrier, part)
    return p1, p2, checks


def is_twin_crystal(c: OneChart, w: Witness, carrier, partition: Partition | None = None) -> TwinCrystalReport:
    carrier = frozenset(carrier)
    part = partition or bisimilarity_partition(c)
    rel = _loops_back_to(w)
    secs = sections(w, rel)
    report = TwinCrystalReport(carrier)
    tops = [v for v in sorted(carrier) if not rel[v] and secs[v] == carrier]
    if not tops:
        report.checks = {"tc1": False}
        return report
    first = None
    for top in tops:
        entries = [t for t in c.out[top] if w.marking.get(t, 0) > 0]
        subsets = []
        for k in range(1, len(entries) + 1):
            if len(entries) > 6 and 1 < k < len(entries):
                continue
            subsets += list(itertools.combinations(entries, k))
        for pivot in sorted(carrier - {top}):
            for e2 in subsets:
                p1, p2, checks = _twin_checks(c, w, carrier, part, rel, secs, top, pivot, e2)
                cand = TwinCrystalReport(carrier, pivot, top, p1, p2, tuple(e2), checks)
                if cand.positive:
                    return cand
                if first is None or sum(checks.values()) > sum(first.checks.values()):
                    first = cand
    return first or TwinCrystalReport(carrier, top=tops[0], checks={"tc1": True, "tc2": False})


def is_near_collapsed(c: OneChart, partition: Partition | None = None) -> bool:
    part = partition or bisimilarity_partition(c)
    lts = c.as_lts()
    for w1, w2 in part.pairs():
        if not (check_grounded_slice({(w1, w2)}, lts, part) or check_grounded_slice({(w2, w1)}, lts, part)):
            return False
    return True


def classify_redundancy(c: OneChart, w: Witness, w1, w2, partition: Partition | None = None) -> str:
    """Diagnostic tag for a pair of distinct 1-bisimilar vertices."""
    part = partition or bisimilarity_partition(c)
    if w1 == w2 or not part.same(w1, w2):
        raise NotBisimilarVertices(f"{w1!r} and {w2!r} are not a redundancy")
    comps = sccs(c)
    home = {v: i for i, comp in enumerate(comps) for v in comp}
    if home.get(w1) is None or home.get(w1) != home.get(w2):
        return "DifferentScc"
    carrier = comps[home[w1]]
    report = is_twin_crystal(c, w, carrier, part)
    if report.positive and (w1 in report.p1) != (w2 in report.p1):
        return "Crystalline"
    for a, b in ((w1, w2), (w2, w1)):
        out = connect_through(c, a, b, part)
        if _good_witness(out) is not None:
            return "SameSccSimple"
    return "Unclassified"


# ------------------------------------------------------------------ driver

def _good_witness(c: OneChart, budget: int = DRIVER_BUDGET):
    w = llee_witness(c, budget=budget)
    if w is not None and validate_witness(w).one_transition_limited:
        return w
    return llee_witness(c, budget=budget, one_limited=True)


@dataclass
class CrystallizeResult:
    chart: OneChart
    witness: Witness
    trace: list
    used_collapse: bool = False


def crystallized_checks(c: OneChart, w: Witness) -> dict:
    part = bisimilarity_partition(c)
    report = validate_witness(w)
    sc = sccs(c)
    target, _ = collapse(c, part)
    return {
        "witness_valid": report.valid,
        "one_transition_limited": report.one_transition_limited,
        "near_collapsed": is_near_collapsed(c, part),
        "sccs_collapsed_or_twin": all(
            is_one_collapsed(c, comp, part) or is_twin_crystal(c, w, comp, part).positive for comp in sc
        ),
        "sccs_grounded": all(is_grounded(c, comp, part) for comp in sc),
        "at_most_double": len(c.vertices) <= 2 * len(target.vertices),
    }


def crystallize(c: OneChart, w: Witness | None = None, budget: int = DRIVER_BUDGET) -> CrystallizeResult:
    """Rewrite ``c`` into a 1-bisimilar crystallized LLEE-1-chart.

    Redundant pairs are removed by connect-through (optionally after an
    unravel or insulation step) whenever LLEE survives; afterwards exits are
    grounded and steps made parsimonious. If the outcome misses a
    crystallized-form check but the bisimulation collapse itself has LLEE,
    the collapse is returned instead.
    """
    if w is None:
        w = llee_witness(c)
        if w is None:
            raise InvalidWitness("the chart has no LLEE witness")
    report = validate_witness(w)
    if not report.valid:
        raise InvalidWitness(report.reason)
    if not report.guarded:
        raise UnguardedWitness("crystallize needs a guarded witness")
    if w.base != c:
        raise InvalidWitness("the witness belongs to a different chart")
    trace = []
    cur, cw = c.prune(), w
    if cur != c:
        cw = _good_witness(cur, budget) or Witness(cur, {t: w.marking[t] for t in cur.transitions})
    if not validate_witness(cw).one_transition_limited:
        alt = _good_witness(cur, budget)
        if alt is not None:
            cw = alt

    def accept(op, args, out):
        nonlocal cur, cw
        new_w = _good_witness(out, budget)
        if new_w is None:
            return False
        cur, cw = out, new_w
        trace.append({"op": op, "args": list(args), "vertices": len(cur.vertices),
                      "transitions": len(cur.transitions)})
        return True

    # parsimony/grounding redirects need not shrink the chart, so bound them
    rewrites_left = 4 * len(cur.transitions) + 8
    progress = True
    while progress:
        progress = False
        part = bisimilarity_partition(cur)
        for w1, w2 in part.pairs():
            for a, b in ((w1, w2), (w2, w1)):
                variants = [("connect_through", lambda a=a, b=b: connect_through(cur, a, b, part))]
                for pre_name, pre in (("unravel_above", unravel_above), ("insulate", insulate)):
                    def run(a=a, b=b, pre=pre):
                        mid = pre(cur, cw, a, part)
                        return connect_through(mid, a, b) if a in mid.vertices else mid
                    variants.append((f"{pre_name}+connect_through", run))
                for name, make in variants:
                    try:
                        out = make()
                    except TransformError:
                        continue
                    if out == cur or len(out.vertices) >= len(cur.vertices):
                        continue
                    if accept(name, (a, b), out):
                        progress = True
                        break
                if progress:
                    break
            if progress:
                break
        if progress:
            continue
        # parsimony and grounding, kept only while LLEE survives
        part = bisimilarity_partition(cur)
        for v in sorted({t[0] for t, n in cw.marking.items() if n > 0}):
            if v not in cur.vertices:
                continue
            out = make_parsimonious(cur, cw, v, part)
            if out != cur and rewrites_left > 0 and accept("make_parsimonious", (v,), out):
                rewrites_left -= 1
                progress = True
                break
        if progress:
            continue
        for comp in sccs(cur):
            out = ground_scc(cur, comp, part)
            if out != cur and rewrites_left > 0 and accept("ground_scc", (comp[0],), out):
                rewrites_left -= 1
                progress = True
                break

    checks = crystallized_checks(cur, cw)
    if all(checks.values()):
        return CrystallizeResult(cur, cw, trace)
    target, _ = collapse(cur)
    target = target.prune()
    tw = _good_witness(target, budget)
    if tw is not None:
        trace.append({"op": "collapse", "args": [], "vertices": len(target.vertices),
                      "transitions": len(target.transitions), "failed_checks":
                      sorted(k for k, ok in checks.items() if not ok)})
        return CrystallizeResult(target, tw, trace, used_collapse=True)
    failed = sorted(k for k, ok in checks.items() if not ok)
    raise CrystallizationFailed(f"crystallized-form checks failed: {', '.join(failed)}")
