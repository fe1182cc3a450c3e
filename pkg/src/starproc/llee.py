"""Loop sub-1-charts, layered loop elimination, and elimination witnesses.

A witness marks each transition with a level: 0 for body transitions and
n >= 1 for loop-entry transitions removed in the n-th elimination round.
Replaying the rounds in increasing order must succeed, which is what
``validate_witness`` checks.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field

from .chart import OneChart, chart_from_dict, chart_to_dict, is_acyclic
from .errors import ChartError, InvalidWitness, UnknownVertex
from .expr import EMPTY_STEP

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000


@dataclass(frozen=True)
class LoopSubchart:
    anchor: str
    entries: frozenset
    body_vertices: frozenset  # without the anchor
    body_transitions: frozenset  # transitions of the loop other than its entries


@dataclass
class Witness:
    base: OneChart
    marking: dict = field(default_factory=dict)

    def level(self, t) -> int:
        return self.marking[t]

    @property
    def max_level(self) -> int:
        return max(self.marking.values(), default=0)

    def entries_from(self, v) -> list:
        return [t for t in self.base.out[v] if self.marking.get(t, 0) > 0]

    def body_from(self, v) -> list:
        return [t for t in self.base.out[v] if self.marking.get(t, 0) == 0]


@dataclass(frozen=True)
class WitnessReport:
    valid: bool
    guarded: bool
    one_transition_limited: bool
    reason: str = ""


# ------------------------------------------------------------ loop finding

class _State:
    """Adjacency view of a transition set, restricted to reachable vertices."""

    def __init__(self, chart: OneChart, transitions: frozenset, roots):
        self.chart = chart
        self.transitions = transitions
        self.succ = {}
        for t in transitions:
            self.succ.setdefault(t[0], []).append(t)
        for v in self.succ:
            self.succ[v].sort()
        seen = set(roots)
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for t in self.succ.get(u, ()):
                if t[2] not in seen:
                    seen.add(t[2])
                    queue.append(t[2])
        self.live = seen

    def out(self, v):
        return self.succ.get(v, [])

    def acyclic(self) -> bool:
        adj = {v: [t[2] for t in self.out(v)] for v in self.live}
        return is_acyclic(adj)


def _body_from(state: _State, v, targets):
    """Body grown from ``targets`` until ``v`` is met again.

    Returns (vertices, transitions, returns) or None if the body has a cycle
    avoiding ``v`` or a terminating vertex other than ``v``.
    """
    verts = set()
    trans = set()
    returns = False
    queue = deque()
    for x in targets:
        if x == v:
            returns = True
        elif x not in verts:
            verts.add(x)
            queue.append(x)
    term = state.chart.terminating
    while queue:
        x = queue.popleft()
        if x in term:
            return None
        for t in state.out(x):
            trans.add(t)
            y = t[2]
            if y == v:
                returns = True
            elif y not in verts:
                verts.add(y)
                queue.append(y)
    adj = {x: [t[2] for t in state.out(x) if t[2] != v] for x in verts}
    if not is_acyclic(adj):
        return None
    return frozenset(verts), frozenset(trans), returns


def _make_loop(state: _State, v, entries):
    res = _body_from(state, v, [t[2] for t in entries])
    if res is None:
        return None
    verts, trans, returns = res
    if not returns:
        return None
    return LoopSubchart(v, frozenset(entries), verts, trans)


def _entry_options(state: _State, v, proper_only: bool):
    """Transitions from v that individually admit a returning loop body."""
    options = []
    for t in state.out(v):
        if proper_only and t[1] == EMPTY_STEP:
            continue
        res = _body_from(state, v, [t[2]])
        if res is not None and res[2]:
            options.append(t)
    return options


def find_loop_subcharts(c: OneChart, v, all_subsets: bool = False, proper_only: bool = False) -> list:
    """Loop sub-1-charts anchored at ``v`` in the reachable part of ``c``.

    By default only the maximal one is returned; ``all_subsets`` lists every
    nonempty entry set drawn from the admissible entry transitions.
    """
    c.check_vertex(v)
    roots = c.vertices if c.start is None else [c.start]
    state = _State(c, c.transitions, roots)
    if v not in state.live:
        return []
    options = _entry_options(state, v, proper_only)
    if not options:
        return []
    if not all_subsets:
        loop = _make_loop(state, v, options)
        return [loop] if loop else []
    loops = []
    for k in range(len(options), 0, -1):
        for combo in itertools.combinations(options, k):
            loop = _make_loop(state, v, combo)
            if loop:
                loops.append(loop)
    return loops


def eliminate(c: OneChart, loop: LoopSubchart) -> OneChart:
    """Remove the loop's entries and everything that becomes unreachable."""
    if not loop.entries <= c.transitions:
        raise InvalidWitness("loop entries are not transitions of the chart")
    roots = c.vertices if c.start is None else [c.start]
    state = _State(c, c.transitions, roots)
    check = _make_loop(state, loop.anchor, loop.entries)
    if check is None:
        raise InvalidWitness(f"not a loop sub-1-chart at {loop.anchor!r}")
    return c.replace(transitions=c.transitions - loop.entries).prune()


# ------------------------------------------------------------------ search

@dataclass
class SearchOutcome:
    witness: Witness | None
    nodes: int
    exhausted: bool


def _roots(c: OneChart):
    return list(c.vertices) if c.start is None else [c.start]


def _candidates(state: _State, proper_only: bool, subsets: bool):
    options = {}
    for v in sorted(state.live):
        opts = _entry_options(state, v, proper_only)
        if opts:
            options[v] = opts
    loopable = set(options)
    ranked = []
    for v, opts in options.items():
        sets = [tuple(opts)]
        if subsets and len(opts) > 1:
            singles = [(t,) for t in opts]
            sets += singles
            if len(opts) <= 4:
                for k in range(len(opts) - 1, 1, -1):
                    sets += list(itertools.combinations(opts, k))
        for entries in sets:
            loop = _make_loop(state, v, entries)
            if loop is None:
                continue
            # bodies carrying 1-transitions that do not close this loop rarely
            # lead to 1-transition-limited witnesses, so try them late
            foreign = any(t[1] == EMPTY_STEP and t[2] != v for t in loop.body_transitions)
            ranked.append(((foreign, bool(loop.body_vertices & loopable)), len(ranked), loop))
    ranked.sort(key=lambda r: r[:2])
    return [r[2] for r in ranked]


def search_witness(
    c: OneChart,
    budget: int = DEFAULT_BUDGET,
    layered: bool = True,
    proper_only: bool = False,
    order_key=None,
    accept=None,
) -> SearchOutcome:
    """Depth-first search for a successful elimination run.

    Candidates are tried innermost first (bodies free of other loop anchors),
    in vertex order, maximal entry sets before smaller ones. ``order_key``
    permutes the vertex order to obtain alternative witnesses. ``accept``
    filters complete witnesses; rejected ones make the search backtrack.
    """
    roots = _roots(c)
    failed = set()
    nodes = 0
    exhausted = False

    def run(transitions, bodies, trail):
        nonlocal nodes, exhausted
        key = (transitions, bodies) if layered else transitions
        if key in failed:
            return None
        nodes += 1
        if nodes > budget:
            exhausted = True
            return None
        state = _State(c, transitions, roots)
        if state.acyclic():
            if accept is None or accept(_marking(c, trail)):
                return trail
            return None
        cands = _candidates(state, proper_only, subsets=True)
        if order_key is not None:
            cands.sort(key=lambda lp: order_key(lp.anchor))
        for loop in cands:
            if layered and loop.entries & bodies:
                continue
            rest = transitions - loop.entries
            pruned = _State(c, rest, roots)
            rest = frozenset(t for t in rest if t[0] in pruned.live)
            new_bodies = bodies | loop.body_transitions if layered else bodies
            found = run(rest, frozenset(new_bodies), trail + [loop])
            if found is not None:
                return found
            if exhausted:
                return None
        if accept is None:
            failed.add(key)
        return None

    trail = run(frozenset(c.transitions), frozenset(), [])
    if trail is None:
        return SearchOutcome(None, nodes, exhausted)
    return SearchOutcome(Witness(c, _marking(c, trail)), nodes, exhausted)


def _marking(c: OneChart, trail) -> dict:
    marking = {t: 0 for t in c.transitions}
    for level, loop in enumerate(trail, start=1):
        for t in loop.entries:
            marking[t] = level
    return marking


def llee_witness(
    c: OneChart, budget: int = DEFAULT_BUDGET, order_key=None, one_limited: bool = False
) -> Witness | None:
    """A layered elimination witness for ``c``, preferring guarded ones.

    With ``one_limited`` only 1-transition-limited witnesses are returned.
    """
    if lee_refutation(c) is not None:
        return None
    accept = None
    if one_limited:
        accept = lambda m: validate_witness(Witness(c, m)).one_transition_limited  # noqa: E731
    first = search_witness(c, budget, True, True, order_key, accept)
    if first.witness is not None:
        return first.witness
    if first.exhausted:
        log.warning("witness search budget exhausted after %d nodes", first.nodes)
    if one_limited:
        # 1-transition-limited witnesses are guarded, so there is nothing else to try
        return None
    rest = max(budget - first.nodes, 0)
    second = search_witness(c, rest, True, False, order_key)
    if second.exhausted:
        log.warning("witness search budget exhausted after %d nodes", first.nodes + second.nodes)
    return second.witness


def lee_holds(c: OneChart, budget: int = DEFAULT_BUDGET) -> bool:
    """Loop elimination without the layering restriction."""
    if lee_refutation(c) is not None:
        return False
    return search_witness(c, budget, layered=False).witness is not None


def lee_refutation(c: OneChart) -> list | None:
    """A cycle that no elimination run can break, or None if none is found.

    A transition ``(v, a, u)`` is permanent when permanent transitions lead
    from ``u``, avoiding ``v``, to a terminating vertex other than ``v``: any
    loop entered through it would contain that vertex in its body. A cycle of
    permanent transitions reachable from the roots by permanent transitions
    survives every run, so the returned cycle proves that LEE (and LLEE) fail.
    None is inconclusive.
    """
    term = c.terminating
    permanent = set()
    changed = True
    while changed:
        changed = False
        succ = {}
        for t in permanent:
            succ.setdefault(t[0], []).append(t[2])
        for t in c.transitions:
            if t in permanent:
                continue
            v, _, u = t
            seen, stack = set(), [u]
            while stack:
                x = stack.pop()
                if x == v or x in seen:
                    continue
                if x in term:
                    permanent.add(t)
                    changed = True
                    break
                seen.add(x)
                stack.extend(succ.get(x, ()))
    succ = {}
    for t in permanent:
        succ.setdefault(t[0], []).append(t)
    live = set(_roots(c))
    queue = deque(live)
    while queue:
        x = queue.popleft()
        for t in succ.get(x, ()):
            if t[2] not in live:
                live.add(t[2])
                queue.append(t[2])
    # iterative DFS for a cycle among live permanent transitions
    colour = {}
    for root in sorted(live):
        if root in colour:
            continue
        colour[root] = 1
        path = []
        stack = [(root, iter(sorted(succ.get(root, ()))))]
        while stack:
            node, it = stack[-1]
            for t in it:
                mark = colour.get(t[2])
                if mark == 1:
                    path.append(t)
                    start = next(i for i, p in enumerate(path) if p[0] == t[2])
                    return path[start:]
                if mark is None:
                    colour[t[2]] = 1
                    path.append(t)
                    stack.append((t[2], iter(sorted(succ.get(t[2], ())))))
                    break
            else:
                colour[node] = 2
                stack.pop()
                if path:
                    path.pop()
    return None


def has_infinite_path(c: OneChart) -> bool:
    state = _State(c, c.transitions, _roots(c))
    return not state.acyclic()


# -------------------------------------------------------------- validation

def _replay(w: Witness):
    c = w.base
    missing = c.transitions - set(w.marking)
    if missing:
        raise InvalidWitness(f"marking is not total: {len(missing)} transition(s) unmarked")
    extra = set(w.marking) - c.transitions
    if extra:
        raise InvalidWitness("marking refers to transitions outside the chart")
    if any((not isinstance(n, int)) or n < 0 for n in w.marking.values()):
        raise InvalidWitness("levels must be natural numbers")
    roots = _roots(c)
    transitions = frozenset(c.transitions)
    bodies = set()
    loops = []
    for level in sorted({n for n in w.marking.values() if n > 0}):
        state = _State(c, transitions, roots)
        groups = {}
        for t in transitions:
            if w.marking[t] == level and t[0] in state.live:
                groups.setdefault(t[0], []).append(t)
        for v in sorted(groups):
            state = _State(c, transitions, roots)
            entries = [t for t in groups[v] if t in transitions and t[0] in state.live]
            if not entries:
                continue
            loop = _make_loop(state, v, entries)
            if loop is None:
                return None, f"level {level} entries at {v!r} do not form a loop sub-1-chart"
            if set(loop.entries) & bodies:
                return None, f"level {level} entries at {v!r} lie in an earlier loop body"
            if any(w.marking[t] != 0 for t in loop.body_transitions):
                return None, f"loop at {v!r} (level {level}) contains unremoved entry transitions"
            bodies |= loop.body_transitions
            loops.append((level, loop))
            rest = transitions - loop.entries
            live = _State(c, rest, roots).live
            transitions = frozenset(t for t in rest if t[0] in live)
    if not _State(c, transitions, roots).acyclic():
        return None, "an infinite path remains after all eliminations"
    return loops, ""


def loops_back_to(w: Witness) -> dict:
    """The relation w -> set of vertices it loops back to (direct steps)."""
    loops, reason = _replay(w)
    if loops is None:
        raise InvalidWitness(reason)
    return _loops_back_to(w)


def _loops_back_to(w: Witness) -> dict:
    c = w.base
    body_succ = {v: [] for v in c.vertices}
    body_pred = {v: [] for v in c.vertices}
    for t in c.transitions:
        if w.marking[t] == 0:
            body_succ[t[0]].append(t[2])
            body_pred[t[2]].append(t[0])
    rel = {v: set() for v in c.vertices}
    for v in c.order:
        starts = [t[2] for t in c.out[v] if w.marking[t] > 0 and t[2] != v]
        if not starts:
            continue
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
        for x in back:
            rel[x].add(v)
    return rel


def sections(w: Witness, rel: dict | None = None) -> dict:
    """section(v) = every u with u loops-back-to* v (v included)."""
    rel = rel if rel is not None else loops_back_to(w)
    inverse = {v: set() for v in rel}
    for u, targets in rel.items():
        for v in targets:
            inverse[v].add(u)
    out = {}
    for v in rel:
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for u in inverse[x]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        out[v] = frozenset(seen)
    return out


def section(w: Witness, v) -> frozenset:
    w.base.check_vertex(v)
    return sections(w)[v]


def loop_vertices(w: Witness) -> list:
    return sorted({t[0] for t, n in w.marking.items() if n > 0})


def validate_witness(w: Witness) -> WitnessReport:
    loops, reason = _replay(w)
    if loops is None:
        return WitnessReport(False, False, False, reason)
    guarded = all(not (t[1] == EMPTY_STEP and n > 0) for t, n in w.marking.items())
    rel = _loops_back_to(w)
    secs = sections(w, rel)
    limited = True
    for t in w.base.one_transitions:
        u, _, v = t
        if w.marking[t] != 0 or u == v or u not in secs[v]:
            limited = False
            break
    return WitnessReport(True, guarded, limited and guarded)


# ------------------------------------------------------------------- JSON

def witness_to_dict(w: Witness) -> dict:
    doc = chart_to_dict(w.base)
    doc["marking"] = [
        {"from": s, "label": a, "to": t, "level": w.marking[(s, a, t)]}
        for s, a, t in sorted(w.marking)
    ]
    return doc


def witness_from_dict(doc) -> Witness:
    chart = chart_from_dict(doc)
    marks = doc.get("marking")
    if not isinstance(marks, list):
        raise ChartError("witness document needs a 'marking' list")
    marking = {}
    for item in marks:
        try:
            t = (item["from"], item["label"], item["to"])
            level = item["level"]
        except (KeyError, TypeError):
            raise ChartError("malformed marking entry") from None
        if t not in chart.transitions:
            raise ChartError(f"marking entry {t} is not a transition")
        if not isinstance(level, int) or level < 0:
            raise ChartError("levels must be natural numbers")
        marking[t] = level
    return Witness(chart, marking)


def witness_from_levels(c: OneChart, levels: dict) -> Witness:
    """Witness that marks the listed transitions and everything else 0."""
    marking = {t: 0 for t in c.transitions}
    for t, n in levels.items():
        if t not in c.transitions:
            raise UnknownVertex(t)
        marking[t] = n
    return Witness(c, marking)
