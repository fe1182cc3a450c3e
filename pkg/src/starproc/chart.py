"""1-charts and 1-LTSs: data model, induced charts, subcharts, JSON and DOT."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import ChartError, UnknownVertex
from .expr import EMPTY_STEP

Transition = tuple  # (source, label, target)


@dataclass(frozen=True, eq=True)
class OneChart:
    """A finite labelled transition system with empty steps and termination.

    ``start`` is None for a rootless 1-LTS.
    """

    vertices: frozenset
    alphabet: frozenset
    start: str | None
    transitions: frozenset
    terminating: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for name in ("vertices", "alphabet", "transitions", "terminating"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
        if EMPTY_STEP in self.alphabet:
            raise ChartError("the empty-step label cannot be a proper action")
        if self.start is not None and self.start not in self.vertices:
            raise ChartError(f"start vertex {self.start!r} is not a vertex")
        for src, label, tgt in self.transitions:
            if src not in self.vertices or tgt not in self.vertices:
                raise ChartError(f"dangling transition {src!r} -{label}-> {tgt!r}")
            if label != EMPTY_STEP and label not in self.alphabet:
                raise ChartError(f"label {label!r} is not in the alphabet")
        if not self.terminating <= self.vertices:
            raise ChartError("terminating vertices must be vertices")

    # ------------------------------------------------------------ indexes

    @cached_property
    def order(self) -> list:
        return sorted(self.vertices)

    @cached_property
    def out(self) -> dict:
        table = {v: [] for v in self.vertices}
        for t in sorted(self.transitions):
            table[t[0]].append(t)
        return table

    @cached_property
    def incoming(self) -> dict:
        table = {v: [] for v in self.vertices}
        for t in sorted(self.transitions):
            table[t[2]].append(t)
        return table

    @cached_property
    def one_closure(self) -> dict:
        """Vertices reachable from each vertex by empty steps (including itself)."""
        one_succ = {v: [] for v in self.vertices}
        for src, label, tgt in self.transitions:
            if label == EMPTY_STEP:
                one_succ[src].append(tgt)
        closure = {}
        for v in self.vertices:
            seen = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in one_succ[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            closure[v] = frozenset(seen)
        return closure

    @cached_property
    def induced(self) -> dict:
        """Induced proper steps per vertex, as frozensets of (action, target)."""
        table = {}
        for v in self.vertices:
            steps = set()
            for u in self.one_closure[v]:
                for _, label, tgt in self.out[u]:
                    if label != EMPTY_STEP:
                        steps.add((label, tgt))
            table[v] = frozenset(steps)
        return table

    @cached_property
    def induced_terminating(self) -> frozenset:
        return frozenset(v for v in self.vertices if self.one_closure[v] & self.terminating)

    @property
    def is_lts(self) -> bool:
        return self.start is None

    @property
    def one_transitions(self) -> list:
        return sorted(t for t in self.transitions if t[1] == EMPTY_STEP)

    def check_vertex(self, v):
        if v not in self.vertices:
            raise UnknownVertex(v)

    def reachable(self, roots: Iterable | None = None, transitions=None) -> set:
        """Vertices reachable from ``roots`` (default: the start, or all for an LTS)."""
        if roots is None:
            roots = self.vertices if self.start is None else [self.start]
        if transitions is None:
            succ = self.out
        else:
            succ = {}
            for t in transitions:
                succ.setdefault(t[0], []).append(t)
        seen = set(roots)
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for _, _, w in succ.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    def replace(self, **changes) -> "OneChart":
        fields = dict(
            vertices=self.vertices,
            alphabet=self.alphabet,
            start=self.start,
            transitions=self.transitions,
            terminating=self.terminating,
        )
        fields.update(changes)
        return OneChart(**fields)

    def restrict(self, keep) -> "OneChart":
        keep = frozenset(keep)
        return self.replace(
            vertices=keep,
            transitions=frozenset(t for t in self.transitions if t[0] in keep and t[2] in keep),
            terminating=self.terminating & keep,
        )

    def prune(self) -> "OneChart":
        """Drop everything unreachable from the start (no-op for an LTS)."""
        if self.start is None:
            return self
        return self.restrict(self.reachable())

    def as_lts(self) -> "OneChart":
        return self.replace(start=None)

    def with_start(self, start) -> "OneChart":
        return self.replace(start=start)

    def __repr__(self):
        kind = "OneLTS" if self.start is None else "OneChart"
        return (
            f"{kind}(|V|={len(self.vertices)}, |T|={len(self.transitions)}, "
            f"start={self.start!r})"
        )


def make_chart(transitions, start=None, terminating=(), vertices=(), alphabet=()) -> OneChart:
    """Convenience constructor: vertices and alphabet are inferred from the transitions."""
    transitions = frozenset(tuple(t) for t in transitions)
    verts = set(vertices) | set(terminating)
    acts = set(alphabet)
    for src, label, tgt in transitions:
        verts.update((src, tgt))
        if label != EMPTY_STEP:
            acts.add(label)
    if start is not None:
        verts.add(start)
    return OneChart(frozenset(verts), frozenset(acts), start, transitions, frozenset(terminating))


def induced_chart(c: OneChart) -> OneChart:
    """The 1-transition-free chart of induced transitions and induced termination."""
    transitions = frozenset((v, a, w) for v in c.vertices for a, w in c.induced[v])
    return c.replace(transitions=transitions, terminating=c.induced_terminating)


def weakly_guarded(c: OneChart) -> bool:
    """True iff there is no cycle of empty steps."""
    one_succ = {v: [] for v in c.vertices}
    for src, label, tgt in c.transitions:
        if label == EMPTY_STEP:
            one_succ[src].append(tgt)
    return is_acyclic(one_succ)


def is_acyclic(succ: dict) -> bool:
    """Iterative three-colour DFS over an adjacency mapping."""
    state = {}
    for root in succ:
        if root in state:
            continue
        state[root] = 1
        stack = [(root, iter(succ.get(root, ())))]
        while stack:
            node, it = stack[-1]
            for nxt in it:
                mark = state.get(nxt)
                if mark == 1:
                    return False
                if mark is None:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    break
            else:
                state[node] = 2
                stack.pop()
    return True


def generated_subchart(c: OneChart, w) -> OneChart:
    c.check_vertex(w)
    return c.replace(start=w).prune()


def sccs(c: OneChart, nontrivial: bool = True) -> list:
    """Strongly connected components, as sorted lists, in a stable order.

    With ``nontrivial`` only components carrying a cycle are returned.
    """
    import networkx as nx

    g = nx.DiGraph()
    g.add_nodes_from(c.vertices)
    g.add_edges_from((s, t) for s, _, t in c.transitions)
    comps = []
    for comp in nx.strongly_connected_components(g):
        if nontrivial and len(comp) == 1:
            (v,) = comp
            if not g.has_edge(v, v):
                continue
        comps.append(sorted(comp))
    return sorted(comps)


# ------------------------------------------------------------------- JSON

def chart_to_dict(c: OneChart) -> dict:
    doc = {
        "alphabet": sorted(c.alphabet),
        "vertices": [{"id": v, "terminating": v in c.terminating} for v in c.order],
        "start": c.start,
        "transitions": [{"from": s, "label": a, "to": t} for s, a, t in sorted(c.transitions)],
    }
    if c.start is None:
        del doc["start"]
    return doc


def chart_from_dict(doc) -> OneChart:
    if not isinstance(doc, dict):
        raise ChartError("chart document must be a JSON object")
    try:
        alphabet = doc.get("alphabet", [])
        verts = doc["vertices"]
        trans = doc.get("transitions", [])
        if not isinstance(alphabet, list) or not isinstance(verts, list) or not isinstance(trans, list):
            raise ChartError("alphabet, vertices and transitions must be lists")
        ids = []
        terminating = []
        for item in verts:
            vid = item["id"]
            if not isinstance(vid, str):
                raise ChartError("vertex ids must be strings")
            ids.append(vid)
            if item.get("terminating", False):
                terminating.append(vid)
        if len(set(ids)) != len(ids):
            raise ChartError("duplicate vertex id")
        transitions = []
        for item in trans:
            t = (item["from"], item["label"], item["to"])
            if not all(isinstance(x, str) for x in t):
                raise ChartError("transition fields must be strings")
            transitions.append(t)
    except KeyError as exc:
        raise ChartError(f"missing field {exc.args[0]!r}") from None
    except TypeError:
        raise ChartError("schema violation") from None
    if EMPTY_STEP in alphabet:
        raise ChartError("the empty-step label is reserved and cannot appear in the alphabet")
    start = doc.get("start")
    if start is not None and not isinstance(start, str):
        raise ChartError("start must be a string")
    return OneChart(frozenset(ids), frozenset(alphabet), start, frozenset(transitions), frozenset(terminating))


def encode_chart(c: OneChart) -> bytes:
    return json.dumps(chart_to_dict(c), indent=2, ensure_ascii=False).encode("utf-8")


def decode_chart(data) -> OneChart:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ChartError(f"invalid JSON: {exc}") from None
    return chart_from_dict(doc)


def load_chart(path) -> OneChart:
    with open(path, "rb") as fh:
        return decode_chart(fh.read())


# -------------------------------------------------------------------- DOT

_LEVEL_COLOURS = ["black", "forestgreen", "royalblue", "darkorange", "purple", "firebrick", "teal"]


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', r"\"") + '"'


def to_dot(c: OneChart, marking: dict | None = None, name: str = "chart") -> str:
    """Graphviz source; ``marking`` maps transitions to witness levels."""
    lines = [f"digraph {_q(name)} {{", "  rankdir=TB;"]
    if c.start is not None:
        lines.append('  "__start__" [shape=point, width=0.08];')
    for v in c.order:
        shape = "doublecircle" if v in c.terminating else "circle"
        lines.append(f"  {_q(v)} [shape={shape}];")
    if c.start is not None:
        lines.append(f'  "__start__" -> {_q(c.start)} [arrowhead=normal];')
    for t in sorted(c.transitions):
        src, label, tgt = t
        attrs = []
        if label == EMPTY_STEP:
            attrs += ['label="1"', "style=dashed"]
        else:
            attrs.append(f"label={_q(label)}")
        if marking is not None and marking.get(t, 0) > 0:
            level = marking[t]
            colour = _LEVEL_COLOURS[level % len(_LEVEL_COLOURS)]
            attrs[0] = f'label={_q(("1" if label == EMPTY_STEP else label) + f" [{level}]")}'
            attrs += [f"color={colour}", "penwidth=2"]
        lines.append(f"  {_q(src)} -> {_q(tgt)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
