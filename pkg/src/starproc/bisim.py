"""1-bisimilarity, slices, transfer functions, substates and collapse."""

from __future__ import annotations

from dataclasses import dataclass

from .chart import OneChart
from .errors import PartialMapGap, UnknownVertex


@dataclass(frozen=True)
class Partition:
    blocks: tuple  # tuple of sorted tuples of vertices
    block_of: dict

    def same(self, u, v) -> bool:
        return self.block_of[u] == self.block_of[v]

    def nontrivial(self) -> list:
        return [b for b in self.blocks if len(b) > 1]

    def pairs(self) -> list:
        """Unordered pairs of distinct bisimilar vertices, sorted."""
        out = []
        for b in self.blocks:
            for i, u in enumerate(b):
                for v in b[i + 1:]:
                    out.append((u, v))
        return out


def bisimilarity_partition(c: OneChart) -> Partition:
    """Coarsest stable partition of the induced chart, by signature refinement."""
    order = c.order
    index = {v: (1 if v in c.induced_terminating else 0) for v in order}
    count = len(set(index.values()))
    steps = {v: tuple(c.induced[v]) for v in order}
    while True:
        sigs = {}
        new_index = {}
        for v in order:
            sig = (index[v], frozenset((a, index[w]) for a, w in steps[v]))
            new_index[v] = sigs.setdefault(sig, len(sigs))
        index = new_index
        if len(sigs) == count:
            break
        count = len(sigs)
    groups = {}
    for v in order:
        groups.setdefault(index[v], []).append(v)
    blocks = tuple(sorted(tuple(g) for g in groups.values()))
    block_of = {v: i for i, b in enumerate(blocks) for v in b}
    return Partition(blocks, block_of)


def disjoint_union(c: OneChart, d: OneChart, left="L:", right="R:") -> OneChart:
    """Union of two structures with prefixed ids; the start is that of ``c``."""
    def tag(chart, p):
        return (
            {p + v for v in chart.vertices},
            {(p + s, a, p + t) for s, a, t in chart.transitions},
            {p + v for v in chart.terminating},
        )

    v1, t1, f1 = tag(c, left)
    v2, t2, f2 = tag(d, right)
    start = None if c.start is None else left + c.start
    return OneChart(
        frozenset(v1 | v2), c.alphabet | d.alphabet, start, frozenset(t1 | t2), frozenset(f1 | f2)
    )


def onebisimilar(c: OneChart, d: OneChart) -> bool:
    """Whether the start vertices of the two charts are 1-bisimilar."""
    u = disjoint_union(c, d)
    part = bisimilarity_partition(u)
    return part.same("L:" + c.start, "R:" + d.start)


def bisimilar_vertices(c: OneChart, v, d: OneChart, w) -> bool:
    u = disjoint_union(c, d)
    return bisimilarity_partition(u).same("L:" + v, "R:" + w)


def _norm_pairs(r) -> set:
    if isinstance(r, dict):
        return set(r.items())
    return {tuple(p) for p in r}


def _slice_ok(pairs, c, d, restrict: bool) -> bool:
    dom = {p for p, _ in pairs}
    cod = {q for _, q in pairs}
    rel = {}
    for p, q in pairs:
        rel.setdefault(p, set()).add(q)
    for v1, v2 in pairs:
        if (v1 in c.induced_terminating) != (v2 in d.induced_terminating):
            return False
        steps1 = c.induced[v1]
        steps2 = d.induced[v2]
        for a, w1 in steps1:
            if restrict and w1 not in dom:
                continue
            if not any(b == a and w2 in rel.get(w1, ()) for b, w2 in steps2):
                return False
        for a, w2 in steps2:
            if restrict and w2 not in cod:
                continue
            if not any(b == a and w2 in rel.get(w1, ()) for b, w1 in steps1):
                return False
    return True


def check_onebisimulation(r, c: OneChart, d: OneChart, require_start: bool = True) -> bool:
    """Whether the relation ``r`` (pairs or dict) is a 1-bisimulation from c to d."""
    pairs = _norm_pairs(r)
    if not pairs:
        return False
    for p, q in pairs:
        if p not in c.vertices or q not in d.vertices:
            return False
    if require_start:
        if c.start is None or d.start is None or (c.start, d.start) not in pairs:
            return False
    return _slice_ok(pairs, c, d, restrict=False)


def check_bisimulating_slice(r, c: OneChart, d: OneChart) -> bool:
    pairs = _norm_pairs(r)
    if not pairs or any(p not in c.vertices or q not in d.vertices for p, q in pairs):
        return False
    return _slice_ok(pairs, c, d, restrict=True)


def check_grounded_slice(b, l: OneChart, partition: Partition | None = None) -> bool:
    """Whether ``b`` is a grounded 1-bisimulation slice on the 1-LTS ``l``."""
    pairs = _norm_pairs(b)
    if not check_bisimulating_slice(pairs, l, l):
        return False
    part = partition or bisimilarity_partition(l)
    if not all(part.same(p, q) for p, q in pairs):
        return False
    dom = {p for p, _ in pairs}
    cod = {q for _, q in pairs}
    for v1, v2 in pairs:
        s1 = l.induced[v1]
        s2 = l.induced[v2]
        for a, w in s1:
            if w not in dom and not ((a, w) in s2 and w not in cod):
                return False
        for a, w in s2:
            if w not in cod and not ((a, w) in s1 and w not in dom):
                return False
    return True


def check_transfer_function(f: dict, c: OneChart, d: OneChart) -> bool:
    """Whether the graph of the partial map ``f`` is a 1-bisimulation.

    The start condition is enforced when both structures have a start.
    """
    require_start = c.start is not None and d.start is not None
    return check_onebisimulation(set(f.items()), c, d, require_start=require_start)


def substate(c: OneChart, w1, w2, partition: Partition | None = None) -> bool:
    c.check_vertex(w1)
    c.check_vertex(w2)
    part = partition or bisimilarity_partition(c)
    if w1 in c.induced_terminating and w2 not in c.induced_terminating:
        return False
    steps2 = c.induced[w2]
    for a, x in c.induced[w1]:
        if not any(b == a and part.same(x, y) for b, y in steps2):
            return False
    return True


def collapse(c: OneChart, partition: Partition | None = None):
    """Quotient of the induced chart; returns (chart, class map).

    Each class is named after its least member.
    """
    part = partition or bisimilarity_partition(c)
    rep = {v: part.blocks[part.block_of[v]][0] for v in c.vertices}
    vertices = frozenset(rep.values())
    transitions = frozenset((rep[v], a, rep[w]) for v in c.vertices for a, w in c.induced[v])
    terminating = frozenset(rep[v] for v in c.induced_terminating)
    start = None if c.start is None else rep[c.start]
    return OneChart(vertices, c.alphabet, start, transitions, terminating), rep


def is_one_collapsed(c: OneChart, vertices=None, partition: Partition | None = None) -> bool:
    part = partition or bisimilarity_partition(c)
    scope = c.vertices if vertices is None else set(vertices)
    seen = set()
    for v in scope:
        b = part.block_of[v]
        if b in seen:
            return False
        seen.add(b)
    return True


def transfer_relation_solution(f: dict, s, start=None):
    """Pull a solution back along ``f``: s'(v) = s(f(v))."""
    from .extract import SolutionFn

    values = {}
    for v, w in f.items():
        if w not in s.values:
            raise PartialMapGap(f"no solution value for image {w!r} of {v!r}")
        values[v] = s.values[w]
    if start is not None and start not in values:
        raise PartialMapGap(f"map is undefined at the start vertex {start!r}")
    return SolutionFn(values, start)


def compose_maps(f: dict, g: dict) -> dict:
    """f after g, defined where both are."""
    return {v: f[w] for v, w in g.items() if w in f}


def check_vertex_pairs(c: OneChart, pairs):
    for p, q in pairs:
        for v in (p, q):
            if v not in c.vertices:
                raise UnknownVertex(v)


def expr_partition(roots, max_vertices: int | None = None) -> dict:
    """Bisimilarity classes of star expressions under the chart interpretation.

    Works directly on the hash-consed expression graph reachable from
    ``roots`` and returns a map expression -> class index.
    """
    from .expr import DEFAULT_VERTEX_CAP, reachable, step, terminates

    cap = max_vertices or DEFAULT_VERTEX_CAP
    nodes = []
    seen = set()
    for r in roots:
        if r in seen:
            continue
        for n in reachable(r, cap):
            if n not in seen:
                seen.add(n)
                nodes.append(n)
        if len(nodes) > cap:
            from .errors import VertexCapExceeded

            raise VertexCapExceeded(f"expression charts exceed {cap} vertices")
    index = {n: int(terminates(n)) for n in nodes}
    count = len(set(index.values()))
    steps = {n: tuple(step(n)) for n in nodes}
    while True:
        sigs = {}
        new_index = {}
        for n in nodes:
            sig = (index[n], frozenset((a, index[t]) for a, t in steps[n]))
            new_index[n] = sigs.setdefault(sig, len(sigs))
        index = new_index
        if len(sigs) == count:
            return index
        count = len(sigs)


def exprs_bisimilar(e, f, max_vertices: int | None = None) -> bool:
    classes = expr_partition([e, f], max_vertices)
    return classes[e] == classes[f]
