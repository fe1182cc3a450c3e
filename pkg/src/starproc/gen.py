"""Seeded random generators for star expressions and LLEE-1-charts.

Charts are grown together with their witness: every loop is implanted at a
fresh anchor whose body is acyclic, never terminates and only returns to the
anchor, so the recorded levels replay by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .chart import OneChart
from .expr import EMPTY_STEP, ONE, ZERO, Act, Prod, Star, StarExpr, Sum
from .llee import Witness

LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    max_size: int = 20
    alphabet_size: int = 2
    empty_step_density: float = 0.25
    loop_depth: int = 2
    loop_probability: float = 0.6

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be positive")
        if not 1 <= self.alphabet_size <= len(LETTERS):
            raise ValueError("alphabet_size must lie between 1 and 26")
        if not 0.0 <= self.empty_step_density <= 1.0:
            raise ValueError("empty_step_density must lie in [0, 1]")
        if not 0.0 <= self.loop_probability <= 1.0:
            raise ValueError("loop_probability must lie in [0, 1]")
        if self.loop_depth < 0:
            raise ValueError("loop_depth must be non-negative")

    @property
    def alphabet(self) -> list:
        return list(LETTERS[: self.alphabet_size])

    def rng(self, stream: str = "") -> random.Random:
        # independent streams per purpose, reproducible across platforms
        return random.Random(f"{self.seed}:{stream}")


# -------------------------------------------------------------- expressions

def gen_expr(p: GenParams) -> StarExpr:
    rng = p.rng("expr")
    letters = p.alphabet

    def build(budget: int) -> StarExpr:
        if budget <= 1 or rng.random() < 0.2:
            r = rng.random()
            if r < 0.12:
                return ZERO
            if r < 0.27:
                return ONE
            return Act(rng.choice(letters))
        if budget == 2:
            return Star(build(1))
        r = rng.random()
        if r < 0.25:
            return Star(build(budget - 1))
        left = rng.randint(1, budget - 2)
        right = rng.randint(1, budget - 1 - left)
        cls = Sum if r < 0.62 else Prod
        return cls(build(left), build(right))

    return build(p.max_size)


# ------------------------------------------------------------------- charts

class _Builder:
    def __init__(self, p: GenParams):
        self.p = p
        self.rng = p.rng("chart")
        self.letters = p.alphabet
        self.count = 0
        self.transitions: dict = {}
        self.terminating: set = set()

    def fresh(self) -> str:
        self.count += 1
        return f"s{self.count - 1}"

    def room(self, n: int) -> bool:
        return self.count + n <= self.p.max_size

    def label(self) -> str:
        return self.rng.choice(self.letters)

    def add(self, src, label, tgt, level=0):
        self.transitions[(src, label, tgt)] = max(level, self.transitions.get((src, label, tgt), 0))

    def node(self, cont: list, depth: int, anchor=None) -> tuple:
        """A vertex exiting to ``cont`` (first element always used); returns (id, level)."""
        x = self.fresh()
        level = 0
        if depth > 0 and self.room(1) and self.rng.random() < self.p.loop_probability:
            level = self.implant(x, depth)
        if cont:
            targets = [cont[0]] + [t for t in cont[1:] if self.rng.random() < 0.3]
            for t in targets:
                if t == anchor and self.rng.random() < self.p.empty_step_density:
                    self.add(x, EMPTY_STEP, t)
                else:
                    self.add(x, self.label(), t)
        return x, level

    def implant(self, v, depth: int) -> int:
        size = self.rng.randint(1, 3)
        body = []
        inner = 0
        # build the body back to front so every vertex can exit forward or home
        for _ in range(size):
            if not self.room(1):
                break
            cont = ([body[0]] if body else [v]) + body[1:] + ([v] if body else [])
            b, lvl = self.node(cont, depth - 1, anchor=v)
            body.insert(0, b)
            inner = max(inner, lvl)
        level = inner + 1
        if not body:
            self.add(v, self.label(), v, level)
            return level
        self.add(v, self.label(), body[0], level)
        for b in body[1:]:
            if self.rng.random() < 0.3:
                self.add(v, self.label(), b, level)
        if self.rng.random() < 0.15:
            self.add(v, self.label(), v, level)
        return level


def gen_llee_onechart(p: GenParams) -> tuple:
    """A random 1-chart with a guarded, 1-transition-limited layered witness."""
    b = _Builder(p)
    tops = []
    n_top = b.rng.randint(1, 3)
    for i in range(n_top):
        if tops and not b.room(1):
            break
        x, _ = b.node(list(tops), p.loop_depth)
        tops.insert(0, x)
    # tops[0] is the start; the last created vertex before it sits deeper in the DAG
    for t in tops:
        if b.rng.random() < 0.4:
            b.terminating.add(t)
    if not b.terminating:
        b.terminating.add(tops[-1])
    vertices = frozenset(f"s{i}" for i in range(b.count))
    transitions = frozenset(b.transitions)
    acts = frozenset(b.letters)
    chart = OneChart(vertices, acts, tops[0], transitions, frozenset(b.terminating))
    marking = dict(b.transitions)
    pruned = chart.prune()
    if pruned is not chart:
        marking = {t: n for t, n in marking.items() if t in pruned.transitions}
    return pruned, Witness(pruned, marking)


def gen_chart(p: GenParams, n_vertices: int = 6, density: float = 0.3) -> OneChart:
    """Unstructured random 1-chart, mainly as a source of non-LLEE inputs."""
    rng = p.rng("raw")
    vs = [f"q{i}" for i in range(n_vertices)]
    trans = set()
    for s in vs:
        for t in vs:
            if rng.random() < density:
                label = EMPTY_STEP if rng.random() < p.empty_step_density else rng.choice(p.alphabet)
                trans.add((s, label, t))
    term = {v for v in vs if rng.random() < 0.3}
    return OneChart(frozenset(vs), frozenset(p.alphabet), vs[0], frozenset(trans), frozenset(term)).prune()


# ----------------------------------------------------------- axiom rewrites

def _rewrites(s: StarExpr) -> list:
    """Expressions provably equal to ``s`` by one axiom applied at the root."""
    out = [Sum(s, ZERO), Sum(s, s), Prod(ONE, s), Prod(s, ONE)]
    if isinstance(s, Sum):
        out.append(Sum(s.right, s.left))
        if isinstance(s.right, Sum):
            out.append(Sum(Sum(s.left, s.right.left), s.right.right))
        if isinstance(s.left, Sum):
            out.append(Sum(s.left.left, Sum(s.left.right, s.right)))
        if s.right is ZERO:
            out.append(s.left)
        if s.left is s.right:
            out.append(s.left)
    if isinstance(s, Prod):
        if isinstance(s.right, Prod):
            out.append(Prod(Prod(s.left, s.right.left), s.right.right))
        if isinstance(s.left, Prod):
            out.append(Prod(s.left.left, Prod(s.left.right, s.right)))
        if isinstance(s.left, Sum):
            out.append(Sum(Prod(s.left.left, s.right), Prod(s.left.right, s.right)))
        if s.left is ONE:
            out.append(s.right)
        if s.right is ONE:
            out.append(s.left)
        if s.left is ZERO:
            out.append(ZERO)
    if isinstance(s, Star):
        out.append(Sum(ONE, Prod(s.body, s)))
        out.append(Star(Sum(ONE, s.body)))
    if s is ZERO:
        out.append(Prod(ZERO, s))
    return out


def _positions(e: StarExpr, path=()):
    yield path, e
    for i, child in enumerate(e.children()):
        yield from _positions(child, path + (i,))


def _replace_at(e: StarExpr, path, new: StarExpr) -> StarExpr:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(e, Star):
        return Star(_replace_at(e.body, rest, new))
    kids = list(e.children())
    kids[i] = _replace_at(kids[i], rest, new)
    return type(e)(*kids)


def axiom_rewrite(e: StarExpr, rng: random.Random, steps: int = 1) -> StarExpr:
    """Apply ``steps`` random axiom instances (inside arbitrary contexts) to ``e``."""
    for _ in range(steps):
        path, sub = rng.choice(list(_positions(e)))
        e = _replace_at(e, path, rng.choice(_rewrites(sub)))
    return e
