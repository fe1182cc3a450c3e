"""Star expressions: syntax, parsing, printing and the step semantics.

Nodes are hash-consed, so two structurally equal expressions are the same
Python object. Equality and hashing are therefore identity based and cheap,
which matters because expressions double as chart vertices.
"""

from __future__ import annotations

import re
import sys
import weakref
from collections import deque

from .errors import AlphabetError, ParseError, VertexCapExceeded

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

EMPTY_STEP = "__1__"
DEFAULT_VERTEX_CAP = 100_000

_table: "weakref.WeakValueDictionary[tuple, StarExpr]" = weakref.WeakValueDictionary()


class StarExpr:
    __slots__ = ("_term", "_steps", "_size", "__weakref__")
    prec = 4

    def __setattr__(self, name, value):
        raise AttributeError("star expressions are immutable")

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return (parse, (to_str(self),))

    def __repr__(self):
        return f"{type(self).__name__}({to_str(self)!r})"

    def __str__(self):
        return to_str(self)

    def __lt__(self, other):
        return to_str(self) < to_str(other)

    def children(self):
        return ()

    @property
    def size(self):
        size = self._size
        if size is None:
            size = 1 + sum(c.size for c in self.children())
            object.__setattr__(self, "_size", size)
        return size


def _intern(cls, key, fields):
    node = _table.get(key)
    if node is None:
        node = object.__new__(cls)
        for name, value in fields:
            object.__setattr__(node, name, value)
        object.__setattr__(node, "_term", None)
        object.__setattr__(node, "_steps", None)
        object.__setattr__(node, "_size", None)
        _table[key] = node
    return node


class Zero(StarExpr):
    __slots__ = ()

    def __new__(cls):
        return _intern(cls, ("0",), ())


class One(StarExpr):
    __slots__ = ()

    def __new__(cls):
        return _intern(cls, ("1",), ())


class Act(StarExpr):
    __slots__ = ("letter",)

    def __new__(cls, letter: str):
        if not isinstance(letter, str) or not _LETTER.fullmatch(letter):
            raise AlphabetError(f"invalid action name {letter!r}")
        return _intern(cls, ("a", letter), (("letter", letter),))


class Sum(StarExpr):
    __slots__ = ("left", "right")
    prec = 1

    def __new__(cls, left: StarExpr, right: StarExpr):
        return _intern(cls, ("+", id(left), id(right)), (("left", left), ("right", right)))

    def children(self):
        return (self.left, self.right)


class Prod(StarExpr):
    __slots__ = ("left", "right")
    prec = 2

    def __new__(cls, left: StarExpr, right: StarExpr):
        return _intern(cls, (".", id(left), id(right)), (("left", left), ("right", right)))

    def children(self):
        return (self.left, self.right)


class Star(StarExpr):
    __slots__ = ("body",)
    prec = 3

    def __new__(cls, body: StarExpr):
        return _intern(cls, ("*", id(body)), (("body", body),))

    def children(self):
        return (self.body,)


ZERO = Zero()
ONE = One()


def sum_of(terms) -> StarExpr:
    """Left-nested sum of ``terms``; the empty sum is 0."""
    result = None
    for t in terms:
        result = t if result is None else Sum(result, t)
    return ZERO if result is None else result


def prod_of(factors) -> StarExpr:
    result = None
    for f in factors:
        result = f if result is None else Prod(result, f)
    return ONE if result is None else result


def letters(e: StarExpr) -> set[str]:
    out = set()
    stack = [e]
    seen = set()
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if isinstance(n, Act):
            out.add(n.letter)
        stack.extend(n.children())
    return out


# ---------------------------------------------------------------- printing

def to_str(e: StarExpr, dot: str = "·") -> str:
    if isinstance(e, Zero):
        return "0"
    if isinstance(e, One):
        return "1"
    if isinstance(e, Act):
        return e.letter
    if isinstance(e, Star):
        inner = to_str(e.body, dot)
        return (f"({inner})" if e.body.prec < 3 else inner) + "*"
    if isinstance(e, Sum):
        right = to_str(e.right, dot)
        if e.right.prec <= 1:
            right = f"({right})"
        return f"{to_str(e.left, dot)}+{right}"
    if isinstance(e, Prod):
        left = to_str(e.left, dot)
        if e.left.prec < 2:
            left = f"({left})"
        right = to_str(e.right, dot)
        if e.right.prec <= 2:
            right = f"({right})"
        return f"{left}{dot}{right}"
    raise TypeError(f"not a star expression: {e!r}")


# ----------------------------------------------------------------- parsing

_LETTER = re.compile(r"[a-z][a-zA-Z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<letter>[a-z][a-zA-Z0-9_]*)|(?P<sym>[01()+.·*]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start("letter") if m.group("letter") else m.start("sym")
        tokens.append((m.group("letter") or m.group("sym"), start, bool(m.group("letter"))))
        pos = m.end()
    tokens.append(("<end>", len(text), False))
    return tokens


class _Parser:
    def __init__(self, text, alphabet):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] == "+":
            self.take()
            node = Sum(node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in (".", "·"):
            self.take()
            node = Prod(node, self.factor())
        return node

    def factor(self):
        node = self.atom()
        while self.peek()[0] == "*":
            self.take()
            node = Star(node)
        return node

    def atom(self):
        tok, pos, is_letter = self.take()
        if is_letter:
            if self.alphabet is not None and tok not in self.alphabet:
                raise AlphabetError(f"letter {tok!r} at position {pos} is not in the alphabet")
            return Act(tok)
        if tok == "0":
            return ZERO
        if tok == "1":
            return ONE
        if tok == "(":
            node = self.expr()
            close, cpos, _ = self.take()
            if close != ")":
                raise ParseError(f"expected ')' but found {close!r}", cpos)
            return node
        raise ParseError(f"unexpected token {tok!r}", pos)


def parse(text: str, alphabet=None) -> StarExpr:
    """Parse ``text`` into an expression; raise ParseError/AlphabetError."""
    p = _Parser(text, None if alphabet is None else set(alphabet))
    node = p.expr()
    tok, pos, _ = p.peek()
    if tok != "<end>":
        raise ParseError(f"trailing input {tok!r}", pos)
    return node


# --------------------------------------------------------------- semantics

def terminates(e: StarExpr) -> bool:
    cached = e._term
    if cached is not None:
        return cached
    if isinstance(e, (One, Star)):
        value = True
    elif isinstance(e, (Zero, Act)):
        value = False
    elif isinstance(e, Sum):
        value = terminates(e.left) or terminates(e.right)
    else:
        value = terminates(e.left) and terminates(e.right)
    object.__setattr__(e, "_term", value)
    return value


def step(e: StarExpr) -> frozenset:
    """All pairs (action, target) derivable for ``e`` by the transition rules."""
    cached = e._steps
    if cached is not None:
        return cached
    if isinstance(e, (Zero, One)):
        out = frozenset()
    elif isinstance(e, Act):
        out = frozenset({(e.letter, ONE)})
    elif isinstance(e, Sum):
        out = step(e.left) | step(e.right)
    elif isinstance(e, Star):
        out = frozenset((a, Prod(t, e)) for a, t in step(e.body))
    else:
        out = {(a, Prod(t, e.right)) for a, t in step(e.left)}
        if terminates(e.left):
            out |= step(e.right)
        out = frozenset(out)
    object.__setattr__(e, "_steps", out)
    return out


def reachable(e: StarExpr, max_vertices: int = DEFAULT_VERTEX_CAP) -> list:
    seen = {e}
    order = [e]
    queue = deque([e])
    while queue:
        n = queue.popleft()
        for _, t in step(n):
            if t not in seen:
                seen.add(t)
                order.append(t)
                if len(order) > max_vertices:
                    raise VertexCapExceeded(f"chart interpretation exceeds {max_vertices} vertices")
                queue.append(t)
    return order


def chart_of(e: StarExpr, max_vertices: int = DEFAULT_VERTEX_CAP, alphabet=None):
    """The chart interpretation of ``e``; vertex ids are printed expressions."""
    from .chart import OneChart

    nodes = reachable(e, max_vertices)
    name = {n: to_str(n) for n in nodes}
    transitions = {(name[n], a, name[t]) for n in nodes for a, t in step(n)}
    acts = set(letters(e)) | set(alphabet or ())
    return OneChart(
        vertices=frozenset(name.values()),
        alphabet=frozenset(acts),
        start=name[e],
        transitions=frozenset(transitions),
        terminating=frozenset(name[n] for n in nodes if terminates(n)),
    )
