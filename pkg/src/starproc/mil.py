"""Proof-term checker for Milner's system and its purely equational fragment.

Proof terms are JSON-shaped trees::

    {"rule": "A10", "sub": {"e": "a"}}
    {"rule": "trans", "args": [p, q]}
    {"rule": "rsp", "args": [p]}          # p proves e = f·e + g

Metavariable bindings in ``sub`` are expression strings or parsed expressions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import GuardViolation, ParseError, ProofError, RSPNotAllowed
from .expr import ONE, ZERO, Prod, StarExpr, Star, Sum, parse, terminates, to_str

MIL = "Mil"
MIL_MINUS = "MilMinus"


@dataclass(frozen=True)
class Equation:
    lhs: StarExpr
    rhs: StarExpr

    def __str__(self):
        return f"{to_str(self.lhs)} = {to_str(self.rhs)}"

    def flipped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)


def _axioms():
    return {
        "A1": (("e", "f", "g"), lambda e, f, g: (Sum(e, Sum(f, g)), Sum(Sum(e, f), g))),
        "A2": (("e",), lambda e: (Sum(e, ZERO), e)),
        "A3": (("e", "f"), lambda e, f: (Sum(e, f), Sum(f, e))),
        "A4": (("e",), lambda e: (Sum(e, e), e)),
        "A5": (("e", "f", "g"), lambda e, f, g: (Prod(e, Prod(f, g)), Prod(Prod(e, f), g))),
        "A6": (("e", "f", "g"), lambda e, f, g: (Prod(Sum(e, f), g), Sum(Prod(e, g), Prod(f, g)))),
        "A7": (("e",), lambda e: (e, Prod(ONE, e))),
        "A8": (("e",), lambda e: (e, Prod(e, ONE))),
        "A9": (("e",), lambda e: (ZERO, Prod(ZERO, e))),
        "A10": (("e",), lambda e: (Star(e), Sum(ONE, Prod(e, Star(e))))),
        "A11": (("e",), lambda e: (Star(e), Star(Sum(ONE, e)))),
    }


AXIOMS = _axioms()


def _expr(value, path) -> StarExpr:
    if isinstance(value, StarExpr):
        return value
    if isinstance(value, str):
        try:
            return parse(value)
        except ParseError as exc:
            raise ProofError(f"bad expression {value!r}: {exc}", path) from None
    raise ProofError(f"expected an expression, got {value!r}", path)


def instantiate_axiom(name: str, substitution: dict, path=()) -> Equation:
    if name not in AXIOMS:
        raise ProofError(f"unknown axiom {name!r}", path)
    metavars, build = AXIOMS[name]
    missing = [m for m in metavars if m not in substitution]
    if missing:
        raise ProofError(f"axiom {name} needs a binding for {missing[0]!r}", path)
    args = [_expr(substitution[m], path) for m in metavars]
    lhs, rhs = build(*args)
    return Equation(lhs, rhs)


_ARITY = {"refl": 0, "sym": 1, "trans": 2, "cong_sum": 2, "cong_prod": 2, "cong_star": 1, "rsp": 1}


def check_proof(p, system: str = MIL, path=()) -> Equation:
    """Return the equation proved by ``p`` or raise ProofError with a node path."""
    if system not in (MIL, MIL_MINUS):
        raise ValueError(f"unknown proof system {system!r}")
    if not isinstance(p, dict) or "rule" not in p:
        raise ProofError("a proof node must be an object with a 'rule'", path)
    rule = p["rule"]
    args = p.get("args", [])
    sub = p.get("sub", {})
    if not isinstance(args, list) or not isinstance(sub, dict):
        raise ProofError("'args' must be a list and 'sub' an object", path)
    here = tuple(path) + (rule,)
    if rule in AXIOMS:
        if args:
            raise ProofError(f"axiom {rule} takes no subproofs", here)
        return instantiate_axiom(rule, sub, here)
    if rule not in _ARITY:
        raise ProofError(f"unknown rule {rule!r}", here)
    if len(args) != _ARITY[rule]:
        raise ProofError(f"rule {rule} expects {_ARITY[rule]} subproof(s), got {len(args)}", here)
    if rule == "rsp" and system == MIL_MINUS:
        raise RSPNotAllowed("the fixed-point rule is not part of the equational fragment", here)
    prems = [check_proof(q, system, here + (i,)) for i, q in enumerate(args)]
    if rule == "refl":
        if "e" not in sub:
            raise ProofError("refl needs a binding for 'e'", here)
        e = _expr(sub["e"], here)
        return Equation(e, e)
    if rule == "sym":
        return prems[0].flipped()
    if rule == "trans":
        first, second = prems
        if first.rhs is not second.lhs:
            raise ProofError(
                f"transitivity mismatch: {to_str(first.rhs)} vs {to_str(second.lhs)}", here
            )
        return Equation(first.lhs, second.rhs)
    if rule == "cong_sum":
        return Equation(Sum(prems[0].lhs, prems[1].lhs), Sum(prems[0].rhs, prems[1].rhs))
    if rule == "cong_prod":
        return Equation(Prod(prems[0].lhs, prems[1].lhs), Prod(prems[0].rhs, prems[1].rhs))
    if rule == "cong_star":
        return Equation(Star(prems[0].lhs), Star(prems[0].rhs))
    # rsp
    eq = prems[0]
    e, rhs = eq.lhs, eq.rhs
    if not (isinstance(rhs, Sum) and isinstance(rhs.left, Prod) and rhs.left.right is e):
        raise ProofError(f"premise {eq} is not of the shape e = f·e + g", here)
    f, g = rhs.left.left, rhs.right
    if terminates(f):
        raise GuardViolation(f"the factor {to_str(f)} terminates immediately", here)
    return Equation(e, Prod(Star(f), g))


def load_proof(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProofError(f"invalid JSON: {exc}") from None


# helpers for building proof trees in code

def ax(name: str, **sub) -> dict:
    return {"rule": name, "sub": {k: to_str(v) if isinstance(v, StarExpr) else v for k, v in sub.items()}}


def node(rule: str, *args, **sub) -> dict:
    doc = {"rule": rule, "args": list(args)}
    if sub:
        doc["sub"] = {k: to_str(v) if isinstance(v, StarExpr) else v for k, v in sub.items()}
    return doc
