"""Two-floor elevations of 1-LTSs and lifting of local transfer functions."""

from __future__ import annotations

from dataclasses import dataclass

from .bisim import check_grounded_slice, check_transfer_function
from .chart import OneChart
from .errors import NotALocalTransfer, UnknownVertex
from .expr import EMPTY_STEP


def lift_id(v, floor: int) -> str:
    return f"{v}#{floor}"


def ground_id(lifted: str) -> str:
    base, _, floor = lifted.rpartition("#")
    if floor not in ("0", "1"):
        raise UnknownVertex(lifted)
    return base


@dataclass(frozen=True)
class Elevation:
    base: OneChart
    lifted: OneChart
    witness_set: frozenset

    def projection(self) -> dict:
        return {x: ground_id(x) for x in self.lifted.vertices}


@dataclass(frozen=True)
class ElevationReport:
    projection_is_transfer: bool
    lift_is_transfer: bool
    square_commutes: bool

    @property
    def ok(self) -> bool:
        return self.projection_is_transfer and self.lift_is_transfer and self.square_commutes


def elevate(l: OneChart, wset) -> Elevation:
    """Ground floor copies ``l``; first-floor proper steps leaving ``wset`` drop down.

    The result is a rootless 1-LTS with ids ``v#0`` and ``v#1``.
    """
    wset = frozenset(wset)
    for v in wset:
        l.check_vertex(v)
    vertices = set()
    transitions = set()
    terminating = set()
    for v in l.vertices:
        for floor in (0, 1):
            vertices.add(lift_id(v, floor))
            if v in l.terminating:
                terminating.add(lift_id(v, floor))
    for src, label, tgt in l.transitions:
        transitions.add((lift_id(src, 0), label, lift_id(tgt, 0)))
        up = 1 if (label == EMPTY_STEP or tgt in wset) else 0
        transitions.add((lift_id(src, 1), label, lift_id(tgt, up)))
    lifted = OneChart(frozenset(vertices), l.alphabet, None, frozenset(transitions), frozenset(terminating))
    return Elevation(l.as_lts(), lifted, wset)


def is_local_transfer(phi: dict, l: OneChart) -> bool:
    return bool(phi) and check_grounded_slice(set(phi.items()), l.as_lts())


def lift_local_transfer(phi: dict, l: OneChart):
    """Elevation over dom(phi) ∩ ran(phi) and the lifted map; returns (Elevation, map)."""
    for v, w in phi.items():
        l.check_vertex(v)
        l.check_vertex(w)
    if not is_local_transfer(phi, l):
        raise NotALocalTransfer("the map's graph is not a grounded 1-bisimulation slice")
    wset = frozenset(phi) & frozenset(phi.values())
    elev = elevate(l, wset)
    lifted = {lift_id(v, 0): lift_id(v, 0) for v in l.vertices}
    for v, w in phi.items():
        lifted[lift_id(v, 1)] = lift_id(w, 1)
    return elev, lifted


def verify_elevation(phi: dict, l: OneChart) -> ElevationReport:
    elev, lifted = lift_local_transfer(phi, l)
    proj = elev.projection()
    proj_ok = check_transfer_function(proj, elev.lifted, elev.base)
    lift_ok = check_transfer_function(lifted, elev.lifted, elev.lifted)
    square = all(proj[lifted[lift_id(v, 1)]] == phi[proj[lift_id(v, 1)]] for v in phi)
    return ElevationReport(proj_ok, lift_ok, square)
