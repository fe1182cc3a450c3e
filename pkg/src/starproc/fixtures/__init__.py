"""Reference charts and witnesses shipped as JSON package data."""

from __future__ import annotations

import json
from importlib import resources

from ..chart import OneChart, chart_from_dict

NAMES = ("fig1", "fig4", "fig5", "g1", "g2", "g1a", "g2a")
WITNESSES = ("fig1_witness1", "fig1_witness2", "fig1_witness3", "fig4_witness", "fig5_witness")


def fixture_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")


def load_doc(name: str) -> dict:
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))


def load(name: str) -> OneChart:
    return chart_from_dict(load_doc(name))


def load_witness(name: str):
    from ..llee import witness_from_dict

    return witness_from_dict(load_doc(name))
