"""Mil proof corpus shipped as JSON package data."""

from __future__ import annotations

import json
from importlib import resources


def names() -> list:
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir() if p.name.endswith(".json"))


def proof_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")


def load(name: str) -> dict:
    return json.loads(proof_path(name).read_text(encoding="utf-8"))
