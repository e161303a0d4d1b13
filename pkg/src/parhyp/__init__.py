"""Polynomial solutions mod p of Gauss-Manin equations for families of
parallelly transported hyperplanes, with point counting and Bethe ansatz."""
from __future__ import annotations

import json
from importlib import resources

from .arrangement import ArrangementFamily

__version__ = "0.1.0"

EXAMPLES = ("example-k1n3", "example-k1n4", "example-k2n4", "example-k2n5", "example-kappa3")


def load_example(name: str) -> ArrangementFamily:
    """One of the bundled families, by file stem."""
    name = name.removesuffix(".json")
    text = resources.files("parhyp.data").joinpath(f"{name}.json").read_text()
    return ArrangementFamily.from_dict(json.loads(text))
