"""Desk-scale computations with relatively hyperbolic groups."""

from .algebra import Factor, FreeProductGroup, GeneratorSymbol, Letter
from .errors import Tri
from .presented import PresentedGroup
from .spec import load_group, load_subgroup, validate_spec

__all__ = [
    "Factor",
    "FreeProductGroup",
    "GeneratorSymbol",
    "Letter",
    "PresentedGroup",
    "Tri",
    "load_group",
    "load_subgroup",
    "validate_spec",
]
