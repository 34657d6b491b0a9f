"""Numerical toolkit for skew-product flows over torus rotations.

Submodules: base_flow, cocycle, attractor, spectrum, reduction, cli.
"""
from .base_flow import BaseFlow, advance, base_metric, ergodic_average
from .cocycle import FlowPoint, VectorField, cocycle_defect, evolve, fast_evolve
from .integrate import FlowConfig

__version__ = "0.1.0"

__all__ = [
    "BaseFlow", "advance", "base_metric", "ergodic_average",
    "FlowPoint", "VectorField", "cocycle_defect", "evolve", "fast_evolve",
    "FlowConfig",
]
