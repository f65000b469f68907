"""Exact engine for BFZ quivers as dimer models on Dynkin-diagram cylinders."""

from .cartan import GeneralizedCartanMatrix, DynkinGraph, build_gcm, reflect, is_reduced, enumerate_weyl
from .errors import CapError, DimerBfzError, ReplayError, UnsupportedDiagramError, ValidationError

__all__ = [
    "GeneralizedCartanMatrix",
    "DynkinGraph",
    "build_gcm",
    "reflect",
    "is_reduced",
    "enumerate_weyl",
    "CapError",
    "DimerBfzError",
    "ReplayError",
    "UnsupportedDiagramError",
    "ValidationError",
]
