"""Morse strata of solids under a constant field, marked spines and bounds."""

__version__ = "0.1.0"

from .errors import ArtifactError
from .mesh import TriMesh, load_off, parse_off
from .strata import stratify
from .tangle import detect_double_tangents

__all__ = ["ArtifactError", "TriMesh", "load_off", "parse_off", "stratify",
           "detect_double_tangents", "__version__"]
