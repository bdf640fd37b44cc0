"""Generalized pseudo-quadratic forms over finite fields, F_2(t) and H(Q)."""

from __future__ import annotations

__version__ = "0.1.0"

from .admissible import AdmissiblePair, ClosedSubgroup, validate_pair
from .classify import classify, hull, recover_sesquilinear, EmbeddedGeometry
from .errors import GPQError, ParseError
from .forms import GenPseudoQuadraticForm, SesquilinearForm, SingularBasis
from .polar import PolarSpace, polar_space
from .quotcov import cover_form, dominant_cover, quotient_form
from .scalars import field, funcfield2, quaternions, rationals, parse_ring

__all__ = [
    "AdmissiblePair", "ClosedSubgroup", "validate_pair",
    "classify", "hull", "recover_sesquilinear", "EmbeddedGeometry",
    "GPQError", "ParseError",
    "GenPseudoQuadraticForm", "SesquilinearForm", "SingularBasis",
    "PolarSpace", "polar_space",
    "cover_form", "dominant_cover", "quotient_form",
    "field", "funcfield2", "quaternions", "rationals", "parse_ring",
]
