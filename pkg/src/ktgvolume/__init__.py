"""Colored Jones invariants and volumes of knotted trivalent graphs."""

from .ktgmodel import MoveSequence, apply_move, augment, parse_sequence, serialize, standard_tetrahedron
from .jonesengine import augmented_closed_form, build_expression, eval_at_root, eval_generic
from .octgeom import build_gluing, verify_gluing, vol_oct, volume

__all__ = [
    "MoveSequence", "apply_move", "augment", "parse_sequence", "serialize", "standard_tetrahedron",
    "augmented_closed_form", "build_expression", "eval_at_root", "eval_generic",
    "build_gluing", "verify_gluing", "vol_oct", "volume",
]
