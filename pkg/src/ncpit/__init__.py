"""Automata-based identity testing for noncommutative arithmetic circuits."""

from .algebra import RATIONALS, Field, FieldElement, SquareMatrix, solve_nullspace
from .circuit import ArithCircuit, BoolCircuit, CircuitBuilder, parse_circuit, serialize
from .ncpoly import NcPoly
from .pit import construct_fooling_polynomial, extract_coefficient, ks_commutative_pit, nc_pit

__version__ = "0.1.0"

__all__ = [
    "RATIONALS", "Field", "FieldElement", "SquareMatrix", "solve_nullspace",
    "ArithCircuit", "BoolCircuit", "CircuitBuilder", "parse_circuit", "serialize",
    "NcPoly", "nc_pit", "ks_commutative_pit", "extract_coefficient", "construct_fooling_polynomial",
]
