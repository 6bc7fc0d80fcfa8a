"""Compile multi-target CNOT circuits into 2-D fields of topological primitives."""

from .bounded import synth_bounded
from .circuit import Circuit, CnotGate, NetlistError, parse_circuit, serialize_circuit
from .extract import AmbiguousOrder, ExtractionError, MalformedField, extract
from .field import Field, Primitive, area, parse_field, serialize_field, validate
from .gf2 import TransferMatrix, equivalent, simulate_basis, transfer_matrix
from .unbounded import synth_unbounded

__version__ = "0.1.0"

__all__ = [
    "AmbiguousOrder",
    "Circuit",
    "CnotGate",
    "ExtractionError",
    "Field",
    "MalformedField",
    "NetlistError",
    "Primitive",
    "TransferMatrix",
    "area",
    "equivalent",
    "extract",
    "parse_circuit",
    "parse_field",
    "serialize_circuit",
    "serialize_field",
    "simulate_basis",
    "synth_bounded",
    "synth_unbounded",
    "transfer_matrix",
    "validate",
]
