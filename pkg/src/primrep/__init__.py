"""Primitive representation of binary forms by integral lattices.

Exact-arithmetic tools: lattice enumeration, p-adic structure, escalation
of candidate lattices, transfer constructions, and verification suites.
"""

from .gram import (
    GramMatrix,
    ReducedBinaryForm,
    SpanWitness,
    binary_cmp,
    determinant,
    diag_lattice,
    eye,
    is_primitive_span,
    is_primitive_vector,
    minkowski_reduce,
    orthogonal_sum,
    osum,
    reduced_forms_up_to,
    section,
    HYPERBOLIC,
    EVEN_ANISO,
)

__version__ = "0.1.0"
