"""Quiver mutation and the mutation classes of Dynkin types A and D.

Quivers are loop-free, 2-cycle-free directed multigraphs stored as
skew-symmetric integer matrices.  The package provides the mutation
operation, canonical forms for isomorphism testing, recognition of type-A
and type-D mutation-class members from their local structure, exhaustive
class enumeration with cross-validation against a constructive grammar, and
explicit mutation sequences reducing class members to the standard quivers.
"""

from .quiver import (
    Arrow,
    LabelOutOfRangeError,
    LoopArrowError,
    Quiver,
    QuiverError,
    TwoCycleError,
    UndirectedCycle,
    apply_sequence,
    build_quiver,
    components,
    full_subquiver,
    linear_a,
    mutate,
    oriented_cycle,
    standard_d,
    undirected_cycles,
    valency,
)
from .iso import (
    CanonicalQuiver,
    are_isomorphic,
    canonical_form,
    canonical_key,
    find_isomorphism,
    permute,
)
from .recognize import (
    NotTypeAError,
    Spike,
    TypeAFailure,
    TypeAReport,
    TypeIIIWitness,
    TypeIIWitness,
    TypeIVWitness,
    TypeIWitness,
    Witness,
    check_type_a,
    classify_type_d,
    connecting_vertices,
    is_simple,
    validate_witness,
)
from .classgen import (
    CapExceededError,
    GenReport,
    MutationClass,
    TransitionRow,
    cross_validate,
    enumerate_class,
    generate_type_a,
    generate_type_d,
    transition_table,
)
from .reduce import (
    Certificate,
    MutationSequence,
    NotConnectingError,
    NotTypeDError,
    certify,
    linearize_piece,
    reduce_to_standard,
)

__version__ = "0.1.0"

__all__ = [
    "Arrow",
    "CanonicalQuiver",
    "CapExceededError",
    "Certificate",
    "GenReport",
    "LabelOutOfRangeError",
    "LoopArrowError",
    "MutationClass",
    "MutationSequence",
    "NotConnectingError",
    "NotTypeAError",
    "NotTypeDError",
    "Quiver",
    "QuiverError",
    "Spike",
    "TransitionRow",
    "TwoCycleError",
    "TypeAFailure",
    "TypeAReport",
    "TypeIIIWitness",
    "TypeIIWitness",
    "TypeIVWitness",
    "TypeIWitness",
    "UndirectedCycle",
    "Witness",
    "apply_sequence",
    "are_isomorphic",
    "build_quiver",
    "canonical_form",
    "canonical_key",
    "certify",
    "check_type_a",
    "classify_type_d",
    "components",
    "connecting_vertices",
    "cross_validate",
    "enumerate_class",
    "find_isomorphism",
    "full_subquiver",
    "generate_type_a",
    "generate_type_d",
    "is_simple",
    "linear_a",
    "linearize_piece",
    "mutate",
    "oriented_cycle",
    "permute",
    "reduce_to_standard",
    "standard_d",
    "transition_table",
    "undirected_cycles",
    "validate_witness",
    "valency",
]
