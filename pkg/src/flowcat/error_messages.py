"""Central catalog of English error messages for flowcat errors."""

from __future__ import annotations

from .error_codes import ErrorCode

_ERROR_MESSAGES: dict[ErrorCode, str] = {
    ErrorCode.INPUT_INVALID_JSON: "Input is not valid JSON.",
    ErrorCode.INPUT_SCHEMA_VIOLATION: "Input does not match the expected schema.",
    ErrorCode.INPUT_UNKNOWN_REFERENCE: "Input references an unknown identifier.",
    ErrorCode.INPUT_DUPLICATE_ID: "Input declares the same identifier twice.",
    ErrorCode.INPUT_INVALID_RATIONAL: (
        "Rational values must be integers, decimals or fractions 'a/b'."
    ),
    ErrorCode.INPUT_FILE_NOT_FOUND: "Input file not found.",
    ErrorCode.CONFIG_INVALID: "Invalid flowcat configuration.",
    ErrorCode.CORNER_UNKNOWN_OBJECT: "Unknown object in corner category.",
    ErrorCode.CORNER_UNKNOWN_ARROW: "Arrow does not belong to the corner category.",
    ErrorCode.CORNER_NOT_FUNCTORIAL: (
        "Codimension must strictly increase along non-identity arrows."
    ),
    ErrorCode.CORNER_NOT_A_POSET: "Overcategory is not a poset.",
    ErrorCode.CORNER_RANK_MISMATCH: (
        "Overcategory rank counts are not binomial coefficients."
    ),
    ErrorCode.CORNER_NOT_BOOLEAN: "Overcategory is not a Boolean lattice.",
    ErrorCode.CORNER_NOT_A_MODEL: "Category is not a model for manifolds with corners.",
    ErrorCode.CORNER_COMPOSITION_UNDEFINED: (
        "Composition is undefined for these arrows."
    ),
    ErrorCode.CORNER_DECOMPOSITION_INCOHERENT: (
        "Normal-set decompositions do not agree on the composite."
    ),
    ErrorCode.CORNER_NOT_A_MODEL_MORPHISM: "Functor is not a morphism of models.",
    ErrorCode.ARC_ENDPOINT_MISMATCH: "Arc endpoints do not match.",
    ErrorCode.ARC_INVALID: "Invalid labelled arc.",
    ErrorCode.ARC_COLLAPSE_UNION: (
        "Collapsed vertex label must contain the labels merged into it."
    ),
    ErrorCode.ARC_COLLAPSE_FORCED: (
        "Collapsed vertex label must contain every fully collapsed set index."
    ),
    ErrorCode.ARC_UNBOUNDED_ENUMERATION: (
        "Enumeration needs a codimension bound and finite energy decompositions."
    ),
    ErrorCode.ARC_FACE_OUT_OF_RANGE: "Face index out of range.",
    ErrorCode.ARC_NOT_HORN_OBJECT: "Arc is not an object of the horn category.",
    ErrorCode.ARC_ENERGY_MISMATCH: "Arc energies do not add up to its grade.",
    ErrorCode.ARC_FACE_IDENTITY: (
        "Face maps of the arc category break a simplicial identity."
    ),
    ErrorCode.FLOW_MALFORMED: "Malformed flow data.",
    ErrorCode.FLOW_FRAMING_MISMATCH: (
        "Component violates the framing dimension equation."
    ),
    ErrorCode.FLOW_NOT_PROPER: "Flow data is not proper.",
    ErrorCode.FLOW_ORDER_CYCLE: "Energy-zero morphisms contain a cycle.",
    ErrorCode.FLOW_FACET_DIMENSION: "Facet has the wrong virtual dimension.",
    ErrorCode.FLOW_BOUNDARY_COUNT: (
        "Boundary points of a 1-dimensional component do not cancel."
    ),
    ErrorCode.FLOW_IDENTIFICATION: "Break products are not identified exactly once.",
    ErrorCode.FLOW_ASSOCIATIVITY: "Codimension-2 identifications disagree.",
    ErrorCode.FLOW_RANK_INCONSISTENT: "Strong equivalence ranks are inconsistent.",
    ErrorCode.FLOW_FACE_OUT_OF_RANGE: "Simplex face index out of range.",
    ErrorCode.FLOW_ENERGY_UNBOUNDED: "Energy is not bounded below.",
    ErrorCode.FLOW_NOT_A_BIMODULE: "Flow simplex is not a bimodule.",
    ErrorCode.FLOW_GAMMA_MISMATCH: "Flow data uses incompatible energy monoids.",
    ErrorCode.BIMODULE_MIDDLE_MISMATCH: "Bimodules do not share a middle category.",
    ErrorCode.BIMODULE_MISSING_FACETS: "Facet data needed for gluing is unavailable.",
    ErrorCode.BIMODULE_HOMOTOPY_RESIDUAL: "Homotopy identity fails.",
    ErrorCode.HOMOLOGY_DIFFERENTIAL_SQUARE: "Differential does not square to zero.",
    ErrorCode.HOMOLOGY_CHAIN_MAP_RESIDUAL: "Matrix is not a chain map.",
    ErrorCode.HOMOLOGY_NOT_EXACT: "Sequence is not exact.",
    ErrorCode.HOMOLOGY_RING_MISMATCH: "Chain complexes use different rings.",
    ErrorCode.HOMOLOGY_NO_SOLUTION: "Linear system has no exact solution.",
    ErrorCode.GEOMETRY_DIMENSION_MISMATCH: "Point has the wrong number of coordinates.",
    ErrorCode.GEOMETRY_COORDINATE_RANGE: "Coordinates must lie in the unit interval.",
    ErrorCode.GEOMETRY_INVALID_EPSILON: (
        "Epsilon must be a rational strictly between 0 and 1."
    ),
    ErrorCode.GEOMETRY_BOUND_EXCEEDED: (
        "Requested dimension exceeds the supported bound."
    ),
    ErrorCode.GEOMETRY_INVALID_POINT: (
        "Homogeneous coordinates must be nonnegative and not both zero."
    ),
    ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE: (
        "L-block inclusions do not commute with the cosimplicial structure."
    ),
    ErrorCode.HORN_ASSUMPTION_VIOLATED: (
        "Horn payload has varying obstruction rank; stabilization is not supported."
    ),
    ErrorCode.HORN_INVALID_PAYLOAD: "Horn payload is malformed.",
    ErrorCode.HORN_STRATIFICATION_MISMATCH: (
        "Filler stratification does not match the arc category."
    ),
    ErrorCode.MORSE_INVALID_SIMPLEX: (
        "Simplex must be a non-empty list of vertex labels."
    ),
    ErrorCode.MORSE_DUPLICATE_VERTEX: "Simplex lists the same vertex twice.",
    ErrorCode.MORSE_UNKNOWN_CELL: "Matching references a cell outside the complex.",
    ErrorCode.MORSE_NOT_A_FACE: "Matched pair is not a codimension-1 face relation.",
    ErrorCode.MORSE_DOUBLE_MATCHED: "Cell appears in more than one matched pair.",
    ErrorCode.MORSE_CYCLIC_MATCHING: "Matching is not acyclic.",
    ErrorCode.MORSE_COMPLEX_MISMATCH: "Matchings live on different complexes.",
}


def get_error_message(
    code: ErrorCode | int | None,
    default: str = "Unknown error.",
) -> str:
    """Return the canonical message for a numeric error code."""

    if code is None:
        return default

    try:
        return _ERROR_MESSAGES[ErrorCode(code)]
    except Exception:
        return default
