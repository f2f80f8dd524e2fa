"""Central catalog of numeric error codes.

Error codes are grouped by category so callers can branch on the leading
range:

- 100s: input, parse and configuration errors
- 200s: corner model errors
- 300s: arc category errors
- 400s: flow category and flow simplex errors
- 500s: bimodule and homology errors
- 600s: degeneration geometry and horn filling errors
- 700s: discrete Morse theory errors
"""

from enum import IntEnum


class ErrorCode(IntEnum):
    """Stable numeric error codes exported by the library."""

    INPUT_INVALID_JSON = 101
    INPUT_SCHEMA_VIOLATION = 102
    INPUT_UNKNOWN_REFERENCE = 103
    INPUT_DUPLICATE_ID = 104
    INPUT_INVALID_RATIONAL = 105
    INPUT_FILE_NOT_FOUND = 106
    CONFIG_INVALID = 110

    CORNER_UNKNOWN_OBJECT = 201
    CORNER_UNKNOWN_ARROW = 202
    CORNER_NOT_FUNCTORIAL = 203
    CORNER_NOT_A_POSET = 204
    CORNER_RANK_MISMATCH = 205
    CORNER_NOT_BOOLEAN = 206
    CORNER_NOT_A_MODEL = 207
    CORNER_COMPOSITION_UNDEFINED = 208
    CORNER_DECOMPOSITION_INCOHERENT = 209
    CORNER_NOT_A_MODEL_MORPHISM = 210

    ARC_ENDPOINT_MISMATCH = 301
    ARC_INVALID = 302
    ARC_COLLAPSE_UNION = 303
    ARC_COLLAPSE_FORCED = 304
    ARC_UNBOUNDED_ENUMERATION = 305
    ARC_FACE_OUT_OF_RANGE = 306
    ARC_NOT_HORN_OBJECT = 307
    ARC_ENERGY_MISMATCH = 308
    ARC_FACE_IDENTITY = 309

    FLOW_MALFORMED = 401
    FLOW_FRAMING_MISMATCH = 402
    FLOW_NOT_PROPER = 403
    FLOW_ORDER_CYCLE = 404
    FLOW_FACET_DIMENSION = 405
    FLOW_BOUNDARY_COUNT = 406
    FLOW_IDENTIFICATION = 407
    FLOW_ASSOCIATIVITY = 408
    FLOW_RANK_INCONSISTENT = 409
    FLOW_FACE_OUT_OF_RANGE = 410
    FLOW_ENERGY_UNBOUNDED = 411
    FLOW_NOT_A_BIMODULE = 412
    FLOW_GAMMA_MISMATCH = 413

    BIMODULE_MIDDLE_MISMATCH = 501
    BIMODULE_MISSING_FACETS = 502
    BIMODULE_HOMOTOPY_RESIDUAL = 503
    HOMOLOGY_DIFFERENTIAL_SQUARE = 511
    HOMOLOGY_CHAIN_MAP_RESIDUAL = 512
    HOMOLOGY_NOT_EXACT = 513
    HOMOLOGY_RING_MISMATCH = 514
    HOMOLOGY_NO_SOLUTION = 515

    GEOMETRY_DIMENSION_MISMATCH = 601
    GEOMETRY_COORDINATE_RANGE = 602
    GEOMETRY_INVALID_EPSILON = 603
    GEOMETRY_BOUND_EXCEEDED = 604
    GEOMETRY_INVALID_POINT = 605
    GEOMETRY_COSIMPLICIAL_FAILURE = 606
    HORN_ASSUMPTION_VIOLATED = 611
    HORN_INVALID_PAYLOAD = 612
    HORN_STRATIFICATION_MISMATCH = 613

    MORSE_INVALID_SIMPLEX = 701
    MORSE_DUPLICATE_VERTEX = 702
    MORSE_UNKNOWN_CELL = 703
    MORSE_NOT_A_FACE = 704
    MORSE_DOUBLE_MATCHED = 705
    MORSE_CYCLIC_MATCHING = 706
    MORSE_COMPLEX_MISMATCH = 707
