"""
flowcat - exact combinatorics of flow categories, bimodules and flow simplices.

This library checks and builds the formal shadows of flow categories: corner
models, the arc categories stratifying morphism spaces, flow simplices with
their simplicial structure, bimodule composition and cones, L-blocks and conic
degenerations, horn filling, and discrete Morse theory as a source of examples.
"""

from .bimodule_alg import (
    chain_level_composite,
    compose_bimodules,
    homotopy_from_2simplex,
    null_homotopy_BP,
    null_homotopy_IB,
    null_homotopy_PI,
)
from .config import RunConfig, resolve_config
from .constants import GammaKind, OutputFormat, Ring
from .corner_model import (
    Arrow,
    CornerCategory,
    check_decomposition_coherence,
    check_model_morphism,
    decompose_arrow,
    face_poset,
    is_corner_model,
    q_set,
)
from .degeneration_geom import (
    LBlock,
    compatibility_square,
    conic_boundary_strata,
    conic_fiber,
    cosimplicial_check,
    lblock_contains,
    lblock_facets,
)
from .error_codes import ErrorCode
from .exceptions import (
    ArcError,
    BimoduleError,
    ConfigError,
    CornerModelError,
    FlowcatError,
    FlowDataError,
    GeometryError,
    HomologyError,
    HornFillError,
    InputError,
    MorseError,
)
from .flow_data import (
    cone,
    diagonal,
    face,
    s0,
    sn,
    suspend,
    validate_flow_category,
    validate_flow_simplex,
)
from .homology import (
    chain_complex,
    chain_homotopy,
    chain_map,
    homology,
    les_check,
    mapping_cone,
)
from .horn_fill import fill_horn, fill_inner_2horn, horn_fill_strata
from .models import (
    FacetLabel,
    FlowBimodule,
    FlowCategory,
    FlowObject,
    FlowSimplex,
    FormalComponent,
    MorphismCell,
    VirtualDim,
)
from .morse import (
    Matching,
    SimplicialComplex,
    continuation_bimodule,
    continuation_homotopy,
    greedy_matching,
    morse_flow_category,
    morse_homology,
    parse_complex,
    simplicial_homology,
    validate_matching,
)
from .reports import LESReport, ValidationReport, Violation
from .strat_arcs import Arc, ArcCategory, block_functor, collapse, horn_category

__version__ = "0.1.0"

__all__ = [
    # Flow data
    "FlowCategory",
    "FlowSimplex",
    "FlowBimodule",
    "FlowObject",
    "MorphismCell",
    "FormalComponent",
    "FacetLabel",
    "VirtualDim",
    "validate_flow_category",
    "validate_flow_simplex",
    "face",
    "s0",
    "sn",
    "diagonal",
    "suspend",
    "cone",
    # Corner models and arcs
    "Arrow",
    "CornerCategory",
    "face_poset",
    "is_corner_model",
    "q_set",
    "decompose_arrow",
    "check_decomposition_coherence",
    "check_model_morphism",
    "Arc",
    "ArcCategory",
    "collapse",
    "block_functor",
    "horn_category",
    # Bimodules and homology
    "compose_bimodules",
    "chain_level_composite",
    "homotopy_from_2simplex",
    "null_homotopy_IB",
    "null_homotopy_BP",
    "null_homotopy_PI",
    "chain_complex",
    "chain_map",
    "chain_homotopy",
    "homology",
    "mapping_cone",
    "les_check",
    # Geometry and horn filling
    "LBlock",
    "lblock_contains",
    "lblock_facets",
    "cosimplicial_check",
    "conic_fiber",
    "conic_boundary_strata",
    "compatibility_square",
    "horn_fill_strata",
    "fill_horn",
    "fill_inner_2horn",
    # Discrete Morse theory
    "SimplicialComplex",
    "Matching",
    "parse_complex",
    "validate_matching",
    "greedy_matching",
    "morse_flow_category",
    "morse_homology",
    "continuation_bimodule",
    "continuation_homotopy",
    "simplicial_homology",
    # Configuration and reports
    "Ring",
    "GammaKind",
    "OutputFormat",
    "RunConfig",
    "resolve_config",
    "ValidationReport",
    "Violation",
    "LESReport",
    # Errors
    "ErrorCode",
    "FlowcatError",
    "InputError",
    "ConfigError",
    "CornerModelError",
    "ArcError",
    "FlowDataError",
    "BimoduleError",
    "HomologyError",
    "GeometryError",
    "HornFillError",
    "MorseError",
]
