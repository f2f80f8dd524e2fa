from enum import Enum
from fractions import Fraction


class Ring(str, Enum):
    Z = "Z"
    Z2 = "Z/2"


class GammaKind(str, Enum):
    TRIVIAL = "trivial"
    NONNEG_RATIONAL = "nonneg-rational"


class OutputFormat(str, Enum):
    JSON = "json"
    TEXT = "text"
    DOT = "dot"
    CSV = "csv"


class FacetKind(str, Enum):
    BREAK = "break"
    FORGET_VERTEX = "forget_vertex"


class NormalSign(str, Enum):
    MINUS = "Q-"
    PLUS = "Q+"


# Convenience constants
RING_Z = Ring.Z
RING_Z2 = Ring.Z2

DEFAULT_EPSILON = Fraction(1, 2)
DEFAULT_MAX_CODIM = 3
DEFAULT_GRID_STEPS = 4
DEFAULT_SAMPLES = 1000
DEFAULT_SEED = 0

# Exact point-set checks on L-blocks grow as grid_steps ** d.
MAX_LBLOCK_DIMENSION = 6

CATEGORY_SCHEMA = "flowcat-category-v1"
SIMPLEX_SCHEMA = "flowcat-simplex-v1"
CORNER_SCHEMA = "flowcat-corner-v1"

ENV_THREADS = "FLOWCAT_THREADS"
ENV_RING = "FLOWCAT_RING"
ENV_EPSILON = "FLOWCAT_EPSILON"
ENV_MAX_CODIM = "FLOWCAT_MAX_CODIM"

CONFIG_SECTION = "flowcat"

# Object-id prefixes used by the cone construction.
CONE_SOURCE_PREFIX = "X:"
CONE_TARGET_PREFIX = "Y:"

# Suffix marking the conic degeneration of a component.
DEGENERATE_SUFFIX = "~s"
UNIT_PREFIX = "unit:"


class LBlockFacetTag(str, Enum):
    X_ZERO = "x_zero"
    X_ONE = "x_one"
    Y_ONE = "y_one"
    HYPERSURFACE = "hypersurface"
