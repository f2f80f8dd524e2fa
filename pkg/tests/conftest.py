from pathlib import Path

import pytest

from flowcat._canonical import CIRCLE, SPHERE
from flowcat.models import (
    FlowBimodule,
    FlowCategory,
    FlowObject,
    FormalComponent,
    MorphismCell,
    VirtualDim,
)
from flowcat.morse import Matching, SimplicialComplex, sort_cell
from flowcat.serialization import load_bimodule

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run exhaustive enumerations marked slow",
    )


def pytest_collection_modifyitems(
    config: pytest.Config, items: list[pytest.Item]
) -> None:
    if config.getoption("--run-slow"):
        return

    skip_slow = pytest.mark.skip(reason="exhaustive enumeration; pass --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def point(component_id: str, count: int = 1) -> FormalComponent:
    return FormalComponent(id=component_id, total_dim=0, count=count)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def circle_category() -> FlowCategory:
    """Minimal Morse flow category of the circle: two paths of opposite sign."""
    return FlowCategory(
        objects=(
            FlowObject(id="e", vdim=VirtualDim(plus=1)),
            FlowObject(id="v"),
        ),
        morphisms=(
            MorphismCell(
                source="e", target="v", components=(point("path0"), point("path1", -1))
            ),
        ),
    )


@pytest.fixture
def interval_category() -> FlowCategory:
    """Morse flow category of the unit interval: one path from the edge."""
    return FlowCategory(
        objects=(
            FlowObject(id="e", vdim=VirtualDim(plus=1)),
            FlowObject(id="a"),
            FlowObject(id="b"),
        ),
        morphisms=(
            MorphismCell(source="e", target="a", components=(point("left", -1),)),
            MorphismCell(source="e", target="b", components=(point("right"),)),
        ),
    )


@pytest.fixture
def times2_bimodule() -> FlowBimodule:
    """The degree-2 self-map of the circle on its minimal Morse flow category."""
    return load_bimodule(FIXTURES / "times2_s1.json")


@pytest.fixture
def circle() -> SimplicialComplex:
    return CIRCLE.build()


@pytest.fixture
def sphere() -> SimplicialComplex:
    return SPHERE.build()


@pytest.fixture
def circle_matchings() -> tuple[Matching, Matching]:
    """Two acyclic matchings on the circle with different critical cells."""
    first = Matching(
        pairs=(
            (sort_cell(["0"]), sort_cell(["0", "1"])),
            (sort_cell(["2"]), sort_cell(["0", "2"])),
        )
    )
    second = Matching(
        pairs=(
            (sort_cell(["1"]), sort_cell(["0", "1"])),
            (sort_cell(["2"]), sort_cell(["1", "2"])),
        )
    )
    return first, second
