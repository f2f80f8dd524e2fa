"""Tests for flowcat exception defaults and the error catalog."""

from flowcat import ErrorCode, FlowcatError, HomologyError, MorseError
from flowcat.error_messages import get_error_message


def test_flowcat_error_uses_catalog_message_by_code():
    error = FlowcatError(code=ErrorCode.HOMOLOGY_DIFFERENTIAL_SQUARE)

    assert error.code == ErrorCode.HOMOLOGY_DIFFERENTIAL_SQUARE
    assert error.message == "Differential does not square to zero."
    assert str(error) == "Differential does not square to zero."


def test_explicit_message_wins_over_catalog():
    error = FlowcatError("custom", code=ErrorCode.CONFIG_INVALID)

    assert error.message == "custom"
    assert error.code == ErrorCode.CONFIG_INVALID


def test_homology_error_carries_location_and_residual():
    error = HomologyError(
        code=ErrorCode.HOMOLOGY_CHAIN_MAP_RESIDUAL, location=("p", "r"), residual=3
    )

    assert error.location == ("p", "r")
    assert error.residual == 3
    assert error.message == "Matrix is not a chain map."


def test_morse_error_carries_witness():
    error = MorseError(code=ErrorCode.MORSE_CYCLIC_MATCHING, witness=("0", "0,1"))

    assert error.witness == ("0", "0,1")
    assert isinstance(error, FlowcatError)


class TestErrorCatalog:
    """Every code has a message and codes keep their ranges."""

    def test_every_code_has_a_message(self):
        for code in ErrorCode:
            assert get_error_message(code) != "Unknown error."

    def test_unknown_code_falls_back_to_default(self):
        assert get_error_message(9999) == "Unknown error."
        assert get_error_message(None, default="none") == "none"

    def test_codes_are_grouped_by_hundreds(self):
        for code in ErrorCode:
            if code.name.startswith(("INPUT", "CONFIG")):
                assert 100 <= code < 200
            if code.name.startswith("MORSE"):
                assert 700 <= code < 800
