from typing import Any

from .error_messages import get_error_message


class FlowcatError(Exception):
    """Base exception for flowcat operations."""

    def __init__(self, message: str | None = None, code: int | None = None):
        resolved_message = message if message is not None else get_error_message(code)
        super().__init__(resolved_message)
        self.message = resolved_message
        self.code = code


class InputError(FlowcatError):
    """Exception for unreadable or schema-violating input documents."""

    pass


class ConfigError(FlowcatError):
    """Exception for invalid run configuration."""

    pass


class CornerModelError(FlowcatError):
    """Exception for malformed corner categories and invalid arrows."""

    pass


class ArcError(FlowcatError):
    """Exception for invalid arcs, collapses and arc category requests."""

    pass


class FlowDataError(FlowcatError):
    """Exception for malformed flow categories and flow simplices."""

    def __init__(
        self,
        message: str | None = None,
        code: int | None = None,
        location: tuple[str, ...] = (),
    ):
        super().__init__(message, code)
        self.location = location


class BimoduleError(FlowDataError):
    """Exception for bimodule composition and homotopy extraction."""

    def __init__(
        self,
        message: str | None = None,
        code: int | None = None,
        location: tuple[str, ...] = (),
        residual: Any = None,
    ):
        super().__init__(message, code, location)
        self.residual = residual


class HomologyError(FlowcatError):
    """Exception for chain-level failures (d^2, chain maps, exactness)."""

    def __init__(
        self,
        message: str | None = None,
        code: int | None = None,
        location: tuple[str, ...] = (),
        residual: Any = None,
    ):
        super().__init__(message, code)
        self.location = location
        self.residual = residual


class GeometryError(FlowcatError):
    """Exception for L-block and conic bundle input errors."""

    pass


class HornFillError(FlowcatError):
    """Exception for horn payloads outside the supported filling regime."""

    pass


class MorseError(FlowcatError):
    """Exception for simplicial complexes and discrete Morse matchings."""

    def __init__(
        self,
        message: str | None = None,
        code: int | None = None,
        witness: tuple[Any, ...] = (),
    ):
        super().__init__(message, code)
        self.witness = witness
