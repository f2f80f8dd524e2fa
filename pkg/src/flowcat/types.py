"""Shared type aliases for flowcat models."""

from fractions import Fraction
from typing import Annotated, Literal

from pydantic import Field, PlainSerializer, PlainValidator

from .exceptions import InputError
from .utils import format_rational, parse_rational


def _validate_rational(value: object) -> Fraction:
    try:
        return parse_rational(value)
    except InputError as exc:
        raise ValueError(exc.message) from exc


Natural = Annotated[int, Field(ge=0)]

Sign = Literal[1, -1]

Rational = Annotated[
    Fraction,
    PlainValidator(_validate_rational),
    PlainSerializer(format_rational, return_type=str),
]

FaceIndex = tuple[int, ...]
