import logging
import os
import re
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import TypeVar

from .constants import ENV_THREADS
from .error_codes import ErrorCode
from .exceptions import InputError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Integers, decimals ("0.25", "-3") and fractions ("a/b").
RATIONAL_RE = re.compile(r"^\s*-?\d+(\.\d+)?(\s*/\s*\d+)?\s*$")


def parse_rational(value: object) -> Fraction:
    """Parse an exact rational from an int, Fraction, Decimal or string."""

    if isinstance(value, bool):
        raise InputError(code=ErrorCode.INPUT_INVALID_RATIONAL)

    if isinstance(value, Fraction):
        return value

    if isinstance(value, int):
        return Fraction(value)

    if isinstance(value, Decimal):
        return Fraction(value)

    if isinstance(value, str) and RATIONAL_RE.fullmatch(value):
        try:
            if "/" in value:
                numerator, denominator = value.split("/")
                return Fraction(Decimal(numerator.strip())) / int(denominator)

            return Fraction(Decimal(value.strip()))

        except (InvalidOperation, ZeroDivisionError, ValueError):
            pass

    raise InputError(
        f"Invalid rational value: {value!r}", code=ErrorCode.INPUT_INVALID_RATIONAL
    )


def format_rational(value: Fraction | int) -> str:
    """Format a rational as "a" or "a/b"."""

    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)

    return f"{value.numerator}/{value.denominator}"


def worker_count(threads: int | None = None) -> int:
    """Resolve the worker pool size from an explicit value or the environment."""

    if threads is None:
        raw = os.environ.get(ENV_THREADS, "").strip()
        if raw.isdigit():
            threads = int(raw)
        else:
            if raw:
                logger.warning("Ignoring %s=%r; using one thread", ENV_THREADS, raw)
            threads = 1

    return max(1, threads)


def parallel_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: int | None = None,
) -> list[R]:
    """Map ``fn`` over ``items`` in input order, using a capped thread pool."""

    items = list(items)
    workers = min(worker_count(threads), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]

    logger.debug("Running %d tasks on %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
