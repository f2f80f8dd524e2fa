"""Tests for flowcat utility helpers."""

from decimal import Decimal
from fractions import Fraction

import pytest

from flowcat import ErrorCode, InputError
from flowcat.config import resolve_config
from flowcat.constants import ENV_THREADS
from flowcat.utils import format_rational, parallel_map, parse_rational, worker_count


class TestParseRational:
    """Test exact rational parsing."""

    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (3, Fraction(3)),
            ("1/2", Fraction(1, 2)),
            (" -3 / 4 ", Fraction(-3, 4)),
            ("0.25", Fraction(1, 4)),
            (Decimal("1.5"), Fraction(3, 2)),
            (Fraction(2, 3), Fraction(2, 3)),
        ],
    )
    def test_accepts_supported_forms(self, value, expected):
        assert parse_rational(value) == expected

    @pytest.mark.parametrize("value", [True, "abc", "1/0", "1/2/3", 0.5, None, ""])
    def test_rejects_invalid_values(self, value):
        with pytest.raises(InputError) as exc_info:
            parse_rational(value)

        assert exc_info.value.code == ErrorCode.INPUT_INVALID_RATIONAL


class TestFormatRational:
    def test_integers_have_no_denominator(self):
        assert format_rational(Fraction(4, 2)) == "2"
        assert format_rational(0) == "0"

    def test_fractions_use_slash(self):
        assert format_rational(Fraction(-3, 6)) == "-1/2"


class TestWorkers:
    """Test worker pool sizing and ordered mapping."""

    def test_explicit_threads_win(self, monkeypatch):
        monkeypatch.setenv(ENV_THREADS, "8")

        assert worker_count(3) == 3

    def test_environment_is_read_when_unset(self, monkeypatch):
        monkeypatch.setenv(ENV_THREADS, "4")

        assert worker_count() == 4

    def test_invalid_environment_falls_back_to_one(self, monkeypatch):
        monkeypatch.setenv(ENV_THREADS, "many")

        assert worker_count() == 1

    def test_environment_agrees_with_the_resolved_config(self, monkeypatch):
        monkeypatch.setenv(ENV_THREADS, "3")

        assert worker_count() == resolve_config().threads == 3

    def test_zero_is_clamped(self):
        assert worker_count(0) == 1

    def test_parallel_map_keeps_input_order(self):
        assert parallel_map(lambda x: x * x, range(20), threads=4) == [
            x * x for x in range(20)
        ]

    def test_parallel_map_on_empty_input(self):
        assert parallel_map(str, [], threads=4) == []
