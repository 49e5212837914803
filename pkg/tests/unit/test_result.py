"""
Tests for the Result type with automatic logging.
"""

from unittest.mock import patch

import pytest
from loguru import logger

from eventwarp import Err, Ok, Result, configure
from eventwarp.errors import EmptyCurve, NonPositiveDelta, WarpError
from eventwarp.result import ensure

pytestmark = pytest.mark.unit


class TestOk:
    """Tests for Ok class."""

    def test_ok_creation(self):
        result = Ok(42)
        assert result.is_ok()
        assert not result.is_err()
        assert result.unwrap() == 42

    def test_ok_map_and_then(self):
        assert Ok(2).map(lambda x: x * 2).then(lambda x: Ok(x + 1)) == Ok(5)

    def test_ok_map_propagates_exceptions(self):
        with pytest.raises(ZeroDivisionError):
            Ok(1).map(lambda x: x / 0)

    def test_ok_unwrap_err_raises(self):
        with pytest.raises(RuntimeError, match="Called unwrap_err on Ok: 42"):
            Ok(42).unwrap_err()

    def test_ok_is_truthy_and_iterable(self):
        assert bool(Ok(0))
        assert list(Ok(3)) == [3]

    def test_ok_hash_follows_value(self):
        assert hash(Ok(3)) == hash(Ok(3))


class TestErr:
    """Tests for Err class."""

    def test_err_creation(self):
        result = Err(EmptyCurve("no events"), _skip_logging=True)
        assert result.is_err()
        assert isinstance(result.unwrap_err(), EmptyCurve)

    def test_err_unwrap_reraises_warp_error(self):
        with pytest.raises(EmptyCurve, match="no events"):
            Err(EmptyCurve("no events"), _skip_logging=True).unwrap()

    def test_err_unwrap_non_exception(self):
        with pytest.raises(RuntimeError, match="Called unwrap on Err"):
            Err("plain", _skip_logging=True).unwrap()

    def test_err_short_circuits(self):
        result = Err(EmptyCurve("x"), _skip_logging=True)
        assert result.map(lambda v: v + 1).is_err()
        assert result.then(lambda v: Ok(v)).is_err()
        assert result.unwrap_or(7) == 7
        assert result.unwrap_or_else(lambda e: str(e)) == "x"
        assert list(result) == []
        assert not result


class TestLogging:
    """Tests for automatic logging functionality."""

    def test_err_logs_by_default(self):
        with patch.object(logger, "bind") as mock_bind:
            mock_bound = mock_bind.return_value
            Err(NonPositiveDelta("delta must be > 0"))
            mock_bind.assert_called_once()
            mock_bound.log.assert_called_once()

        args, _ = mock_bound.log.call_args
        assert args[0] == "ERROR"
        assert "NonPositiveDelta" in args[1]
        assert "delta must be > 0" in args[1]

    def test_err_context_names_the_caller(self):
        def failing_step():
            return ensure(1, False, NonPositiveDelta("bad"))

        with patch.object(logger, "bind") as mock_bind:
            failing_step()
        _, context = mock_bind.call_args
        assert context["function"] == "failing_step"
        assert context["file"] == "test_result.py"

    def test_err_logging_can_be_disabled(self):
        configure(enabled=False)
        with patch.object(logger, "bind") as mock_bind:
            Err(EmptyCurve("quiet"))
            mock_bind.assert_not_called()

    def test_custom_log_level(self):
        configure(level="WARNING")
        with patch.object(logger, "bind") as mock_bind:
            mock_bound = mock_bind.return_value
            Err(EmptyCurve("warn"))
        args, _ = mock_bound.log.call_args
        assert args[0] == "WARNING"

    def test_propagation_does_not_log_again(self):
        original = Err(EmptyCurve("once"), _skip_logging=True)
        with patch.object(logger, "bind") as mock_bind:
            original.map(lambda v: v).then(lambda v: Ok(v))
            mock_bind.assert_not_called()


class TestCombinators:
    """Tests for Result.of, sequence and traverse."""

    def test_of_captures_exception(self):
        with patch.object(logger, "bind"):
            result = Result.of(lambda: 1 / 0)
        assert isinstance(result.unwrap_err(), ZeroDivisionError)

    def test_sequence_first_err_wins(self):
        first = Err(EmptyCurve("first"), _skip_logging=True)
        second = Err(EmptyCurve("second"), _skip_logging=True)
        assert str(Result.sequence([Ok(1), first, second]).unwrap_err()) == "first"

    def test_traverse_stops_after_err(self):
        seen = []

        def step(x):
            seen.append(x)
            return Ok(x) if x < 2 else Err(EmptyCurve(str(x)), _skip_logging=True)

        assert Result.traverse([0, 1, 2, 3], step).is_err()
        assert seen == [0, 1, 2]

    def test_ensure(self):
        assert ensure(3, True, NonPositiveDelta("x")) == Ok(3)
        with patch.object(logger, "bind"):
            assert isinstance(
                ensure(3, False, NonPositiveDelta("x")).unwrap_err(), WarpError
            )
