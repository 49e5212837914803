"""
Result type for eventwarp operations, with automatic logging of failures.

Public operations return ``Ok(value)`` on success and ``Err(WarpError)`` on
failure instead of raising. Constructing an Err logs the error through
loguru with the caller's function and line bound as context, so a failed
registration run leaves a trace even when the caller only inspects
``is_err()``.
"""

from __future__ import annotations

import inspect
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Iterator
from pathlib import Path
from typing import Any

from loguru import logger

from .config import get_log_level, should_log
from .errors import WarpError


class Result[T, E](ABC):
    """Either a success value (Ok) or an error (Err).

    Examples:
        >>> from eventwarp.result import Ok, Err
        >>> Ok(3).map(lambda n: n * 2)
        Ok(6)
        >>> Err("no events", _skip_logging=True).unwrap_or(0)
        0
    """

    @abstractmethod
    def is_ok(self) -> bool:
        """True for Ok."""

    @abstractmethod
    def is_err(self) -> bool:
        """True for Err."""

    @abstractmethod
    def unwrap(self) -> T:
        """Return the Ok value; an Err re-raises its exception.

        Raises:
            WarpError: (or any contained exception) if this is an Err.
            RuntimeError: if the Err holds a non-exception value.
        """

    @abstractmethod
    def unwrap_err(self) -> E:
        """Return the Err value, raising RuntimeError on Ok."""

    @abstractmethod
    def unwrap_or(self, default: T) -> T:
        """Return the Ok value or ``default``."""

    @abstractmethod
    def unwrap_or_else(self, f: Callable[[E], T]) -> T:
        """Return the Ok value or ``f(error)``."""

    @abstractmethod
    def map[U](self, f: Callable[[T], U]) -> Result[U, E]:
        """Transform the Ok value. Exceptions raised by ``f`` propagate."""

    @abstractmethod
    def map_err[F](self, f: Callable[[E], F]) -> Result[T, F]:
        """Transform the Err value."""

    @abstractmethod
    def then[U](self, f: Callable[[T], Result[U, E]]) -> Result[U, E]:
        """Chain a Result-returning step; an Err short-circuits.

        Examples:
            >>> from eventwarp.result import Ok
            >>> Ok(4).then(lambda n: Ok(n + 1))
            Ok(5)
        """

    @abstractmethod
    def __iter__(self) -> Iterator[T]:
        """Yield the Ok value once, or nothing for Err."""

    @abstractmethod
    def __bool__(self) -> bool:
        """Ok is truthy, Err is falsy."""

    @classmethod
    def of(cls, f: Callable[[], T]) -> Result[T, Exception]:
        """Run ``f`` and capture any exception as an Err.

        Examples:
            >>> Result.of(lambda: 1 / 0).is_err()
            True
        """
        try:
            return Ok(f())
        except Exception as e:
            return Err(e)

    @classmethod
    def sequence(cls, items: Iterable[Result[T, E]]) -> Result[list[T], E]:
        """Collect Results into one Result of a list; the first Err wins.

        Examples:
            >>> Result.sequence([Ok(1), Ok(2)])
            Ok([1, 2])
        """
        values: list[T] = []
        for item in items:
            if item.is_err():
                return Err(item.unwrap_err(), _skip_logging=True)
            values.append(item.unwrap())
        return Ok(values)

    @classmethod
    def traverse[U](
        cls, items: Iterable[U], func: Callable[[U], Result[T, E]]
    ) -> Result[list[T], E]:
        """Map ``func`` over ``items`` and sequence the results.

        ``func`` is not called on items after the first Err.

        Examples:
            >>> Result.traverse([1, 2, 3], lambda x: Ok(x * 2))
            Ok([2, 4, 6])
        """
        return cls.sequence(func(item) for item in items)


class Ok[T, E](Result[T, E]):
    """Successful outcome wrapping ``value``."""

    __match_args__ = ("_value",)

    def __init__(self, value: T) -> None:
        self._value = value

    def is_ok(self) -> bool:
        return True

    def is_err(self) -> bool:
        return False

    def unwrap(self) -> T:
        return self._value

    def unwrap_err(self) -> E:
        raise RuntimeError(f"Called unwrap_err on Ok: {self._value!r}")

    def unwrap_or(self, default: T) -> T:
        return self._value

    def unwrap_or_else(self, f: Callable[[E], T]) -> T:
        return self._value

    def map[U](self, f: Callable[[T], U]) -> Result[U, E]:
        return Ok(f(self._value))

    def map_err[F](self, f: Callable[[E], F]) -> Result[T, F]:
        return Ok(self._value)

    def then[U](self, f: Callable[[T], Result[U, E]]) -> Result[U, E]:
        return f(self._value)

    def __iter__(self) -> Iterator[T]:
        yield self._value

    def __bool__(self) -> bool:
        return True

    def __repr__(self) -> str:
        return f"Ok({self._value!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ok) and bool(self._value == other._value)

    def __hash__(self) -> int:
        return hash((Ok, self._value))


class Err[T, E](Result[T, E]):
    """Failed outcome wrapping ``error``; logged on construction.

    Args:
        error: Usually a WarpError subclass instance.
        _skip_logging: Suppress the automatic log record, used when an
            existing Err is re-wrapped while propagating.
    """

    __match_args__ = ("_error",)

    def __init__(self, error: E, *, _skip_logging: bool = False) -> None:
        self._error = error
        if not _skip_logging:
            self._log_error()

    def _log_error(self) -> None:
        if not should_log():
            return

        context: dict[str, Any] = {}
        # first frame outside this module, so ensure()/of() report their caller
        caller = inspect.currentframe()
        while caller is not None and caller.f_code.co_filename == __file__:
            caller = caller.f_back
        if caller is not None:
            context["function"] = caller.f_code.co_name
            context["file"] = Path(caller.f_code.co_filename).name
            context["line"] = caller.f_lineno

        kind = (
            type(self._error).__name__
            if isinstance(self._error, WarpError)
            else "error"
        )
        location = f"{context.get('function', '<?>')}:{context.get('line', '?')}"
        logger.bind(**context).log(
            get_log_level(), f"{kind} in {location} - {self._error}"
        )

    def is_ok(self) -> bool:
        return False

    def is_err(self) -> bool:
        return True

    def unwrap(self) -> T:
        match self._error:
            case Exception() as e:
                raise e
            case _:
                raise RuntimeError(f"Called unwrap on Err: {self._error}")

    def unwrap_err(self) -> E:
        return self._error

    def unwrap_or(self, default: T) -> T:
        return default

    def unwrap_or_else(self, f: Callable[[E], T]) -> T:
        return f(self._error)

    def map[U](self, f: Callable[[T], U]) -> Result[U, E]:
        return Err(self._error, _skip_logging=True)

    def map_err[F](self, f: Callable[[E], F]) -> Result[T, F]:
        return Err(f(self._error))

    def then[U](self, f: Callable[[T], Result[U, E]]) -> Result[U, E]:
        return Err(self._error, _skip_logging=True)

    def __iter__(self) -> Iterator[T]:
        return iter(())

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"Err({self._error!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Err) and bool(self._error == other._error)

    def __hash__(self) -> int:
        return hash((Err, self._error))


type WarpResult[T] = Result[T, WarpError]


def ensure[T](value: T, condition: bool, error: WarpError) -> Result[T, WarpError]:
    """Ok(value) when ``condition`` holds, otherwise Err(error).

    Examples:
        >>> from eventwarp.errors import NonPositiveDelta
        >>> ensure(0.05, 0.05 > 0, NonPositiveDelta("delta")).unwrap()
        0.05
    """
    if condition:
        return Ok(value)
    return Err(error)
