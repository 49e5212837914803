"""
Configuration for eventwarp: error logging plus pipeline defaults.

Two dataclasses hold the settings. LoggingConfig controls how Err values are
logged; PipelineConfig carries the tuning constants of the registration and
clustering pipeline. Both can be set programmatically or loaded from a
confection ``.cfg`` file:

    [logging]
    enabled = true
    level = "WARNING"

    [pipeline]
    delta = 0.05
    grid_size = 101
    force_last_event = false
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

from confection import Config

if TYPE_CHECKING:
    from .errors import ConfigError
    from .result import Result

VALID_LEVELS = frozenset({"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"})

type CurveMode = Literal["standardized", "raw"]


@dataclass
class LoggingConfig:
    """Controls automatic logging of Err values."""

    enabled: bool = True
    level: str = "ERROR"


@dataclass(frozen=True)
class PipelineConfig:
    """Defaults for the registration and clustering pipeline."""

    mode: CurveMode = "standardized"
    delta: float = 0.05
    grid_size: int = 101
    force_last_event: bool = False
    recenter: bool = False
    n_init: int = 20
    max_iter: int = 100
    seed: int = 0
    threads: int = 1

    def validate(self) -> Result[PipelineConfig, ConfigError]:
        """Check every field against its admissible range.

        Examples:
            >>> PipelineConfig(delta=-1.0).validate().is_err()
            True
        """
        from .errors import ConfigError
        from .result import Err, Ok

        problems = [
            message
            for failed, message in (
                (self.mode not in ("standardized", "raw"), f"mode {self.mode!r}"),
                (not self.delta > 0, f"delta must be > 0, got {self.delta}"),
                (self.grid_size < 2, f"grid_size must be >= 2, got {self.grid_size}"),
                (self.n_init < 1, f"n_init must be >= 1, got {self.n_init}"),
                (self.max_iter < 1, f"max_iter must be >= 1, got {self.max_iter}"),
                (self.threads < 0, f"threads must be >= 0, got {self.threads}"),
            )
            if failed
        ]
        if problems:
            return Err(ConfigError("; ".join(problems)))
        return Ok(self)


_config: LoggingConfig | None = None
_pipeline: PipelineConfig | None = None


def get_config() -> LoggingConfig:
    """Get the current logging configuration."""
    global _config
    if _config is None:
        _config = LoggingConfig()
    return _config


def get_pipeline_config() -> PipelineConfig:
    """Get the current pipeline defaults."""
    global _pipeline
    if _pipeline is None:
        _pipeline = PipelineConfig()
    return _pipeline


def reset_config() -> None:
    """Reset logging and pipeline configuration to defaults."""
    global _config, _pipeline
    _config = LoggingConfig()
    _pipeline = PipelineConfig()


def configure(
    enabled: bool | None = None, level: str | None = None
) -> Result[None, ConfigError]:
    """
    Configure Err logging.

    Args:
        enabled: Enable/disable logging of Err values (default: True)
        level: DEBUG, INFO, WARNING, ERROR or CRITICAL (default: ERROR)

    Returns:
        Ok(None) if applied, Err(ConfigError) for an unknown level.

    Examples:
        >>> import eventwarp
        >>> eventwarp.configure(level="WARNING")  # doctest: +SKIP
    """
    from .errors import ConfigError
    from .result import Err, Ok

    global _config
    current = get_config()
    if level is not None and level not in VALID_LEVELS:
        return Err(
            ConfigError(f"Invalid log level '{level}'. Must be one of: {sorted(VALID_LEVELS)}")
        )
    _config = LoggingConfig(
        enabled=enabled if enabled is not None else current.enabled,
        level=level if level is not None else current.level,
    )
    return Ok(None)


def configure_pipeline(**overrides: Any) -> Result[PipelineConfig, ConfigError]:
    """Replace pipeline defaults; unknown keys or bad values give Err.

    Examples:
        >>> configure_pipeline(delta=0.1).map(lambda c: c.delta)  # doctest: +SKIP
        Ok(0.1)
    """
    from .errors import ConfigError
    from .result import Err

    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        return Err(ConfigError(f"Unknown pipeline settings: {unknown}"))

    def _store(config: PipelineConfig) -> PipelineConfig:
        global _pipeline
        _pipeline = config
        return config

    return replace(get_pipeline_config(), **overrides).validate().map(_store)


def load_config(path: str | Path) -> Result[PipelineConfig, ConfigError]:
    """
    Load ``[logging]`` and ``[pipeline]`` sections from a confection file.

    The logging section is applied immediately; the pipeline section is
    validated, stored as the new default and returned.

    Args:
        path: Path to a ``.cfg`` file.

    Returns:
        Ok(PipelineConfig) on success, Err(ConfigError) when the file is
        missing, unparsable or holds invalid values.
    """
    from .errors import ConfigError
    from .result import Err, Result

    if not Path(path).exists():
        return Err(ConfigError(f"Config file not found: {path}"))

    def _apply(cfg: dict[str, Any]) -> Result[PipelineConfig, ConfigError]:
        logging_section = dict(cfg.get("logging", {}))
        applied = configure(
            enabled=logging_section.get("enabled"), level=logging_section.get("level")
        )
        if applied.is_err():
            return Err(applied.unwrap_err(), _skip_logging=True)
        return configure_pipeline(**dict(cfg.get("pipeline", {})))

    parsed = Result.of(lambda: Config().from_disk(path)).map_err(
        lambda e: ConfigError(f"Cannot parse {path}: {e}")
    )
    return parsed.then(_apply)


def should_log() -> bool:
    """Check if Err logging is enabled."""
    return get_config().enabled


def get_log_level() -> str:
    """Get the level Err values are logged at."""
    return get_config().level
