"""Logging utilities for gmm-rans."""

import sys
import json
import time
import uuid
from pathlib import Path
from typing import Optional, Any, Dict, Callable
from contextvars import ContextVar
from functools import wraps
from loguru import logger


# Benchmark run tracking
_run_id: ContextVar[Optional[str]] = ContextVar("run_id", default=None)
_configured = False


def _json_serializer(record: Dict[str, Any]) -> str:
    """
    Serialize a loguru record to a JSON line.

    Args:
        record: Log record dictionary

    Returns:
        JSON formatted string
    """
    log_entry = {
        "timestamp": record["time"].isoformat(),
        "level": record["level"].name,
        "logger": record["extra"].get("name", record["name"]),
        "function": record["function"],
        "line": record["line"],
        "message": record["message"],
    }

    run_id = _run_id.get()
    if run_id:
        log_entry["run_id"] = run_id

    extra = {k: v for k, v in record["extra"].items() if k != "name"}
    if extra:
        log_entry["extra"] = extra

    if record["exception"]:
        log_entry["exception"] = {
            "type": record["exception"].type.__name__ if record["exception"].type else None,
            "value": str(record["exception"].value) if record["exception"].value else None,
        }

    return json.dumps(log_entry, default=str)


def _stderr_sink(message: Any) -> None:
    # resolved per record; test runners and CLIs swap sys.stderr
    sys.stderr.write(message)


def setup_logger(
    log_file: Optional[str] = None,
    log_level: str = "INFO",
    rotation: str = "10 MB",
    retention: str = "1 week",
    use_json: bool = False,
) -> None:
    """
    Setup logger with console and optional file output.

    Args:
        log_file: Path to log file
        log_level: Logging level
        rotation: When to rotate the log file
        retention: How long to keep old log files
        use_json: If True, emit one JSON object per line
    """
    global _configured
    logger.remove()

    if use_json:
        def json_sink(message):
            sys.stderr.write(_json_serializer(message.record) + "\n")
            sys.stderr.flush()

        logger.add(json_sink, level=log_level)

        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)

            def json_file_sink(message):
                with open(log_path, 'a', encoding='utf-8') as f:
                    f.write(_json_serializer(message.record) + "\n")

            logger.add(json_file_sink, level=log_level)
    else:
        logger.add(
            _stderr_sink,
            format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{extra[name]}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
            level=log_level,
            colorize=True,
        )

        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)

            logger.add(
                log_file,
                format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {extra[name]}:{function}:{line} - {message}",
                level=log_level,
                rotation=rotation,
                retention=retention,
                encoding="utf-8",
            )

    logger.configure(extra={"name": "gmm_rans"})
    _configured = True


def get_logger(name: Optional[str] = None) -> Any:
    """
    Get a logger instance, configuring sinks from the global config on first use.

    Args:
        name: Name for the logger (usually __name__)

    Returns:
        Logger instance
    """
    if not _configured:
        from gmm_rans.core.config import get_config

        config = get_config()
        setup_logger(
            log_file=config.log_file,
            log_level=config.log_level,
            use_json=config.log_format == "json",
        )

    if name:
        return logger.bind(name=name)
    return logger


def set_run_id(run_id: Optional[str] = None) -> str:
    """
    Set the run ID attached to JSON log records.

    Args:
        run_id: Custom run ID. If None, generates a new UUID

    Returns:
        The run ID that was set
    """
    if run_id is None:
        run_id = uuid.uuid4().hex[:12]
    _run_id.set(run_id)
    return run_id


def get_run_id() -> Optional[str]:
    """Get the current run ID."""
    return _run_id.get()


def clear_run_id() -> None:
    """Clear the current run ID."""
    _run_id.set(None)


def log_performance(func: Optional[Callable] = None, *, level: str = "INFO"):
    """
    Decorator to log function execution time.

    Args:
        func: Function to decorate
        level: Log level to use (default: INFO)

    Example:
        @log_performance(level="DEBUG")
        def generate():
            ...
    """
    def decorator(f: Callable) -> Callable:
        @wraps(f)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            func_name = f.__name__
            extra: Dict[str, Any] = {"function_name": func_name, "phase": "start"}
            run_id = get_run_id()
            if run_id:
                extra["run_id"] = run_id

            log = get_logger(f.__module__)
            log.bind(**extra).log(level, f"Starting {func_name}")

            try:
                result = f(*args, **kwargs)
            except Exception as e:
                duration = time.perf_counter() - start_time
                extra.update(phase="error", duration_ms=round(duration * 1000, 2), error=str(e))
                log.bind(**extra).error(f"Failed {func_name} after {duration:.2f}s: {e}")
                raise

            duration = time.perf_counter() - start_time
            extra.update(phase="complete", duration_ms=round(duration * 1000, 2))
            log.bind(**extra).log(level, f"Completed {func_name} in {duration:.2f}s")
            return result

        return wrapper

    if func is None:
        return decorator
    return decorator(func)
