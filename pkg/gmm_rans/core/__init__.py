"""Core components shared by the codecs and the harness."""

from gmm_rans.core.config import Config, get_config, reset_config
from gmm_rans.core.logger import get_logger, setup_logger, set_run_id, get_run_id, clear_run_id
from gmm_rans.core.base import BaseComponent
from gmm_rans.core.exceptions import (
    GmmRansError,
    ParameterError,
    SymbolOutOfAlphabetError,
    StreamError,
    TruncatedStreamError,
    HeaderMismatchError,
    CorruptStreamError,
    VerificationError,
    ConfigError,
    ResourceError,
    create_error_context,
    wrap_exception,
)
from gmm_rans.core.metrics import (
    Counter,
    Histogram,
    MetricsRegistry,
    get_metrics_registry,
    environment_info,
    timed,
)

__all__ = [
    "Config",
    "get_config",
    "reset_config",
    "get_logger",
    "setup_logger",
    "set_run_id",
    "get_run_id",
    "clear_run_id",
    "BaseComponent",
    "GmmRansError",
    "ParameterError",
    "SymbolOutOfAlphabetError",
    "StreamError",
    "TruncatedStreamError",
    "HeaderMismatchError",
    "CorruptStreamError",
    "VerificationError",
    "ConfigError",
    "ResourceError",
    "create_error_context",
    "wrap_exception",
    "Counter",
    "Histogram",
    "MetricsRegistry",
    "get_metrics_registry",
    "environment_info",
    "timed",
]
