"""
Exception hierarchy for the gmm-rans library.

Every error raised by the codecs derives from :class:`GmmRansError`, carries an
error code and an optional context dictionary, and can be rendered with
:meth:`GmmRansError.to_dict` for structured logs and CLI output.
"""

from typing import Optional, Dict, Any, Type


# ============================================================================
# Exception hierarchy
# ============================================================================

class GmmRansError(Exception):
    """
    Base exception, parent of all library errors.

    Attributes:
        message: Human readable error message
        error_code: Stable machine readable code
        context: Extra context (symbol index, byte offsets, ...)
        original_exception: Underlying exception, if any
    """

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
        original_exception: Optional[Exception] = None
    ):
        """
        Initialize the exception.

        Args:
            message: Error message
            error_code: Error code used for classification and exit handling
            context: Extra context information
            original_exception: Original exception for chaining
        """
        self.message = message
        self.error_code = error_code
        self.context = context or {}
        self.original_exception = original_exception

        full_message = message
        if error_code:
            full_message = f"[{error_code}] {message}"

        super().__init__(full_message)

    def __str__(self) -> str:
        """Return a friendly error message."""
        parts = [self.message]

        if self.error_code:
            parts.append(f"(code: {self.error_code})")

        if self.context:
            context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
            parts.append(f"[{context_str}]")

        if self.original_exception:
            parts.append(f"Caused by: {type(self.original_exception).__name__}: {self.original_exception}")

        return " ".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a dictionary for logging and reports."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "error_code": self.error_code,
            "context": self.context,
            "original_error": str(self.original_exception) if self.original_exception else None,
        }


class ParameterError(GmmRansError):
    """
    Invalid model or coder parameters.

    Raised for malformed mixtures, alphabets, symbol codings and for rANS
    contract violations such as a zero frequency.
    """
    def __init__(self, message: str = "Invalid parameters", **kwargs):
        super().__init__(message, error_code="PARAM_ERROR", **kwargs)


class SymbolOutOfAlphabetError(GmmRansError):
    """A symbol (or GSM residual) lies outside the codeable range."""
    def __init__(
        self,
        message: str = "Symbol outside alphabet",
        index: Optional[int] = None,
        symbol: Optional[int] = None,
        **kwargs
    ):
        context = kwargs.pop("context", None) or {}
        if index is not None:
            context["index"] = index
        if symbol is not None:
            context["symbol"] = symbol
        super().__init__(message, error_code="SYMBOL_OUT_OF_ALPHABET", context=context, **kwargs)
        self.index = index
        self.symbol = symbol


class StreamError(GmmRansError):
    """Generic bitstream error."""
    def __init__(self, message: str = "Stream error", error_code: str = "STREAM_ERROR", **kwargs):
        super().__init__(message, error_code=error_code, **kwargs)


class TruncatedStreamError(StreamError):
    """The stream ended before all declared data could be read."""
    def __init__(self, message: str = "Truncated stream", **kwargs):
        super().__init__(message, error_code="TRUNCATED_STREAM", **kwargs)


class HeaderMismatchError(StreamError):
    """Bad magic, version or header field."""
    def __init__(self, message: str = "Header mismatch", **kwargs):
        super().__init__(message, error_code="HEADER_MISMATCH", **kwargs)


class CorruptStreamError(StreamError):
    """The payload decoded but its final state or length is inconsistent."""
    def __init__(self, message: str = "Corrupt stream", **kwargs):
        super().__init__(message, error_code="CORRUPT_STREAM", **kwargs)


class VerificationError(GmmRansError):
    """A round-trip or cross-codec equivalence check failed."""
    def __init__(self, message: str = "Verification failed", **kwargs):
        super().__init__(message, error_code="VERIFICATION_FAILED", **kwargs)


class ConfigError(GmmRansError):
    """Configuration is invalid or missing."""
    def __init__(self, message: str = "Configuration error", **kwargs):
        super().__init__(message, error_code="CONFIG_ERROR", **kwargs)


class ResourceError(GmmRansError):
    """A resource (typically memory for a CDF table) is unavailable."""
    def __init__(self, message: str = "Resource error", **kwargs):
        super().__init__(message, error_code="RESOURCE_ERROR", **kwargs)


# ============================================================================
# Helpers
# ============================================================================

def create_error_context(**kwargs) -> Dict[str, Any]:
    """
    Build an error context dictionary, dropping ``None`` values.

    Args:
        **kwargs: Context key/value pairs

    Returns:
        Context dictionary
    """
    return {k: v for k, v in kwargs.items() if v is not None}


def wrap_exception(
    exception: Exception,
    message: Optional[str] = None,
    error_class: Type[GmmRansError] = GmmRansError,
    **context
) -> GmmRansError:
    """
    Wrap an arbitrary exception into the library hierarchy.

    Args:
        exception: Original exception
        message: Custom message (defaults to ``str(exception)``)
        error_class: Target exception class
        **context: Extra context

    Returns:
        Wrapped exception
    """
    if message is None:
        message = str(exception)

    return error_class(
        message=message,
        context=create_error_context(**context),
        original_exception=exception
    )
