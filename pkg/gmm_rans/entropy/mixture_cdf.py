"""
Gaussian and Gaussian-mixture CDFs, exact and approximated, and the quantized
boundary function shared by every codec.

All coding paths evaluate CDFs through :func:`component_cdf_batch` on Python
floats (IEEE double). The encoder, the table builder and the binary-search
decoder therefore run the same arithmetic and agree bit-for-bit. The numpy
companion :func:`std_normal_cdf_array` is for analysis only and never feeds a
coder.
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import special

from gmm_rans.core.exceptions import HeaderMismatchError, ParameterError


SIGMA_MIN = 0.11
MAX_COMPONENTS = 4
MAX_ALPHABET_SIZE = 1 << 15
MIN_PRECISION_BITS = 8
MAX_PRECISION_BITS = 16

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Abramowitz & Stegun 26.2.17
_AS_P = 0.2316419
_AS_B1 = 0.319381530
_AS_B2 = -0.356563782
_AS_B3 = 1.781477937
_AS_B4 = -1.821255978
_AS_B5 = 1.330274429

_LOGISTIC_SCALE = 1.702


class ApproximatorKind(IntEnum):
    """Gaussian CDF formula; the integer value is the bitstream byte code."""

    EXACT = 0
    POLYA = 1
    ABRAMOWITZ_STEGUN = 2
    LOGISTIC = 3

    @property
    def cli_name(self) -> str:
        return _CLI_NAMES[self]

    @classmethod
    def from_code(cls, code: int) -> "ApproximatorKind":
        """
        Decode a header byte.

        Raises:
            HeaderMismatchError: If the code is unknown
        """
        try:
            return cls(code)
        except ValueError as e:
            raise HeaderMismatchError(
                f"Unknown approximator code {code}", original_exception=e
            ) from e

    @classmethod
    def parse(cls, value: Union[str, int, "ApproximatorKind"]) -> "ApproximatorKind":
        """
        Accept a kind, a byte code, or a name such as ``"as"`` or ``"logistic"``.

        Raises:
            ParameterError: If the value names no approximator
        """
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            try:
                return cls(value)
            except ValueError as e:
                raise ParameterError(f"Unknown approximator code {value}") from e

        key = str(value).strip().lower().replace("-", "_").replace("&", "_")
        if key in _NAME_ALIASES:
            return _NAME_ALIASES[key]
        raise ParameterError(
            f"Unknown approximator '{value}'",
            context={"choices": ", ".join(k.cli_name for k in cls)},
        )


_CLI_NAMES = {
    ApproximatorKind.EXACT: "exact",
    ApproximatorKind.POLYA: "polya",
    ApproximatorKind.ABRAMOWITZ_STEGUN: "as",
    ApproximatorKind.LOGISTIC: "logistic",
}

_NAME_ALIASES = {
    "exact": ApproximatorKind.EXACT,
    "erfc": ApproximatorKind.EXACT,
    "polya": ApproximatorKind.POLYA,
    "as": ApproximatorKind.ABRAMOWITZ_STEGUN,
    "a_s": ApproximatorKind.ABRAMOWITZ_STEGUN,
    "abramowitz_stegun": ApproximatorKind.ABRAMOWITZ_STEGUN,
    "abramowitzstegun": ApproximatorKind.ABRAMOWITZ_STEGUN,
    "logistic": ApproximatorKind.LOGISTIC,
}


# ============================================================================
# Scalar kernels
# ============================================================================
# The approximations are stated for x >= 0. Negative inputs are mirrored with
# 1 - F(-x) and x == 0 maps to 0.5, so F(x) + F(-x) == 1 up to one rounding.

def _exact_cdf(x: float) -> float:
    value = 0.5 * math.erfc(-x / _SQRT2)
    return 1.0 if value > 1.0 else value


def _polya_upper(x: float) -> float:
    return 0.5 * (1.0 + math.sqrt(1.0 - math.exp(-x * x)))


def _polya_cdf(x: float) -> float:
    if x > 0.0:
        return _polya_upper(x)
    if x < 0.0:
        return 1.0 - _polya_upper(-x)
    return 0.5


def _as_upper(x: float) -> float:
    t = 1.0 / (1.0 + _AS_P * x)
    poly = t * (_AS_B1 + t * (_AS_B2 + t * (_AS_B3 + t * (_AS_B4 + t * _AS_B5))))
    value = 1.0 - _INV_SQRT_2PI * math.exp(-0.5 * x * x) * poly
    return 0.0 if value < 0.0 else value


def _as_cdf(x: float) -> float:
    if x > 0.0:
        return _as_upper(x)
    if x < 0.0:
        return 1.0 - _as_upper(-x)
    return 0.5


def _logistic_upper(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-_LOGISTIC_SCALE * x))


def _logistic_cdf(x: float) -> float:
    if x > 0.0:
        return _logistic_upper(x)
    if x < 0.0:
        return 1.0 - _logistic_upper(-x)
    return 0.5


_KERNELS: Dict[ApproximatorKind, Callable[[float], float]] = {
    ApproximatorKind.EXACT: _exact_cdf,
    ApproximatorKind.POLYA: _polya_cdf,
    ApproximatorKind.ABRAMOWITZ_STEGUN: _as_cdf,
    ApproximatorKind.LOGISTIC: _logistic_cdf,
}


# ============================================================================
# Domain types
# ============================================================================

@dataclass(frozen=True, slots=True)
class MixtureParams:
    """
    Per-symbol Gaussian mixture: K weights, means and standard deviations,
    in symbol units.

    Construction renormalizes the weights to sum to one and clamps every
    standard deviation up to ``SIGMA_MIN``.
    """

    weights: Tuple[float, ...]
    means: Tuple[float, ...]
    stddevs: Tuple[float, ...]

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        means = tuple(float(mu) for mu in self.means)
        stddevs = tuple(float(s) for s in self.stddevs)

        k = len(weights)
        if not 1 <= k <= MAX_COMPONENTS:
            raise ParameterError(f"Mixture must have 1..{MAX_COMPONENTS} components, got {k}")
        if len(means) != k or len(stddevs) != k:
            raise ParameterError(
                "weights, means and stddevs must have the same length",
                context={"weights": k, "means": len(means), "stddevs": len(stddevs)},
            )

        total = 0.0
        for w in weights:
            if not math.isfinite(w) or w < 0.0:
                raise ParameterError(f"Mixture weights must be finite and non-negative, got {w}")
            total += w
        if total <= 0.0:
            raise ParameterError("Mixture weights must not all be zero")
        for mu in means:
            if not math.isfinite(mu):
                raise ParameterError(f"Mixture means must be finite, got {mu}")
        for s in stddevs:
            if not math.isfinite(s) or s <= 0.0:
                raise ParameterError(f"Mixture stddevs must be finite and positive, got {s}")

        object.__setattr__(self, "weights", tuple(w / total for w in weights))
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stddevs", tuple(s if s > SIGMA_MIN else SIGMA_MIN for s in stddevs))

    @property
    def components(self) -> int:
        return len(self.weights)

    @classmethod
    def single(cls, mean: float, stddev: float) -> "MixtureParams":
        """Build a one-component (plain Gaussian) model."""
        return cls((1.0,), (mean,), (stddev,))

    @classmethod
    def from_row(cls, row: Sequence[float], components: int) -> "MixtureParams":
        """
        Build params from a flat ``(w_0..w_K-1, mu_0.., sigma_0..)`` row, the
        layout of the serialized parameter block.
        """
        k = components
        if len(row) != 3 * k:
            raise ParameterError(f"Expected {3 * k} values for K={k}, got {len(row)}")
        return cls(tuple(row[:k]), tuple(row[k:2 * k]), tuple(row[2 * k:]))

    def to_row(self) -> Tuple[float, ...]:
        return self.weights + self.means + self.stddevs


@dataclass(frozen=True, slots=True)
class SymbolAlphabet:
    """
    Contiguous integer alphabet ``{y_min..y_max}`` and quantizer precision P.

    ``size`` is N and ``total`` is m = 2^P; m > 2N guarantees every symbol a
    frequency of at least one.
    """

    y_min: int
    y_max: int
    precision_bits: int
    size: int = field(init=False)
    total: int = field(init=False)

    def __post_init__(self) -> None:
        if self.y_min >= self.y_max:
            raise ParameterError(f"y_min ({self.y_min}) must be below y_max ({self.y_max})")
        size = self.y_max - self.y_min + 1
        if size > MAX_ALPHABET_SIZE:
            raise ParameterError(f"Alphabet size {size} exceeds {MAX_ALPHABET_SIZE}")
        if not MIN_PRECISION_BITS <= self.precision_bits <= MAX_PRECISION_BITS:
            raise ParameterError(
                f"precision_bits must be in [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}], "
                f"got {self.precision_bits}"
            )
        total = 1 << self.precision_bits
        if total <= 2 * size:
            raise ParameterError(
                f"2^{self.precision_bits} = {total} must exceed twice the alphabet size {size}"
            )
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "total", total)

    @classmethod
    def centered(cls, size: int, precision_bits: int) -> "SymbolAlphabet":
        """An alphabet of ``size`` symbols starting at ``-(size // 2)``."""
        y_min = -(size // 2)
        return cls(y_min, y_min + size - 1, precision_bits)

    def contains(self, y: int) -> bool:
        return self.y_min <= y <= self.y_max

    def index_of(self, y: int) -> int:
        return y - self.y_min

    def symbol_at(self, j: int) -> int:
        return self.y_min + j


# ============================================================================
# Operations
# ============================================================================

def std_normal_cdf(x: float, kind: ApproximatorKind) -> float:
    """
    Standard normal CDF under the selected formula.

    Exact uses ``0.5 * erfc(-x / sqrt(2))``; Polya, Abramowitz & Stegun 26.2.17
    and the logistic ``1 / (1 + exp(-1.702 x))`` are completed to negative x by
    symmetry. The result is always in [0, 1].
    """
    return _KERNELS[kind](x)


def component_cdf_batch(y: float, params: MixtureParams, kind: ApproximatorKind) -> List[float]:
    """
    Evaluate all K component CDFs ``Phi((y - mu_k) / sigma_k)`` in one pass.

    This is the only CDF path used for coding.
    """
    kernel = _KERNELS[kind]
    return [kernel((y - mu) / sigma) for mu, sigma in zip(params.means, params.stddevs)]


def mixture_cdf(y: float, params: MixtureParams, kind: ApproximatorKind) -> float:
    """Weighted sum of the component CDFs, clamped to [0, 1]."""
    total = 0.0
    for weight, value in zip(params.weights, component_cdf_batch(y, params, kind)):
        total += weight * value
    if total > 1.0:
        return 1.0
    return total


def quantize_cdf_value(cdf: float, j: int, size: int, total: int) -> int:
    """
    Interior boundary rule ``floor(cdf * (m - N)) + j``.

    Adding j reserves one unit of frequency per symbol, so a non-decreasing
    CDF yields strictly increasing boundaries.
    """
    return int(cdf * (total - size)) + j


def quantized_boundary(
    params: MixtureParams,
    alphabet: SymbolAlphabet,
    j: int,
    kind: ApproximatorKind,
) -> int:
    """
    Integer cumulative frequency at the lower edge of symbol index ``j``.

    ``B(0) = 0`` and ``B(N) = m``; interior edges sample the mixture CDF at
    ``y_min + j - 0.5``. Tail mass outside the alphabet folds into the edge
    symbols.

    Raises:
        ParameterError: If ``j`` is outside ``0..N``
    """
    size = alphabet.size
    if j <= 0 or j >= size:
        if j == 0:
            return 0
        if j == size:
            return alphabet.total
        raise ParameterError(f"Boundary index {j} outside 0..{size}")
    cdf = mixture_cdf(alphabet.y_min + j - 0.5, params, kind)
    return quantize_cdf_value(cdf, j, size, alphabet.total)


def quantized_pmf(params: MixtureParams, alphabet: SymbolAlphabet, kind: ApproximatorKind) -> List[int]:
    """All N symbol frequencies of one quantized model; they sum to m."""
    bounds = [quantized_boundary(params, alphabet, j, kind) for j in range(alphabet.size + 1)]
    return [hi - lo for lo, hi in zip(bounds, bounds[1:])]


# ============================================================================
# Analysis helpers (numpy; never used for coding)
# ============================================================================

def oracle_cdf(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """High-precision standard normal CDF reference."""
    return special.ndtr(x)


def std_normal_cdf_array(x: np.ndarray, kind: ApproximatorKind) -> np.ndarray:
    """Vectorized :func:`std_normal_cdf` over a numpy array."""
    x = np.asarray(x, dtype=np.float64)
    if kind == ApproximatorKind.EXACT:
        return np.minimum(0.5 * special.erfc(-x / _SQRT2), 1.0)

    a = np.abs(x)
    if kind == ApproximatorKind.POLYA:
        upper = 0.5 * (1.0 + np.sqrt(1.0 - np.exp(-a * a)))
    elif kind == ApproximatorKind.ABRAMOWITZ_STEGUN:
        t = 1.0 / (1.0 + _AS_P * a)
        poly = t * (_AS_B1 + t * (_AS_B2 + t * (_AS_B3 + t * (_AS_B4 + t * _AS_B5))))
        upper = np.maximum(1.0 - _INV_SQRT_2PI * np.exp(-0.5 * a * a) * poly, 0.0)
    else:
        upper = 1.0 / (1.0 + np.exp(-_LOGISTIC_SCALE * a))

    return np.where(x > 0, upper, np.where(x < 0, 1.0 - upper, 0.5))


def approximation_error(
    kind: ApproximatorKind,
    x_min: float = -8.0,
    x_max: float = 8.0,
    step: float = 1e-3,
) -> Tuple[float, float]:
    """
    Maximum and mean absolute error of ``kind`` against :func:`oracle_cdf`
    on an evenly spaced grid.
    """
    if step <= 0 or x_max <= x_min:
        raise ParameterError("Grid needs step > 0 and x_max > x_min")
    points = int(round((x_max - x_min) / step)) + 1
    grid = np.linspace(x_min, x_max, points)
    error = np.abs(std_normal_cdf_array(grid, kind) - oracle_cdf(grid))
    return float(error.max()), float(error.mean())
