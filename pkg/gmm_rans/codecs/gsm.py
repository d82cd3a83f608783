"""
Single-Gaussian codec with prebuilt scale tables.

Standard deviations are quantized up to one of 64 log-spaced scales between
0.11 and 256, and each scale owns one precomputed boundary row for a zero-mean
Gaussian over ``{-A_s..A_s}``. A symbol is coded as its residual against the
rounded mean, so no per-symbol CDF is ever evaluated after initialization.
"""

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from gmm_rans.core.exceptions import (
    HeaderMismatchError,
    ParameterError,
    SymbolOutOfAlphabetError,
    TruncatedStreamError,
)
from gmm_rans.core.logger import get_logger
from gmm_rans.core.metrics import get_metrics_registry
from gmm_rans.entropy.mixture_cdf import (
    MAX_PRECISION_BITS,
    ApproximatorKind,
    MixtureParams,
    SymbolAlphabet,
    quantized_boundary,
)
from gmm_rans.entropy.rans import RansDecoder, RansEncoder, SymbolCoding
from gmm_rans.codecs.base import Codec, CodecStats, SymbolsLike, as_symbol_list
from gmm_rans.codecs.container import (
    SINGLE_GAUSSIAN_MAGIC,
    EncodedStream,
    quantize_params,
    unpack_params,
)

logger = get_logger(__name__)

SCALE_COUNT = 64
SCALE_MIN = 0.11
SCALE_MAX = 256.0
MAX_HALF_WIDTH = (1 << 15) - 1


def scale_levels(count: int = SCALE_COUNT, lo: float = SCALE_MIN, hi: float = SCALE_MAX) -> Tuple[float, ...]:
    """``count`` scales evenly spaced in log domain, endpoints exact."""
    step = (math.log(hi) - math.log(lo)) / (count - 1)
    levels = [math.exp(math.log(lo) + i * step) for i in range(count)]
    levels[0], levels[-1] = lo, hi
    return tuple(levels)


def tail_bound(precision_bits: int) -> float:
    """Smallest z (up to one ulp) with ``Phi(-z) < 2^(-P-1)``."""
    z = -float(special.ndtri(2.0 ** (-precision_bits - 1)))
    return float(np.nextafter(z, np.inf))


def half_width_cap(precision_bits: int) -> int:
    """Largest A keeping ``2^P > 2 * (2A + 1)``."""
    return min(MAX_HALF_WIDTH, (1 << precision_bits) // 4 - 1)


def round_half_up(mean: float) -> int:
    return math.floor(mean + 0.5)


def moment_match(params: MixtureParams) -> Tuple[float, float]:
    """Mean and standard deviation of a mixture, for collapsing it to one Gaussian."""
    mean = sum(w * mu for w, mu in zip(params.weights, params.means))
    second = sum(w * (s * s + mu * mu) for w, mu, s in zip(params.weights, params.means, params.stddevs))
    return mean, math.sqrt(max(second - mean * mean, 0.0))


@dataclass(frozen=True)
class ScaleTable:
    """The 64 scales, their half widths and prebuilt boundary rows."""

    scales: Tuple[float, ...]
    half_widths: Tuple[int, ...]
    rows: Tuple[Tuple[int, ...], ...]
    precision_bits: int
    kind: ApproximatorKind

    def scale_index(self, sigma: float) -> int:
        """Smallest scale >= sigma, clamped to the table."""
        return min(bisect_left(self.scales, sigma), len(self.scales) - 1)

    def alphabet(self, index: int) -> SymbolAlphabet:
        a = self.half_widths[index]
        return SymbolAlphabet(-a, a, self.precision_bits)

    def coding(self, index: int, residual: int) -> SymbolCoding:
        row = self.rows[index]
        j = residual + self.half_widths[index]
        return SymbolCoding(row[j], row[j + 1] - row[j], self.precision_bits)

    def locate(self, index: int, slot: int) -> int:
        """Residual whose interval in row ``index`` contains ``slot``."""
        return bisect_right(self.rows[index], slot) - 1 - self.half_widths[index]


def gsm_init(
    precision_bits: int = MAX_PRECISION_BITS,
    kind: ApproximatorKind = ApproximatorKind.LOGISTIC,
) -> ScaleTable:
    """
    Build the 64 scale rows.

    Row s covers ``{-A_s..A_s}`` with ``A_s = min(2^15 - 1, m/4 - 1, ceil(sigma_s * z))``
    where z bounds the tail below the quantizer resolution.
    """
    kind = ApproximatorKind.parse(kind)
    scales = scale_levels()
    z = tail_bound(precision_bits)
    cap = half_width_cap(precision_bits)

    half_widths, rows = [], []
    for sigma in scales:
        a = max(1, min(cap, math.ceil(sigma * z)))
        alphabet = SymbolAlphabet(-a, a, precision_bits)
        model = MixtureParams.single(0.0, sigma)
        rows.append(tuple(quantized_boundary(model, alphabet, j, kind) for j in range(alphabet.size + 1)))
        half_widths.append(a)

    get_metrics_registry().counter("gsm_rows_built_total").inc(len(rows))
    logger.debug(
        f"Built {len(rows)} scale rows (P={precision_bits}, {kind.cli_name}, "
        f"half widths {half_widths[0]}..{half_widths[-1]})"
    )
    return ScaleTable(scales, tuple(half_widths), tuple(rows), precision_bits, kind)


class GsmCodec(Codec):
    """
    Single-Gaussian codec; the scale table is built once in :meth:`initialize`.

    The header alphabet is informational: any integer symbol can be coded as long
    as its residual fits the selected scale.
    """

    codec_name = "gsm"
    magic = SINGLE_GAUSSIAN_MAGIC

    def __init__(
        self,
        precision_bits: int = MAX_PRECISION_BITS,
        kind: ApproximatorKind = ApproximatorKind.LOGISTIC,
        alphabet: Optional[SymbolAlphabet] = None,
        table: Optional[ScaleTable] = None,
        **kwargs,
    ) -> None:
        if alphabet is None:
            cap = half_width_cap(precision_bits)
            alphabet = SymbolAlphabet(-cap, cap, precision_bits)
        super().__init__(alphabet, kind, **kwargs)
        self.table = table
        self.rows_built = 0

    def _initialize(self) -> None:
        if self.table is None:
            self.table = gsm_init(self.alphabet.precision_bits, self.kind)
            self.rows_built = len(self.table.rows)

    def _encode_block(
        self, symbols: List[int], block: np.ndarray, components: int
    ) -> Tuple[EncodedStream, CodecStats]:
        if components != 1:
            raise ParameterError(
                f"GSM codec codes single Gaussians, got K={components}; collapse mixtures with moment_match"
            )
        table = self.table
        residuals, scale_ids = self._residuals(symbols, unpack_params(block, 1), table)

        encoder = RansEncoder()
        for i in range(len(symbols) - 1, -1, -1):
            encoder.put(table.coding(scale_ids[i], residuals[i]))
        payload = encoder.flush()

        stats = CodecStats(symbols=len(symbols), payload_bytes=len(payload))
        return EncodedStream(self.make_header(len(symbols), 1), block, payload), stats

    def _decode_stream(self, stream: EncodedStream) -> Tuple[List[int], CodecStats]:
        table = self.table
        header = stream.header
        if header.precision_bits != table.precision_bits or header.approximator != table.kind:
            raise HeaderMismatchError(
                "Stream precision or approximator differs from the scale table",
                context={
                    "stream": (header.precision_bits, header.approximator.cli_name),
                    "table": (table.precision_bits, table.kind.cli_name),
                },
            )
        if header.components != 1:
            raise HeaderMismatchError(
                "Single-Gaussian stream declares a mixture",
                context={"components": header.components},
            )

        decoder = RansDecoder(stream.payload)
        precision = table.precision_bits
        symbols: List[int] = []
        for i, p in enumerate(stream.params()):
            if decoder.starved:
                raise TruncatedStreamError(
                    "Payload exhausted before all symbols were decoded",
                    context={"index": i, "symbol_count": stream.symbol_count},
                )
            s = table.scale_index(p.stddevs[0])
            r = table.locate(s, decoder.peek(precision))
            decoder.advance(table.coding(s, r))
            symbols.append(r + round_half_up(p.means[0]))
        decoder.finish()

        return symbols, CodecStats(symbols=len(symbols), payload_bytes=len(stream.payload))

    @staticmethod
    def _residuals(
        symbols: List[int], coded: List[MixtureParams], table: ScaleTable
    ) -> Tuple[List[int], List[int]]:
        residuals, scale_ids = [], []
        for i, (y, p) in enumerate(zip(symbols, coded)):
            s = table.scale_index(p.stddevs[0])
            r = y - round_half_up(p.means[0])
            if abs(r) > table.half_widths[s]:
                raise SymbolOutOfAlphabetError(
                    f"Residual {r} at position {i} exceeds scale half width {table.half_widths[s]}",
                    index=i,
                    symbol=y,
                )
            residuals.append(r)
            scale_ids.append(s)
        return residuals, scale_ids

    def code_length(self, symbols: SymbolsLike, params: Sequence[MixtureParams]) -> float:
        self.initialize()
        symbol_list = as_symbol_list(symbols)
        _, coded = quantize_params(list(params), 1)
        residuals, scale_ids = self._residuals(symbol_list, coded, self.table)
        precision = self.table.precision_bits
        return sum(
            precision - math.log2(self.table.coding(s, r).freq) for r, s in zip(residuals, scale_ids)
        )


def gsm_encode(
    symbols: SymbolsLike,
    means: Sequence[float],
    sigmas: Sequence[float],
    table: ScaleTable,
) -> EncodedStream:
    """Encode ``symbols`` with per-symbol Gaussians ``N(mean, sigma)`` against ``table``."""
    params = [MixtureParams.single(mu, s) for mu, s in zip(means, sigmas)]
    return GsmCodec(table.precision_bits, table.kind, table=table).encode(symbols, params)


def gsm_decode(stream: EncodedStream, table: ScaleTable) -> List[int]:
    return GsmCodec(table.precision_bits, table.kind, table=table).decode(stream)
