"""
Table-free mixture codec.

Encoding evaluates the quantized boundary function twice per symbol; decoding
binary-searches the boundary function for the rANS slot and then evaluates the
two edges of the found symbol. Nothing is precomputed, so the cost per symbol
is O(K) to encode and O(K log N) to decode.
"""

import math
from typing import List, Sequence, Tuple

import numpy as np

from gmm_rans.core.exceptions import SymbolOutOfAlphabetError, TruncatedStreamError
from gmm_rans.entropy.mixture_cdf import (
    ApproximatorKind,
    MixtureParams,
    SymbolAlphabet,
    quantized_boundary,
)
from gmm_rans.entropy.rans import RansDecoder, RansEncoder, SymbolCoding
from gmm_rans.codecs.base import Codec, CodecStats, SymbolsLike, as_symbol_list
from gmm_rans.codecs.container import (
    MIXTURE_MAGIC,
    EncodedStream,
    quantize_params,
    unpack_params,
)


def locate_symbol(
    params: MixtureParams,
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind,
    slot: int,
) -> Tuple[int, int]:
    """
    Find the symbol index j with ``B(j) <= slot < B(j + 1)``.

    Keeps ``B(lo) <= slot < B(hi)`` starting from lo = 0, hi = N; valid because
    B(0) = 0 and B(N) = m, and exact because B is strictly increasing.

    Returns:
        ``(index, steps)`` where steps is the number of boundary evaluations
    """
    lo, hi = 0, alphabet.size
    steps = 0
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        steps += 1
        if quantized_boundary(params, alphabet, mid, kind) <= slot:
            lo = mid
        else:
            hi = mid
    return lo, steps


def symbol_coding(
    params: MixtureParams,
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind,
    index: int,
) -> SymbolCoding:
    """``(B(j), B(j+1) - B(j))`` for symbol index ``j``."""
    cum = quantized_boundary(params, alphabet, index, kind)
    upper = quantized_boundary(params, alphabet, index + 1, kind)
    return SymbolCoding(cum, upper - cum, alphabet.precision_bits)


def symbol_bits(
    params: MixtureParams,
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind,
    y: int,
) -> float:
    """
    Information content ``-log2(freq / m)`` of ``y`` under its quantized model.

    Raises:
        SymbolOutOfAlphabetError: If ``y`` is outside the alphabet
    """
    if not alphabet.contains(y):
        raise SymbolOutOfAlphabetError(f"Symbol {y} outside [{alphabet.y_min}, {alphabet.y_max}]", symbol=y)
    coding = symbol_coding(params, alphabet, kind, alphabet.index_of(y))
    return alphabet.precision_bits - math.log2(coding.freq)


def stream_bits(
    params: Sequence[MixtureParams],
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind,
    symbols: SymbolsLike,
) -> float:
    """Sum of :func:`symbol_bits` over a sequence."""
    return sum(symbol_bits(p, alphabet, kind, y) for p, y in zip(params, as_symbol_list(symbols)))


def _interior(index: int, size: int) -> int:
    # B(0) and B(N) are constants and cost no component evaluation
    return (0 < index < size) + (0 < index + 1 < size)


class FlashCodec(Codec):
    """
    Mixture codec evaluating boundaries on demand.

    Example:
        codec = FlashCodec(SymbolAlphabet(-128, 127, 16), ApproximatorKind.LOGISTIC)
        stream = codec.encode(symbols, params)
        assert codec.decode(stream) == list(symbols)
    """

    codec_name = "flash"
    magic = MIXTURE_MAGIC

    def _check_symbols(self, symbols: List[int]) -> None:
        y_min, y_max = self.alphabet.y_min, self.alphabet.y_max
        for i, y in enumerate(symbols):
            if y < y_min or y > y_max:
                raise SymbolOutOfAlphabetError(
                    f"Symbol {y} at position {i} outside [{y_min}, {y_max}]",
                    index=i,
                    symbol=y,
                )

    def _encode_block(
        self, symbols: List[int], block: np.ndarray, components: int
    ) -> Tuple[EncodedStream, CodecStats]:
        self._check_symbols(symbols)
        coded = unpack_params(block, components)
        alphabet, kind = self.alphabet, self.kind
        size, y_min, precision = alphabet.size, alphabet.y_min, alphabet.precision_bits

        encoder = RansEncoder()
        interior = 0
        for i in range(len(symbols) - 1, -1, -1):
            params = coded[i]
            j = symbols[i] - y_min
            cum = quantized_boundary(params, alphabet, j, kind)
            upper = quantized_boundary(params, alphabet, j + 1, kind)
            encoder.put(SymbolCoding(cum, upper - cum, precision))
            interior += _interior(j, size)
        payload = encoder.flush()

        stats = CodecStats(
            symbols=len(symbols),
            boundary_evaluations=2 * len(symbols),
            component_evaluations=components * interior,
            payload_bytes=len(payload),
        )
        stream = EncodedStream(self.make_header(len(symbols), components), block, payload)
        return stream, stats

    def _decode_stream(self, stream: EncodedStream) -> Tuple[List[int], CodecStats]:
        alphabet, kind = stream.alphabet, stream.approximator
        components = stream.header.components
        coded = stream.params()
        size, y_min, precision = alphabet.size, alphabet.y_min, alphabet.precision_bits

        decoder = RansDecoder(stream.payload)
        symbols: List[int] = []
        steps_total = 0
        interior = 0
        for i in range(stream.symbol_count):
            if decoder.starved:
                raise TruncatedStreamError(
                    "Payload exhausted before all symbols were decoded",
                    context={"index": i, "symbol_count": stream.symbol_count},
                )
            params = coded[i]
            lo, steps = locate_symbol(params, alphabet, kind, decoder.peek(precision))
            cum = quantized_boundary(params, alphabet, lo, kind)
            upper = quantized_boundary(params, alphabet, lo + 1, kind)
            decoder.advance(SymbolCoding(cum, upper - cum, precision))
            symbols.append(y_min + lo)
            steps_total += steps
            interior += steps + _interior(lo, size)
        decoder.finish()

        stats = CodecStats(
            symbols=len(symbols),
            boundary_evaluations=steps_total + 2 * len(symbols),
            component_evaluations=components * interior,
            payload_bytes=len(stream.payload),
        )
        return symbols, stats

    def code_length(self, symbols: SymbolsLike, params: Sequence[MixtureParams]) -> float:
        params = list(params)
        components = params[0].components if params else 1
        _, coded = quantize_params(params, components)
        return stream_bits(coded, self.alphabet, self.kind, symbols)


def flash_encode(
    symbols: SymbolsLike,
    params: Sequence[MixtureParams],
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind = ApproximatorKind.LOGISTIC,
) -> EncodedStream:
    """Encode ``symbols`` with the table-free mixture codec."""
    return FlashCodec(alphabet, kind).encode(symbols, params)


def flash_decode(stream: EncodedStream) -> List[int]:
    """Decode a mixture stream using the alphabet and approximator in its header."""
    return FlashCodec(stream.alphabet, stream.approximator).decode(stream)
