"""
Table-building mixture codec, the baseline the flash codec is measured against.

Before coding, every position gets a full row of N + 1 quantized boundaries
(O(K * n * N) CDF evaluations). Coding then reads (cum, freq) from the table and
decoding binary-searches each row. Rows are produced by the same
``quantized_boundary`` call the flash codec uses, so both codecs emit identical
payloads.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from gmm_rans.core.exceptions import (
    ResourceError,
    SymbolOutOfAlphabetError,
    TruncatedStreamError,
)
from gmm_rans.entropy.mixture_cdf import (
    ApproximatorKind,
    MixtureParams,
    SymbolAlphabet,
    quantized_boundary,
)
from gmm_rans.entropy.rans import RansDecoder, RansEncoder, SymbolCoding
from gmm_rans.codecs.base import Codec, CodecStats, SymbolsLike
from gmm_rans.codecs.container import (
    MIXTURE_MAGIC,
    EncodedStream,
    quantize_params,
    unpack_params,
)
from gmm_rans.codecs.flash import stream_bits


@dataclass
class CdfTable:
    """(n, N + 1) int32 matrix of quantized boundaries, one row per coded position."""

    boundaries: np.ndarray
    alphabet: SymbolAlphabet
    kind: ApproximatorKind
    component_evaluations: int = 0

    @property
    def rows(self) -> int:
        return int(self.boundaries.shape[0])

    def coding(self, position: int, index: int) -> SymbolCoding:
        row = self.boundaries[position]
        cum = int(row[index])
        return SymbolCoding(cum, int(row[index + 1]) - cum, self.alphabet.precision_bits)

    def locate(self, position: int, slot: int) -> int:
        """Index j of the row interval containing ``slot``."""
        row = self.boundaries[position]
        return int(np.searchsorted(row, slot, side="right")) - 1


def build_table(
    params: Sequence[MixtureParams],
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind,
) -> CdfTable:
    """
    Materialize the quantized CDF of every position.

    Raises:
        ResourceError: If the (n, N + 1) matrix cannot be allocated
    """
    size = alphabet.size
    try:
        table = np.empty((len(params), size + 1), dtype=np.int32)
    except MemoryError as e:
        raise ResourceError(
            "Cannot allocate CDF table",
            context={"rows": len(params), "columns": size + 1},
            original_exception=e,
        ) from e

    components = 0
    for i, p in enumerate(params):
        table[i] = [quantized_boundary(p, alphabet, j, kind) for j in range(size + 1)]
        components += p.components * (size - 1)
    return CdfTable(table, alphabet, kind, component_evaluations=components)


class TableCodec(Codec):
    """Mixture codec that builds the whole CDF table before coding."""

    codec_name = "table"
    magic = MIXTURE_MAGIC

    def _encode_block(
        self, symbols: List[int], block: np.ndarray, components: int
    ) -> Tuple[EncodedStream, CodecStats]:
        y_min, y_max = self.alphabet.y_min, self.alphabet.y_max
        for i, y in enumerate(symbols):
            if y < y_min or y > y_max:
                raise SymbolOutOfAlphabetError(
                    f"Symbol {y} at position {i} outside [{y_min}, {y_max}]", index=i, symbol=y
                )

        table = build_table(unpack_params(block, components), self.alphabet, self.kind)
        encoder = RansEncoder()
        for i in range(len(symbols) - 1, -1, -1):
            encoder.put(table.coding(i, symbols[i] - y_min))
        payload = encoder.flush()

        stats = CodecStats(
            symbols=len(symbols),
            boundary_evaluations=table.rows * (self.alphabet.size + 1),
            component_evaluations=table.component_evaluations,
            rows_built=table.rows,
            payload_bytes=len(payload),
        )
        return EncodedStream(self.make_header(len(symbols), components), block, payload), stats

    def _decode_stream(self, stream: EncodedStream) -> Tuple[List[int], CodecStats]:
        alphabet = stream.alphabet
        precision = alphabet.precision_bits
        table = build_table(stream.params(), alphabet, stream.approximator)

        decoder = RansDecoder(stream.payload)
        symbols: List[int] = []
        for i in range(stream.symbol_count):
            if decoder.starved:
                raise TruncatedStreamError(
                    "Payload exhausted before all symbols were decoded",
                    context={"index": i, "symbol_count": stream.symbol_count},
                )
            j = table.locate(i, decoder.peek(precision))
            decoder.advance(table.coding(i, j))
            symbols.append(alphabet.y_min + j)
        decoder.finish()

        stats = CodecStats(
            symbols=len(symbols),
            boundary_evaluations=table.rows * (alphabet.size + 1),
            component_evaluations=table.component_evaluations,
            rows_built=table.rows,
            payload_bytes=len(stream.payload),
        )
        return symbols, stats

    def code_length(self, symbols: SymbolsLike, params: Sequence[MixtureParams]) -> float:
        params = list(params)
        _, coded = quantize_params(params, params[0].components if params else 1)
        return stream_bits(coded, self.alphabet, self.kind, symbols)


def table_encode(
    symbols: SymbolsLike,
    params: Sequence[MixtureParams],
    alphabet: SymbolAlphabet,
    kind: ApproximatorKind = ApproximatorKind.LOGISTIC,
) -> EncodedStream:
    return TableCodec(alphabet, kind).encode(symbols, params)


def table_decode(stream: EncodedStream) -> List[int]:
    return TableCodec(stream.alphabet, stream.approximator).decode(stream)
