"""Common codec interface, statistics and chunked execution."""

from abc import abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from gmm_rans.core.base import BaseComponent
from gmm_rans.core.exceptions import HeaderMismatchError, ParameterError
from gmm_rans.core.metrics import get_metrics_registry
from gmm_rans.entropy.mixture_cdf import ApproximatorKind, MixtureParams, SymbolAlphabet
from gmm_rans.codecs.container import (
    MIXTURE_MAGIC,
    STREAM_VERSION,
    ChunkedStream,
    EncodedStream,
    StreamHeader,
    pack_params,
)

_INT16_MIN, _INT16_MAX = -(1 << 15), (1 << 15) - 1

SymbolsLike = Union[Sequence[int], np.ndarray]


@dataclass
class CodecStats:
    """Work counted during one encode or decode call."""

    symbols: int = 0
    boundary_evaluations: int = 0
    component_evaluations: int = 0
    rows_built: int = 0
    payload_bytes: int = 0

    def merge(self, other: "CodecStats") -> "CodecStats":
        return CodecStats(
            symbols=self.symbols + other.symbols,
            boundary_evaluations=self.boundary_evaluations + other.boundary_evaluations,
            component_evaluations=self.component_evaluations + other.component_evaluations,
            rows_built=self.rows_built + other.rows_built,
            payload_bytes=self.payload_bytes + other.payload_bytes,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def as_symbol_list(symbols: SymbolsLike) -> List[int]:
    """Convert any integer sequence to a list of Python ints."""
    return np.asarray(symbols, dtype=np.int64).reshape(-1).tolist()


class Codec(BaseComponent):
    """
    Base class of the mixture, table and single-Gaussian codecs.

    Subclasses implement :meth:`_encode_block` and :meth:`_decode_stream`; this
    class handles parameter serialization, statistics, metrics and chunking.
    """

    codec_name: ClassVar[str] = "codec"
    magic: ClassVar[bytes] = MIXTURE_MAGIC

    def __init__(
        self,
        alphabet: SymbolAlphabet,
        kind: ApproximatorKind = ApproximatorKind.LOGISTIC,
        name: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(name=name or self.codec_name, **kwargs)
        if not (_INT16_MIN <= alphabet.y_min and alphabet.y_max <= _INT16_MAX):
            raise ParameterError("Alphabet bounds must fit in 16-bit signed integers")
        self.alphabet = alphabet
        self.kind = ApproximatorKind.parse(kind)
        self.last_encode_stats = CodecStats()
        self.last_decode_stats = CodecStats()

    def _initialize(self) -> None:
        """Nothing to prepare by default."""

    # ------------------------------------------------------------------
    # Subclass hooks
    # ------------------------------------------------------------------

    @abstractmethod
    def _encode_block(
        self, symbols: List[int], block: np.ndarray, components: int
    ) -> Tuple[EncodedStream, CodecStats]:
        """Encode symbols under an already serialized parameter block."""

    @abstractmethod
    def _decode_stream(self, stream: EncodedStream) -> Tuple[List[int], CodecStats]:
        """Decode one stream whose header was already checked."""

    @abstractmethod
    def code_length(self, symbols: SymbolsLike, params: Sequence[MixtureParams]) -> float:
        """Ideal code length in bits of ``symbols`` under their coded models."""

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def make_header(self, symbol_count: int, components: int) -> StreamHeader:
        return StreamHeader(
            magic=self.magic,
            version=STREAM_VERSION,
            approximator=self.kind,
            precision_bits=self.alphabet.precision_bits,
            components=components,
            y_min=self.alphabet.y_min,
            y_max=self.alphabet.y_max,
            symbol_count=symbol_count,
        )

    def encode(self, symbols: SymbolsLike, params: Sequence[MixtureParams]) -> EncodedStream:
        """
        Encode ``symbols`` with one mixture model per position.

        Raises:
            ParameterError: Length mismatch or inconsistent component counts
            SymbolOutOfAlphabetError: A symbol cannot be coded
        """
        stream, stats = self._encode_one(as_symbol_list(symbols), list(params))
        self._record("encode", stats)
        return stream

    def encode_quantized(self, symbols: SymbolsLike, block: np.ndarray, components: int) -> EncodedStream:
        """Encode with a parameter block taken verbatim from an existing stream."""
        self.initialize()
        stream, stats = self._encode_block(as_symbol_list(symbols), block, components)
        self._record("encode", stats)
        return stream

    def decode(self, stream: EncodedStream) -> List[int]:
        """
        Decode a stream produced by a compatible codec.

        Raises:
            HeaderMismatchError: The stream belongs to a different codec family
            TruncatedStreamError: The payload ran out
            CorruptStreamError: The payload did not end on the initial state
        """
        symbols, stats = self._decode_one(stream)
        self._record("decode", stats)
        return symbols

    def encode_chunked(
        self,
        symbols: SymbolsLike,
        params: Sequence[MixtureParams],
        chunk_size: int,
        workers: int = 1,
    ) -> ChunkedStream:
        """
        Split the input into independently coded chunks of ``chunk_size``
        symbols and encode them on ``workers`` threads.
        """
        self.initialize()
        symbol_list = as_symbol_list(symbols)
        params = list(params)
        if len(symbol_list) != len(params):
            raise ParameterError("symbols and params must have the same length")
        if chunk_size <= 0:
            chunk_size = max(len(symbol_list), 1)

        spans = [(i, min(i + chunk_size, len(symbol_list))) for i in range(0, len(symbol_list), chunk_size)]
        if not spans:
            spans = [(0, 0)]

        def work(span: Tuple[int, int]) -> Tuple[EncodedStream, CodecStats]:
            start, stop = span
            return self._encode_one(symbol_list[start:stop], params[start:stop])

        results = self._run(work, spans, workers)
        self._record("encode", self._merge(r[1] for r in results))
        return ChunkedStream([r[0] for r in results])

    def decode_chunked(self, chunked: ChunkedStream, workers: int = 1) -> List[int]:
        """Decode every chunk and concatenate the symbols in chunk order."""
        self.initialize()
        results = self._run(self._decode_one, chunked.chunks, workers)
        self._record("decode", self._merge(r[1] for r in results))
        symbols: List[int] = []
        for part, _ in results:
            symbols.extend(part)
        return symbols

    # ------------------------------------------------------------------
    # Internals
    # ------------------------------------------------------------------

    def _encode_one(
        self, symbols: List[int], params: List[MixtureParams]
    ) -> Tuple[EncodedStream, CodecStats]:
        self.initialize()
        if len(symbols) != len(params):
            raise ParameterError(
                "symbols and params must have the same length",
                context={"symbols": len(symbols), "params": len(params)},
            )
        components = params[0].components if params else 1
        block = pack_params(params, components)
        return self._encode_block(symbols, block, components)

    def _decode_one(self, stream: EncodedStream) -> Tuple[List[int], CodecStats]:
        self.initialize()
        if stream.header.magic != self.magic:
            raise HeaderMismatchError(
                f"{self.codec_name} codec cannot decode a {stream.header.magic!r} stream"
            )
        return self._decode_stream(stream)

    @staticmethod
    def _run(work, items, workers: int) -> list:
        items = list(items)
        if workers <= 1 or len(items) <= 1:
            return [work(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="gmm-rans-chunk") as executor:
            return list(executor.map(work, items))

    @staticmethod
    def _merge(stats) -> CodecStats:
        total = CodecStats()
        for s in stats:
            total = total.merge(s)
        return total

    def _record(self, direction: str, stats: CodecStats) -> None:
        registry = get_metrics_registry()
        if direction == "encode":
            self.last_encode_stats = stats
            registry.counter("symbols_encoded_total").inc(stats.symbols)
            registry.counter("payload_bytes_total").inc(stats.payload_bytes)
        else:
            self.last_decode_stats = stats
            registry.counter("symbols_decoded_total").inc(stats.symbols)
        registry.counter("boundary_evaluations_total").inc(stats.boundary_evaluations)
        registry.counter("component_evaluations_total").inc(stats.component_evaluations)
        if stats.rows_built:
            registry.counter("table_rows_built_total").inc(stats.rows_built)

        self.logger.debug(
            f"{self.codec_name} {direction}: {stats.symbols} symbols, "
            f"{stats.boundary_evaluations} boundary evaluations, {stats.payload_bytes} payload bytes"
        )
