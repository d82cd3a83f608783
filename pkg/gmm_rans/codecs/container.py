"""
Binary container shared by all codecs.

Layout, little-endian throughout::

    header        16 bytes  magic(4) version(1) approximator(1) precision(1) K(1)
                            y_min(i16) y_max(i16) symbol_count(u32)
    params block  12 * K * symbol_count bytes of float32, per symbol
                  (w_0..w_K-1, mu_0..mu_K-1, sigma_0..sigma_K-1)
    payload       rANS bytes (at least the 4-byte state)

Independent chunks travel in a ``FGMC`` wrapper: magic, u32 chunk count, one
u32 byte length per chunk, then the chunk streams back to back.
"""

import struct
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from gmm_rans.core.exceptions import (
    CorruptStreamError,
    HeaderMismatchError,
    ParameterError,
    TruncatedStreamError,
    wrap_exception,
)
from gmm_rans.entropy.mixture_cdf import (
    MAX_COMPONENTS,
    ApproximatorKind,
    MixtureParams,
    SymbolAlphabet,
)
from gmm_rans.entropy.rans import RANS_STATE_BYTES


MIXTURE_MAGIC = b"FGMM"
SINGLE_GAUSSIAN_MAGIC = b"FGSM"
CHUNKED_MAGIC = b"FGMC"
STREAM_VERSION = 1

_HEADER = struct.Struct("<4sBBBBhhI")
HEADER_SIZE = _HEADER.size
_CHUNK_PREFIX = struct.Struct("<4sI")
PARAM_DTYPE = np.dtype("<f4")


@dataclass(frozen=True)
class StreamHeader:
    """Fixed 16-byte stream header."""

    magic: bytes
    version: int
    approximator: ApproximatorKind
    precision_bits: int
    components: int
    y_min: int
    y_max: int
    symbol_count: int

    @property
    def alphabet(self) -> SymbolAlphabet:
        return SymbolAlphabet(self.y_min, self.y_max, self.precision_bits)

    @property
    def params_block_size(self) -> int:
        return 12 * self.components * self.symbol_count

    def pack(self) -> bytes:
        return _HEADER.pack(
            self.magic,
            self.version,
            int(self.approximator),
            self.precision_bits,
            self.components,
            self.y_min,
            self.y_max,
            self.symbol_count,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "StreamHeader":
        """
        Parse and validate a header.

        Raises:
            TruncatedStreamError: Fewer than 16 bytes
            HeaderMismatchError: Unknown magic, version or field values
        """
        if len(data) < HEADER_SIZE:
            raise TruncatedStreamError(
                "Stream shorter than its header", context={"bytes": len(data)}
            )
        magic, version, code, precision, k, y_min, y_max, count = _HEADER.unpack_from(data)

        if magic not in (MIXTURE_MAGIC, SINGLE_GAUSSIAN_MAGIC):
            raise HeaderMismatchError(f"Bad magic {magic!r}")
        if version != STREAM_VERSION:
            raise HeaderMismatchError(f"Unsupported stream version {version}")
        if not 1 <= k <= MAX_COMPONENTS:
            raise HeaderMismatchError(f"Invalid component count {k}")

        header = cls(magic, version, ApproximatorKind.from_code(code), precision, k, y_min, y_max, count)
        try:
            header.alphabet
        except ParameterError as e:
            raise HeaderMismatchError(
                "Header alphabet is invalid", original_exception=e
            ) from e
        return header


def pack_params(params: Sequence[MixtureParams], components: int) -> np.ndarray:
    """
    Serialize per-symbol params into the float32 parameter block.

    Raises:
        ParameterError: If any params have a different component count
    """
    block = np.empty((len(params), 3 * components), dtype=PARAM_DTYPE)
    for i, p in enumerate(params):
        if len(p.weights) != components:
            raise ParameterError(
                f"Mixture at position {i} has {len(p.weights)} components, expected {components}"
            )
        block[i] = p.to_row()
    return block


def unpack_params(block: np.ndarray, components: int) -> List[MixtureParams]:
    """
    Rebuild params from a parameter block.

    Encoder and decoder both code with these values, never with the
    caller's doubles.
    """
    rows = np.asarray(block, dtype=PARAM_DTYPE).astype(np.float64).tolist()
    return [MixtureParams.from_row(row, components) for row in rows]


def quantize_params(params: Sequence[MixtureParams], components: int) -> Tuple[np.ndarray, List[MixtureParams]]:
    """Round params through float32; returns the block and the coded params."""
    block = pack_params(params, components)
    return block, unpack_params(block, components)


@dataclass
class EncodedStream:
    """Header, float32 parameter block and rANS payload."""

    header: StreamHeader
    params_block: np.ndarray
    payload: bytes

    @property
    def alphabet(self) -> SymbolAlphabet:
        return self.header.alphabet

    @property
    def approximator(self) -> ApproximatorKind:
        return self.header.approximator

    @property
    def symbol_count(self) -> int:
        return self.header.symbol_count

    def params(self) -> List[MixtureParams]:
        """
        Raises:
            CorruptStreamError: The block holds an invalid mixture (NaN, sigma <= 0, zero weights)
        """
        try:
            return unpack_params(self.params_block, self.header.components)
        except ParameterError as e:
            raise wrap_exception(
                e, "Parameter block holds an invalid mixture", CorruptStreamError,
                symbol_count=self.header.symbol_count,
            ) from e

    def to_bytes(self) -> bytes:
        block = np.ascontiguousarray(self.params_block, dtype=PARAM_DTYPE)
        return self.header.pack() + block.tobytes() + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedStream":
        """
        Raises:
            TruncatedStreamError: Data ends inside the params block or payload state
            HeaderMismatchError: Invalid header
        """
        header = StreamHeader.unpack(data)
        block_end = HEADER_SIZE + header.params_block_size
        if len(data) < block_end + RANS_STATE_BYTES:
            raise TruncatedStreamError(
                "Stream ends before its parameter block and payload state",
                context={"bytes": len(data), "required": block_end + RANS_STATE_BYTES},
            )
        block = np.frombuffer(
            data, dtype=PARAM_DTYPE, count=3 * header.components * header.symbol_count, offset=HEADER_SIZE
        ).reshape(header.symbol_count, 3 * header.components)
        return cls(header, block.copy(), bytes(data[block_end:]))

    def __len__(self) -> int:
        return HEADER_SIZE + self.header.params_block_size + len(self.payload)


@dataclass
class ChunkedStream:
    """Independently coded chunks of one symbol sequence, in order."""

    chunks: List[EncodedStream]

    @property
    def symbol_count(self) -> int:
        return sum(c.symbol_count for c in self.chunks)

    @property
    def payload_bytes(self) -> int:
        return sum(len(c.payload) for c in self.chunks)

    @property
    def boundaries(self) -> List[int]:
        """Symbol offsets where each chunk starts."""
        offsets, start = [], 0
        for chunk in self.chunks:
            offsets.append(start)
            start += chunk.symbol_count
        return offsets

    def to_bytes(self) -> bytes:
        encoded = [c.to_bytes() for c in self.chunks]
        lengths = struct.pack(f"<{len(encoded)}I", *(len(e) for e in encoded))
        return _CHUNK_PREFIX.pack(CHUNKED_MAGIC, len(encoded)) + lengths + b"".join(encoded)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ChunkedStream":
        """
        Raises:
            TruncatedStreamError: Data shorter than the declared chunk table or chunks
            HeaderMismatchError: Bad magic
        """
        if len(data) < _CHUNK_PREFIX.size:
            raise TruncatedStreamError("Chunked stream shorter than its prefix")
        magic, count = _CHUNK_PREFIX.unpack_from(data)
        if magic != CHUNKED_MAGIC:
            raise HeaderMismatchError(f"Bad chunk container magic {magic!r}")

        table_end = _CHUNK_PREFIX.size + 4 * count
        if len(data) < table_end:
            raise TruncatedStreamError("Chunked stream ends inside its length table")
        lengths = struct.unpack_from(f"<{count}I", data, _CHUNK_PREFIX.size)

        chunks, offset = [], table_end
        for index, length in enumerate(lengths):
            if offset + length > len(data):
                raise TruncatedStreamError(
                    "Chunked stream ends inside a chunk", context={"chunk": index}
                )
            chunks.append(EncodedStream.from_bytes(data[offset:offset + length]))
            offset += length
        return cls(chunks)


def read_stream(data: bytes):
    """Parse either a single stream or a chunked container."""
    if data[:4] == CHUNKED_MAGIC:
        return ChunkedStream.from_bytes(data)
    return EncodedStream.from_bytes(data)
