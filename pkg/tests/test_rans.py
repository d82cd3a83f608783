"""
Unit tests for the rANS core.

Tests cover:
- The encode map on a hand-computed example
- Encoder initialization and flush layout
- Decoder initialization, peek and advance
- LIFO round trips over random coding sequences
- Bitrate bounds and end-of-stream checks
"""

from bisect import bisect_right
from typing import List, Tuple

import numpy as np
import pytest

from gmm_rans.core.exceptions import CorruptStreamError, ParameterError, TruncatedStreamError
from gmm_rans.entropy.rans import (
    RANS_L,
    RansDecoder,
    RansEncoder,
    SymbolCoding,
    decode_map,
    encode_map,
    ideal_code_length,
)


def random_model(rng: np.random.Generator, precision_bits: int) -> List[int]:
    """Cumulative frequencies of a random model with 2..64 symbols, ending at m."""
    total = 1 << precision_bits
    size = int(rng.integers(2, 65))
    cuts = np.sort(rng.choice(np.arange(1, total), size=size - 1, replace=False))
    return [0] + cuts.tolist() + [total]


def sample_stream(
    rng: np.random.Generator, count: int, precision_bits: int
) -> Tuple[List[int], List[SymbolCoding]]:
    """Symbols drawn from their own models, and their codings."""
    cums = random_model(rng, precision_bits)
    slots = rng.integers(0, 1 << precision_bits, size=count).tolist()
    symbols = [bisect_right(cums, d) - 1 for d in slots]
    codings = [SymbolCoding(cums[s], cums[s + 1] - cums[s], precision_bits) for s in symbols]
    return symbols, codings


def encode_all(codings: List[SymbolCoding]) -> bytes:
    encoder = RansEncoder()
    for coding in reversed(codings):
        encoder.put(coding)
    return encoder.flush()


def decode_all(payload: bytes, cums: List[int], count: int, precision_bits: int) -> Tuple[List[int], RansDecoder]:
    decoder = RansDecoder(payload)
    symbols = []
    for _ in range(count):
        s = bisect_right(cums, decoder.peek(precision_bits)) - 1
        decoder.advance(SymbolCoding(cums[s], cums[s + 1] - cums[s], precision_bits))
        symbols.append(s)
    return symbols, decoder


@pytest.mark.unit
class TestEncodeMap:
    """Test the arithmetic of the state transition."""

    def test_hand_example(self):
        """Test C(s, 5) = 8 * 1 + 2 + 2 = 12 for m = 8, l = 3, b = 2."""
        assert encode_map(5, cum=2, freq=3, precision_bits=3) == 12

    def test_certain_symbol_is_identity(self):
        """Test that freq = m leaves the state unchanged."""
        for x in (RANS_L, RANS_L + 12345, 2 * RANS_L - 1):
            assert encode_map(x, 0, 1 << 16, 16) == x

    def test_inverse(self, rng):
        """Test decode_map(encode_map(x)) = x and that the slot lies in the interval."""
        precision = 8
        cums = random_model(rng, precision)
        for x in range(RANS_L, RANS_L + 4096):
            s = x % (len(cums) - 1)
            cum, freq = cums[s], cums[s + 1] - cums[s]
            y = encode_map(x, cum, freq, precision)
            assert cum <= y % (1 << precision) < cum + freq
            assert decode_map(y, cum, freq, precision) == x


@pytest.mark.unit
class TestRansEncoder:
    """Test encoder state and flush."""

    def test_initial_state(self):
        """Test that a fresh encoder starts at L."""
        assert RansEncoder().state == 8388608

    def test_empty_flush(self):
        """Test that zero symbols flush to the 4 reversed state bytes."""
        assert RansEncoder().flush() == bytes([0x00, 0x80, 0x00, 0x00])

    def test_certain_symbol_adds_nothing(self):
        """Test that a certain symbol leaves the state and scratch untouched."""
        encoder = RansEncoder()
        for _ in range(100):
            encoder.put(SymbolCoding(0, 1 << 16, 16))
        assert encoder.state == RANS_L
        assert encoder.scratch == b""

    def test_payload_length(self, rng):
        """Test payload length = 4 + renormalization bytes."""
        _, codings = sample_stream(rng, 500, 12)
        encoder = RansEncoder()
        for coding in reversed(codings):
            encoder.put(coding)
        emitted = len(encoder.scratch)
        assert len(encoder.flush()) == 4 + emitted

    @pytest.mark.parametrize(
        "coding",
        [SymbolCoding(0, 0, 16), SymbolCoding(-1, 2, 16), SymbolCoding(65535, 2, 16)],
    )
    def test_invalid_coding(self, coding):
        """Test that a broken quantizer output is rejected."""
        with pytest.raises(ParameterError):
            RansEncoder().put(coding)
        with pytest.raises(ParameterError):
            coding.validate()

    def test_flush_twice(self):
        """Test that a flushed encoder rejects further use."""
        encoder = RansEncoder()
        encoder.flush()
        with pytest.raises(ParameterError):
            encoder.flush()
        with pytest.raises(ParameterError):
            encoder.put(SymbolCoding(0, 1, 8))


@pytest.mark.unit
class TestRansDecoder:
    """Test decoder initialization, peek and end-of-stream checks."""

    def test_init_from_empty_stream(self):
        """Test that the empty payload restores x = L."""
        decoder = RansDecoder(bytes([0x00, 0x80, 0x00, 0x00]))
        assert decoder.state == RANS_L
        assert decoder.cursor == 4
        decoder.finish()

    def test_peek(self):
        """Test the slot at x = L and that peek does not advance."""
        decoder = RansDecoder(RansEncoder().flush())
        assert decoder.peek(16) == 0
        assert decoder.peek(16) == 0
        assert decoder.cursor == 4

    def test_short_payload(self):
        """Test that fewer than 4 bytes is a truncated stream."""
        with pytest.raises(TruncatedStreamError):
            RansDecoder(b"\x00\x80\x00")

    def test_slot_outside_interval(self):
        """Test that advancing with the wrong coding is rejected."""
        decoder = RansDecoder(RansEncoder().flush())
        with pytest.raises(ParameterError):
            decoder.advance(SymbolCoding(10, 5, 16))

    def test_trailing_bytes(self, rng):
        """Test that unread bytes after the last symbol are reported."""
        precision = 12
        cums = random_model(rng, precision)
        slots = rng.integers(0, 1 << precision, size=300).tolist()
        symbols = [bisect_right(cums, d) - 1 for d in slots]
        payload = encode_all([SymbolCoding(cums[s], cums[s + 1] - cums[s], precision) for s in symbols])
        _, decoder = decode_all(payload + b"\x00", cums, len(symbols), precision)
        with pytest.raises(CorruptStreamError):
            decoder.finish()

    def test_truncated_payload(self, rng):
        """Test that a payload missing its last byte is detected."""
        precision = 12
        cums = random_model(rng, precision)
        slots = rng.integers(0, 1 << precision, size=2000).tolist()
        symbols = [bisect_right(cums, d) - 1 for d in slots]
        payload = encode_all([SymbolCoding(cums[s], cums[s + 1] - cums[s], precision) for s in symbols])
        assert len(payload) > 4
        _, decoder = decode_all(payload[:-1], cums, len(symbols), precision)
        assert decoder.starved
        with pytest.raises(TruncatedStreamError):
            decoder.finish()


@pytest.mark.unit
class TestRoundTrip:
    """Test the LIFO contract and bitrate."""

    def test_lifo_round_trip(self, rng):
        """Test random coding sequences with random precision decode exactly."""
        total = 0
        while total < 10_000:
            precision = int(rng.integers(8, 17))
            count = int(rng.integers(1, 1500))
            cums = random_model(rng, precision)
            slots = rng.integers(0, 1 << precision, size=count).tolist()
            symbols = [bisect_right(cums, d) - 1 for d in slots]
            payload = encode_all([SymbolCoding(cums[s], cums[s + 1] - cums[s], precision) for s in symbols])
            decoded, decoder = decode_all(payload, cums, count, precision)
            decoder.finish()
            assert decoded == symbols
            total += count

    @pytest.mark.parametrize("precision", [8, 12, 16])
    def test_bitrate_bounds(self, rng, precision):
        """Test ideal - 32 <= payload bits <= ideal + 40."""
        for _ in range(5):
            _, codings = sample_stream(rng, 4096, precision)
            payload = encode_all(codings)
            ideal = ideal_code_length(codings)
            assert ideal - 32 <= 8 * len(payload) <= ideal + 40

    def test_ideal_code_length(self):
        """Test the information content of half-probability symbols."""
        assert ideal_code_length([SymbolCoding(0, 128, 8)] * 10) == pytest.approx(10.0)
