"""
Byte-renormalized rANS with a 32-bit state.

The coder knows nothing about probability models: every step takes a
:class:`SymbolCoding` (cumulative frequency, frequency, precision). Symbols are
encoded last-to-first so that the decoder reads the payload front to back.

Stream layout produced by :meth:`RansEncoder.flush`: the final encoder state,
most significant byte first, followed by the renormalization bytes in reverse
emission order.
"""

import math
from typing import Iterable, NamedTuple

from gmm_rans.core.exceptions import CorruptStreamError, ParameterError, TruncatedStreamError


RANS_L = 1 << 23
RANS_STATE_BYTES = 4
# Every state between steps is below 2^31 for any P <= 16.
RANS_STATE_LIMIT = 1 << 31


class SymbolCoding(NamedTuple):
    """Interval ``[cum, cum + freq)`` of a symbol inside ``[0, 2^precision_bits)``."""

    cum: int
    freq: int
    precision_bits: int

    def validate(self) -> "SymbolCoding":
        """
        Raises:
            ParameterError: If freq < 1, cum < 0 or cum + freq > 2^P
        """
        total = 1 << self.precision_bits
        if self.freq < 1 or self.cum < 0 or self.cum + self.freq > total:
            raise ParameterError(
                "Invalid symbol coding",
                context={"cum": self.cum, "freq": self.freq, "precision_bits": self.precision_bits},
            )
        return self


def encode_map(x: int, cum: int, freq: int, precision_bits: int) -> int:
    """``C(s, x) = m * (x // freq) + cum + x % freq`` with m = 2^P, no renormalization."""
    return ((x // freq) << precision_bits) + (x % freq) + cum


def decode_map(x: int, cum: int, freq: int, precision_bits: int) -> int:
    """Inverse of :func:`encode_map` for a state whose slot lies in ``[cum, cum + freq)``."""
    return freq * (x >> precision_bits) + (x & ((1 << precision_bits) - 1)) - cum


class RansEncoder:
    """
    rANS encoder state: the integer ``x`` and the bytes emitted so far.

    Example:
        encoder = RansEncoder()
        for coding in reversed(codings):
            encoder.put(coding)
        payload = encoder.flush()
    """

    __slots__ = ("_state", "_scratch", "_flushed")

    def __init__(self) -> None:
        self._state = RANS_L
        self._scratch = bytearray()
        self._flushed = False

    @property
    def state(self) -> int:
        return self._state

    @property
    def scratch(self) -> bytes:
        """Renormalization bytes in emission order."""
        return bytes(self._scratch)

    def put(self, coding: SymbolCoding) -> None:
        """
        Encode one symbol: renormalize, then ``x = (x // freq) * m + cum + x % freq``.

        Raises:
            ParameterError: On an invalid coding or after :meth:`flush`
        """
        cum, freq, precision_bits = coding
        if freq < 1 or cum < 0 or cum + freq > (1 << precision_bits):
            raise ParameterError(
                "Invalid symbol coding",
                context={"cum": cum, "freq": freq, "precision_bits": precision_bits},
            )
        if self._flushed:
            raise ParameterError("Encoder already flushed")

        x = self._state
        x_max = ((RANS_L >> precision_bits) << 8) * freq
        while x >= x_max:
            self._scratch.append(x & 0xFF)
            x >>= 8
        x = encode_map(x, cum, freq, precision_bits)

        if __debug__:
            assert RANS_L <= x < RANS_STATE_LIMIT, f"encoder state {x:#x} out of bounds"
        self._state = x

    def flush(self) -> bytes:
        """
        Emit the state and return the payload.

        Returns:
            ``reverse(scratch + state.to_bytes(4, "little"))``
        """
        if self._flushed:
            raise ParameterError("Encoder already flushed")
        self._flushed = True
        self._scratch += self._state.to_bytes(RANS_STATE_BYTES, "little")
        return bytes(self._scratch[::-1])


class RansDecoder:
    """
    rANS decoder reading a payload front to back.

    Example:
        decoder = RansDecoder(payload)
        slot = decoder.peek(16)
        ...  # find the coding whose interval contains slot
        decoder.advance(coding)
        decoder.finish()
    """

    __slots__ = ("_payload", "_state", "_cursor")

    def __init__(self, payload: bytes) -> None:
        """
        Raises:
            TruncatedStreamError: If the payload is shorter than the 4-byte state
        """
        if len(payload) < RANS_STATE_BYTES:
            raise TruncatedStreamError(
                "Payload shorter than the rANS state",
                context={"payload_bytes": len(payload)},
            )
        self._payload = bytes(payload)
        self._state = int.from_bytes(self._payload[:RANS_STATE_BYTES], "big")
        self._cursor = RANS_STATE_BYTES

    @property
    def state(self) -> int:
        return self._state

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def starved(self) -> bool:
        """True when the state fell below L because the payload ran out."""
        return self._state < RANS_L

    def peek(self, precision_bits: int) -> int:
        """Current slot ``x mod 2^P``; does not advance."""
        return self._state & ((1 << precision_bits) - 1)

    def advance(self, coding: SymbolCoding) -> None:
        """
        Consume the symbol whose interval contains the current slot, then
        refill from the payload while ``x < L``.

        Raises:
            ParameterError: If the slot is outside the coding's interval
        """
        cum, freq, precision_bits = coding
        x = self._state
        slot = x & ((1 << precision_bits) - 1)
        if not cum <= slot < cum + freq:
            raise ParameterError(
                "Slot outside symbol interval",
                context={"slot": slot, "cum": cum, "freq": freq},
            )

        x = decode_map(x, cum, freq, precision_bits)
        payload = self._payload
        cursor = self._cursor
        end = len(payload)
        while x < RANS_L and cursor < end:
            x = (x << 8) | payload[cursor]
            cursor += 1

        if __debug__:
            assert x < RANS_STATE_LIMIT, f"decoder state {x:#x} out of bounds"
        self._state = x
        self._cursor = cursor

    def finish(self) -> None:
        """
        Check that decoding ended exactly where encoding started.

        Raises:
            TruncatedStreamError: The state is below L with no bytes left
            CorruptStreamError: Unread bytes remain or the final state is not L
        """
        if self._state < RANS_L:
            raise TruncatedStreamError(
                "Payload exhausted before the final state was restored",
                context={"state": hex(self._state), "cursor": self._cursor},
            )
        if self._state != RANS_L or self._cursor != len(self._payload):
            raise CorruptStreamError(
                "Decoder did not end on the initial encoder state",
                context={
                    "state": hex(self._state),
                    "cursor": self._cursor,
                    "payload_bytes": len(self._payload),
                },
            )


def ideal_code_length(codings: Iterable[SymbolCoding]) -> float:
    """Sum of ``log2(m / freq)`` in bits."""
    return sum(c.precision_bits - math.log2(c.freq) for c in codings)
