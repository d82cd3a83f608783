"""
Benchmark runner: time every codec on one workload, verify round trips and
flash/table payload equality, and summarize in a :class:`BenchReport`.

Only entropy coding is timed; workload generation, GSM table construction and
file I/O happen outside the timed sections.
"""

import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from gmm_rans.core.exceptions import ParameterError, VerificationError
from gmm_rans.core.logger import clear_run_id, get_logger, log_performance, set_run_id
from gmm_rans.core.metrics import Histogram, environment_info, get_metrics_registry
from gmm_rans.entropy.mixture_cdf import ApproximatorKind, SymbolAlphabet
from gmm_rans.codecs.base import Codec
from gmm_rans.codecs.container import ChunkedStream
from gmm_rans.codecs.flash import FlashCodec
from gmm_rans.codecs.gsm import GsmCodec
from gmm_rans.codecs.table import TableCodec
from gmm_rans.bench.workload import Workload, WorkloadSpec, generate_gsm_workload, generate_workload

logger = get_logger(__name__)

CODEC_NAMES = ("flash", "table", "gsm")
# Allowed distance between payload bits and entropy bits, per chunk
PAYLOAD_SLACK_ABOVE = 40
PAYLOAD_SLACK_BELOW = 32
WORKLOAD_NOTE = (
    "Synthetic workload; the default symbol count is an order-of-magnitude "
    "stand-in for one image latent tensor."
)


class CodecResult(BaseModel):
    """Measurements of one codec on one workload."""

    codec: str
    encode_seconds: float = Field(description="Median encode wall time over the repeats")
    decode_seconds: float = Field(description="Median decode wall time over the repeats")
    encode_symbols_per_second: float
    decode_symbols_per_second: float
    init_seconds: float = Field(default=0.0, description="One-off setup time, excluded from coding times")
    payload_bits: int
    entropy_bits: float
    bits_per_symbol: float
    overhead_bits_per_symbol: float
    encode_boundary_evaluations: int
    decode_boundary_evaluations: int
    rows_built: int
    mismatches: int


class EquivalenceFlags(BaseModel):
    """Hard pass/fail checks of a bench run."""

    round_trip: bool = True
    flash_table_payload_equal: Optional[bool] = None
    payload_within_entropy_bounds: bool = True


class BenchReport(BaseModel):
    """Machine-readable benchmark report."""

    run_id: str
    created_at: str = Field(default_factory=lambda: datetime.now().isoformat())
    spec: WorkloadSpec
    repeats: int
    workers: int
    codecs: Dict[str, CodecResult] = Field(default_factory=dict)
    equivalence: EquivalenceFlags = Field(default_factory=EquivalenceFlags)
    environment: Dict[str, Any] = Field(default_factory=dict)
    metrics: Dict[str, Any] = Field(
        default_factory=dict, description="Process metrics registry snapshot taken when the run finished"
    )

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2))
        return path


def make_codec(name: str, spec: WorkloadSpec) -> Codec:
    """
    Build a codec for ``spec`` by name.

    Raises:
        ParameterError: Unknown codec name
    """
    if name == "flash":
        return FlashCodec(spec.alphabet(), spec.kind)
    if name == "table":
        return TableCodec(spec.alphabet(), spec.kind)
    if name == "gsm":
        return GsmCodec(spec.precision_bits, spec.kind)
    raise ParameterError(f"Unknown codec '{name}', expected one of {', '.join(CODEC_NAMES)}")


def _chunk_payloads(stream: ChunkedStream) -> List[bytes]:
    return [chunk.payload for chunk in stream.chunks]


def measure_codec(
    codec: Codec,
    workload: Workload,
    repeats: int,
    workers: int = 1,
) -> Tuple[CodecResult, ChunkedStream]:
    """
    Encode and decode ``workload`` ``repeats`` times.

    Returns:
        ``(CodecResult, ChunkedStream)`` of the last repetition

    Raises:
        VerificationError: Decoded symbols differ from the input
    """
    if repeats < 1:
        raise ParameterError("repeats must be at least 1")

    codec.initialize()
    symbols = workload.symbol_list()
    params = workload.params
    chunk_size = workload.spec.chunk_size
    encode_times = Histogram(f"{codec.codec_name}_encode_seconds")
    decode_times = Histogram(f"{codec.codec_name}_decode_seconds")

    stream = None
    decoded: List[int] = []
    for _ in range(repeats):
        start = time.perf_counter()
        stream = codec.encode_chunked(symbols, params, chunk_size, workers)
        encode_times.observe(time.perf_counter() - start)

        start = time.perf_counter()
        decoded = codec.decode_chunked(stream, workers)
        decode_times.observe(time.perf_counter() - start)

    mismatches = int(np.count_nonzero(np.asarray(decoded, dtype=np.int64) != workload.symbols)) \
        if len(decoded) == len(symbols) else len(symbols)
    if mismatches:
        raise VerificationError(
            f"{codec.codec_name} round trip failed",
            context={"mismatches": mismatches, "symbols": len(symbols)},
        )

    n = max(len(symbols), 1)
    encode_seconds = encode_times.get_percentile(50)
    decode_seconds = decode_times.get_percentile(50)
    payload_bits = 8 * stream.payload_bytes
    entropy_bits = codec.code_length(symbols, params)

    result = CodecResult(
        codec=codec.codec_name,
        encode_seconds=encode_seconds,
        decode_seconds=decode_seconds,
        encode_symbols_per_second=len(symbols) / encode_seconds if encode_seconds > 0 else 0.0,
        decode_symbols_per_second=len(symbols) / decode_seconds if decode_seconds > 0 else 0.0,
        payload_bits=payload_bits,
        entropy_bits=entropy_bits,
        bits_per_symbol=payload_bits / n,
        overhead_bits_per_symbol=(payload_bits - entropy_bits) / n,
        encode_boundary_evaluations=codec.last_encode_stats.boundary_evaluations,
        decode_boundary_evaluations=codec.last_decode_stats.boundary_evaluations,
        rows_built=codec.last_encode_stats.rows_built + getattr(codec, "rows_built", 0),
        mismatches=mismatches,
    )
    return result, stream


def payload_within_bounds(result: CodecResult, chunks: int) -> bool:
    """Payload bits within ``[entropy - 32, entropy + 40]`` per independent chunk."""
    return (
        result.entropy_bits - PAYLOAD_SLACK_BELOW * chunks
        <= result.payload_bits
        <= result.entropy_bits + PAYLOAD_SLACK_ABOVE * chunks
    )


@log_performance
def run_bench(
    spec: WorkloadSpec,
    codecs: Sequence[str] = CODEC_NAMES,
    repeats: int = 10,
    workers: int = 1,
) -> BenchReport:
    """
    Run every requested codec on the workload of ``spec``.

    Raises:
        VerificationError: A round trip fails, or flash and table payloads differ
        ParameterError: Unknown codec name or invalid repeat count
    """
    for name in codecs:
        if name not in CODEC_NAMES:
            raise ParameterError(f"Unknown codec '{name}', expected one of {', '.join(CODEC_NAMES)}")

    run_id = set_run_id()
    try:
        report = BenchReport(
            run_id=run_id,
            spec=spec,
            repeats=repeats,
            workers=workers,
            environment={**environment_info(), "workload": WORKLOAD_NOTE},
        )
        mixture = generate_workload(spec) if any(c != "gsm" for c in codecs) else None
        payloads: Dict[str, List[bytes]] = {}

        for name in codecs:
            codec = make_codec(name, spec)
            init_start = time.perf_counter()
            codec.initialize()
            init_seconds = time.perf_counter() - init_start
            if name == "gsm":
                workload = generate_gsm_workload(spec, codec.table)
            else:
                workload = mixture

            logger.info(f"Benchmarking {name} on {len(workload)} symbols ({repeats} repeats, {workers} workers)")
            result, stream = measure_codec(codec, workload, repeats, workers)
            result.init_seconds = init_seconds
            report.codecs[name] = result
            payloads[name] = _chunk_payloads(stream)
            if not payload_within_bounds(result, len(stream.chunks)):
                report.equivalence.payload_within_entropy_bounds = False
                logger.warning(
                    f"{name} payload {result.payload_bits} bits outside entropy bounds "
                    f"({result.entropy_bits:.1f} bits)"
                )

        if "flash" in payloads and "table" in payloads:
            equal = payloads["flash"] == payloads["table"]
            report.equivalence.flash_table_payload_equal = equal
            if not equal:
                raise VerificationError("Flash and table payloads differ", context={"run_id": run_id})

        report.metrics = get_metrics_registry().export()["metrics"]
        logger.info(f"Bench run {run_id} complete: {', '.join(report.codecs)}")
        return report
    finally:
        clear_run_id()


def sweep_alphabets(
    spec: WorkloadSpec,
    sizes: Sequence[int] = (64, 256, 1024, 4096),
    codecs: Sequence[str] = ("flash", "table"),
    repeats: int = 3,
) -> pd.DataFrame:
    """
    Time codecs across alphabet sizes at a fixed symbol count.

    Returns:
        One row per (alphabet size, codec) with encode/decode seconds and
        boundary evaluations per decoded symbol
    """
    rows = []
    for size in sizes:
        alphabet = SymbolAlphabet.centered(size, spec.precision_bits)
        sized = spec.model_copy(update={"y_min": alphabet.y_min, "y_max": alphabet.y_max})
        workload = generate_workload(sized)
        for name in codecs:
            result, _ = measure_codec(make_codec(name, sized), workload, repeats)
            rows.append(
                {
                    "alphabet_size": size,
                    "codec": name,
                    "encode_seconds": result.encode_seconds,
                    "decode_seconds": result.decode_seconds,
                    "decode_evaluations_per_symbol": result.decode_boundary_evaluations / max(len(workload), 1),
                }
            )
    return pd.DataFrame(rows)


def sweep_approximators(
    spec: WorkloadSpec,
    kinds: Optional[Sequence[Union[str, ApproximatorKind]]] = None,
    codecs: Sequence[str] = ("flash",),
    repeats: int = 3,
) -> pd.DataFrame:
    """
    Time codecs under each Gaussian CDF approximation on same-seed workloads.

    Returns:
        One row per (approximator, codec) with coding seconds and bits per
        symbol, trading kernel cost against model fidelity
    """
    selected = [ApproximatorKind.parse(k) for k in kinds] if kinds else list(ApproximatorKind)
    rows = []
    for kind in selected:
        variant = spec.model_copy(update={"approximator": kind.cli_name})
        workload = generate_workload(variant)
        for name in codecs:
            result, _ = measure_codec(make_codec(name, variant), workload, repeats)
            rows.append(
                {
                    "approximator": kind.cli_name,
                    "codec": name,
                    "encode_seconds": result.encode_seconds,
                    "decode_seconds": result.decode_seconds,
                    "bits_per_symbol": result.bits_per_symbol,
                    "overhead_bits_per_symbol": result.overhead_bits_per_symbol,
                }
            )
    return pd.DataFrame(rows)
