"""
Command line interface.

Exit codes: 0 on success, 1 on verification or stream failures, 2 on usage
errors.
"""

from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, List, Optional, Union

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from gmm_rans import __version__
from gmm_rans.core.config import get_config
from gmm_rans.core.exceptions import ConfigError, GmmRansError, ParameterError, VerificationError
from gmm_rans.core.logger import get_logger, setup_logger
from gmm_rans.entropy.mixture_cdf import MixtureParams, SymbolAlphabet
from gmm_rans.codecs.base import Codec
from gmm_rans.codecs.container import (
    MIXTURE_MAGIC,
    ChunkedStream,
    EncodedStream,
    read_stream,
)
from gmm_rans.codecs.flash import FlashCodec
from gmm_rans.codecs.gsm import GsmCodec, moment_match
from gmm_rans.codecs.table import TableCodec
from gmm_rans.bench.accuracy import accuracy_grid, write_accuracy_csv
from gmm_rans.bench.runner import CODEC_NAMES, BenchReport, run_bench, sweep_alphabets, sweep_approximators
from gmm_rans.bench.workload import WorkloadSpec, generate_workload, load_workload, save_workload

app = typer.Typer(
    name="gmm-rans",
    help="Table-free rANS coding under Gaussian mixture models.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console(stderr=True)
logger = get_logger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


class CodecChoice(str, Enum):
    flash = "flash"
    table = "table"
    gsm = "gsm"
    all = "all"


class ApproxChoice(str, Enum):
    exact = "exact"
    polya = "polya"
    as_ = "as"
    logistic = "logistic"


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Map library errors onto the CLI exit codes."""
    try:
        yield
    except (ParameterError, ConfigError) as e:
        console.print(f"[red]usage error:[/red] {e}")
        raise typer.Exit(EXIT_USAGE)
    except GmmRansError as e:
        console.print(f"[red]{type(e).__name__}:[/red] {e}")
        raise typer.Exit(EXIT_FAILURE)


def _version(value: bool) -> None:
    if value:
        typer.echo(f"gmm-rans {__version__}")
        raise typer.Exit()


@app.callback()
def main_callback(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override the configured log level"),
    json_logs: bool = typer.Option(False, "--json-logs", help="Emit JSON log records"),
    version: bool = typer.Option(False, "--version", callback=_version, is_eager=True),
) -> None:
    with _exit_on_error():
        config = get_config()
        setup_logger(
            log_file=config.log_file,
            log_level=(log_level or config.log_level).upper(),
            use_json=json_logs or config.log_format == "json",
        )


def _spec(
    k: Optional[int],
    alphabet: Optional[int],
    precision: Optional[int],
    symbols: Optional[int],
    seed: Optional[int],
    approx: Optional[ApproxChoice],
    chunk: Optional[int],
) -> WorkloadSpec:
    """Workload spec from CLI options, falling back to the configuration."""
    config = get_config()
    precision = config.precision_bits if precision is None else precision
    if alphabet is None:
        y_min, y_max = config.alphabet_min, config.alphabet_max
    else:
        centered = SymbolAlphabet.centered(alphabet, precision)
        y_min, y_max = centered.y_min, centered.y_max
    try:
        return WorkloadSpec(
            symbol_count=config.symbol_count if symbols is None else symbols,
            components=config.components if k is None else k,
            y_min=y_min,
            y_max=y_max,
            precision_bits=precision,
            approximator=config.approximator if approx is None else approx.value,
            seed=config.seed if seed is None else seed,
            chunk_size=config.chunk_size if chunk is None else chunk,
        )
    except ValueError as e:
        raise ParameterError(f"Invalid workload options: {e}") from e


def _codec_for_stream(stream: EncodedStream) -> Codec:
    if stream.header.magic == MIXTURE_MAGIC:
        return FlashCodec(stream.alphabet, stream.approximator)
    return GsmCodec(stream.header.precision_bits, stream.approximator, alphabet=stream.alphabet)


def _summary_table(report: BenchReport) -> Table:
    table = Table(title=f"bench {report.run_id}")
    for column in ("codec", "encode s", "decode s", "enc sym/s", "dec sym/s", "bits/sym", "overhead"):
        table.add_column(column, justify="right" if column != "codec" else "left")
    for name, r in report.codecs.items():
        table.add_row(
            name,
            f"{r.encode_seconds:.4f}",
            f"{r.decode_seconds:.4f}",
            f"{r.encode_symbols_per_second:,.0f}",
            f"{r.decode_symbols_per_second:,.0f}",
            f"{r.bits_per_symbol:.4f}",
            f"{r.overhead_bits_per_symbol:+.5f}",
        )
    return table


# Options shared by bench and generate
_K = typer.Option(None, "--k", min=1, max=4, help="Mixture components")
_ALPHABET = typer.Option(None, "--alphabet", help="Alphabet size N (centered on zero)")
_PRECISION = typer.Option(None, "--precision", min=8, max=16, help="Quantizer precision P")
_SYMBOLS = typer.Option(None, "--symbols", min=0, help="Symbols in the workload")
_SEED = typer.Option(None, "--seed", help="Workload seed")
_APPROX = typer.Option(None, "--approx", help="Gaussian CDF approximation")
_CHUNK = typer.Option(None, "--chunk", min=0, help="Symbols per independent chunk (0 = one chunk)")


@app.command()
def bench(
    codec: CodecChoice = typer.Option(CodecChoice.all, "--codec", help="Codec to benchmark"),
    approx: Optional[ApproxChoice] = _APPROX,
    k: Optional[int] = _K,
    alphabet: Optional[int] = _ALPHABET,
    precision: Optional[int] = _PRECISION,
    symbols: Optional[int] = _SYMBOLS,
    seed: Optional[int] = _SEED,
    repeats: Optional[int] = typer.Option(None, "--repeats", min=1, help="Timed repetitions"),
    chunk: Optional[int] = _CHUNK,
    workers: Optional[int] = typer.Option(None, "--workers", min=1, help="Worker threads over chunks"),
    out: Optional[Path] = typer.Option(None, "--out", help="JSON report path (default: <report_dir>/<run_id>.json)"),
) -> None:
    """Time the codecs on a synthetic workload and verify them."""
    config = get_config()
    with _exit_on_error():
        spec = _spec(k, alphabet, precision, symbols, seed, approx, chunk)
        codecs = CODEC_NAMES if codec == CodecChoice.all else (codec.value,)
        report = run_bench(
            spec,
            codecs,
            repeats=config.repeats if repeats is None else repeats,
            workers=config.workers if workers is None else workers,
        )

    console.print(_summary_table(report))
    path = report.write(out if out is not None else Path(config.report_dir) / f"{report.run_id}.json")
    console.print(f"Report written to {path}")


@app.command()
def generate(
    out: Path = typer.Option(..., "--out", help="Workload file (.npz)"),
    approx: Optional[ApproxChoice] = _APPROX,
    k: Optional[int] = _K,
    alphabet: Optional[int] = _ALPHABET,
    precision: Optional[int] = _PRECISION,
    symbols: Optional[int] = _SYMBOLS,
    seed: Optional[int] = _SEED,
) -> None:
    """Write a synthetic workload (symbols and per-symbol params)."""
    with _exit_on_error():
        spec = _spec(k, alphabet, precision, symbols, seed, approx, 0)
        save_workload(generate_workload(spec), out)
    console.print(f"Wrote {spec.symbol_count} symbols to {out}")


@app.command()
def encode(
    input_path: Path = typer.Option(..., "--in", exists=True, dir_okay=False, help="Workload file (.npz)"),
    out: Path = typer.Option(..., "--out", help="Stream file"),
    codec: CodecChoice = typer.Option(CodecChoice.flash, "--codec", help="Codec (not 'all')"),
    chunk: int = typer.Option(0, "--chunk", min=0, help="Symbols per independent chunk (0 = single stream)"),
    workers: int = typer.Option(1, "--workers", min=1),
) -> None:
    """Encode a workload file into a stream file."""
    if codec == CodecChoice.all:
        console.print("[red]usage error:[/red] choose one codec for encode")
        raise typer.Exit(EXIT_USAGE)

    with _exit_on_error():
        workload = load_workload(input_path)
        spec = workload.spec
        params: List[MixtureParams] = workload.params
        if codec == CodecChoice.gsm:
            coder: Codec = GsmCodec(spec.precision_bits, spec.kind, alphabet=spec.alphabet())
            if workload.components > 1:
                params = [MixtureParams.single(*moment_match(p)) for p in params]
        elif codec == CodecChoice.table:
            coder = TableCodec(spec.alphabet(), spec.kind)
        else:
            coder = FlashCodec(spec.alphabet(), spec.kind)

        stream: Union[EncodedStream, ChunkedStream]
        if chunk > 0:
            stream = coder.encode_chunked(workload.symbols, params, chunk, workers)
        else:
            stream = coder.encode(workload.symbols, params)
        data = stream.to_bytes()

    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    console.print(f"Encoded {len(workload)} symbols into {len(data)} bytes ({out})")


def _decode_any(data: bytes) -> List[int]:
    stream = read_stream(data)
    if isinstance(stream, ChunkedStream):
        if not stream.chunks:
            return []
        return _codec_for_stream(stream.chunks[0]).decode_chunked(stream)
    return _codec_for_stream(stream).decode(stream)


@app.command()
def decode(
    input_path: Path = typer.Option(..., "--in", exists=True, dir_okay=False, help="Stream file"),
    out: Path = typer.Option(..., "--out", help="Decoded symbols (.npy)"),
) -> None:
    """Decode a stream file into a numpy array of symbols."""
    with _exit_on_error():
        symbols = _decode_any(input_path.read_bytes())

    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("wb") as f:
        np.save(f, np.asarray(symbols, dtype=np.int64))
    console.print(f"Decoded {len(symbols)} symbols to {out}")


def _verify_stream(stream: EncodedStream) -> None:
    codec = _codec_for_stream(stream)
    symbols = codec.decode(stream)
    again = codec.encode_quantized(symbols, stream.params_block, stream.header.components)
    if again.to_bytes() != stream.to_bytes():
        raise VerificationError("Re-encoded stream differs from the input")


@app.command()
def verify(
    input_path: Path = typer.Option(..., "--in", exists=True, dir_okay=False, help="Stream file"),
) -> None:
    """Decode a stream, re-encode the result and compare the bytes."""
    with _exit_on_error():
        stream = read_stream(input_path.read_bytes())
        chunks = stream.chunks if isinstance(stream, ChunkedStream) else [stream]
        for chunk in chunks:
            _verify_stream(chunk)
    console.print(f"[green]OK[/green] {sum(c.symbol_count for c in chunks)} symbols in {len(chunks)} stream(s)")


@app.command()
def accuracy(
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (stdout if omitted)"),
    x_min: float = typer.Option(-8.0, "--x-min"),
    x_max: float = typer.Option(8.0, "--x-max"),
    step: float = typer.Option(1e-3, "--step"),
) -> None:
    """CDF approximation errors against the high-precision oracle."""
    with _exit_on_error():
        frame = accuracy_grid(None, x_min, x_max, step)
    if out is None:
        typer.echo(frame.to_csv(index=False), nl=False)
    else:
        write_accuracy_csv(frame, out)


@app.command()
def sweep(
    sizes: List[int] = typer.Option([64, 256, 1024, 4096], "--size", help="Alphabet sizes (repeatable)"),
    approx: Optional[ApproxChoice] = _APPROX,
    k: Optional[int] = _K,
    symbols: int = typer.Option(10_000, "--symbols", min=1),
    seed: Optional[int] = _SEED,
    repeats: int = typer.Option(3, "--repeats", min=1),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (stdout if omitted)"),
) -> None:
    """Flash and table timings across alphabet sizes."""
    with _exit_on_error():
        spec = _spec(k, None, 16, symbols, seed, approx, 0)
        frame = sweep_alphabets(spec, sizes, repeats=repeats)
    if out is None:
        typer.echo(frame.to_csv(index=False), nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out, index=False)


@app.command("sweep-approx")
def sweep_approx(
    codec: CodecChoice = typer.Option(CodecChoice.flash, "--codec", help="Codec to time (gsm excluded)"),
    k: Optional[int] = _K,
    alphabet: Optional[int] = _ALPHABET,
    symbols: int = typer.Option(10_000, "--symbols", min=1),
    seed: Optional[int] = _SEED,
    repeats: int = typer.Option(3, "--repeats", min=1),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (stdout if omitted)"),
) -> None:
    """Coding time and bits per symbol under every CDF approximation."""
    with _exit_on_error():
        if codec == CodecChoice.gsm:
            raise ParameterError("sweep-approx times the mixture codecs; use bench for gsm")
        codecs = ("flash", "table") if codec == CodecChoice.all else (codec.value,)
        spec = _spec(k, alphabet, None, symbols, seed, None, 0)
        frame = sweep_approximators(spec, codecs=codecs, repeats=repeats)
    if out is None:
        typer.echo(frame.to_csv(index=False), nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out, index=False)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
