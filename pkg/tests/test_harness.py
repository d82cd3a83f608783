"""
Tests for workloads, the benchmark runner and the accuracy grid.
"""

import json
import math

import numpy as np
import pytest

from gmm_rans.core.exceptions import ParameterError, VerificationError
from gmm_rans.core.logger import get_run_id
from gmm_rans.entropy.mixture_cdf import ApproximatorKind, quantized_pmf
from gmm_rans.codecs.container import quantize_params
from gmm_rans.codecs.flash import FlashCodec
from gmm_rans.codecs.gsm import gsm_init
from gmm_rans.bench import runner as runner_module
from gmm_rans.bench.accuracy import ACCURACY_COLUMNS, accuracy_grid, write_accuracy_csv
from gmm_rans.bench.runner import (
    BenchReport,
    CodecResult,
    make_codec,
    payload_within_bounds,
    run_bench,
    sweep_alphabets,
    sweep_approximators,
)
from gmm_rans.bench.workload import (
    WorkloadSpec,
    generate_gsm_workload,
    generate_workload,
    load_workload,
    save_workload,
)


@pytest.fixture
def small_spec() -> WorkloadSpec:
    return WorkloadSpec(symbol_count=300, components=2, precision_bits=16, seed=3, chunk_size=100)


@pytest.mark.unit
class TestWorkloadSpec:
    """Test workload spec validation."""

    def test_defaults(self):
        """Test the default workload describes N = 256 at P = 16."""
        spec = WorkloadSpec()
        assert (spec.y_min, spec.y_max, spec.precision_bits) == (-128, 127, 16)
        assert spec.kind == ApproximatorKind.LOGISTIC
        assert spec.alphabet().size == 256

    def test_approximator_alias(self):
        """Test that aliases normalize to the CLI name."""
        assert WorkloadSpec(approximator="abramowitz-stegun").approximator == "as"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"approximator": "cubic"},
            {"components": 5},
            {"y_min": 10, "y_max": 5},
            {"y_min": -4096, "y_max": 4095, "precision_bits": 12},
            {"symbol_count": -1},
        ],
    )
    def test_invalid(self, overrides):
        """Test that invalid specs are rejected."""
        with pytest.raises(ValueError):
            WorkloadSpec(**overrides)

    def test_frozen(self):
        """Test that specs are immutable."""
        with pytest.raises(ValueError):
            WorkloadSpec().seed = 4


@pytest.mark.unit
class TestWorkload:
    """Test workload generation and persistence."""

    def test_deterministic(self, small_spec):
        """Test that the seed fixes symbols and parameters."""
        a, b = generate_workload(small_spec), generate_workload(small_spec)
        assert np.array_equal(a.symbols, b.symbols)
        assert np.array_equal(a.stddevs, b.stddevs)
        other = generate_workload(small_spec.model_copy(update={"seed": 4}))
        assert not np.array_equal(a.symbols, other.symbols)

    def test_shapes_and_ranges(self, small_spec):
        """Test array shapes and parameter ranges."""
        workload = generate_workload(small_spec)
        assert len(workload) == 300
        assert workload.weights.shape == workload.means.shape == workload.stddevs.shape == (300, 2)
        assert np.allclose(workload.weights.sum(axis=1), 1.0)
        assert workload.symbols.min() >= -128 and workload.symbols.max() <= 127
        assert workload.stddevs.min() >= 0.11 and workload.stddevs.max() <= 16.0
        assert len(workload.params) == 300

    def test_empty(self):
        """Test a zero-symbol workload."""
        workload = generate_workload(WorkloadSpec(symbol_count=0))
        assert len(workload) == 0
        assert workload.params == []

    def test_gsm_workload(self, small_spec):
        """Test a single-Gaussian workload codeable against the scale table."""
        table = gsm_init(16, ApproximatorKind.LOGISTIC)
        workload = generate_gsm_workload(small_spec, table)
        assert workload.components == 1
        assert workload.spec.components == 1
        codec = make_codec("gsm", workload.spec)
        codec.table = table
        assert codec.decode(codec.encode(workload.symbols, workload.params)) == workload.symbol_list()

    def test_save_load(self, small_spec, tmp_path):
        """Test the npz archive preserves everything."""
        workload = generate_workload(small_spec)
        path = save_workload(workload, tmp_path / "nested" / "workload.npz")
        loaded = load_workload(path)
        assert loaded.spec == small_spec
        assert np.array_equal(loaded.symbols, workload.symbols)
        assert np.array_equal(loaded.means, workload.means)

    @pytest.mark.slow
    def test_bitrate_matches_entropy(self):
        """Test that coding a sampled workload costs its mean model entropy within 1%."""
        spec = WorkloadSpec(symbol_count=20_000, components=3, seed=21)
        workload = generate_workload(spec)
        _, coded = quantize_params(workload.params, 3)
        alphabet, kind = spec.alphabet(), spec.kind
        entropy = 0.0
        for p in coded:
            probs = np.asarray(quantized_pmf(p, alphabet, kind), dtype=np.float64) / alphabet.total
            entropy -= float(np.sum(probs * np.log2(probs)))
        payload = FlashCodec(alphabet, kind).encode(workload.symbols, workload.params).payload
        assert 8 * len(payload) == pytest.approx(entropy, rel=0.01)

    def test_load_missing_array(self, tmp_path):
        """Test that a foreign archive is rejected."""
        path = tmp_path / "foreign.npz"
        np.savez(path, symbols=np.zeros(3, dtype=np.int64))
        with pytest.raises(ParameterError) as exc_info:
            load_workload(path)
        assert isinstance(exc_info.value.original_exception, KeyError)
        assert exc_info.value.context["path"] == str(path)


@pytest.mark.integration
class TestRunBench:
    """Test end-to-end benchmark runs."""

    def test_all_codecs(self, small_spec, tmp_path):
        """Test that every check passes and the report is complete."""
        report = run_bench(small_spec, repeats=2)
        assert set(report.codecs) == {"flash", "table", "gsm"}
        assert report.equivalence.round_trip
        assert report.equivalence.flash_table_payload_equal is True
        assert report.equivalence.payload_within_entropy_bounds
        assert report.codecs["flash"].payload_bits == report.codecs["table"].payload_bits
        assert report.codecs["gsm"].rows_built == 64
        assert report.codecs["table"].rows_built == 300
        assert report.codecs["flash"].rows_built == 0
        assert report.codecs["gsm"].init_seconds > 0
        assert report.codecs["flash"].mismatches == 0
        assert get_run_id() is None

        data = json.loads(report.write(tmp_path / "report.json").read_text())
        assert data["run_id"] == report.run_id
        assert data["spec"]["symbol_count"] == 300
        assert "python" in data["environment"]
        assert data["equivalence"]["flash_table_payload_equal"] is True
        assert data["metrics"]["gsm_rows_built_total"]["value"] == 64
        assert data["metrics"]["symbols_decoded_total"]["value"] > 0

    def test_flash_only(self, small_spec):
        """Test a single-codec run with worker threads."""
        report = run_bench(small_spec, codecs=("flash",), repeats=1, workers=2)
        assert list(report.codecs) == ["flash"]
        assert report.equivalence.flash_table_payload_equal is None

    def test_unknown_codec(self, small_spec):
        """Test that unknown codec names are rejected."""
        with pytest.raises(ParameterError):
            run_bench(small_spec, codecs=("huffman",))

    def test_payload_difference_is_fatal(self, small_spec, monkeypatch):
        """Test that diverging flash and table payloads abort the run."""
        real = runner_module._chunk_payloads
        calls = []

        def tamper(stream):
            calls.append(stream)
            payloads = real(stream)
            return payloads if len(calls) == 1 else [p + b"\x00" for p in payloads]

        monkeypatch.setattr(runner_module, "_chunk_payloads", tamper)
        with pytest.raises(VerificationError):
            run_bench(small_spec, codecs=("flash", "table"), repeats=1)

    def test_payload_bounds(self):
        """Test that the entropy slack scales with the chunk count."""
        result = CodecResult(
            codec="flash",
            encode_seconds=1.0,
            decode_seconds=1.0,
            encode_symbols_per_second=1.0,
            decode_symbols_per_second=1.0,
            payload_bits=1100,
            entropy_bits=1000.0,
            bits_per_symbol=1.1,
            overhead_bits_per_symbol=0.1,
            encode_boundary_evaluations=0,
            decode_boundary_evaluations=0,
            rows_built=0,
            mismatches=0,
        )
        assert not payload_within_bounds(result, chunks=1)
        assert payload_within_bounds(result, chunks=3)

    def test_report_round_trip(self, small_spec):
        """Test that the report survives JSON serialization."""
        report = run_bench(small_spec, codecs=("table",), repeats=1)
        again = BenchReport.model_validate_json(report.model_dump_json())
        assert again.codecs["table"].payload_bits == report.codecs["table"].payload_bits

    @pytest.mark.slow
    def test_speedup(self):
        """Test that flash coding is at least 15x faster than the table baseline at N = 256."""
        spec = WorkloadSpec(symbol_count=2000, components=3, precision_bits=16, seed=11)
        report = run_bench(spec, codecs=("flash", "table"), repeats=1)
        flash, table = report.codecs["flash"], report.codecs["table"]
        ratio = (table.encode_seconds + table.decode_seconds) / (flash.encode_seconds + flash.decode_seconds)
        assert ratio >= 15

    @pytest.mark.slow
    def test_speedup_large_alphabet(self):
        """Test that flash coding is at least 50x faster than the table baseline at N = 4096."""
        spec = WorkloadSpec(symbol_count=300, components=3, y_min=-2048, y_max=2047, precision_bits=16, seed=12)
        report = run_bench(spec, codecs=("flash", "table"), repeats=1)
        flash, table = report.codecs["flash"], report.codecs["table"]
        ratio = (table.encode_seconds + table.decode_seconds) / (flash.encode_seconds + flash.decode_seconds)
        assert ratio >= 50


@pytest.mark.integration
class TestSweep:
    """Test alphabet and approximator sweeps."""

    def test_sweep_alphabets(self):
        """Test sweep columns and log2(N) + 2 decode evaluations."""
        spec = WorkloadSpec(symbol_count=100, components=2, seed=2)
        frame = sweep_alphabets(spec, sizes=(16, 64), repeats=1)
        assert list(frame.columns) == [
            "alphabet_size",
            "codec",
            "encode_seconds",
            "decode_seconds",
            "decode_evaluations_per_symbol",
        ]
        assert len(frame) == 4
        flash = frame[frame.codec == "flash"].set_index("alphabet_size")
        assert flash.loc[16, "decode_evaluations_per_symbol"] == pytest.approx(6.0)
        assert flash.loc[64, "decode_evaluations_per_symbol"] == pytest.approx(8.0)

    @pytest.mark.slow
    def test_complexity_shape(self):
        """Test flat flash encode time across N = 64..4096 while the table baseline grows at least 8x."""
        sizes = (64, 256, 1024, 4096)
        flash = sweep_alphabets(
            WorkloadSpec(symbol_count=2000, components=3, seed=6), sizes, codecs=("flash",), repeats=5
        ).set_index("alphabet_size")
        encode = flash["encode_seconds"]
        assert (encode.max() - encode.min()) / encode.min() < 0.25
        for size in sizes:
            assert flash.loc[size, "decode_evaluations_per_symbol"] == pytest.approx(2 + math.log2(size))

        table = sweep_alphabets(
            WorkloadSpec(symbol_count=300, components=3, seed=6), (64, 4096), codecs=("table",), repeats=1
        ).set_index("alphabet_size")
        assert table.loc[4096, "encode_seconds"] >= 8 * table.loc[64, "encode_seconds"]

    def test_sweep_approximators(self):
        """Test one row per approximator and codec, with equal mixture-codec bitrates."""
        spec = WorkloadSpec(symbol_count=120, components=2, seed=9)
        frame = sweep_approximators(spec, kinds=["exact", "logistic"], codecs=("flash", "table"), repeats=1)
        assert list(frame.columns) == [
            "approximator",
            "codec",
            "encode_seconds",
            "decode_seconds",
            "bits_per_symbol",
            "overhead_bits_per_symbol",
        ]
        assert list(zip(frame.approximator, frame.codec)) == [
            ("exact", "flash"),
            ("exact", "table"),
            ("logistic", "flash"),
            ("logistic", "table"),
        ]
        by_kind = frame.groupby("approximator")["bits_per_symbol"].nunique()
        assert (by_kind == 1).all()

    def test_sweep_approximators_defaults_to_every_kind(self):
        """Test that omitting kinds sweeps all four approximators."""
        frame = sweep_approximators(WorkloadSpec(symbol_count=20, components=1, seed=1), repeats=1)
        assert list(frame.approximator) == ["exact", "polya", "as", "logistic"]


@pytest.mark.unit
class TestAccuracyGrid:
    """Test the approximation error table."""

    def test_columns(self):
        """Test CSV columns and approximator order."""
        frame = accuracy_grid(step=1e-2)
        assert list(frame.columns) == ACCURACY_COLUMNS
        assert list(frame["kind"]) == ["exact", "polya", "as", "logistic"]

    def test_error_levels(self):
        """Test the maximum error of every approximator."""
        frame = accuracy_grid(step=1e-3).set_index("kind")
        assert frame.loc["as", "max_abs_err"] <= 7.5e-8
        assert frame.loc["exact", "max_abs_err"] < 1e-14
        assert frame.loc["logistic", "max_abs_err"] <= 0.011
        assert 0.05 < frame.loc["polya", "max_abs_err"] <= 0.057

    def test_selected_kinds(self):
        """Test restricting the grid to some approximators."""
        frame = accuracy_grid(["as"], x_min=-1.0, x_max=1.0, step=0.1)
        assert len(frame) == 1
        assert frame.loc[0, "x_min"] == -1.0

    def test_write_csv(self, tmp_path):
        """Test writing the CSV file."""
        path = write_accuracy_csv(accuracy_grid(step=0.05), tmp_path / "accuracy.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(ACCURACY_COLUMNS)
        assert len(lines) == 5
