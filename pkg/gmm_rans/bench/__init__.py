"""Workload synthesis, benchmark runner and accuracy grids."""

from gmm_rans.bench.workload import (
    WorkloadSpec,
    Workload,
    generate_workload,
    generate_gsm_workload,
    save_workload,
    load_workload,
)
from gmm_rans.bench.runner import (
    CODEC_NAMES,
    CodecResult,
    EquivalenceFlags,
    BenchReport,
    make_codec,
    measure_codec,
    run_bench,
    sweep_alphabets,
    sweep_approximators,
)
from gmm_rans.bench.accuracy import accuracy_grid, write_accuracy_csv

__all__ = [
    "WorkloadSpec",
    "Workload",
    "generate_workload",
    "generate_gsm_workload",
    "save_workload",
    "load_workload",
    "CODEC_NAMES",
    "CodecResult",
    "EquivalenceFlags",
    "BenchReport",
    "make_codec",
    "measure_codec",
    "run_bench",
    "sweep_alphabets",
    "sweep_approximators",
    "accuracy_grid",
    "write_accuracy_csv",
]
