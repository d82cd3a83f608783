"""
Synthetic workloads: per-symbol mixture parameters and symbols drawn from
their own quantized models.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from gmm_rans.core.exceptions import ParameterError, wrap_exception
from gmm_rans.core.logger import get_logger, log_performance
from gmm_rans.entropy.mixture_cdf import (
    MAX_COMPONENTS,
    SIGMA_MIN,
    ApproximatorKind,
    MixtureParams,
    SymbolAlphabet,
)
from gmm_rans.codecs.container import quantize_params
from gmm_rans.codecs.flash import locate_symbol
from gmm_rans.codecs.gsm import ScaleTable, moment_match, round_half_up

logger = get_logger(__name__)

MEAN_STDDEV = 4.0
SIGMA_MAX = 16.0


class WorkloadSpec(BaseModel):
    """Everything needed to regenerate a workload bit for bit."""

    model_config = ConfigDict(frozen=True)

    symbol_count: int = Field(default=1_000_000, ge=0, description="Symbols to generate")
    components: int = Field(default=3, ge=1, le=MAX_COMPONENTS, description="Mixture components K")
    y_min: int = Field(default=-128, description="Smallest symbol")
    y_max: int = Field(default=127, description="Largest symbol")
    precision_bits: int = Field(default=16, description="Quantizer precision P")
    approximator: str = Field(default="logistic", description="Gaussian CDF approximation")
    seed: int = Field(default=0, description="Parameter distribution seed")
    chunk_size: int = Field(default=0, ge=0, description="Symbols per independent chunk (0 = one chunk)")

    @field_validator("approximator")
    @classmethod
    def validate_approximator(cls, v: str) -> str:
        try:
            return ApproximatorKind.parse(v).cli_name
        except Exception as e:
            raise ValueError(str(e)) from e

    @model_validator(mode="after")
    def validate_alphabet(self) -> "WorkloadSpec":
        try:
            self.alphabet()
        except ParameterError as e:
            raise ValueError(e.message) from e
        return self

    def alphabet(self) -> SymbolAlphabet:
        return SymbolAlphabet(self.y_min, self.y_max, self.precision_bits)

    @property
    def kind(self) -> ApproximatorKind:
        return ApproximatorKind.parse(self.approximator)


@dataclass
class Workload:
    """Symbols with their per-position mixture parameters as (n, K) arrays."""

    spec: WorkloadSpec
    symbols: np.ndarray
    weights: np.ndarray
    means: np.ndarray
    stddevs: np.ndarray
    _params: Optional[List[MixtureParams]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.symbols.shape[0])

    @property
    def components(self) -> int:
        return int(self.weights.shape[1])

    @property
    def params(self) -> List[MixtureParams]:
        if self._params is None:
            self._params = [
                MixtureParams(tuple(w), tuple(mu), tuple(s))
                for w, mu, s in zip(self.weights.tolist(), self.means.tolist(), self.stddevs.tolist())
            ]
        return self._params

    def symbol_list(self) -> List[int]:
        return self.symbols.tolist()


def _draw_mixtures(spec: WorkloadSpec, rng: np.random.Generator):
    n, k = spec.symbol_count, spec.components
    weights = rng.dirichlet(np.ones(k), size=n) if n else np.empty((0, k))
    means = np.clip(rng.normal(0.0, MEAN_STDDEV, size=(n, k)), spec.y_min, spec.y_max)
    stddevs = np.exp(rng.uniform(math.log(SIGMA_MIN), math.log(SIGMA_MAX), size=(n, k)))
    return weights, means, stddevs


@log_performance(level="DEBUG")
def generate_workload(spec: WorkloadSpec) -> Workload:
    """
    Draw mixture parameters and sample every symbol from its quantized model.

    Weights are flat-Dirichlet, means Normal(0, 4^2) clipped to the alphabet and
    standard deviations log-uniform in [0.11, 16]. Symbols come from
    inverse-transform sampling with the decoder's own binary search, under the
    float32-rounded parameters the codec will actually use.
    """
    rng = np.random.default_rng(spec.seed)
    weights, means, stddevs = _draw_mixtures(spec, rng)
    slots = rng.integers(0, 1 << spec.precision_bits, size=spec.symbol_count)

    workload = Workload(spec, np.empty(spec.symbol_count, dtype=np.int64), weights, means, stddevs)
    _, coded = quantize_params(workload.params, spec.components)
    alphabet, kind = spec.alphabet(), spec.kind
    workload.symbols[:] = [
        alphabet.y_min + locate_symbol(p, alphabet, kind, slot)[0]
        for p, slot in zip(coded, slots.tolist())
    ]
    logger.debug(f"Generated {spec.symbol_count} symbols (K={spec.components}, N={alphabet.size}, seed={spec.seed})")
    return workload


@log_performance(level="DEBUG")
def generate_gsm_workload(spec: WorkloadSpec, table: ScaleTable) -> Workload:
    """
    Single-Gaussian workload: the spec's mixtures collapsed by moment matching,
    with residuals sampled from the prebuilt scale rows.
    """
    rng = np.random.default_rng(spec.seed)
    weights, means, stddevs = _draw_mixtures(spec, rng)
    slots = rng.integers(0, 1 << table.precision_bits, size=spec.symbol_count)

    mixture = Workload(spec, np.empty(0, dtype=np.int64), weights, means, stddevs)
    matched = [moment_match(p) for p in mixture.params]
    single = Workload(
        spec.model_copy(update={"components": 1}),
        np.empty(spec.symbol_count, dtype=np.int64),
        np.ones((spec.symbol_count, 1)),
        np.array([[mu] for mu, _ in matched], dtype=np.float64).reshape(-1, 1),
        np.array([[s] for _, s in matched], dtype=np.float64).reshape(-1, 1),
    )

    _, coded = quantize_params(single.params, 1)
    symbols = []
    for p, slot in zip(coded, slots.tolist()):
        s = table.scale_index(p.stddevs[0])
        symbols.append(round_half_up(p.means[0]) + table.locate(s, slot))
    single.symbols[:] = symbols
    return single


def save_workload(workload: Workload, path: Union[str, Path]) -> Path:
    """Write a workload to a compressed ``.npz`` archive."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        np.savez_compressed(
            f,
            symbols=workload.symbols,
            weights=workload.weights,
            means=workload.means,
            stddevs=workload.stddevs,
            alphabet=np.array([workload.spec.y_min, workload.spec.y_max], dtype=np.int64),
            precision_bits=np.int64(workload.spec.precision_bits),
            approximator=np.int64(workload.spec.kind),
            spec=np.array(workload.spec.model_dump_json()),
        )
    logger.info(f"Saved workload of {len(workload)} symbols to {path}")
    return path


def load_workload(path: Union[str, Path]) -> Workload:
    """
    Read a workload written by :func:`save_workload`.

    Raises:
        ParameterError: Missing arrays or inconsistent shapes
    """
    with np.load(Path(path), allow_pickle=False) as data:
        try:
            spec = WorkloadSpec.model_validate_json(str(data["spec"]))
            workload = Workload(
                spec,
                data["symbols"].astype(np.int64),
                data["weights"].astype(np.float64),
                data["means"].astype(np.float64),
                data["stddevs"].astype(np.float64),
            )
        except KeyError as e:
            raise wrap_exception(e, f"Workload file lacks array {e}", ParameterError, path=str(path)) from e

    n = len(workload)
    for name in ("weights", "means", "stddevs"):
        array = getattr(workload, name)
        if array.ndim != 2 or array.shape[0] != n or array.shape[1] != workload.components:
            raise ParameterError(f"Workload array {name} has shape {array.shape}, expected ({n}, K)")
    return workload
