"""Pytest configuration and shared fixtures."""

import os
from typing import Callable, List
from unittest.mock import patch

import numpy as np
import pytest

from gmm_rans.core.config import reset_config
from gmm_rans.core.logger import setup_logger
from gmm_rans.core.metrics import MetricsRegistry
from gmm_rans.entropy.mixture_cdf import ApproximatorKind, MixtureParams, SymbolAlphabet


# Environment setup for tests
@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    """Quiet logging and drop any GMM_RANS_* variables from the caller's shell."""
    clean = {k: v for k, v in os.environ.items() if not k.startswith("GMM_RANS_")}
    clean["GMM_RANS_LOG_LEVEL"] = "WARNING"
    with patch.dict(os.environ, clean, clear=True):
        setup_logger(log_level="WARNING")
        yield


@pytest.fixture(autouse=True)
def isolate_state():
    """Fresh configuration and metrics registry for every test."""
    reset_config()
    MetricsRegistry.reset_instance()
    yield
    reset_config()
    MetricsRegistry.reset_instance()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def alphabet() -> SymbolAlphabet:
    """N = 256, P = 16."""
    return SymbolAlphabet(-128, 127, 16)


@pytest.fixture
def random_mixture(rng) -> Callable[..., MixtureParams]:
    """Factory drawing a random K-component mixture inside an alphabet."""

    def make(k: int, alphabet: SymbolAlphabet) -> MixtureParams:
        weights = rng.dirichlet(np.ones(k))
        spread = min(8.0, alphabet.size / 4)
        center = (alphabet.y_min + alphabet.y_max) / 2
        means = center + rng.normal(0.0, spread, size=k)
        stddevs = np.exp(rng.uniform(np.log(0.05), np.log(20.0), size=k))
        return MixtureParams(tuple(weights), tuple(means), tuple(stddevs))

    return make


@pytest.fixture
def sample_symbols() -> Callable[..., List[int]]:
    """Draw symbols from their own quantized models by inverse-transform sampling."""
    from gmm_rans.codecs.container import quantize_params
    from gmm_rans.codecs.flash import locate_symbol

    def sample(
        params: List[MixtureParams],
        alphabet: SymbolAlphabet,
        kind: ApproximatorKind,
        generator: np.random.Generator,
    ) -> List[int]:
        if not params:
            return []
        _, coded = quantize_params(params, params[0].components)
        slots = generator.integers(0, alphabet.total, size=len(params)).tolist()
        return [alphabet.y_min + locate_symbol(p, alphabet, kind, d)[0] for p, d in zip(coded, slots)]

    return sample


def pytest_configure(config):
    """Configure custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
