"""Metrics collection for codecs and the benchmark harness.

Codecs count boundary evaluations and table rows in local integers and publish
them here once per stream, so the registry never sits on a per-symbol path.
"""

import functools
import os
import platform
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, TypeVar, Union

import psutil

from gmm_rans.core.logger import get_logger


logger = get_logger(__name__)

T = TypeVar('T')


@dataclass
class MetricSnapshot:
    """Snapshot of a metric at a point in time."""

    name: str
    type: str
    value: Union[int, float, Dict[str, Any]]
    timestamp: float
    labels: Dict[str, str] = field(default_factory=dict)
    help_text: str = ""


class Counter:
    """
    A counter metric that only increases.

    Example:
        counter = Counter("boundary_evaluations_total", "Quantized boundary evaluations")
        counter.inc(12)
    """

    def __init__(self, name: str, help_text: str = "", labels: Optional[Dict[str, str]] = None):
        self.name = name
        self.help_text = help_text
        self.labels = labels or {}
        self._value = 0
        self._lock = threading.Lock()

    def inc(self, amount: int = 1) -> None:
        """
        Increment counter by specified amount.

        Raises:
            ValueError: If amount is negative
        """
        if amount < 0:
            raise ValueError("Counter increment must be non-negative")

        with self._lock:
            self._value += amount

    def get(self) -> int:
        with self._lock:
            return self._value

    def snapshot(self) -> MetricSnapshot:
        return MetricSnapshot(
            name=self.name,
            type="counter",
            value=self.get(),
            timestamp=time.time(),
            labels=self.labels.copy(),
            help_text=self.help_text
        )


class Histogram:
    """
    A histogram of observations with summary statistics and percentiles.

    Example:
        histogram = Histogram("flash_encode_seconds", "Flash encode wall time")
        histogram.observe(0.5)
        median = histogram.get_percentile(50)
    """

    def __init__(self, name: str, help_text: str = "", labels: Optional[Dict[str, str]] = None):
        self.name = name
        self.help_text = help_text
        self.labels = labels or {}
        self._observations: List[float] = []
        self._lock = threading.Lock()

    def observe(self, value: float) -> None:
        with self._lock:
            self._observations.append(value)

    def get_stats(self) -> Dict[str, Any]:
        """
        Get summary statistics.

        Returns:
            Dictionary with count, sum, min, max and mean
        """
        with self._lock:
            if not self._observations:
                return {"count": 0, "sum": 0.0, "min": 0.0, "max": 0.0, "mean": 0.0}

            total = sum(self._observations)
            return {
                "count": len(self._observations),
                "sum": total,
                "min": min(self._observations),
                "max": max(self._observations),
                "mean": total / len(self._observations),
            }

    def get_percentile(self, percentile: float) -> float:
        """
        Calculate a percentile; 50 gives the median (midpoint of the two
        central values for an even count).

        Args:
            percentile: Percentile to calculate (0-100)
        """
        if not 0 <= percentile <= 100:
            raise ValueError("Percentile must be between 0 and 100")

        with self._lock:
            if not self._observations:
                return 0.0

            sorted_obs = sorted(self._observations)

        position = (percentile / 100) * (len(sorted_obs) - 1)
        lower = int(position)
        upper = min(lower + 1, len(sorted_obs) - 1)
        fraction = position - lower
        return sorted_obs[lower] + (sorted_obs[upper] - sorted_obs[lower]) * fraction

    def snapshot(self) -> MetricSnapshot:
        stats = self.get_stats()
        if stats["count"] > 0:
            stats["p50"] = self.get_percentile(50)
            stats["p95"] = self.get_percentile(95)

        return MetricSnapshot(
            name=self.name,
            type="histogram",
            value=stats,
            timestamp=time.time(),
            labels=self.labels.copy(),
            help_text=self.help_text
        )


Metric = Union[Counter, Histogram]


class MetricsRegistry:
    """
    Process-wide registry of metrics.

    Example:
        registry = MetricsRegistry.get_instance()
        registry.counter("symbols_encoded_total").inc(4096)
    """

    _instance: Optional['MetricsRegistry'] = None
    _lock = threading.Lock()

    def __init__(self):
        if MetricsRegistry._instance is not None:
            raise RuntimeError("Use get_instance() to get MetricsRegistry instance")

        self._metrics: Dict[str, Metric] = {}
        self._metrics_lock = threading.Lock()
        self._start_time = time.time()

        self._init_codec_metrics()

    @classmethod
    def get_instance(cls) -> 'MetricsRegistry':
        """Get singleton instance of MetricsRegistry."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = cls()

        return cls._instance

    @classmethod
    def reset_instance(cls) -> None:
        """Reset singleton instance (useful for testing)."""
        with cls._lock:
            cls._instance = None

    def _init_codec_metrics(self) -> None:
        self.counter("boundary_evaluations_total", "Quantized boundary function evaluations")
        self.counter("component_evaluations_total", "Gaussian component CDF evaluations")
        self.counter("table_rows_built_total", "CDF table rows materialized by the table codec")
        self.counter("gsm_rows_built_total", "Scale table rows built by the GSM codec")
        self.counter("symbols_encoded_total", "Symbols encoded")
        self.counter("symbols_decoded_total", "Symbols decoded")
        self.counter("payload_bytes_total", "rANS payload bytes produced")

    def _get_or_create(self, name: str, kind: type, help_text: str,
                       labels: Optional[Dict[str, str]]) -> Any:
        with self._metrics_lock:
            if name not in self._metrics:
                self._metrics[name] = kind(name, help_text, labels)

            metric = self._metrics[name]
            if not isinstance(metric, kind):
                raise TypeError(f"Metric {name} already exists as {type(metric).__name__}")
            return metric

    def counter(self, name: str, help_text: str = "",
                labels: Optional[Dict[str, str]] = None) -> Counter:
        """Get or create a counter metric."""
        return self._get_or_create(name, Counter, help_text, labels)

    def histogram(self, name: str, help_text: str = "",
                  labels: Optional[Dict[str, str]] = None) -> Histogram:
        """Get or create a histogram metric."""
        return self._get_or_create(name, Histogram, help_text, labels)

    def export(self) -> Dict[str, Any]:
        """
        Snapshot every metric as a JSON-serializable dictionary.
        """
        metrics_data: Dict[str, Any] = {
            "timestamp": datetime.now().isoformat(),
            "uptime_seconds": time.time() - self._start_time,
            "metrics": {}
        }

        with self._metrics_lock:
            for name, metric in self._metrics.items():
                snapshot = metric.snapshot()
                metrics_data["metrics"][name] = {
                    "type": snapshot.type,
                    "value": snapshot.value,
                    "labels": snapshot.labels,
                    "help": snapshot.help_text
                }

        return metrics_data


def timed(metric_name: Optional[str] = None):
    """
    Decorator recording a function's wall time into a histogram.

    Example:
        @timed("accuracy_grid_seconds")
        def accuracy_grid(...):
            ...
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        hist_name = metric_name or f"{func.__name__}_duration_seconds"

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> T:
            histogram = get_metrics_registry().histogram(
                hist_name,
                f"Duration of {func.__name__} in seconds"
            )

            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                duration = time.perf_counter() - start_time
                histogram.observe(duration)
                logger.debug(f"{func.__name__} executed in {duration:.3f}s")

        return wrapper

    return decorator


def environment_info() -> Dict[str, Any]:
    """
    Describe the machine a benchmark ran on.
    """
    memory = psutil.virtual_memory()
    return {
        "python": platform.python_version(),
        "implementation": platform.python_implementation(),
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
        "cpu_count_logical": psutil.cpu_count(logical=True),
        "cpu_count_physical": psutil.cpu_count(logical=False),
        "memory_total_bytes": memory.total,
        "pid": os.getpid(),
    }


def get_metrics_registry() -> MetricsRegistry:
    """Get the global metrics registry instance."""
    return MetricsRegistry.get_instance()
