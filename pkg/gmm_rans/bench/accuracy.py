"""Approximation error of the Gaussian CDF formulas against a high-precision oracle."""

from pathlib import Path
from typing import Iterable, Optional, Union

import pandas as pd

from gmm_rans.core.logger import get_logger
from gmm_rans.core.metrics import timed
from gmm_rans.entropy.mixture_cdf import ApproximatorKind, approximation_error

logger = get_logger(__name__)

ACCURACY_COLUMNS = ["kind", "x_min", "x_max", "step", "max_abs_err", "mean_abs_err"]


@timed("accuracy_grid_seconds")
def accuracy_grid(
    kinds: Optional[Iterable[ApproximatorKind]] = None,
    x_min: float = -8.0,
    x_max: float = 8.0,
    step: float = 1e-3,
) -> pd.DataFrame:
    """One row per approximator with its max and mean absolute error on the grid."""
    kinds = list(ApproximatorKind) if kinds is None else [ApproximatorKind.parse(k) for k in kinds]
    rows = []
    for kind in kinds:
        max_err, mean_err = approximation_error(kind, x_min, x_max, step)
        rows.append(
            {
                "kind": kind.cli_name,
                "x_min": x_min,
                "x_max": x_max,
                "step": step,
                "max_abs_err": max_err,
                "mean_abs_err": mean_err,
            }
        )
    return pd.DataFrame(rows, columns=ACCURACY_COLUMNS)


def write_accuracy_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote accuracy grid ({len(frame)} rows) to {path}")
    return path
