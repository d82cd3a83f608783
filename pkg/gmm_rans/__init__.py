"""
gmm-rans
Table-free rANS entropy coding under per-symbol Gaussian mixture models.
"""

__version__ = "0.1.0"

from gmm_rans.core.config import Config
from gmm_rans.core.logger import get_logger

__all__ = ["Config", "get_logger", "__version__"]
