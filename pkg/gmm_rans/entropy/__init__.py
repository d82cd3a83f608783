"""Mixture CDF evaluation, boundary quantization and the rANS core."""

from gmm_rans.entropy.mixture_cdf import (
    SIGMA_MIN,
    MAX_COMPONENTS,
    MAX_ALPHABET_SIZE,
    ApproximatorKind,
    MixtureParams,
    SymbolAlphabet,
    std_normal_cdf,
    std_normal_cdf_array,
    component_cdf_batch,
    mixture_cdf,
    quantize_cdf_value,
    quantized_boundary,
    quantized_pmf,
    oracle_cdf,
    approximation_error,
)
from gmm_rans.entropy.rans import (
    RANS_L,
    SymbolCoding,
    RansEncoder,
    RansDecoder,
    encode_map,
    decode_map,
    ideal_code_length,
)

__all__ = [
    "SIGMA_MIN",
    "MAX_COMPONENTS",
    "MAX_ALPHABET_SIZE",
    "ApproximatorKind",
    "MixtureParams",
    "SymbolAlphabet",
    "std_normal_cdf",
    "std_normal_cdf_array",
    "component_cdf_batch",
    "mixture_cdf",
    "quantize_cdf_value",
    "quantized_boundary",
    "quantized_pmf",
    "oracle_cdf",
    "approximation_error",
    "RANS_L",
    "SymbolCoding",
    "RansEncoder",
    "RansDecoder",
    "encode_map",
    "decode_map",
    "ideal_code_length",
]
