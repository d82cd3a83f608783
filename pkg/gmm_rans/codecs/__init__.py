"""Stream container and the flash, table and single-Gaussian codecs."""

from gmm_rans.codecs.container import (
    MIXTURE_MAGIC,
    SINGLE_GAUSSIAN_MAGIC,
    CHUNKED_MAGIC,
    StreamHeader,
    EncodedStream,
    ChunkedStream,
    pack_params,
    unpack_params,
    quantize_params,
    read_stream,
)
from gmm_rans.codecs.base import Codec, CodecStats
from gmm_rans.codecs.flash import (
    FlashCodec,
    flash_encode,
    flash_decode,
    locate_symbol,
    symbol_bits,
    stream_bits,
)
from gmm_rans.codecs.table import CdfTable, TableCodec, build_table, table_encode, table_decode
from gmm_rans.codecs.gsm import (
    ScaleTable,
    GsmCodec,
    gsm_init,
    gsm_encode,
    gsm_decode,
    moment_match,
)

__all__ = [
    "MIXTURE_MAGIC",
    "SINGLE_GAUSSIAN_MAGIC",
    "CHUNKED_MAGIC",
    "StreamHeader",
    "EncodedStream",
    "ChunkedStream",
    "pack_params",
    "unpack_params",
    "quantize_params",
    "read_stream",
    "Codec",
    "CodecStats",
    "FlashCodec",
    "flash_encode",
    "flash_decode",
    "locate_symbol",
    "symbol_bits",
    "stream_bits",
    "CdfTable",
    "TableCodec",
    "build_table",
    "table_encode",
    "table_decode",
    "ScaleTable",
    "GsmCodec",
    "gsm_init",
    "gsm_encode",
    "gsm_decode",
    "moment_match",
]
