"""SC, SSC and list decoders."""

from .decoder import (
    ALGORITHMS,
    DecodeResult,
    Decoder,
    decode_adaptive,
    decode_ca_sscl,
    decode_sc,
    decode_scl,
    normalize_algorithm,
)
from .paths import (
    Layout,
    PathSet,
    duplicate_path,
    process_special_node,
    scl_update_paths_leaf,
    select_two_extremes,
    sort_survivors,
)

__all__ = [
    "ALGORITHMS", "DecodeResult", "Decoder", "Layout", "PathSet",
    "decode_adaptive", "decode_ca_sscl", "decode_sc", "decode_scl", "duplicate_path",
    "normalize_algorithm", "process_special_node", "scl_update_paths_leaf",
    "select_two_extremes", "sort_survivors",
]
