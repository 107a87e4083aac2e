"""Polar-code SC / SCL / SSCL decoding with partial-selection list decoding."""

from .backend import has_compiled
from .channel import add_awgn, demap_llr, make_rng, modulate_qpsk
from .list_decoder import decode_sc, decode_scl, decode_sscl
from .polar_code import CodeConfig, ConfigError, build_reliability_order, encode
from .ps_select import SelectionProfile, k_smallest_subset_sums

__all__ = [
    "CodeConfig", "ConfigError", "SelectionProfile", "add_awgn", "build_reliability_order",
    "decode_sc", "decode_scl", "decode_sscl", "demap_llr", "encode", "has_compiled",
    "k_smallest_subset_sums", "make_rng", "modulate_qpsk",
]
__version__ = "0.1.0"
