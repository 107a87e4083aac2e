"""SC, bit-level SCL and node-based SSCL / PS-SCL decoders.

The list decoders share one engine (see :mod:`pspolar.backend`): bit-level
SCL is the node engine with one-bit leaves, SSCL uses leaves of
``config.node_size`` bits with full candidate selection, and PS-SCL adds a
stair-stepping :class:`~pspolar.ps_select.SelectionProfile`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend
from ._pycore import enumerate_candidates, generate_candidates
from .nodes import LeafNode, NodeCandidate, NodeClass, build_layout, classify_node
from .polar_code import CodeConfig, ConfigError, encode, extract
from .ps_select import SelectionProfile
from .sc_kernel import MINSUM, MODES, beta_combine, f_combine, g_combine

LIST_SIZES = (1, 2, 4, 8, 16, 32)

__all__ = [
    "DecodeResult", "DecoderPath", "LeafNode", "NodeCandidate", "NodeClass", "classify_node",
    "decode_sc", "decode_scl", "decode_sscl", "enumerate_candidates", "generate_candidates",
]


@dataclass(frozen=True)
class DecoderPath:
    path_id: int
    path_metric: float
    u_history: np.ndarray

    @property
    def codeword(self) -> np.ndarray:
        return encode(self.u_history.size, self.u_history)


@dataclass(frozen=True)
class DecodeResult:
    u_hat: np.ndarray
    info: np.ndarray
    path_metrics: np.ndarray
    survivors: np.ndarray
    chosen: int
    crc_passed: bool

    @property
    def paths(self) -> list[DecoderPath]:
        return [DecoderPath(i, float(pm), self.survivors[i]) for i, pm in enumerate(self.path_metrics)]

    def payload(self, config: CodeConfig) -> np.ndarray:
        return self.info[: config.k_payload]


@lru_cache(maxsize=64)
def _layout(frozen_bytes: bytes, n_block: int, node_size: int):
    frozen = np.frombuffer(frozen_bytes, dtype=bool, count=n_block)
    return build_layout(frozen, node_size)


def layout_for(config: CodeConfig, node_size: int):
    return _layout(config.frozen_mask.tobytes(), config.n_block, node_size)


def _check_llr(config: CodeConfig, llr) -> np.ndarray:
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (config.n_block,):
        raise ConfigError(f"expected {config.n_block} LLRs, got shape {llr.shape}")
    return llr


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ConfigError(f"combine mode must be one of {MODES}, got {mode!r}")


def decode_sc(config: CodeConfig, llr, mode: str = MINSUM) -> np.ndarray:
    """Plain successive cancellation; returns the decided u-vector."""
    _check_mode(mode)
    llr = _check_llr(config, llr)

    def walk(alpha, frozen):
        if alpha.size == 1:
            bit = 0 if frozen[0] else int(alpha[0] < 0)
            return [bit], np.array([bit], dtype=np.uint8)
        h = alpha.size // 2
        u_left, beta_left = walk(f_combine(alpha, mode), frozen[:h])
        u_right, beta_right = walk(g_combine(alpha, beta_left), frozen[h:])
        return u_left + u_right, beta_combine(beta_left, beta_right)

    u, _ = walk(llr, config.frozen_mask)
    return np.array(u, dtype=np.uint8)


def _finish(config: CodeConfig, u: np.ndarray, pm: np.ndarray, crc_aided: bool) -> DecodeResult:
    info = extract(config, u)
    chosen, passed = 0, False
    if config.k_crc:
        ok = config.crc.check_many(info)
        if crc_aided and ok.any():
            chosen = int(np.argmax(ok))
        passed = bool(ok[chosen])
    return DecodeResult(u[chosen].copy(), info[chosen].copy(), pm, u, chosen, passed)


def _run(config, llr, node_size, list_size, keep, mode, backend_name, pmp_table, full_warmup=False):
    engine = backend.get_engine(backend_name)
    layout = layout_for(config, node_size)
    counts = steps = None
    if pmp_table is not None:
        counts, steps = pmp_table.counts, pmp_table.steps
    return engine(llr, layout, list_size, keep, mode == MINSUM, counts, steps, full_warmup=full_warmup)


def decode_scl(config: CodeConfig, llr, list_size: int, crc_aided: bool = True,
               mode: str = MINSUM, backend_name: str | None = None) -> DecodeResult:
    """Bit-by-bit SCL: split at every information bit, prune to ``list_size``.

    Ties in the pruning step go to the lower path metric, then the lower
    parent index, then bit value 0.
    """
    if list_size not in LIST_SIZES:
        raise ConfigError(f"list size must be one of {LIST_SIZES}, got {list_size}")
    _check_mode(mode)
    llr = _check_llr(config, llr)
    u, pm = _run(config, llr, 1, list_size, None, mode, backend_name, None)
    return _finish(config, u, pm, crc_aided)


def decode_sscl(config: CodeConfig, llr, list_size: int, profile: SelectionProfile | None = None,
                crc_aided: bool = True, mode: str = MINSUM, backend_name: str | None = None,
                pmp_table=None, node_size: int | None = None, full_warmup: bool = False) -> DecodeResult:
    """Node-based SCL over leaves of ``node_size`` bits.

    ``profile=None`` keeps every candidate (baseline SSCL); a
    :class:`SelectionProfile` admits only the stair-stepping region of the
    ordered candidate table (PS-SCL).  The stair applies from the first
    node, so the sorter never sees more than the profile's row budget;
    ``full_warmup=True`` instead keeps every candidate until ``list_size``
    paths are alive.  ``pmp_table`` collects survivor positions and requires
    full selection.
    """
    node_size = config.node_size if node_size is None else node_size
    if list_size not in LIST_SIZES:
        raise ConfigError(f"list size must be one of {LIST_SIZES}, got {list_size}")
    _check_mode(mode)
    llr = _check_llr(config, llr)
    keep = None
    if profile is not None:
        if not isinstance(profile, SelectionProfile):
            raise ConfigError(f"profile must be a SelectionProfile or None, got {profile!r}")
        if pmp_table is not None:
            raise ConfigError("PMP statistics are defined for full selection only")
        profile.validate_for(node_size, list_size)
        keep = profile.row_counts(list_size)
    u, pm = _run(config, llr, node_size, list_size, keep, mode, backend_name, pmp_table, full_warmup)
    return _finish(config, u, pm, crc_aided)
