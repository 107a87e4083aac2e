"""Gray-mapped QPSK over AWGN with exact per-bit LLR demapping.

LLR convention: positive values favour bit 0.
"""

from __future__ import annotations

import math

import numpy as np

from .polar_code import ConfigError

AMPLITUDE = 1.0 / math.sqrt(2.0)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``.

    Philox keys are two 64-bit words, so each (seed, frame) pair gets its own
    independent stream and results never depend on scheduling.
    """
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF]))


def noise_variance(es_n0_db: float) -> float:
    """Complex noise variance sigma^2 for unit symbol energy."""
    if not math.isfinite(es_n0_db):
        raise ConfigError(f"Es/N0 must be finite, got {es_n0_db}")
    return 10.0 ** (-es_n0_db / 10.0)


def esn0_to_ebn0(es_n0_db: float, code_rate: float, bits_per_symbol: int = 2) -> float:
    return es_n0_db - 10.0 * math.log10(code_rate * bits_per_symbol)


def ebn0_to_esn0(eb_n0_db: float, code_rate: float, bits_per_symbol: int = 2) -> float:
    return eb_n0_db + 10.0 * math.log10(code_rate * bits_per_symbol)


def modulate_qpsk(bits: np.ndarray) -> np.ndarray:
    """Map bit pairs to complex symbols; bit 0 -> +1/sqrt2, bit 1 -> -1/sqrt2 per dimension."""
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise ConfigError(f"QPSK needs an even number of bits, got {bits.shape[-1]}")
    levels = AMPLITUDE * (1.0 - 2.0 * bits.astype(np.float64))
    return levels[..., 0::2] + 1j * levels[..., 1::2]


def add_awgn(symbols: np.ndarray, es_n0_db: float, seed: int | np.random.Generator) -> np.ndarray:
    sigma2 = noise_variance(es_n0_db)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(int(seed))
    std = math.sqrt(sigma2 / 2.0)
    noise = rng.standard_normal(symbols.shape + (2,))
    return symbols + std * (noise[..., 0] + 1j * noise[..., 1])


def demap_llr(received: np.ndarray, es_n0_db: float) -> np.ndarray:
    """Per-bit LLRs ``2*sqrt(2)*y/sigma^2``, interleaved I, Q, I, Q, ..."""
    sigma2 = noise_variance(es_n0_db)
    received = np.asarray(received)
    out = np.empty(received.shape[:-1] + (2 * received.shape[-1],), dtype=np.float64)
    scale = 2.0 * math.sqrt(2.0) / sigma2
    out[..., 0::2] = scale * received.real
    out[..., 1::2] = scale * received.imag
    return out


def transmit(x: np.ndarray, es_n0_db: float, rng: np.random.Generator) -> np.ndarray:
    """Codeword bits to channel LLRs in one step."""
    return demap_llr(add_awgn(modulate_qpsk(x), es_n0_db, rng), es_n0_db)
