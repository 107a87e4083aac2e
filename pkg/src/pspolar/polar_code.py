"""Polar code construction, encoding and CRC handling.

The frozen set follows the polarization-weight (PW) ordering, the encoder is
the in-place butterfly for ``x = u G^{(x)n}`` with ``G = [[1, 0], [1, 1]]``,
and the CRC defaults to the 11-bit polynomial used by 5G control channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

PW_BASE = 2.0 ** 0.25

# D^11 + D^10 + D^9 + D^5 + 1
CRC11_POLY = 0xE21


class ConfigError(ValueError):
    """Raised for an invalid code, channel or simulation configuration."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def polarization_weight(index: int, beta: float = PW_BASE) -> float:
    w = 0.0
    j = 0
    while index:
        if index & 1:
            w += beta ** j
        index >>= 1
        j += 1
    return w


def build_reliability_order(n_block: int) -> np.ndarray:
    """Return bit indices sorted from least to most reliable.

    Reliability is the polarization weight ``sum_j b_j * 2**(j/4)`` over the
    binary digits ``b_j`` of the index; equal weights keep ascending index
    order, so the result is fully deterministic.
    """
    if not is_power_of_two(n_block):
        raise ConfigError(f"block length must be a power of two, got {n_block}")
    weights = [polarization_weight(i) for i in range(n_block)]
    return np.array(sorted(range(n_block), key=lambda i: (weights[i], i)), dtype=np.int64)


def load_reliability_order(path: str | Path, n_block: int) -> np.ndarray:
    """Read an override sequence: one decimal index per line, N lines."""
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln]
    try:
        order = np.array([int(ln) for ln in lines], dtype=np.int64)
    except ValueError as exc:
        raise ConfigError(f"{path}: non-integer entry in reliability sequence") from exc
    if order.size != n_block:
        raise ConfigError(f"{path}: expected {n_block} indices, found {order.size}")
    if not np.array_equal(np.sort(order), np.arange(n_block)):
        raise ConfigError(f"{path}: reliability sequence is not a permutation of 0..{n_block - 1}")
    return order


def frozen_mask_from_order(order: Sequence[int], n_info: int) -> np.ndarray:
    n_block = len(order)
    if not 0 <= n_info <= n_block:
        raise ConfigError(f"information length {n_info} outside [0, {n_block}]")
    mask = np.zeros(n_block, dtype=bool)
    mask[np.asarray(order[: n_block - n_info], dtype=np.int64)] = True
    return mask


@dataclass(frozen=True)
class CodeConfig:
    """Parameters of a CRC-concatenated polar code.

    ``frozen_mask[i]`` is True when ``u_i`` is frozen to zero.  The
    ``k_payload + k_crc`` information bits occupy the unfrozen positions in
    ascending index order, payload first.
    """

    n_block: int
    k_payload: int
    k_crc: int
    frozen_mask: np.ndarray = field(repr=False)
    node_size: int = 4
    crc_poly: int = CRC11_POLY

    def __post_init__(self):
        if not is_power_of_two(self.n_block):
            raise ConfigError(f"n_block must be a power of two, got {self.n_block}")
        mask = np.asarray(self.frozen_mask, dtype=bool)
        if mask.shape != (self.n_block,):
            raise ConfigError(f"frozen_mask must have length {self.n_block}")
        object.__setattr__(self, "frozen_mask", mask)
        mask.setflags(write=False)
        if self.k_payload < 0 or self.k_crc < 0:
            raise ConfigError("k_payload and k_crc must be nonnegative")
        if int((~mask).sum()) != self.k_payload + self.k_crc:
            raise ConfigError(
                f"frozen_mask leaves {int((~mask).sum())} information positions, "
                f"expected {self.k_payload + self.k_crc}"
            )
        if not is_power_of_two(self.node_size) or self.n_block % self.node_size:
            raise ConfigError(f"node_size {self.node_size} must be a power of two dividing {self.n_block}")
        if self.k_crc and self.crc_poly.bit_length() - 1 != self.k_crc:
            raise ConfigError(f"CRC polynomial {self.crc_poly:#x} does not have degree {self.k_crc}")

    @classmethod
    def from_pw(cls, n_block: int, k_payload: int, k_crc: int = 11, node_size: int = 4,
                crc_poly: int = CRC11_POLY, order: Sequence[int] | None = None) -> "CodeConfig":
        if order is None:
            order = build_reliability_order(n_block)
        mask = frozen_mask_from_order(order, k_payload + k_crc)
        return cls(n_block, k_payload, k_crc, mask, node_size, crc_poly if k_crc else 0)

    @property
    def k_info(self) -> int:
        return self.k_payload + self.k_crc

    @cached_property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen_mask)

    @cached_property
    def crc(self) -> "Crc":
        return Crc(self.crc_poly, self.k_payload) if self.k_crc else Crc(0, self.k_payload)

    def with_node_size(self, node_size: int) -> "CodeConfig":
        return CodeConfig(self.n_block, self.k_payload, self.k_crc, self.frozen_mask,
                          node_size, self.crc_poly)


def encode(config_or_n: CodeConfig | int, u: np.ndarray) -> np.ndarray:
    """Polar transform over GF(2).

    Works on the last axis, so a batch of shape ``(..., N)`` is encoded in
    one call.  ``u`` is not modified.
    """
    n_block = config_or_n.n_block if isinstance(config_or_n, CodeConfig) else int(config_or_n)
    x = np.array(u, dtype=np.uint8, copy=True)
    if x.shape[-1] != n_block:
        raise ConfigError(f"input length {x.shape[-1]} does not match N={n_block}")
    lead = x.shape[:-1]
    half = 1
    while half < n_block:
        v = x.reshape(*lead, n_block // (2 * half), 2, half)
        v[..., 0, :] ^= v[..., 1, :]
        half *= 2
    return x


class Crc:
    """Systematic zero-initialised CRC of a fixed payload length.

    The remainder is linear in the payload, so a parity matrix is kept for
    checking many candidate words at once.
    """

    def __init__(self, poly: int, k_payload: int):
        self.poly = int(poly)
        self.k_payload = int(k_payload)
        self.k_crc = max(self.poly.bit_length() - 1, 0)
        self._parity = np.array(
            [self._remainder(np.eye(1, self.k_payload, i, dtype=np.uint8)[0]) for i in range(self.k_payload)],
            dtype=np.uint8,
        ).reshape(self.k_payload, self.k_crc)

    def _remainder(self, bits: np.ndarray) -> np.ndarray:
        if not self.k_crc:
            return np.zeros(0, dtype=np.uint8)
        reg = 0
        top = 1 << self.k_crc
        for b in bits:
            reg = (reg << 1) | int(b)
            if reg & top:
                reg ^= self.poly
        for _ in range(self.k_crc):
            reg <<= 1
            if reg & top:
                reg ^= self.poly
        return np.array([(reg >> (self.k_crc - 1 - i)) & 1 for i in range(self.k_crc)], dtype=np.uint8)

    def attach(self, payload: np.ndarray) -> np.ndarray:
        payload = np.asarray(payload, dtype=np.uint8)
        if payload.shape != (self.k_payload,):
            raise ConfigError(f"payload length {payload.shape} != ({self.k_payload},)")
        return np.concatenate([payload, self._remainder(payload)])

    def check(self, word: np.ndarray) -> bool:
        word = np.asarray(word, dtype=np.uint8)
        if word.shape != (self.k_payload + self.k_crc,):
            raise ConfigError(f"word length {word.shape} != ({self.k_payload + self.k_crc},)")
        return bool(np.array_equal(self._remainder(word[: self.k_payload]), word[self.k_payload:]))

    def check_many(self, words: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`check` over rows of a 2-D array."""
        words = np.asarray(words, dtype=np.uint8)
        expected = (words[:, : self.k_payload].astype(np.int64) @ self._parity) & 1
        return np.all(expected == words[:, self.k_payload:], axis=1)


def crc_attach(config: CodeConfig, payload: np.ndarray) -> np.ndarray:
    return config.crc.attach(payload)


def crc_check(config: CodeConfig, word: np.ndarray) -> bool:
    return config.crc.check(word)


def embed(config: CodeConfig, info: np.ndarray) -> np.ndarray:
    """Place ``k_info`` bits into the unfrozen positions of a zero u-vector."""
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != config.k_info:
        raise ConfigError(f"expected {config.k_info} information bits, got {info.shape[-1]}")
    u = np.zeros(info.shape[:-1] + (config.n_block,), dtype=np.uint8)
    u[..., config.info_positions] = info
    return u


def extract(config: CodeConfig, u: np.ndarray) -> np.ndarray:
    return np.asarray(u)[..., config.info_positions]
