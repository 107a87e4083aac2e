"""Leaf-node segmentation, classification and candidate tables."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .polar_code import ConfigError, encode, is_power_of_two


class NodeClass(enum.IntEnum):
    RATE0 = 0
    RATE1 = 1
    SPC = 2
    GENERIC = 3


def classify_node(info_pattern) -> NodeClass:
    """Rate-1 (all info), Rate-0 (none), SPC (only position 0 frozen) or Generic."""
    pattern = np.asarray(info_pattern, dtype=bool)
    n_info = int(pattern.sum())
    if n_info == pattern.size:
        return NodeClass.RATE1
    if n_info == 0:
        return NodeClass.RATE0
    if pattern.size > 1 and not pattern[0] and n_info == pattern.size - 1:
        return NodeClass.SPC
    return NodeClass.GENERIC


@dataclass(frozen=True)
class LeafNode:
    start_index: int
    size: int
    info_pattern: tuple[bool, ...]
    node_class: NodeClass

    @property
    def n_info(self) -> int:
        return sum(self.info_pattern)

    @property
    def info_offsets(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.info_pattern) if b)


@dataclass(frozen=True)
class NodeCandidate:
    """A candidate node codeword spawned from one source path."""

    source_path: int
    codeword: np.ndarray = field(compare=False)
    branch_metric: float
    candidate_rank: int


def bits_to_mask(bits) -> int:
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def mask_to_bits(mask: int, size: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(size)], dtype=np.uint8)


@lru_cache(maxsize=None)
def candidate_table(info_pattern: tuple[bool, ...]) -> tuple[np.ndarray, np.ndarray]:
    """All ``2**N_i`` (codeword mask, u mask) pairs in enumeration order.

    Enumeration index ``j`` sets bit ``b`` of ``j`` on the ``b``-th
    information offset (ascending).
    """
    size = len(info_pattern)
    offsets = [i for i, b in enumerate(info_pattern) if b]
    count = 1 << len(offsets)
    us = np.zeros((count, size), dtype=np.uint8)
    for j in range(count):
        for b, off in enumerate(offsets):
            us[j, off] = (j >> b) & 1
    cws = encode(size, us)
    weights = 1 << np.arange(size, dtype=np.int64)
    return (cws.astype(np.int64) @ weights).astype(np.int32), (us.astype(np.int64) @ weights).astype(np.int32)


@dataclass(frozen=True)
class NodeLayout:
    """Static per-leaf tables consumed by the decoding engines."""

    n_block: int
    node_size: int
    frozen_mask: np.ndarray = field(repr=False)
    leaves: tuple[LeafNode, ...] = field(repr=False)
    classes: np.ndarray = field(repr=False)
    n_candidates: np.ndarray = field(repr=False)
    codewords: np.ndarray = field(repr=False)
    u_masks: np.ndarray = field(repr=False)

    @property
    def max_candidates(self) -> int:
        return 1 << self.node_size


def build_layout(frozen_mask, node_size: int) -> NodeLayout:
    frozen = np.asarray(frozen_mask, dtype=bool)
    n_block = frozen.size
    if not is_power_of_two(n_block):
        raise ConfigError(f"block length must be a power of two, got {n_block}")
    if not is_power_of_two(node_size) or n_block % node_size or node_size > 8:
        raise ConfigError(f"node size {node_size} must be a power of two <= 8 dividing {n_block}")
    n_leaves = n_block // node_size
    cmax = 1 << node_size
    leaves = []
    classes = np.zeros(n_leaves, dtype=np.int32)
    ncand = np.zeros(n_leaves, dtype=np.int32)
    cws = np.zeros((n_leaves, cmax), dtype=np.int32)
    us = np.zeros((n_leaves, cmax), dtype=np.int32)
    for t in range(n_leaves):
        start = t * node_size
        pattern = tuple(bool(b) for b in ~frozen[start:start + node_size])
        leaf = LeafNode(start, node_size, pattern, classify_node(pattern))
        leaves.append(leaf)
        cw, u = candidate_table(pattern)
        classes[t] = int(leaf.node_class)
        ncand[t] = cw.size
        cws[t, : cw.size] = cw
        us[t, : u.size] = u
    return NodeLayout(n_block, node_size, frozen, tuple(leaves), classes, ncand, cws, us)
