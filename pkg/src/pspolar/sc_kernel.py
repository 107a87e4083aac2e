"""Tree message-passing primitives shared by every decoder.

All functions act on the last axis so they broadcast over a leading path
dimension.  A stage-``s`` node holds ``2**s`` LLRs; its children hold half.
"""

from __future__ import annotations

import numpy as np

MINSUM = "minsum"
EXACT = "exact"
MODES = (MINSUM, EXACT)


def _halves(x: np.ndarray):
    h = x.shape[-1] // 2
    if x.shape[-1] != 2 * h or h == 0:
        raise ValueError(f"expected an even, nonzero length, got {x.shape[-1]}")
    return x[..., :h], x[..., h:]


def boxplus(a, b, mode: str = MINSUM):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    approx = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    if mode == MINSUM:
        return approx
    if mode != EXACT:
        raise ValueError(f"unknown combine mode {mode!r}")
    # ln((1+e^(a+b))/(e^a+e^b)) rewritten without overflowing exponentials
    return approx + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def f_combine(alpha: np.ndarray, mode: str = MINSUM) -> np.ndarray:
    """Left-child LLRs from a parent vector of length ``2**s``."""
    upper, lower = _halves(np.asarray(alpha, dtype=np.float64))
    return boxplus(upper, lower, mode)


def g_combine(alpha: np.ndarray, beta_left: np.ndarray) -> np.ndarray:
    """Right-child LLRs given the left child's partial sums."""
    upper, lower = _halves(np.asarray(alpha, dtype=np.float64))
    beta_left = np.asarray(beta_left)
    if beta_left.shape[-1] != upper.shape[-1]:
        raise ValueError("beta_left length must be half the parent length")
    return lower + (1.0 - 2.0 * beta_left) * upper


def beta_combine(beta_left: np.ndarray, beta_right: np.ndarray) -> np.ndarray:
    beta_left = np.asarray(beta_left, dtype=np.uint8)
    beta_right = np.asarray(beta_right, dtype=np.uint8)
    if beta_left.shape != beta_right.shape:
        raise ValueError(f"beta shapes differ: {beta_left.shape} vs {beta_right.shape}")
    return np.concatenate([beta_left ^ beta_right, beta_right], axis=-1)


def hard_decision(alpha: np.ndarray) -> np.ndarray:
    """1 where the LLR is negative; a zero LLR decides 0."""
    return (np.asarray(alpha) < 0).astype(np.uint8)
