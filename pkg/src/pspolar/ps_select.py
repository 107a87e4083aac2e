"""Partial selection of list-decoder candidates.

Two ideas keep the survivor sorter small:

* a stair-stepping profile ``(x, y, z)`` keeps ``x`` candidates for each of
  the best ``L/4`` parent paths, ``y`` for the next ``L/4`` and ``z`` for
  the remaining ``L/2``;
* the few smallest branch metrics of a Rate-1 or SPC node follow from the
  sorted LLR magnitudes ``a_0 <= a_1 <= ...`` without enumerating and
  sorting every candidate codeword.

A branch metric (BM) of a candidate is the sum of ``|alpha[i]|`` over the
positions where it disagrees with the hard decisions, so every candidate
is a set of flipped sorted ranks and its BM is the sum of their magnitudes.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .nodes import NodeCandidate
from .polar_code import ConfigError

FAST_K = (1, 2, 4, 8)


@dataclass(frozen=True)
class SelectionProfile:
    """Keep counts for the three row bands (1/4, 1/4, 1/2 of the list)."""

    keep_counts: tuple[int, int, int]

    def __post_init__(self):
        kc = tuple(int(v) for v in self.keep_counts)
        if len(kc) != 3:
            raise ConfigError(f"profile needs three keep counts, got {self.keep_counts!r}")
        x, y, z = kc
        if not x >= y >= z >= 1:
            raise ConfigError(f"profile must satisfy x >= y >= z >= 1, got {kc}")
        object.__setattr__(self, "keep_counts", kc)

    @classmethod
    def parse(cls, text: str) -> "SelectionProfile":
        try:
            return cls(tuple(int(v) for v in text.replace("(", "").replace(")", "").split(",")))
        except ValueError as exc:
            raise ConfigError(f"cannot parse profile {text!r}") from exc

    def validate_for(self, node_size: int, list_size: int) -> None:
        if self.keep_counts[0] > 1 << node_size:
            raise ConfigError(f"keep count {self.keep_counts[0]} exceeds 2^{node_size} candidates")
        if list_size % 4:
            raise ConfigError(f"stair profiles need a list size divisible by 4, got {list_size}")

    def row_counts(self, list_size: int) -> np.ndarray:
        return np.array([keep_count_for_row(self, r, list_size) for r in range(list_size)], dtype=np.int32)

    def sorter_inputs(self, list_size: int) -> int:
        return int(self.row_counts(list_size).sum())

    def __str__(self) -> str:
        return ",".join(map(str, self.keep_counts))


def keep_count_for_row(profile: SelectionProfile, row: int, list_size: int) -> int:
    if list_size % 4:
        raise ConfigError(f"list size {list_size} is not divisible by 4")
    if not 0 <= row < list_size:
        raise ValueError(f"row {row} outside [0, {list_size})")
    x, y, z = profile.keep_counts
    if row < list_size // 4:
        return x
    if row < list_size // 2:
        return y
    return z


@dataclass(frozen=True)
class SortedMagnitudes:
    """LLR magnitudes of one node sorted ascending, with the sorting permutation.

    ``permutation[r]`` is the node position holding the ``r``-th smallest
    magnitude; ``syndrome`` is the parity of the hard decisions.
    """

    values: np.ndarray
    permutation: np.ndarray
    hard_decisions: np.ndarray
    syndrome: int

    @classmethod
    def from_llr(cls, alpha) -> "SortedMagnitudes":
        alpha = np.asarray(alpha, dtype=np.float64)
        mags = np.abs(alpha)
        perm = np.argsort(mags, kind="stable")
        hard = (alpha < 0).astype(np.uint8)
        return cls(mags[perm], perm, hard, int(hard.sum() & 1))

    @property
    def size(self) -> int:
        return self.values.size

    def metric(self, flips: Sequence[int]) -> float:
        return float(sum(self.values[r] for r in flips))

    def codeword(self, flips: Sequence[int]) -> np.ndarray:
        cw = self.hard_decisions.copy()
        for r in flips:
            cw[self.permutation[r]] ^= 1
        return cw


def _emit(mags: SortedMagnitudes, flip_sets: Iterable[Sequence[int]], source_path: int) -> list[NodeCandidate]:
    scored = [(mags.metric(f), i, f) for i, f in enumerate(flip_sets)]
    scored.sort(key=lambda item: (item[0], item[1]))
    return [NodeCandidate(source_path, mags.codeword(f), bm, rank) for rank, (bm, _, f) in enumerate(scored)]


def _first_two(mags: SortedMagnitudes, options: Sequence[Sequence[int]], count: int):
    # listed order breaks ties
    ranked = sorted(range(len(options)), key=lambda i: (mags.metric(options[i]), i))
    return [options[i] for i in ranked[:count]]


def _check_k(k: int, allowed: Sequence[int]) -> None:
    if k not in allowed:
        raise ValueError(f"k must be one of {tuple(allowed)}, got {k}")


def smallest_bms_rate1(mags: SortedMagnitudes, k: int, source_path: int = 0) -> list[NodeCandidate]:
    """The ``k`` smallest of the 16 Rate-1 branch metrics for a size-4 node."""
    _check_k(k, FAST_K)
    if mags.size != 4:
        raise ValueError("closed-form Rate-1 selection is defined for 4-bit nodes")
    if k == 1:
        flips = [()]
    elif k == 2:
        flips = [(), (0,)]
    elif k == 4:
        flips = [(), (0,), (1,)] + _first_two(mags, [(0, 1), (2,)], 1)
    else:
        flips = [(), (0,), (1,), (0, 1), (2,), (0, 2)]
        flips += _first_two(mags, [(3,), (0, 3), (1, 2), (0, 1, 2)], 2)
    return _emit(mags, flips, source_path)


def smallest_bms_spc(mags: SortedMagnitudes, k: int, source_path: int = 0) -> list[NodeCandidate]:
    """The ``k`` smallest even-parity branch metrics for a size-4 SPC node.

    With even hard-decision parity the flip set must have even size, and odd
    size otherwise.
    """
    _check_k(k, FAST_K[:3])
    if mags.size != 4:
        raise ValueError("closed-form SPC selection is defined for 4-bit nodes")
    if mags.syndrome == 0:
        table = {1: [()], 2: [(), (0, 1)], 4: [(), (0, 1), (0, 2)]}
        tail = [(0, 3), (1, 2)]
    else:
        table = {1: [(0,)], 2: [(0,), (1,)], 4: [(0,), (1,), (2,)]}
        tail = [(3,), (0, 1, 2)]
    flips = list(table[k])
    if k == 4:
        flips += _first_two(mags, tail, 1)
    return _emit(mags, flips, source_path)


def smallest_bms_generic(candidates: Sequence[NodeCandidate], k: int) -> list[NodeCandidate]:
    """Partial selection of the ``k`` lowest-BM candidates (ties by rank)."""
    if k > len(candidates):
        raise ValueError(f"k={k} exceeds {len(candidates)} candidates")
    best = heapq.nsmallest(k, candidates, key=lambda c: (c.branch_metric, c.candidate_rank))
    return [NodeCandidate(c.source_path, c.codeword, c.branch_metric, rank) for rank, c in enumerate(best)]


def k_smallest_flip_sets(values: Sequence[float], k: int, parity: int | None = None) -> list[tuple[float, tuple[int, ...]]]:
    """Best-first walk over subsets of ascending ``values``.

    Every subset ending at rank ``i`` has two successors: append ``i+1`` or
    replace ``i`` by ``i+1``.  Both are never smaller than their
    predecessor, so popping a min-heap yields subsets in ascending sum and
    every subset is reached exactly once.  ``parity`` restricts the output
    to subsets of that size parity.
    """
    vals = [float(v) for v in values]
    n = len(vals)
    limit = 1 << n if parity is None else (1 << max(n - 1, 0) if n else int(parity == 0))
    if k > limit:
        raise ValueError(f"k={k} exceeds the {limit} available subsets")
    out: list[tuple[float, tuple[int, ...]]] = []
    if k <= 0:
        return out
    if parity in (None, 0):
        out.append((0.0, ()))
    counter = itertools.count()
    heap = [(vals[0], next(counter), (0,))] if n else []
    while len(out) < k:
        total, _, flips = heapq.heappop(heap)
        if parity is None or len(flips) % 2 == parity:
            out.append((total, flips))
        last = flips[-1]
        if last + 1 < n:
            grown = flips + (last + 1,)
            moved = flips[:-1] + (last + 1,)
            heapq.heappush(heap, (sum(vals[r] for r in grown), next(counter), grown))
            heapq.heappush(heap, (sum(vals[r] for r in moved), next(counter), moved))
    return out


def k_smallest_subset_sums(mags: Sequence[float], k: int) -> np.ndarray:
    """The ``k`` smallest sums over all subsets of ascending nonnegative ``mags``."""
    mags = np.asarray(mags, dtype=np.float64)
    if np.any(mags < 0) or np.any(np.diff(mags) < 0):
        raise ValueError("magnitudes must be nonnegative and ascending")
    return np.array([s for s, _ in k_smallest_flip_sets(mags, k)], dtype=np.float64)


def smallest_bms_best_first(mags: SortedMagnitudes, k: int, parity: int | None = None,
                            source_path: int = 0) -> list[NodeCandidate]:
    """Rate-1 (``parity=None``) or SPC selection for any node size."""
    sets = k_smallest_flip_sets(mags.values, k, parity)
    return [NodeCandidate(source_path, mags.codeword(f), mags.metric(f), rank)
            for rank, (_, f) in enumerate(sets)]


def select_survivors(rows: Sequence[Sequence[NodeCandidate]], parent_pms: Sequence[float],
                     profile: SelectionProfile | None, list_size: int) -> list[tuple[int, NodeCandidate]]:
    """Keep the ``list_size`` smallest ``PM + BM`` among the admitted candidates.

    Row ``r`` belongs to the parent with the ``r``-th smallest path metric
    and lists its candidates in ascending BM.  With a profile only the first
    ``keep_count_for_row(r)`` of each row are admitted.  Ties are broken by
    (row, candidate rank).
    """
    if len(rows) != len(parent_pms):
        raise ValueError("one parent metric per row is required")
    admitted = []
    for r, row in enumerate(rows):
        take = len(row) if profile is None else min(len(row), keep_count_for_row(profile, r, list_size))
        for c in row[:take]:
            admitted.append((parent_pms[r] + c.branch_metric, r, c.candidate_rank, c))
    best = heapq.nsmallest(list_size, admitted, key=lambda item: item[:3])
    return [(r, c) for _, r, _, c in best]
