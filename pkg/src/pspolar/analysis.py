"""Survivor-position statistics and sorter complexity.

A PMP table counts, for every survivor of a full-selection node step, the
rank of its parent path (row) and the rank of its branch metric within that
parent's candidates (column).  Box probabilities sum the normalised table
over a selection region, which is the chance that a partial selector would
have admitted the survivor.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .nodes import NodeClass
from .polar_code import CodeConfig, ConfigError, is_power_of_two
from .ps_select import SelectionProfile, keep_count_for_row

SPLITTING_CLASSES = (NodeClass.RATE1, NodeClass.SPC, NodeClass.GENERIC)


@dataclass
class PmpTable:
    list_size: int
    n_columns: int
    counts: np.ndarray = field(default=None, repr=False)
    steps: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((len(NodeClass), self.list_size, self.n_columns), dtype=np.int64)
        if self.steps is None:
            self.steps = np.zeros(len(NodeClass), dtype=np.int64)

    @classmethod
    def for_decoder(cls, list_size: int, node_size: int) -> "PmpTable":
        return cls(list_size, 1 << node_size)

    def merge(self, other: "PmpTable") -> "PmpTable":
        if (self.list_size, self.n_columns) != (other.list_size, other.n_columns):
            raise ValueError("cannot merge PMP tables of different shapes")
        return PmpTable(self.list_size, self.n_columns, self.counts + other.counts, self.steps + other.steps)

    __add__ = merge

    def total_steps(self, classes=SPLITTING_CLASSES) -> int:
        return int(sum(self.steps[int(c)] for c in classes))

    def probabilities(self, classes=SPLITTING_CLASSES) -> np.ndarray:
        """Counts over the chosen node classes divided by ``L * steps``."""
        idx = [int(c) for c in classes]
        steps = self.steps[idx].sum()
        if steps == 0:
            return np.zeros((self.list_size, self.n_columns))
        return self.counts[idx].sum(axis=0) / (self.list_size * steps)


def accumulate_pmp(config: CodeConfig, llr, list_size: int, table: PmpTable, **kwargs):
    """Decode one frame with full selection, tallying survivors into ``table``."""
    from .list_decoder import decode_sscl

    return decode_sscl(config, llr, list_size, None, pmp_table=table, **kwargs)


def stair_mask(shape: tuple[int, int], profile: SelectionProfile | int) -> np.ndarray:
    rows, cols = shape
    if isinstance(profile, int):
        profile = SelectionProfile((profile, profile, profile))
    mask = np.zeros(shape, dtype=bool)
    for r in range(rows):
        mask[r, : min(cols, keep_count_for_row(profile, r, rows))] = True
    return mask


def box_probability(table: PmpTable | np.ndarray, profile: SelectionProfile | int,
                    classes=SPLITTING_CLASSES) -> float:
    """Probability mass inside a stair (or, for an int width, rectangular) region."""
    probs = table.probabilities(classes) if isinstance(table, PmpTable) else np.asarray(table)
    return float(probs[stair_mask(probs.shape, profile)].sum())


def write_pmp_csv(probs: np.ndarray, path_or_buf) -> None:
    probs = np.asarray(probs)
    own = isinstance(path_or_buf, (str, Path))
    fh = open(path_or_buf, "w", newline="", encoding="utf-8") if own else path_or_buf
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"rank_col_{j}" for j in range(probs.shape[1])])
        for row in probs:
            writer.writerow([f"{v:.6f}" for v in row])
    finally:
        if own:
            fh.close()


def pmp_csv_text(probs: np.ndarray) -> str:
    buf = io.StringIO()
    write_pmp_csv(probs, buf)
    return buf.getvalue()


def cas_count_bitonic(n_inputs: int) -> int:
    """Compare-and-select units of a full bitonic sorter on ``n_inputs = 2*L_in`` values.

    ``(L_in/2)(log2 L_in + 1)(log2 L_in + 2)``.
    """
    if n_inputs < 2 or not is_power_of_two(n_inputs):
        raise ConfigError(f"bitonic sorter size must be a power of two >= 2, got {n_inputs}")
    l_in = n_inputs // 2
    lg = l_in.bit_length() - 1
    return l_in * (lg + 1) * (lg + 2) // 2


DECODER_KINDS = ("scl", "ps-scl", "fast-sscl")


def sorter_inputs(kind: str, node_size: int, list_size: int, profile: SelectionProfile | None = None) -> int:
    if kind == "scl":
        return list_size << node_size
    if kind == "ps-scl":
        if profile is None:
            raise ConfigError("ps-scl sorter size needs a profile")
        return profile.sorter_inputs(list_size)
    if kind == "fast-sscl":
        # split count capped by the list size, as in path-limited Rate-1/SPC decoding
        return list_size * min(node_size, list_size)
    raise ConfigError(f"unsupported decoder kind {kind!r}; expected one of {DECODER_KINDS}")


def next_power_of_two(v: int) -> int:
    return 1 << max(v - 1, 0).bit_length()


def cas_table(kind: str, node_size: int, list_size: int, profile: SelectionProfile | None = None) -> int:
    return cas_count_bitonic(next_power_of_two(sorter_inputs(kind, node_size, list_size, profile)))


CAS_COLUMNS = (
    ("PS-SCL Nv=4 (4,2,1)", "ps-scl", 4, SelectionProfile((4, 2, 1))),
    ("PS-SCL Nv=8 (8,4,2)", "ps-scl", 8, SelectionProfile((8, 4, 2))),
    ("SCL Nv=4", "scl", 4, None),
    ("SCL Nv=8", "scl", 8, None),
    ("Fast-SSCL Nv=4", "fast-sscl", 4, None),
    ("Fast-SSCL Nv=8", "fast-sscl", 8, None),
)


def report_cas(list_sizes=(4, 8, 16, 32), columns=CAS_COLUMNS) -> list[dict]:
    """One record per list size with the CAS count for every column."""
    rows = []
    for L in list_sizes:
        rec = {"list_size": L}
        for label, kind, nv, prof in columns:
            rec[label] = cas_table(kind, nv, L, prof)
        rows.append(rec)
    return rows


def cas_csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
