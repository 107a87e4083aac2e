"""Pure-Python list-decoding engine.

Used when the compiled ``_core`` extension is unavailable and as the
reference the extension is tested against.  Path state lives in per-stage
arrays with a leading path axis, so cloning paths is a fancy-index gather.
"""

from __future__ import annotations

import numpy as np

from .nodes import LeafNode, NodeCandidate, NodeClass, NodeLayout, candidate_table
from .polar_code import encode
from .ps_select import (SortedMagnitudes, smallest_bms_best_first, smallest_bms_generic,
                        smallest_bms_rate1, smallest_bms_spc)
from .sc_kernel import EXACT, MINSUM, beta_combine, f_combine, g_combine, hard_decision


def _codeword_bits(masks: np.ndarray, size: int) -> np.ndarray:
    return ((np.asarray(masks)[..., None] >> np.arange(size)) & 1).astype(np.uint8)


def enumerate_candidates(node: LeafNode, path_llr, source_path: int = 0) -> list[NodeCandidate]:
    cws, _ = candidate_table(node.info_pattern)
    alpha = np.asarray(path_llr, dtype=np.float64)
    bits = _codeword_bits(cws, node.size)
    mism = bits != hard_decision(alpha)[None, :]
    bms = (mism * np.abs(alpha)[None, :]).sum(axis=1)
    return [NodeCandidate(source_path, bits[j], float(bms[j]), j) for j in range(cws.size)]


def generate_candidates(node: LeafNode, path_llr, keep: int | None = None,
                        source_path: int = 0) -> list[NodeCandidate]:
    """Candidate codewords of ``node`` for one path, ascending in branch metric.

    ``keep=None`` enumerates every codeword of the node.  Otherwise only the
    ``keep`` smallest are produced: Rate-1 and SPC nodes use the sorted
    magnitude shortcuts, other nodes a partial selection over the
    enumeration.
    """
    n_cand = 1 << node.n_info
    if keep is None or keep >= n_cand:
        return smallest_bms_generic(enumerate_candidates(node, path_llr, source_path), n_cand)
    if node.node_class == NodeClass.RATE1 or node.node_class == NodeClass.SPC:
        mags = SortedMagnitudes.from_llr(path_llr)
        if node.node_class == NodeClass.RATE1:
            if node.size == 4 and keep in (1, 2, 4, 8):
                return smallest_bms_rate1(mags, keep, source_path)
            return smallest_bms_best_first(mags, keep, None, source_path)
        if node.size == 4 and keep in (1, 2, 4):
            return smallest_bms_spc(mags, keep, source_path)
        return smallest_bms_best_first(mags, keep, mags.syndrome, source_path)
    return smallest_bms_generic(enumerate_candidates(node, path_llr, source_path), keep)


def decode_frame(llr, layout: NodeLayout, list_size: int, keep=None, minsum: bool = True,
                 pmp=None, pmp_steps=None, trace=None, full_warmup: bool = False):
    """Decode one frame; returns ``(u, pm)`` for the survivors in PM order.

    ``keep`` holds one keep count per row (length ``list_size``) or None for
    full selection.  The stair applies from the first node unless
    ``full_warmup`` is set, in which case it starts once the list is full.
    ``pmp``/``pmp_steps`` are optional tally arrays shaped
    ``(4, list_size, 2**node_size)`` and ``(4,)`` updated in place.
    ``trace(t, parent_pm, rows, chosen)`` is called after each selection.
    """
    mode = MINSUM if minsum else EXACT
    n_block, m_size = layout.n_block, layout.node_size
    n = n_block.bit_length() - 1
    m = m_size.bit_length() - 1
    alpha = {n: np.asarray(llr, dtype=np.float64)[None, :]}
    betal: dict[int, np.ndarray] = {}
    u = np.zeros((1, n_block), dtype=np.uint8)
    pm = np.zeros(1)

    for t, leaf in enumerate(layout.leaves):
        s_top = n if t == 0 else (t ^ (t - 1)).bit_length() - 1 + m + 1
        for s in range(s_top, m, -1):
            if (t >> (s - 1 - m)) & 1:
                alpha[s - 1] = g_combine(alpha[s], betal[s])
            else:
                alpha[s - 1] = f_combine(alpha[s], mode)
        a = alpha[m]
        n_paths = a.shape[0]
        partial = keep is not None and (n_paths == list_size or not full_warmup)

        rows = []
        if partial:
            for r in range(n_paths):
                rows.append(generate_candidates(leaf, a[r], int(keep[r]), r))
        else:
            # vectorised full enumeration; stable sort keeps enumeration order on ties
            nc = int(layout.n_candidates[t])
            bits = _codeword_bits(layout.codewords[t, :nc], m_size)
            mism = bits[None, :, :] != hard_decision(a)[:, None, :]
            bms = (mism * np.abs(a)[:, None, :]).sum(axis=2)
            order = np.argsort(bms, axis=1, kind="stable")
            for r in range(n_paths):
                rows.append([NodeCandidate(r, bits[j], float(bms[r, j]), rank)
                             for rank, j in enumerate(order[r])])

        parent = np.array([c.source_path for row in rows for c in row], dtype=np.int64)
        rank = np.array([c.candidate_rank for row in rows for c in row], dtype=np.int64)
        total = pm[parent] + np.array([c.branch_metric for row in rows for c in row])
        flat = [c for row in rows for c in row]
        chosen = np.lexsort((rank, parent, total))[:list_size]

        if pmp is not None and not partial and n_paths == list_size:
            cls = int(layout.classes[t])
            np.add.at(pmp[cls], (parent[chosen], rank[chosen]), 1)
            pmp_steps[cls] += 1
        if trace is not None:
            trace(t, pm.copy(), rows, [(int(parent[i]), flat[i]) for i in chosen])

        src = parent[chosen]
        for s in range(m + 1, n + 1):
            alpha[s] = alpha[s][src]
            if s in betal:
                betal[s] = betal[s][src]
        u = u[src]
        pm = total[chosen]
        leaf_beta = np.stack([flat[i].codeword for i in chosen]).astype(np.uint8)
        u[:, leaf.start_index:leaf.start_index + m_size] = encode(m_size, leaf_beta)

        b = leaf_beta
        for s in range(m + 1, n + 1):
            if (t >> (s - 1 - m)) & 1:
                b = beta_combine(betal[s], b)
            else:
                betal[s] = b
                break
    return u, pm
