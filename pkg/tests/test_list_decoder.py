import itertools
import math

import numpy as np
import pytest

from pspolar import backend
from pspolar.channel import make_rng, transmit
from pspolar.list_decoder import decode_sc, decode_scl, decode_sscl, layout_for
from pspolar.polar_code import CodeConfig, ConfigError, embed, encode
from pspolar.ps_select import SelectionProfile
from pspolar._pycore import decode_frame as py_engine


# ---------------------------------------------------------------- oracles

def _f(a, b, mode):
    if mode == "minsum":
        return math.copysign(1, a) * math.copysign(1, b) * min(abs(a), abs(b))
    return math.log((1 + math.exp(a + b)) / (math.exp(a) + math.exp(b)))


def leaf_llrs(llr, u, leaf, mode="minsum"):
    """LLR vectors at every leaf of size ``leaf`` when decisions ``u`` are forced."""
    out = []

    def walk(alpha, bits):
        if len(alpha) == leaf:
            out.append(list(alpha))
            return encode(leaf, np.array(bits, dtype=np.uint8)).tolist()
        h = len(alpha) // 2
        left = walk([_f(alpha[i], alpha[i + h], mode) for i in range(h)], bits[:h])
        right = walk([alpha[i + h] + (1 - 2 * left[i]) * alpha[i] for i in range(h)], bits[h:])
        return [l ^ r for l, r in zip(left, right)] + right

    walk([float(v) for v in llr], list(u))
    return out


def path_metric(llr, u, leaf, mode="minsum"):
    """Node-level metric: sum over leaves of |alpha| where the leaf codeword disagrees with sign(alpha)."""
    total = 0.0
    for t, alpha in enumerate(leaf_llrs(llr, u, leaf, mode)):
        cw = encode(leaf, np.array(u[t * leaf:(t + 1) * leaf], dtype=np.uint8))
        total += sum(abs(a) for a, c in zip(alpha, cw) if c != (a < 0))
    return total


def reference_list_decoder(cfg, llr, list_size, leaf, keep=None):
    """Straightforward list decoder recomputing every path from scratch.

    ``keep`` (per row) admits only each parent's best candidates, applied
    from the first node.
    """
    paths = [((), 0.0)]
    frozen = cfg.frozen_mask
    for t in range(cfg.n_block // leaf):
        info = [i for i in range(leaf) if not frozen[t * leaf + i]]
        pool = []
        for row, (prefix, pm) in enumerate(paths):
            cands = []
            for j in range(1 << len(info)):
                seg = [0] * leaf
                for b, off in enumerate(info):
                    seg[off] = (j >> b) & 1
                u = list(prefix) + seg + [0] * (cfg.n_block - len(prefix) - leaf)
                alpha = leaf_llrs(llr, u, leaf)[t]
                cw = encode(leaf, np.array(seg, dtype=np.uint8))
                bm = sum(abs(a) for a, c in zip(alpha, cw) if c != (a < 0))
                cands.append((bm, j, tuple(seg)))
            cands.sort(key=lambda c: (c[0], c[1]))
            if keep is not None:
                cands = cands[: keep[row]]
            pool += [(pm + bm, row, rank, prefix + seg) for rank, (bm, _, seg) in enumerate(cands)]
        pool.sort(key=lambda p: p[:3])
        paths = [(p[3], p[0]) for p in pool[:list_size]]
    return np.array([p[0] for p in paths], dtype=np.uint8), np.array([p[1] for p in paths])


def frames(cfg, es_n0, count, seed):
    for i in range(count):
        rng = make_rng(seed, i)
        info = cfg.crc.attach(rng.integers(0, 2, cfg.k_payload, dtype=np.uint8)) if cfg.k_crc else \
            rng.integers(0, 2, cfg.k_payload, dtype=np.uint8)
        x = encode(cfg.n_block, embed(cfg, info))
        yield info, transmit(x, es_n0, rng)


BACKENDS = ["python"] + (["compiled"] if backend.has_compiled() else [])


# ---------------------------------------------------------------- examples

def test_sc_noiseless_all_zero():
    cfg = CodeConfig.from_pw(64, 32, 11)
    assert not decode_sc(cfg, np.full(64, 20.0)).any()


def test_sc_recovers_noiseless_random_codeword():
    cfg = CodeConfig.from_pw(128, 38, 11)
    for info, llr in frames(cfg, 30.0, 5, 1):
        u = decode_sc(cfg, llr)
        assert np.array_equal(u[~cfg.frozen_mask], info)


@pytest.mark.parametrize("name", BACKENDS)
def test_frozen_bit_penalty(name):
    cfg = CodeConfig.from_pw(2, 1, 0, node_size=1)
    res = decode_scl(cfg, np.array([-2.5, 10.0]), 2, backend_name=name)
    assert list(res.path_metrics) == [2.5, 10.0]
    res = decode_scl(cfg, np.array([2.5, 10.0]), 2, backend_name=name)
    assert res.path_metrics[0] == 0.0


@pytest.mark.parametrize("name", BACKENDS)
def test_single_rate1_node_keeps_four_smallest(name):
    cfg = CodeConfig.from_pw(4, 4, 0, node_size=4)
    res = decode_sscl(cfg, np.array([0.5, -1.0, 2.0, -3.0]), 4, backend_name=name)
    assert list(res.path_metrics) == [0.0, 0.5, 1.0, 1.5]
    res = decode_sscl(cfg, np.array([0.5, -1.0, 2.0, -3.0]), 4, SelectionProfile((4, 2, 1)), backend_name=name)
    assert list(res.path_metrics) == [0.0, 0.5, 1.0, 1.5]


def test_invalid_arguments():
    cfg = CodeConfig.from_pw(64, 32, 11)
    llr = np.ones(64)
    with pytest.raises(ConfigError):
        decode_scl(cfg, llr, 3)
    with pytest.raises(ConfigError):
        decode_sscl(cfg, llr, 64)
    with pytest.raises(ConfigError):
        decode_sscl(cfg, llr, 2, SelectionProfile((4, 2, 1)))
    with pytest.raises(ConfigError):
        decode_sscl(cfg, llr, 8, SelectionProfile((32, 2, 1)))
    with pytest.raises(ConfigError):
        decode_sscl(cfg, llr, 8, profile=(4, 2, 1))
    with pytest.raises(ConfigError):
        decode_scl(cfg, np.ones(32), 4)
    with pytest.raises(ConfigError):
        decode_scl(cfg, llr, 4, mode="approx")


# ---------------------------------------------------------------- brute-force oracles

@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("leaf", [1, 4])
def test_unpruned_list_equals_all_codeword_metrics(name, leaf):
    # with L >= 2^K nothing is pruned, so the final PMs are the metrics of every u
    cfg = CodeConfig.from_pw(8, 4, 0, node_size=4)
    rng = np.random.default_rng(5)
    info_pos = np.flatnonzero(~cfg.frozen_mask)
    for _ in range(10):
        llr = rng.standard_normal(8) * 2
        oracle = []
        for bits in itertools.product((0, 1), repeat=4):
            u = np.zeros(8, dtype=np.uint8)
            u[info_pos] = bits
            oracle.append(path_metric(llr, u, leaf))
        if leaf == 1:
            res = decode_scl(cfg, llr, 16, backend_name=name)
        else:
            res = decode_sscl(cfg, llr, 16, backend_name=name)
        assert np.allclose(np.sort(res.path_metrics), np.sort(oracle), atol=1e-9)
        for u, pm in zip(res.survivors, res.path_metrics):
            assert pm == pytest.approx(path_metric(llr, u, leaf), abs=1e-9)


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("leaf, profile", [(1, None), (4, None), (4, (4, 2, 1)), (8, (8, 4, 2))])
def test_pruned_list_matches_reference_decoder(name, leaf, profile):
    cfg = CodeConfig.from_pw(32, 12, 0, node_size=max(leaf, 4))
    L = 4
    keep = None if profile is None else SelectionProfile(profile).row_counts(L)
    for _, llr in frames(cfg, 1.0, 8, 3):
        u_ref, pm_ref = reference_list_decoder(cfg, llr, L, leaf, keep)
        if leaf == 1:
            res = decode_scl(cfg, llr, L, crc_aided=False, backend_name=name)
        else:
            prof = None if profile is None else SelectionProfile(profile)
            res = decode_sscl(cfg, llr, L, prof, crc_aided=False, backend_name=name, node_size=leaf)
        assert np.allclose(res.path_metrics, pm_ref, atol=1e-9)
        assert np.array_equal(res.survivors, u_ref)


def test_sc_equals_scl_list_one():
    cfg = CodeConfig.from_pw(128, 38, 11)
    for _, llr in frames(cfg, 0.0, 40, 4):
        assert np.array_equal(decode_sc(cfg, llr), decode_scl(cfg, llr, 1, crc_aided=False).u_hat)


def test_exact_mode_differs_but_decodes():
    cfg = CodeConfig.from_pw(128, 38, 11)
    for info, llr in frames(cfg, 4.0, 10, 8):
        for name in BACKENDS:
            res = decode_sscl(cfg, llr, 8, mode="exact", backend_name=name)
            assert np.array_equal(res.info, info)


# ---------------------------------------------------------------- engines

@pytest.mark.skipif(not backend.has_compiled(), reason="compiled extension not built")
@pytest.mark.parametrize("nv, L, profile, warm", [
    (1, 8, None, False), (4, 32, None, False), (4, 32, (4, 2, 1), False), (4, 8, (4, 2, 1), True),
    (8, 32, (8, 4, 2), False), (8, 16, (4, 2, 1), True), (8, 4, None, False),
])
@pytest.mark.parametrize("mode", ["minsum", "exact"])
def test_compiled_matches_python(nv, L, profile, warm, mode):
    cfg = CodeConfig.from_pw(128, 38, 11)
    prof = None if profile is None else SelectionProfile(profile)
    for _, llr in frames(cfg, 0.5, 6, 21):
        runs = [decode_sscl(cfg, llr, L, prof, mode=mode, backend_name=b, node_size=nv, full_warmup=warm)
                for b in ("python", "compiled")]
        assert np.array_equal(runs[0].survivors, runs[1].survivors)
        assert np.allclose(runs[0].path_metrics, runs[1].path_metrics, rtol=0, atol=1e-9)
        assert runs[0].chosen == runs[1].chosen


@pytest.mark.parametrize("nv, profile", [(4, None), (4, (4, 2, 1)), (8, (8, 4, 2)), (8, None)])
def test_trace_invariants(nv, profile):
    """PMs never decrease, rows list BMs ascending, survivors come out sorted."""
    cfg = CodeConfig.from_pw(128, 38, 11, node_size=nv)
    layout = layout_for(cfg, nv)
    L = 8
    keep = None if profile is None else SelectionProfile(profile).row_counts(L)
    steps = []

    def trace(t, parent_pm, rows, chosen):
        steps.append(t)
        assert np.all(np.diff(parent_pm) >= 0)
        for row in rows:
            bms = [c.branch_metric for c in row]
            assert bms == sorted(bms)
            if keep is not None:
                assert len(row) <= max(keep)
        totals = [parent_pm[p] + c.branch_metric for p, c in chosen]
        assert totals == sorted(totals)
        assert all(tot >= parent_pm[p] for tot, (p, _) in zip(totals, chosen))
        if keep is not None:
            assert all(c.candidate_rank < keep[p] for p, c in chosen)

    for _, llr in frames(cfg, 0.0, 5, 6):
        steps.clear()
        py_engine(llr, layout, L, keep, True, trace=trace)
        assert steps == list(range(128 // nv))


@pytest.mark.parametrize("name", BACKENDS)
def test_crc_aided_choice(name):
    cfg = CodeConfig.from_pw(128, 38, 11)
    seen_non_first = False
    for _, llr in frames(cfg, -1.0, 60, 7):
        res = decode_sscl(cfg, llr, 8, backend_name=name)
        ok = cfg.crc.check_many(res.survivors[:, ~cfg.frozen_mask])
        if ok.any():
            assert res.crc_passed and res.chosen == int(np.argmax(ok))
            seen_non_first |= res.chosen > 0
        else:
            assert res.chosen == 0 and not res.crc_passed
        plain = decode_sscl(cfg, llr, 8, crc_aided=False, backend_name=name)
        assert plain.chosen == 0
    assert seen_non_first


def test_paths_view():
    cfg = CodeConfig.from_pw(64, 32, 11)
    _, llr = next(frames(cfg, 2.0, 1, 0))
    res = decode_sscl(cfg, llr, 4)
    paths = res.paths
    assert [p.path_id for p in paths] == [0, 1, 2, 3]
    assert np.array_equal(paths[0].codeword, encode(64, res.survivors[0]))
    assert res.payload(cfg).size == 32
