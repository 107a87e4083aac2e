import numpy as np
import pytest

from pspolar.analysis import (PmpTable, accumulate_pmp, box_probability, cas_count_bitonic, cas_csv_text,
                              cas_table, pmp_csv_text, report_cas, sorter_inputs, stair_mask)
from pspolar.nodes import NodeClass
from pspolar.polar_code import CodeConfig, ConfigError
from pspolar.ps_select import SelectionProfile
from pspolar.simulation import make_frame

CAS_EXPECTED = {
    4: (24, 80, 672, 28160, 80, 80),
    8: (80, 240, 1792, 67584, 240, 672),
    16: (240, 672, 4608, 159744, 672, 1792),
    32: (672, 1792, 11520, 372736, 1792, 4608),
}


def bitonic_cas_oracle(n):
    """Count compare-exchange operations in an explicit bitonic sorting network."""
    count = 0
    k = 2
    while k <= n:
        j = k // 2
        while j:
            count += sum(1 for i in range(n) if (i ^ j) > i)
            j //= 2
        k *= 2
    return count


@pytest.mark.parametrize("n_inputs, cas", [(2, 1), (8, 24), (64, 672)])
def test_cas_examples(n_inputs, cas):
    assert cas_count_bitonic(n_inputs) == cas


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192])
def test_cas_formula_matches_network(n):
    assert cas_count_bitonic(n) == bitonic_cas_oracle(n)


@pytest.mark.parametrize("bad", [0, 1, 3, 12])
def test_cas_rejects_non_power_of_two(bad):
    with pytest.raises(ConfigError):
        cas_count_bitonic(bad)


def test_cas_table_examples():
    assert cas_table("ps-scl", 4, 32, SelectionProfile((4, 2, 1))) == 672
    assert cas_table("scl", 8, 4) == 28160
    assert cas_table("fast-sscl", 4, 8) == 240
    with pytest.raises(ConfigError):
        cas_table("bp", 4, 8)
    with pytest.raises(ConfigError):
        sorter_inputs("ps-scl", 4, 8)


def test_report_cas_reproduces_all_values():
    rows = report_cas()
    assert {r["list_size"]: tuple(list(r.values())[1:]) for r in rows} == CAS_EXPECTED
    text = cas_csv_text(rows)
    assert text.splitlines()[0].startswith("list_size,")
    assert len(text.splitlines()) == 5


def test_stair_mask_and_box_probability():
    mask = stair_mask((4, 16), SelectionProfile((4, 2, 1)))
    assert mask.sum(axis=1).tolist() == [4, 2, 1, 1]
    assert stair_mask((8, 16), 4).sum() == 32
    probs = np.full((4, 16), 1 / 64)
    assert box_probability(probs, SelectionProfile((4, 2, 1))) == pytest.approx(8 / 64)
    assert box_probability(probs, 16) == pytest.approx(1.0)


def test_pmp_table_collection_small():
    cfg = CodeConfig.from_pw(64, 32, 11)
    table = PmpTable.for_decoder(8, 4)
    other = PmpTable.for_decoder(8, 4)
    for i in range(40):
        _, llr = make_frame(cfg, 3.0, 5, i)
        accumulate_pmp(cfg, llr, 8, table if i % 2 else other)
    merged = table + other
    probs = merged.probabilities()
    assert probs.shape == (8, 16)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert box_probability(merged, 16) == pytest.approx(1.0, abs=1e-9)
    # each step places exactly L survivors
    per_class = merged.counts.sum(axis=(1, 2))
    assert np.array_equal(per_class, merged.steps * 8)
    assert merged.total_steps() == merged.steps[[1, 2, 3]].sum()
    assert probs[0, 0] > probs[-1, -1]
    with pytest.raises(ValueError):
        table + PmpTable.for_decoder(4, 4)


def test_pmp_table_needs_full_selection():
    cfg = CodeConfig.from_pw(64, 32, 11)
    _, llr = make_frame(cfg, 3.0, 5, 0)
    from pspolar.list_decoder import decode_sscl
    with pytest.raises(ConfigError):
        decode_sscl(cfg, llr, 8, SelectionProfile((4, 2, 1)), pmp_table=PmpTable.for_decoder(8, 4))


def test_pmp_csv_format():
    text = pmp_csv_text(np.array([[0.5, 0.25], [0.125, 0.125]]))
    assert text == "rank_col_0,rank_col_1\n0.500000,0.250000\n0.125000,0.125000\n"


def test_empty_table_probabilities():
    assert not PmpTable.for_decoder(4, 4).probabilities((NodeClass.RATE0,)).any()
