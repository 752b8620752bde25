import json

import numpy as np
import pytest

from choi_gauge import tomography as tm
from choi_gauge.bases import CANONICAL
from choi_gauge.channels import EVOLUTION, ChannelModel, choi_of_linear_channel, probability_table
from choi_gauge.errors import FormatError, IncompleteTable, ZeroShots
from conftest import CORRELATED_CHOI, linear_frequencies, random_channel, random_linear_map

PHI = np.zeros(4)
PHI[[0, 3]] = 1


def ideal_map(rho):
    return EVOLUTION @ rho @ EVOLUTION.conj().T


def test_sample_counts_deterministic():
    m = ChannelModel("detuned", 0.2)
    a = tm.sample_counts(m, 394, 11)
    b = tm.sample_counts(m, 394, 11)
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, tm.sample_counts(m, 394, 12).counts)
    assert np.all(a.shots == 394)


def test_sample_counts_degenerate():
    # ideal process, prep z0: y outcome is always 1, the x outcome is a coin
    c = tm.sample_counts(ChannelModel("ideal_rx"), 500, 3)
    assert c.counts[0, 1, 1] == 500 and c.counts[0, 1, 0] == 0


def test_sample_counts_concentration():
    m = ChannelModel("ideal_rx")
    exact = probability_table(m)
    for seed in range(50):
        f = tm.frequencies(tm.sample_counts(m, 394, seed)).ones
        assert np.max(np.abs(f - exact)) <= 4 / np.sqrt(394)


def test_sample_counts_rejects_zero_shots():
    with pytest.raises(ZeroShots):
        tm.sample_counts(ChannelModel("ideal_rx"), 0, 1)


def test_frequencies_examples():
    c = tm.CountsTable.from_ones(np.full((4, 3), 197), 394)
    assert np.allclose(tm.frequencies(c).ones, 0.5)
    c = tm.CountsTable.from_ones(np.zeros((4, 3), dtype=int), 394)
    f = tm.frequencies(c)
    assert f.outcome("z0", "x", 0) == 1.0 and f.outcome("z0", "x", 1) == 0.0


def test_frequencies_errors():
    full = tm.CountsTable.from_ones(np.full((4, 3), 3), 10).records()
    del full[("y1", "z", 0)]
    del full[("y1", "z", 1)]
    with pytest.raises(IncompleteTable):
        tm.frequencies(tm.CountsTable.from_records(full))
    with pytest.raises(ZeroShots):
        tm.frequencies(tm.CountsTable(np.zeros((4, 3, 2), dtype=int)))
    with pytest.raises(IncompleteTable):
        tm.FrequencyTable(np.full((4, 3), np.nan))


def test_counts_records_round_trip():
    c = tm.sample_counts(ChannelModel("correlated_env"), 50, 9)
    assert np.array_equal(tm.CountsTable.from_records(c.records()).counts, c.counts)
    with pytest.raises(FormatError):
        tm.CountsTable(-np.ones((4, 3, 2)))


def test_identity_channel_reconstruction():
    c = tm.reconstruct_choi(linear_frequencies(lambda r: r))
    assert np.allclose(c.matrix, np.outer(PHI, PHI), atol=1e-12)
    assert c.trace == pytest.approx(2)


def test_correlated_reconstruction_matches_reference():
    c = tm.reconstruct_choi(tm.exact_frequencies(ChannelModel("correlated_env")))
    assert np.max(np.abs(c.matrix - CORRELATED_CHOI)) <= 1e-10
    lam, vec = tm.min_eigenpair(c)
    assert lam == pytest.approx(-np.sqrt(3) / 2, abs=1e-10)
    assert np.allclose(c.matrix @ vec, lam * vec)


def test_oracle_equivalence_random_channels(rng):
    for _ in range(100):
        apply = random_channel(rng)
        est = tm.reconstruct_choi(linear_frequencies(apply)).matrix
        assert np.max(np.abs(est - choi_of_linear_channel(apply))) <= 1e-10


def test_oracle_equivalence_non_cp_maps(rng):
    negative = 0
    for _ in range(100):
        apply = random_linear_map(rng)
        est = tm.reconstruct_choi(linear_frequencies(apply))
        assert np.max(np.abs(est.matrix - choi_of_linear_channel(apply))) <= 1e-10
        negative += tm.min_eigenpair(est)[0] < -1e-9
    assert negative > 50


def test_unconjugated_flag_does_not_match_oracle():
    f = linear_frequencies(ideal_map)
    assert np.max(np.abs(tm.reconstruct_choi(f, False).matrix - choi_of_linear_channel(ideal_map))) > 0.1


def test_linearity(rng):
    f1 = tm.FrequencyTable(rng.uniform(size=(4, 3)))
    f2 = tm.FrequencyTable(rng.uniform(size=(4, 3)))
    mix = tm.FrequencyTable(0.3 * f1.ones + 0.7 * f2.ones)
    lhs = tm.reconstruct_choi(mix).matrix
    rhs = 0.3 * tm.reconstruct_choi(f1).matrix + 0.7 * tm.reconstruct_choi(f2).matrix
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_trace_is_two_for_any_table(rng):
    for _ in range(50):
        c = tm.reconstruct_choi(tm.FrequencyTable(rng.uniform(size=(4, 3))))
        assert abs(c.trace - 2) <= 1e-10


def test_reconstruct_states():
    states = tm.reconstruct_states(tm.exact_frequencies(ChannelModel("correlated_env")))
    assert np.allclose(states["y1"], np.diag([0, 1]), atol=1e-12)
    ideal = tm.reconstruct_states(tm.exact_frequencies(ChannelModel("ideal_rx")))
    for rho in ideal.values():
        vals = np.linalg.eigvalsh(rho)
        assert vals.min() >= -1e-12 and vals.max() <= 1 + 1e-12


def test_min_eigenpair_of_maximally_entangled():
    lam, vec = tm.min_eigenpair(tm.ChoiMatrix(np.outer(PHI, PHI)))
    assert lam == pytest.approx(0, abs=1e-12)
    assert np.linalg.norm(vec) == pytest.approx(1)


def test_counts_csv_round_trip_and_order():
    c = tm.sample_counts(ChannelModel("detuned", 0.3), 100, 4)
    text = tm.counts_to_csv(c)
    lines = text.splitlines()
    assert lines[0] == "prep,basis,outcome,count" and len(lines) == 25
    assert lines[1].startswith("z0,x,0,") and lines[-1].startswith("y1,z,1,")
    shuffled = "\n".join([lines[0]] + lines[1:][::-1]) + "\n"
    assert np.array_equal(tm.counts_from_csv(shuffled).counts, c.counts)


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda rows: rows[:-1], "expected 24 data rows"),
        (lambda rows: rows[:3] + ["q0,x,0,5"] + rows[4:], "row 4: field 'prep'"),
        (lambda rows: rows[:5] + ["z0,w,0,5"] + rows[6:], "row 6: field 'basis'"),
        (lambda rows: rows[:2] + ["z0,x,2,5"] + rows[3:], "row 3: field 'outcome'"),
        (lambda rows: rows[:2] + ["z0,x,1,abc"] + rows[3:], "row 3: field 'count'"),
        (lambda rows: rows[:2] + ["z0,x,1,-4"] + rows[3:], "row 3: field 'count'"),
        (lambda rows: rows[:2] + ["z0,x,1"] + rows[3:], "row 3: expected 4 fields"),
        (lambda rows: ["a,b,c,d"] + rows[1:], "row 1: header"),
        (lambda rows: rows + [rows[1]], "duplicate"),
    ],
)
def test_counts_csv_errors(mutate, fragment):
    rows = tm.counts_to_csv(tm.sample_counts(ChannelModel("ideal_rx"), 10, 0)).splitlines()
    with pytest.raises((FormatError, IncompleteTable), match=fragment.replace("(", r"\(")):
        tm.counts_from_csv("\n".join(mutate(rows)) + "\n")


def test_choi_json_round_trip():
    c = tm.reconstruct_choi(tm.exact_frequencies(ChannelModel("correlated_env")))
    text = tm.choi_to_json(c, {"n_shots": 394})
    back, meta = tm.choi_from_json(text)
    assert np.array_equal(back.matrix, c.matrix) and meta == {"n_shots": 394}
    doc = json.loads(text)
    assert doc["dim"] == 2 and doc["normalization"] == "trace-d"


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ("not json", "invalid JSON"),
        ("[]", "JSON object"),
        ('{"dim": 3}', "dim"),
        ('{"dim": 2, "normalization": "trace-1"}', "normalization"),
        ('{"dim": 2, "matrix": [[1, 2]]}', "matrix"),
        ('{"dim": 2, "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}', "4x4"),
    ],
)
def test_choi_json_errors(doc, fragment):
    with pytest.raises(FormatError, match=fragment):
        tm.choi_from_json(doc)


def test_choi_json_rejects_non_hermitian():
    m = np.zeros((4, 4))
    m[0, 1] = 1
    with pytest.raises(FormatError, match="Hermitian"):
        tm.choi_from_json(tm.choi_to_json(tm.ChoiMatrix(m)))
