import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choi_gauge import witness as wt
from choi_gauge.bases import product_basis
from choi_gauge.channels import ChannelModel
from choi_gauge.errors import ChoiGaugeError, FormatError, IncompleteTable, ZeroVector
from choi_gauge.tomography import (
    CountsTable,
    FrequencyTable,
    exact_frequencies,
    frequencies,
    min_eigenpair,
    reconstruct_choi,
    sample_counts,
)
from conftest import CORRELATED_CHOI, linear_frequencies

KET00 = np.array([1, 0, 0, 0], dtype=complex)


def correlated_witness():
    _, vec = min_eigenpair(reconstruct_choi(exact_frequencies(ChannelModel("correlated_env"))))
    return wt.witness_from_vector(vec)


def test_product_state_witness():
    w = wt.witness_from_vector(KET00)
    expected = np.zeros(16)
    expected[0] = 1
    assert np.allclose(w.coefficients, expected, atol=1e-12)
    assert w.range_constant == pytest.approx(1.0)
    assert np.allclose(w.per_setting_ranges[0, 2], [0, 1])


def test_identity_expansion_from_four_witnesses():
    total = sum(wt.witness_from_vector(np.eye(4)[i]).coefficients for i in range(4))
    expected = np.zeros(16)
    expected[[0, 1, 4, 5]] = 1  # (z0,z0), (z0,z1), (z1,z0), (z1,z1)
    assert np.allclose(total, expected, atol=1e-12)


def test_correlated_witness_expectation():
    w = correlated_witness()
    assert np.vdot(w.vector, CORRELATED_CHOI @ w.vector).real == pytest.approx(-np.sqrt(3) / 2, abs=1e-10)
    f = exact_frequencies(ChannelModel("correlated_env"))
    assert wt.expectation_from_frequencies(w, f) == pytest.approx(-np.sqrt(3) / 2, abs=1e-10)


def test_renormalizes_and_rejects_zero():
    w = wt.witness_from_vector(3 * KET00)
    assert np.linalg.norm(w.vector) == pytest.approx(1)
    with pytest.raises(ZeroVector):
        wt.witness_from_vector(np.zeros(4))
    with pytest.raises(ChoiGaugeError):
        wt.witness_from_vector(np.ones(3))


unit_vectors = st.lists(st.floats(-1, 1), min_size=8, max_size=8).filter(lambda x: np.linalg.norm(x) > 1e-3)


@settings(max_examples=200, deadline=None)
@given(unit_vectors, st.booleans())
def test_expansion_exactness(parts, flag):
    v = np.array(parts[:4]) + 1j * np.array(parts[4:])
    w = wt.witness_from_vector(v, flag)
    ops, _ = product_basis(flag)
    rebuilt = np.tensordot(w.coefficients, ops, axes=1)
    assert np.max(np.abs(rebuilt - w.operator)) <= 1e-10
    assert w.range_constant > 0


def test_expansion_exactness_many_vectors(rng):
    ops, _ = product_basis(True)
    for _ in range(1000):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        w = wt.witness_from_vector(v)
        assert np.max(np.abs(np.tensordot(w.coefficients, ops, axes=1) - w.operator)) <= 1e-10


def test_frequency_trace_identity(rng):
    for _ in range(100):
        f = FrequencyTable(rng.uniform(size=(4, 3)))
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        w = wt.witness_from_vector(v)
        assert wt.expectation_from_frequencies(w, f) == pytest.approx(
            wt.expectation_from_choi(w, reconstruct_choi(f)), abs=1e-10
        )


def test_expectation_identity_channel():
    f = linear_frequencies(lambda r: r)
    assert wt.expectation_from_frequencies(wt.witness_from_vector(KET00), f) == pytest.approx(1)
    with pytest.raises(IncompleteTable):
        wt.expectation_from_frequencies(wt.witness_from_vector(KET00), np.zeros((4, 3)))


def test_hoeffding_examples():
    w = correlated_witness()
    assert wt.hoeffding_bound(0.0, 394, w) == 1.0
    assert wt.hoeffding_bound(-0.3, 394, w) == 1.0
    assert wt.hoeffding_bound(0.67, 394, w) <= 4e-20
    assert wt.hoeffding_bound(0.67, 394, w) == pytest.approx(math.exp(-2 * 0.67**2 * 394 / w.range_constant))


def test_hoeffding_doubling_squares():
    w = correlated_witness()
    p1 = wt.hoeffding_bound(0.1, 100, w)
    assert wt.hoeffding_bound(0.1, 200, w) == pytest.approx(p1**2)
    shots = np.arange(1, 13).reshape(4, 3) * 10
    q1 = wt.hoeffding_bound(0.1, shots, w)
    assert wt.hoeffding_bound(0.1, 2 * shots, w) == pytest.approx(q1**2)


def test_hoeffding_unequal_shots_reduces_to_equal():
    w = correlated_witness()
    assert wt.hoeffding_bound(0.2, np.full((4, 3), 50), w) == pytest.approx(wt.hoeffding_bound(0.2, 50, w))


def test_hoeffding_monotone(rng):
    w = correlated_witness()
    ts = np.linspace(0.01, 1, 30)
    ps = [wt.hoeffding_bound(t, 100, w) for t in ts]
    assert all(a >= b for a, b in zip(ps, ps[1:]))
    base = np.full((4, 3), 40)
    for k in range(4):
        for s in range(3):
            more = base.copy()
            more[k, s] += 40
            assert wt.hoeffding_bound(0.2, more, w) <= wt.hoeffding_bound(0.2, base, w)


def test_hoeffding_clamped_positive():
    w = correlated_witness()
    assert wt.hoeffding_bound(10.0, 10**9, w) == 5e-324
    with pytest.raises(ChoiGaugeError):
        wt.hoeffding_bound(0.1, 0, w)


def test_consistency_test_on_exact_correlated_counts():
    ones = np.rint(exact_frequencies(ChannelModel("correlated_env")).ones * 394).astype(int)
    r = wt.consistency_test(correlated_witness(), CountsTable.from_ones(ones, 394), 0.01)
    assert r.verdict == "inconsistent" and r.inconsistent
    assert r.shots_per_setting["y1,z"] == 394


def test_consistency_test_ideal_data_mostly_consistent():
    m = ChannelModel("ideal_rx")
    bad = 0
    for seed in range(200):
        _, vec = min_eigenpair(reconstruct_choi(frequencies(sample_counts(m, 100, 2 * seed))))
        r = wt.consistency_test(wt.witness_from_vector(vec), sample_counts(m, 100, 2 * seed + 1), 0.01)
        bad += r.inconsistent
    assert bad <= 5


def test_verdict_threshold_logic():
    assert wt.verdict_of(-0.1, 0.5, 0.01) == "consistent"
    assert wt.verdict_of(-0.1, 0.001, 0.01) == "inconsistent"
    assert wt.verdict_of(0.1, 0.0, 0.01) == "consistent"
    with pytest.raises(ChoiGaugeError):
        wt.check_alpha(1.0)


def test_witness_json_round_trip():
    w = correlated_witness()
    back = wt.Witness.from_json(w.to_json())
    assert np.array_equal(back.vector, w.vector)
    assert np.allclose(back.coefficients, w.coefficients)
    assert back.range_constant == pytest.approx(w.range_constant)


def test_witness_json_errors():
    with pytest.raises(FormatError):
        wt.Witness.from_json('{"vector": 3}')
    text = wt.witness_from_vector(KET00).to_json().replace('"coefficients": [\n    1.0', '"coefficients": [\n    2.0')
    with pytest.raises(FormatError, match="coefficients"):
        wt.Witness.from_json(text)


def test_report_json():
    r = wt.TestReport(-0.2, 0.003, 0.01, "inconsistent", wt.shots_map(10), 3.5)
    assert '"verdict": "inconsistent"' in r.to_json()
