import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdsmod import analysis as A
from mdsmod.modem import ApmScheme, IqmScheme, PlainScheme


def test_pep_at_zero_snr():
    assert A.pep_unconditional([0.5, 2.0], 0.0) == pytest.approx(1 / 3)


@pytest.mark.parametrize("deltas,order", [([1.0, 0.0], 1), ([1.0, 0.5], 2), ([0.3, 0.2, 0.9], 3)])
def test_pep_diversity_slope(deltas, order):
    g = np.logspace(4, 6, 9)
    slope = np.polyfit(np.log10(g), np.log10(A.pep_unconditional(deltas, g)), 1)[0]
    assert slope == pytest.approx(-order, abs=0.01)


@given(st.lists(st.floats(0.01, 4), min_size=1, max_size=4), st.floats(0, 1e4), st.floats(1.01, 10))
def test_pep_strictly_decreasing(deltas, g, factor):
    assert A.pep_unconditional(deltas, g * factor + 1e-3) < A.pep_unconditional(deltas, g)
    bigger = list(deltas)
    bigger[0] *= factor
    assert A.pep_unconditional(bigger, g + 1) < A.pep_unconditional(deltas, g + 1)


def test_pep_input_checks():
    with pytest.raises(ValueError):
        A.pep_unconditional([1.0], -1)
    with pytest.raises(ValueError):
        A.PairStats((0, 1), np.array([-1.0]), 1)
    with pytest.raises(ValueError):
        A.PairStats((0, 1), np.array([1.0]), 0)


def test_pair_stats():
    s = ApmScheme(2, 2, 2)
    ps = A.pair_stats(s, 0, 3)
    assert ps.hamming == 2
    assert ps.sq_diff == pytest.approx(np.abs(s.codebook[0] - s.codebook[3]) ** 2)


@pytest.mark.parametrize("scheme", [ApmScheme(2, 2, 2), IqmScheme(2, 2, 2), PlainScheme(4, "psk")],
                         ids=lambda s: s.name)
def test_union_bound_matches_double_sum(scheme):
    size = 2**scheme.f
    for g in (0.5, 10.0, 1e3):
        total = sum(A.pep_unconditional(A.pair_stats(scheme, i, j), g) * A.pair_stats(scheme, i, j).hamming
                    for i in range(size) for j in range(size) if i != j)
        assert A.union_bound_ber(scheme, g) == pytest.approx(total / (scheme.f * size))


def test_union_bound_monotone_and_vanishing():
    s = ApmScheme(2, 4, 4)
    b = A.union_bound_ber(s, A.db_to_linear(np.arange(0, 81, 5)))
    assert np.all(np.diff(b) < 0)
    assert b[-1] < 1e-14
    assert b[0] > 1  # a bound, not a probability


def test_union_bound_large_f_rejected():
    with pytest.raises(A.UnsupportedConfiguration):
        A.union_bound_ber(ApmScheme(4, 2, 8, 2), 10.0)
    with pytest.raises(ValueError):
        A.union_bound_ber(ApmScheme(2, 2, 2), -1.0)


def test_rate_limits():
    s = ApmScheme(2, 2, 2)
    rng = np.random.default_rng(0)
    low, high = A.achievable_rate(s, [-40, 60], 500, rng)
    assert 0 <= low.rate < 1e-3
    assert high.rate == pytest.approx(s.f / s.n, abs=1e-9)


@given(st.sampled_from([ApmScheme(2, 2, 2), IqmScheme(2, 2, 2, 2), PlainScheme(4)]),
       st.floats(-20, 40), st.integers(1, 40), st.integers(0, 2**31))
def test_rate_within_bounds(scheme, snr, samples, seed):
    # The j = i term keeps every per-sample inner sum >= 1, so the upper limit
    # holds sample by sample.  Nonnegativity holds only in expectation.
    est = A.achievable_rate(scheme, snr, samples, np.random.default_rng(seed))
    assert est.rate <= scheme.f / scheme.n + 1e-12
    assert est.samples == samples


@pytest.mark.parametrize("snr", [-10, 0, 10])
def test_rate_nonnegative_in_expectation(snr):
    est = A.achievable_rate(PlainScheme(4), snr, 4000, np.random.default_rng(1))
    assert est.rate > -3 * est.stderr


def test_rate_common_random_numbers():
    s = IqmScheme(2, 2, 2)
    a = A.achievable_rate(s, [0, 5, 10], 300, np.random.default_rng(9))
    b = A.achievable_rate(s, [10], 300, np.random.default_rng(9))
    assert a[2] == b[0]
    assert a[0].rate <= a[1].rate <= a[2].rate


def test_rate_guards():
    with pytest.raises(A.UnsupportedConfiguration):
        A.achievable_rate(IqmScheme(4, 2, 2, 2), 10, 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        A.achievable_rate(ApmScheme(2, 2, 2), 10, 0, np.random.default_rng(0))


@pytest.mark.parametrize("m", [2, 4, 16, 64])
def test_complexity_equal_at_two(m):
    assert A.decoding_complexity_per_bit(2, m, "mds-apm") == pytest.approx(
        A.decoding_complexity_per_bit(2, m, "mm-ofdm-im"))


@pytest.mark.parametrize("n", [4, 8, 16, 32])
@pytest.mark.parametrize("m", [4, 16])
def test_complexity_ordering(n, m):
    assert A.decoding_complexity_per_bit(n, m, "mds-apm") < A.decoding_complexity_per_bit(n, m, "mm-ofdm-im")


def test_complexity_values():
    eta = 0.5 + 2  # N=2, M=4
    assert A.matched_se(2, 4) == pytest.approx(eta)
    assert A.decoding_complexity_per_bit(2, 4, "ofdm-im") == pytest.approx(16 / eta)
    assert A.decoding_complexity_per_bit(2, 4, "ofdm") == pytest.approx(2**eta / eta)
    with pytest.raises(ValueError):
        A.decoding_complexity_per_bit(1, 4, "ofdm")
    with pytest.raises(ValueError):
        A.decoding_complexity_per_bit(4, 4, "cdma")


def test_asymptotic_ratio():
    a = A.asymptotic_complexity(1024, 4)
    assert a["mm-ofdm-im"] / a["mds-apm"] == pytest.approx(math.e / 2)


def test_complexity_table():
    rows = A.complexity_table()
    assert [r.lcml for r in rows] == [52, 114, 241]
    assert [r.mm_ofdm_im for r in rows] == [57.5, 121.5, 272]
    for r, expected in zip(rows, (1.05e6, 1.13e15, 1.33e36)):
        assert r.ml == pytest.approx(expected, rel=0.005)


def test_med_comparison():
    for b in (2, 4, 6, 8):
        c = A.med_comparison(b)
        assert c.iqm > max(c.apm, c.psk, c.qam)
        assert c.apm > c.psk
    assert A.med_comparison(3).apm > A.med_comparison(3).qam
    assert A.med_comparison(4).apm < A.med_comparison(4).qam
    assert 3 < A.apm_qam_crossover() < 4
