import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, strategies as st

from mdsmod import channel, detect, mdscode
from mdsmod.modem import ApmScheme, IqmScheme, PlainScheme

SCHEMES = [ApmScheme(3, 2, 2, 2), IqmScheme(3, 2, 2, 2), ApmScheme(3, 3, 3), PlainScheme(16),
           ApmScheme(4, 2, 4, 2), IqmScheme(2, 2, 2), ApmScheme(2, 4, 4)]


def _frames(scheme, rng, count, snr_db):
    bits = rng.integers(0, 2, (count, scheme.f), dtype=np.uint8)
    s = scheme.encode(bits)
    h = channel.sample_realization(rng, s.shape)
    y = channel.apply(s, h, channel.sample_noise(rng, s.shape, channel.snr_to_n0(snr_db)))
    return bits, y, h


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.name)
@pytest.mark.parametrize("det", ["ml", "lcml"])
def test_noiseless_recovery(scheme, det):
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, (300, scheme.f), dtype=np.uint8)
    s = scheme.encode(bits)
    h = channel.sample_realization(rng, s.shape)
    idx = detect.detect_batch(s * h, h, scheme, det)
    assert np.array_equal(scheme.bits_from_indices(idx), bits)


@pytest.mark.parametrize("scheme", [ApmScheme(3, 2, 2, 2), IqmScheme(3, 2, 2, 2), ApmScheme(3, 3, 3)],
                         ids=lambda s: s.name)
def test_factored_equals_exhaustive(scheme):
    rng = np.random.default_rng(2)
    _, y, h = _frames(scheme, rng, 1500, 5)
    exhaustive = detect.ml_codeword_index(y, h, scheme.codebook)
    factored = detect._ml_factored(y, h, scheme)
    assert np.array_equal(mdscode._unpack(exhaustive, scheme.f), scheme.bits_from_indices(factored))


def test_exhaustive_matches_direct_metric():
    scheme = ApmScheme(2, 4, 4)
    rng = np.random.default_rng(4)
    _, y, h = _frames(scheme, rng, 200, 0)
    direct = np.argmin((np.abs(y[:, None, :] - scheme.codebook[None] * h[:, None, :]) ** 2).sum(-1), axis=1)
    assert np.array_equal(detect.ml_codeword_index(y, h, scheme.codebook), direct)


@given(st.sampled_from(SCHEMES[:4]), st.integers(0, 2**31))
def test_lcml_output_is_codeword(scheme, seed):
    rng = np.random.default_rng(seed)
    _, y, h = _frames(scheme, rng, 20, 0)
    idx = detect.lcml_indices(y, h, scheme)
    assert np.all(idx.tuple1.sum(-1) % scheme.q1 == 0)
    assert np.all(idx.tuple2.sum(-1) % scheme.q2 == 0)
    assert np.all((0 <= idx.within) & (idx.within < scheme.cell_size))


def test_lcml_not_better_than_ml():
    scheme = ApmScheme(3, 2, 2, 2)
    rng = np.random.default_rng(5)
    bits, y, h = _frames(scheme, rng, 20000, 10)
    errs = {d: np.count_nonzero(scheme.bits_from_indices(detect.detect_batch(y, h, scheme, d)) != bits)
            for d in ("ml", "lcml")}
    assert errs["ml"] <= errs["lcml"]


@pytest.mark.parametrize("scheme,ml,lc", [
    (IqmScheme(4, 2, 2, 4), 2**22, 208),
    (ApmScheme(2, 2, 2), 4, 2 * 2 * 1 * 1 + 1),
    (PlainScheme(16), 16, 16),
])
def test_metric_count(scheme, ml, lc):
    assert detect.metric_count(scheme, "ml").per_group == ml
    assert detect.metric_count(scheme, "lcml").per_group == lc
    assert detect.metric_count(scheme, "lcml").per_subcarrier == Fraction(lc, scheme.n)
    with pytest.raises(ValueError):
        detect.metric_count(scheme, "zf")


@pytest.mark.parametrize("n,r,t,m,lc", [(4, 2, 2, 4, 52), (8, 2, 4, 4, 114), (16, 4, 4, 4, 241)])
def test_metric_count_table_rows(n, r, t, m, lc):
    s = IqmScheme(n, r, t, m)
    assert detect.metric_count(s, "lcml").per_subcarrier == lc
    assert detect.metric_count(s, "ml").per_subcarrier == Fraction((r * t) ** (n - 2) * m ** (2 * n))


def test_single_frame_api():
    s = ApmScheme(2, 2, 2)
    x = s.codebook[2]
    h = np.array([0.7 + 0.1j, -0.3 + 1.2j])
    res = detect.ml_detect(x * h, h, s)
    assert res.bits.tolist() == [1, 0] and res.metric_evaluations == 4
    assert detect.lcml_detect_apm(x * h, h, s).bits.tolist() == [1, 0]
    with pytest.raises(TypeError):
        detect.lcml_detect_iqm(x * h, h, s)
    with pytest.raises(ValueError):
        detect.ml_detect(x[:1], h[:1], s)
    iq = IqmScheme(2, 2, 2)
    assert detect.lcml_detect_iqm(iq.codebook[1] * h, h, iq).bits.tolist() == [0, 1]
    with pytest.raises(TypeError):
        detect.lcml_detect_apm(x, h, iq)
    with pytest.raises(ValueError):
        detect.detect_batch(x[None], h[None], s, "zf")
