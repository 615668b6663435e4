import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mbnfc import BandConfig, LinkConfig
from mbnfc.adtx import (DEFAULT_CLAMP, combine_bands, sdm_modulate,
                        square_carrier, transmit_band, upconvert_baseband,
                        xor_mix)
from mbnfc.analysis import band_power, welch_psd
from mbnfc.core import SampleBuffer
from mbnfc.modem import map_bits


def sdm_reference(x, order, clamp=DEFAULT_CLAMP):
    """Straightforward transcription of the error-feedback recurrence."""
    e1 = e2 = 0.0
    out = []
    for v_in in x:
        v = v_in + e1 if order == 1 else v_in + 2.0 * e1 - e2
        y = 1.0 if v >= 0.0 else -1.0
        out.append(int(y))
        e2 = e1
        e1 = min(max(v - y, -clamp), clamp)
    return np.array(out, dtype=np.int8)


@given(st.integers(1, 2),
       st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1,
                max_size=300))
@settings(max_examples=50)
def test_sdm_matches_reference(order, x):
    xa = np.array(x)
    assert np.array_equal(sdm_modulate(xa, order=order),
                          sdm_reference(xa, order))


def test_sdm_constant_one_order1_all_ones():
    assert np.all(sdm_modulate(np.ones(1000), order=1) == 1)


def test_sdm_zero_input_order1_zero_mean():
    out = sdm_modulate(np.zeros(10_000), order=1)
    assert abs(np.mean(out)) <= 0.01


def test_sdm_mean_tracking():
    for order in (1, 2):
        for target in (-0.8, -0.4, 0.0, 0.4, 0.8):
            out = sdm_modulate(np.full(100_000, target), order=order)
            assert np.mean(out) == pytest.approx(target, abs=0.01)
            assert set(np.unique(out)) <= {-1, 1}


def test_sdm_input_validation():
    with pytest.raises(ValueError):
        sdm_modulate(np.array([1.2]))
    with pytest.raises(ValueError):
        sdm_modulate(np.zeros(4), order=3)
    with pytest.raises(ValueError):
        sdm_modulate(np.zeros(4), clamp=1.0)


def test_square_carrier_period8():
    i, q = square_carrier(1, 8, 16)
    assert np.array_equal(i[:8], [1, 1, 1, 1, -1, -1, -1, -1])
    assert np.array_equal(q[:8], [1, 1, -1, -1, -1, -1, 1, 1])
    assert np.array_equal(i[:8], i[8:])


def test_square_carrier_period4():
    i, q = square_carrier(1, 4, 4)
    assert np.array_equal(i, [1, 1, -1, -1])
    assert np.array_equal(q, [1, -1, -1, 1])


def test_square_carrier_zero_mean_and_divisibility():
    i, q = square_carrier(5, 40, 8)
    assert i.sum() == 0 and q.sum() == 0
    with pytest.raises(ValueError):
        square_carrier(3, 10, 4)


def test_xor_mix_identity_and_example():
    c = np.array([1, 1, -1], dtype=np.int8)
    assert np.array_equal(xor_mix(np.ones(3, dtype=np.int8), c), c)
    assert np.array_equal(
        xor_mix(np.array([1, -1, 1], np.int8), c), [1, -1, -1])
    with pytest.raises(ValueError):
        xor_mix(np.ones(3, np.int8), np.ones(4, np.int8))


@given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=64))
def test_xor_mix_involution(data):
    d = np.array(data, dtype=np.int8)
    c, _ = square_carrier(1, 4, d.size)
    assert np.array_equal(xor_mix(xor_mix(d, c), c), d)


@pytest.fixture(scope="module")
def band_and_link():
    band = BandConfig(2_500_000, 40_000)
    link = LinkConfig(bands=(band,), rf_sample_rate_hz=160_000_000,
                      backoff=0.9)
    return band, link


def test_transmit_band_empty(band_and_link):
    band, link = band_and_link
    out = transmit_band(np.array([]), band, link)
    assert len(out) == 0
    assert out.sample_rate_hz == link.rf_sample_rate_hz


def test_transmit_band_output_alphabet(band_and_link):
    band, link = band_and_link
    rng = np.random.default_rng(2)
    syms = map_bits(rng.integers(0, 2, 160, dtype=np.uint8))
    out = transmit_band(syms, band, link)
    assert set(np.unique(out.samples)) <= {-2.0 * band.gain, 0.0,
                                           2.0 * band.gain}


def test_transmit_band_psd_peak_at_carrier(band_and_link):
    band, link = band_and_link
    rng = np.random.default_rng(3)
    syms = map_bits(rng.integers(0, 2, 400, dtype=np.uint8))
    out = transmit_band(syms, band, link)
    psd = welch_psd(out, segment=4096)
    peak = psd.freqs_hz[int(np.argmax(psd.power_db))]
    assert abs(peak - band.carrier_hz) <= 2 * psd.resolution_hz


def test_combine_bands_identity_and_cancellation():
    buf = SampleBuffer(np.array([1.0, -2.0, 0.0], np.float32), 100)
    assert np.array_equal(combine_bands([buf]).samples, buf.samples)
    neg = SampleBuffer(-buf.samples, 100)
    assert np.all(combine_bands([buf, neg]).samples == 0)
    with pytest.raises(ValueError):
        combine_bands([])
    with pytest.raises(ValueError):
        combine_bands([buf, SampleBuffer(np.zeros(2, np.float32), 100)])


def test_two_band_sum_has_peaks_at_both_carriers():
    b0 = BandConfig(2_500_000, 40_000)
    b1 = BandConfig(4_000_000, 40_000)
    link = LinkConfig(bands=(b0, b1), rf_sample_rate_hz=160_000_000,
                      backoff=0.9)
    rng = np.random.default_rng(4)
    syms = map_bits(rng.integers(0, 2, 400, dtype=np.uint8))
    combined = combine_bands([transmit_band(syms, b0, link),
                              transmit_band(syms, b1, link)])
    psd = welch_psd(combined, segment=4096)
    for band in (b0, b1):
        p_band = band_power(psd, band.carrier_hz, band.occupied_bandwidth_hz)
        p_away = band_power(psd, band.carrier_hz + 1_000_000,
                            band.occupied_bandwidth_hz)
        assert 10 * np.log10(p_band / p_away) > 10


def test_quadrature_image_rejection():
    # complex-exponential baseband exp(+j*omega*t): with this carrier
    # convention the dominant sideband lands at carrier - omega
    fs, fc, om = 160_000_000, 2_500_000, 200_000
    band = BandConfig(fc, 40_000)
    link = LinkConfig(bands=(band,), rf_sample_rate_hz=fs, backoff=0.5)
    t = np.arange(1 << 20) / fs
    out = upconvert_baseband(0.5 * np.cos(2 * np.pi * om * t),
                             0.5 * np.sin(2 * np.pi * om * t), band, link)
    psd = welch_psd(out.astype(np.float64), segment=1 << 16,
                    sample_rate_hz=fs)
    main = band_power(psd, fc - om, 20_000)
    image = band_power(psd, fc + om, 20_000)
    assert 10 * np.log10(main / image) >= 20.0
