import numpy as np
import pytest

from mbnfc import BandConfig, LinkConfig
from mbnfc.channel import apply_coupler, flat_coupler
from mbnfc.core import ConfigError, SampleBuffer
from mbnfc.link import (LinkReceiveError, aggregate_bits_per_second,
                        link_receive, link_transmit)


def test_aggregate_rate_paper_plans():
    two_band = LinkConfig(
        bands=(BandConfig(250_000_000, 4_000_000),
               BandConfig(400_000_000, 4_000_000)),
        rf_sample_rate_hz=16_000_000_000)
    assert aggregate_bits_per_second(two_band) == 32_000_000
    one_band = LinkConfig(bands=(BandConfig(250_000_000, 4_000_000),),
                          rf_sample_rate_hz=16_000_000_000)
    assert aggregate_bits_per_second(one_band) == 16_000_000


def test_eight_band_plan_exceeds_320_mbps():
    carriers = [50, 100, 125, 200, 250, 400, 500, 1000]
    link = LinkConfig(
        bands=tuple(BandConfig(c * 1_000_000, 10_000_000) for c in carriers),
        rf_sample_rate_hz=8_000_000_000)
    assert link.validate() == []
    assert aggregate_bits_per_second(link) >= 320_000_000


def test_link_transmit_rejects_invalid_config():
    bad = LinkConfig(bands=(BandConfig(400_000_000, 4_000_000),),
                     rf_sample_rate_hz=4_000_000_000)
    with pytest.raises(ConfigError):
        link_transmit(b"x", bad)


def test_noiseless_loopback(small_link, small_payload):
    rf = link_transmit(small_payload, small_link)
    data, report = link_receive(rf, small_link, ref_data=small_payload)
    assert data == small_payload
    assert report.all_ok
    assert report.aggregate_bps == aggregate_bits_per_second(small_link)
    for row in report.per_band:
        assert row.ber == 0.0
        assert row.error_count == 0
        assert row.evm_rms < 0.05


def test_loopback_through_20db_attenuation(small_link, small_payload):
    rf = link_transmit(small_payload, small_link)
    attenuated = apply_coupler(rf, flat_coupler(20.0))
    data, report = link_receive(attenuated, small_link,
                                ref_data=small_payload)
    assert data == small_payload
    assert all(row.ber == 0.0 for row in report.per_band)


def test_failed_band_raises_with_partial_report(small_link, small_payload):
    rf = link_transmit(small_payload, small_link)
    # keep too little signal for the frames to be found
    stub = SampleBuffer(rf.samples[:len(rf.samples) // 20],
                        rf.sample_rate_hz)
    with pytest.raises(LinkReceiveError) as excinfo:
        link_receive(stub, small_link, ref_data=small_payload)
    report = excinfo.value.report
    assert len(report.per_band) == len(small_link.bands)
    assert not report.all_ok
    assert report.aggregate_bps == 0


def test_loopback_many_band_counts(small_payload):
    # one and three band plans, unequal payload split with padding tails
    plans = [
        (BandConfig(2_500_000, 40_000),),
        (BandConfig(2_500_000, 40_000), BandConfig(4_000_000, 40_000),
         BandConfig(5_000_000, 40_000)),
    ]
    for bands in plans:
        link = LinkConfig(bands=bands, rf_sample_rate_hz=160_000_000,
                          backoff=0.9)
        data = small_payload[:97]
        rf = link_transmit(data, link)
        out, report = link_receive(rf, link, ref_data=data)
        assert out == data
        assert report.all_ok
