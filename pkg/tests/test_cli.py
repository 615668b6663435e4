import numpy as np
import pytest

from mbnfc.cli import main
from mbnfc.core import SampleBuffer
from mbnfc.fileio import read_samples, write_samples

SMALL_CFG = """
rf_sample_rate_hz = 160000000
sdm_order = 2
backoff = 0.9
seed = 1
coupler_table = flat:20

band.0.carrier_hz = 2500000
band.0.symbol_rate_hz = 40000
band.1.carrier_hz = 4000000
band.1.symbol_rate_hz = 40000
"""


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "link.cfg").write_text(SMALL_CFG)
    rng = np.random.default_rng(5)
    (d / "payload.bin").write_bytes(
        rng.integers(0, 256, 200, dtype=np.uint8).tobytes())
    return d


@pytest.fixture(scope="module")
def tx_output(workdir):
    out = workdir / "rf.smp"
    rc = main(["tx", str(workdir / "link.cfg"),
               str(workdir / "payload.bin"), str(out)])
    assert rc == 0
    return out


def test_tx_prints_aggregate_rate(workdir, capsys):
    out = workdir / "rate.smp"
    rc = main(["tx", str(workdir / "link.cfg"),
               str(workdir / "payload.bin"), str(out)])
    assert rc == 0
    assert "320000 bps" in capsys.readouterr().out
    assert read_samples(out).sample_rate_hz == 160_000_000


def test_tx_zero_byte_payload(workdir):
    empty = workdir / "empty.bin"
    empty.write_bytes(b"")
    rc = main(["tx", str(workdir / "link.cfg"), str(empty),
               str(workdir / "empty.smp")])
    assert rc == 0
    assert len(read_samples(workdir / "empty.smp")) > 0


def test_config_error_exits_2(workdir, capsys):
    bad = workdir / "bad.cfg"
    bad.write_text(SMALL_CFG.replace("rf_sample_rate_hz = 160000000",
                                     "rf_sample_rate_hz = 150000000"))
    rc = main(["tx", str(bad), str(workdir / "payload.bin"),
               str(workdir / "x.smp")])
    assert rc == 2
    assert "multiple of" in capsys.readouterr().err


def test_missing_input_exits_3(workdir):
    rc = main(["tx", str(workdir / "link.cfg"),
               str(workdir / "nope.bin"), str(workdir / "x.smp")])
    assert rc == 3


def test_channel_no_noise_flat20_scales_by_tenth(workdir, tx_output):
    out = workdir / "coupled.smp"
    rc = main(["channel", str(workdir / "link.cfg"), str(tx_output),
               str(out), "--no-noise"])
    assert rc == 0
    rf = read_samples(tx_output)
    coupled = read_samples(out)
    ratio = (np.sqrt(np.mean(coupled.samples.astype(np.float64) ** 2))
             / np.sqrt(np.mean(rf.samples.astype(np.float64) ** 2)))
    assert ratio == pytest.approx(0.1, rel=0.02)


def test_channel_noise_is_deterministic(workdir, tx_output):
    a = workdir / "na.smp"
    b = workdir / "nb.smp"
    for out in (a, b):
        rc = main(["channel", str(workdir / "link.cfg"), str(tx_output),
                   str(out), "--ebn0", "10"])
        assert rc == 0
    assert a.read_bytes() == b.read_bytes()


def test_rx_loopback_and_report(workdir, tx_output):
    out = workdir / "decoded.bin"
    report = workdir / "report.csv"
    rc = main(["rx", str(workdir / "link.cfg"), str(tx_output), str(out),
               "--ref", str(workdir / "payload.bin"),
               "--report", str(report)])
    assert rc == 0
    assert out.read_bytes() == (workdir / "payload.bin").read_bytes()
    lines = report.read_text().splitlines()
    assert lines[0] == "band,carrier_hz,sync,ber,evm_rms,bits"
    assert len(lines) == 3
    for line in lines[1:]:
        band, carrier, sync, ber, evm, bits = line.split(",")
        assert sync == "1"
        assert float(ber) == 0.0
        assert float(evm) < 0.05
        assert int(bits) > 0


def test_rx_noise_only_exits_4_with_report(workdir, tx_output):
    noise_file = workdir / "noise.smp"
    rng = np.random.default_rng(7)
    write_samples(noise_file,
                  SampleBuffer(rng.standard_normal(200_000)
                               .astype(np.float32), 160_000_000))
    report = workdir / "noise_report.csv"
    rc = main(["rx", str(workdir / "link.cfg"), str(noise_file),
               str(workdir / "noise_out.bin"), "--report", str(report)])
    assert rc == 4
    lines = report.read_text().splitlines()
    assert all(line.split(",")[2] == "0" for line in lines[1:])


def test_simulate_noiseless(workdir, capsys):
    report = workdir / "sweep.csv"
    rc = main(["simulate", str(workdir / "link.cfg"), "--bytes", "64",
               "--seed", "3", "--ebn0", "none", "--report", str(report)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "ber=0.000e+00" in out
    lines = report.read_text().splitlines()
    assert lines[0] == "ebn0_db,band,ber,evm_rms"
    assert len(lines) == 3
    assert lines[1].startswith(",0,0,")


def test_spectrum_of_tx_output(workdir, tx_output, capsys):
    csv_out = workdir / "psd.csv"
    rc = main(["spectrum", str(tx_output), "--segment", "4096",
               "--out", str(csv_out)])
    assert rc == 0
    out = capsys.readouterr().out
    peaks = [float(line.split()[1]) for line in out.splitlines()
             if line.startswith("peak")]
    res = 160_000_000 / 4096
    assert len(peaks) == 2
    assert abs(peaks[0] - 2_500_000) <= res
    assert abs(peaks[1] - 4_000_000) <= res
    assert csv_out.read_text().splitlines()[0] == "freq_hz,power_db"


def test_spectrum_zero_file_hits_floor(workdir, capsys):
    zero = workdir / "zero.smp"
    write_samples(zero, SampleBuffer(np.zeros(8192, np.float32), 1000))
    csv_out = workdir / "zero_psd.csv"
    rc = main(["spectrum", str(zero), "--segment", "1024",
               "--out", str(csv_out)])
    assert rc == 0
    rows = csv_out.read_text().splitlines()[1:]
    assert all(row.endswith("-300") for row in rows)


def test_spectrum_single_tone(workdir, capsys):
    tone_file = workdir / "tone.smp"
    fs = 1_000_000
    x = np.sin(2 * np.pi * 125_000 * np.arange(1 << 14) / fs)
    write_samples(tone_file, SampleBuffer(x.astype(np.float32), fs))
    rc = main(["spectrum", str(tone_file), "--segment", "1024"])
    assert rc == 0
    out = capsys.readouterr().out
    first_peak = float(out.splitlines()[0].split()[1])
    assert first_peak == pytest.approx(125_000, abs=fs / 1024)
