"""Near-field coupler and AWGN channel.

The physical coupler is represented by a (frequency, loss_dB) table; the
applied filter is a linear-phase FIR whose magnitude follows the table with
flat extension beyond its edges. Noise is added at the receiver input and
calibrated against measured per-band in-band power.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal as sig

from .core import MbnfcError, LinkConfig, SampleBuffer
from .analysis import welch_psd, band_power

DEFAULT_COUPLER_TAPS = 257


class ChannelError(MbnfcError):
    pass


@dataclass(frozen=True)
class CouplerModel:
    """Piecewise-linear coupling loss in dB over frequency."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(f), float(l)) for f, l in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("coupler table needs at least 2 points")
        freqs = [f for f, _ in pts]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("coupler frequencies must be strictly increasing")
        if any(l <= 0 for _, l in pts):
            raise ValueError("coupler losses must be positive")

    @property
    def freqs(self) -> np.ndarray:
        return np.array([f for f, _ in self.points])

    @property
    def losses_db(self) -> np.ndarray:
        return np.array([l for _, l in self.points])


def default_coupler() -> CouplerModel:
    """Desk-scale stand-in for the measured coupler: 20 dB at 100 MHz
    descending to 10 dB at 1 GHz."""
    return CouplerModel(points=((100e6, 20.0), (1e9, 10.0)))


def flat_coupler(loss_db: float, f_max_hz: float = 1e9) -> CouplerModel:
    return CouplerModel(points=((1.0, loss_db), (f_max_hz, loss_db)))


def coupler_loss_at(model: CouplerModel, f_hz: float) -> float:
    """Interpolated loss in dB; frequency must lie inside the table."""
    freqs = model.freqs
    if not freqs[0] <= f_hz <= freqs[-1]:
        raise ChannelError(
            f"frequency {f_hz} Hz outside coupler table "
            f"[{freqs[0]}, {freqs[-1]}]")
    return float(np.interp(f_hz, freqs, model.losses_db))


def coupler_fir(model: CouplerModel, sample_rate_hz: float,
                ntaps: int = DEFAULT_COUPLER_TAPS) -> np.ndarray:
    """Linear-phase FIR matching the loss table by frequency sampling.

    The desired dB curve is evaluated on a dense grid (so the dB-linear
    interpolation survives firwin2's amplitude-linear interpolation) and
    extended flat beyond the table edges.
    """
    nyq = sample_rate_hz / 2.0
    grid = np.linspace(0.0, nyq, 1024)
    loss = np.interp(grid, model.freqs, model.losses_db)  # clips flat at edges
    gains = 10.0 ** (-loss / 20.0)
    return sig.firwin2(ntaps, grid / nyq, gains)


def apply_coupler(signal_buf: SampleBuffer, model: CouplerModel,
                  ntaps: int = DEFAULT_COUPLER_TAPS) -> SampleBuffer:
    """Filter the RF signal through the coupler response.

    Output length equals input length; the FIR group delay is removed by
    centered (zero-padded) convolution. The loss table extends flat beyond
    its edges, so any sample rate is accepted.
    """
    taps = coupler_fir(model, signal_buf.sample_rate_hz, ntaps)
    out = sig.fftconvolve(signal_buf.samples.astype(np.float64), taps,
                          mode="same")
    return SampleBuffer(out.astype(signal_buf.samples.dtype),
                        signal_buf.sample_rate_hz)


def noise_std_for_ebn0(signal_power: float, bit_rate_hz: float,
                       rf_rate_hz: float, ebn0_db: float) -> float:
    """Real-noise standard deviation giving the requested Eb/N0.

    Eb = signal_power / bit_rate, N0 = Eb / 10^(ebn0/10),
    std = sqrt(N0 * rf_rate / 2) (white over the full RF bandwidth).
    """
    if signal_power <= 0 or bit_rate_hz <= 0 or rf_rate_hz <= 0:
        raise ValueError("powers and rates must be positive")
    eb = signal_power / bit_rate_hz
    n0 = eb / 10.0 ** (ebn0_db / 10.0)
    return float(np.sqrt(n0 * rf_rate_hz / 2.0))


def add_awgn(signal_buf: SampleBuffer, std: float, seed: int) -> SampleBuffer:
    """Add i.i.d. zero-mean Gaussian noise, deterministic for a given seed."""
    if std < 0:
        raise ValueError("std must be >= 0")
    if std == 0:
        return SampleBuffer(signal_buf.samples.copy(),
                            signal_buf.sample_rate_hz)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(signal_buf.samples),
                                dtype=np.float32) * np.float32(std)
    out = signal_buf.samples.astype(np.float32) + noise
    return SampleBuffer(out, signal_buf.sample_rate_hz)


def measure_band_powers(signal_buf: SampleBuffer, link: LinkConfig,
                        segment: int | None = None) -> list[float]:
    """In-band power of each configured band, integrated from a Welch PSD."""
    n = len(signal_buf.samples)
    if segment is None:
        segment = 1 << 16
        while segment > max(2, n // 4):
            segment //= 2
    psd = welch_psd(signal_buf, segment=segment)
    return [band_power(psd, b.carrier_hz, b.occupied_bandwidth_hz)
            for b in link.bands]


def calibrated_noise_std(signal_buf: SampleBuffer, link: LinkConfig,
                         ebn0_db: float) -> float:
    """Noise std so each band sees (approximately) the requested Eb/N0.

    A single white-noise process serves all bands, so one N0 must fit all;
    per-band N0 values are averaged and a warning is raised if they spread
    by more than 10%.
    """
    powers = measure_band_powers(signal_buf, link)
    fs = link.rf_sample_rate_hz
    stds = [noise_std_for_ebn0(p, b.bits_per_second, fs, ebn0_db)
            for p, b in zip(powers, link.bands)]
    n0s = [2.0 * s * s / fs for s in stds]
    if max(n0s) > 1.1 * min(n0s):
        warnings.warn("per-band Eb/N0 calibration differs by more than 10%; "
                      "using the mean N0", stacklevel=2)
    return float(np.sqrt(np.mean(n0s) * fs / 2.0))
