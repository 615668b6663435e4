"""Spectral measurement: Welch PSD, peak finding, band power and SNDR."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sig

from .core import MbnfcError, SampleBuffer

PSD_FLOOR_DB = -300.0


class SpectrumError(MbnfcError):
    pass


@dataclass
class Psd:
    """One-sided power spectral density in dB relative to full scale per Hz."""

    freqs_hz: np.ndarray
    power_db: np.ndarray
    resolution_hz: float

    @property
    def power_linear(self) -> np.ndarray:
        return 10.0 ** (self.power_db / 10.0)


def welch_psd(signal_buf, segment: int = 4096,
              overlap_fraction: float = 0.5,
              sample_rate_hz: float | None = None) -> Psd:
    """Hann-windowed averaged periodogram, one-sided, density-normalized
    so the integrated PSD equals the mean signal power."""
    if isinstance(signal_buf, SampleBuffer):
        x = signal_buf.samples
        fs = signal_buf.sample_rate_hz
    else:
        x = np.asarray(signal_buf)
        fs = sample_rate_hz if sample_rate_hz is not None else 1.0
    if segment < 2 or segment & (segment - 1):
        raise ValueError("segment must be a power of two")
    if len(x) < segment:
        raise SpectrumError("signal shorter than one segment")
    if not 0.0 <= overlap_fraction < 1.0:
        raise ValueError("overlap_fraction must be in [0, 1)")
    freqs, pxx = sig.welch(
        x, fs=fs, window="hann", nperseg=segment,
        noverlap=int(segment * overlap_fraction),
        detrend=False, scaling="density", return_onesided=True)
    with np.errstate(divide="ignore"):
        power_db = np.maximum(10.0 * np.log10(pxx), PSD_FLOOR_DB)
    return Psd(freqs_hz=freqs, power_db=power_db, resolution_hz=fs / segment)


def find_peaks(psd: Psd, count: int,
               min_separation_hz: float) -> list[tuple[float, float]]:
    """The ``count`` largest local maxima, pairwise separated by at least
    ``min_separation_hz``, sorted by frequency."""
    if count < 1:
        raise ValueError("count must be >= 1")
    p = psd.power_db
    f = psd.freqs_hz
    is_max = np.zeros(p.size, dtype=bool)
    is_max[1:-1] = (p[1:-1] >= p[:-2]) & (p[1:-1] >= p[2:])
    candidates = np.nonzero(is_max)[0]
    order = candidates[np.argsort(p[candidates])[::-1]]
    chosen: list[int] = []
    for idx in order:
        if all(abs(f[idx] - f[j]) >= min_separation_hz for j in chosen):
            chosen.append(idx)
            if len(chosen) == count:
                break
    if len(chosen) < count:
        raise SpectrumError(
            f"found only {len(chosen)} separated peaks, wanted {count}")
    chosen.sort(key=lambda j: f[j])
    return [(float(f[j]), float(p[j])) for j in chosen]


def band_power(psd: Psd, center_hz: float, bandwidth_hz: float) -> float:
    """Integrated linear power in [center - bw/2, center + bw/2]."""
    lo = center_hz - bandwidth_hz / 2
    hi = center_hz + bandwidth_hz / 2
    if lo < psd.freqs_hz[0] - 1e-9 or hi > psd.freqs_hz[-1] + 1e-9:
        raise SpectrumError("band outside PSD range")
    mask = (psd.freqs_hz >= lo) & (psd.freqs_hz <= hi)
    return float(np.sum(psd.power_linear[mask]) * psd.resolution_hz)


def band_sndr(psd: Psd, center_hz: float, bandwidth_hz: float,
              noise_ref_offset_hz: float) -> float:
    """Power ratio (dB) between the window at ``center_hz`` and the
    same-width window at ``center_hz + noise_ref_offset_hz``."""
    if abs(noise_ref_offset_hz) < bandwidth_hz:
        raise SpectrumError("signal and noise windows overlap")
    p_sig = band_power(psd, center_hz, bandwidth_hz)
    p_ref = band_power(psd, center_hz + noise_ref_offset_hz, bandwidth_hz)
    if p_ref <= 0.0:
        return float("inf")
    return float(10.0 * np.log10(p_sig / p_ref))
