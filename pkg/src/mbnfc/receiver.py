"""Per-band coherent receiver: downconversion, decimating low-pass,
preamble synchronization, matched filtering and slicing.

TX and RX share exact carrier frequency and sample clock, so all filter
group delays are known and compensated deterministically; only the frame
position, phase and amplitude are estimated (from the preamble).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sig

from .core import MbnfcError, BandConfig, LinkConfig, SampleBuffer
from .modem import (DEFAULT_SPAN, DEFAULT_SPS, demap_symbols, matched_filter,
                    rrc_taps, slice_symbols)
from . import framing

SYNC_THRESHOLD = 0.5


class SyncError(MbnfcError):
    """Preamble correlation peak below the detection threshold."""


@dataclass
class SyncResult:
    sample_offset: int
    phase_rad: float
    amplitude: float
    peak_metric: float


def downconvert(signal_buf: SampleBuffer, carrier_hz: int) -> np.ndarray:
    """Mix to complex baseband with an ideal sinusoidal LO:
    y(k) = s(k) * (2 cos(2 pi fc k / fs) - 2j sin(2 pi fc k / fs))."""
    fs = signal_buf.sample_rate_hz
    n = len(signal_buf.samples)
    # the LO is periodic in fs/gcd samples; tiling keeps the phase exact
    # for arbitrarily long buffers
    period = fs // math.gcd(int(carrier_hz), fs)
    k = np.arange(period)
    lo = np.exp(-2j * np.pi * carrier_hz * k / fs).astype(np.complex64)
    reps = -(-n // period)
    return (2.0 * signal_buf.samples.astype(np.float32)
            * np.tile(lo, reps)[:n])


def lowpass_taps(cutoff_hz: float, sample_rate_hz: float,
                 ntaps: int = 129) -> np.ndarray:
    """Hamming-windowed sinc low-pass with unity DC gain."""
    if not 0 < cutoff_hz < sample_rate_hz / 2:
        raise ValueError("cutoff must lie in (0, sample_rate/2)")
    return sig.firwin(ntaps, cutoff_hz, fs=sample_rate_hz)


def lowpass_decimate(iq, cutoff_hz: float, decim: int,
                     sample_rate_hz: float, ntaps: int = 129) -> np.ndarray:
    """Low-pass filter then keep every ``decim``-th sample.

    Group delay is compensated: output m equals the centered filtered
    signal at input index m * decim. Polyphase decimation keeps memory
    and work proportional to the output length.
    """
    if decim < 1:
        raise ValueError("decim must be >= 1")
    if cutoff_hz >= sample_rate_hz / (2 * decim):
        raise ValueError("cutoff must be below the decimated Nyquist rate")
    x = np.asarray(iq)
    taps = lowpass_taps(cutoff_hz, sample_rate_hz, ntaps).astype(
        np.float32 if x.dtype in (np.complex64, np.float32) else np.float64)
    k0 = (ntaps - 1) // 2
    if decim == 1:
        y = sig.oaconvolve(x, taps)
        return y[k0:k0 + len(x)]
    pad = (-k0) % decim
    y = sig.upfirdn(taps, np.concatenate([np.zeros(pad, dtype=x.dtype), x]),
                    up=1, down=decim)
    start = (k0 + pad) // decim
    n_out = (len(x) - k0 + decim - 1) // decim
    return y[start:start + n_out]


def synchronize(stream, preamble, threshold: float = SYNC_THRESHOLD) -> SyncResult:
    """Sliding normalized complex correlation against the known preamble.

    Raises SyncError when the best normalized peak is below ``threshold``.
    """
    y = np.asarray(stream, dtype=np.complex128)
    p = np.asarray(preamble, dtype=np.complex128)
    if p.size < 16:
        raise ValueError("preamble must be at least 16 symbols")
    if y.size < p.size:
        raise SyncError("stream shorter than the preamble")
    corr = np.correlate(y, p, mode="valid")
    idx = int(np.argmax(np.abs(corr)))
    p_energy = float(np.sum(np.abs(p) ** 2))
    win_energy = float(np.sum(np.abs(y[idx:idx + p.size]) ** 2))
    denom = math.sqrt(win_energy * p_energy)
    metric = float(np.abs(corr[idx]) / denom) if denom > 0 else 0.0
    if metric < threshold:
        raise SyncError(f"sync not found (best metric {metric:.3f})")
    return SyncResult(sample_offset=idx,
                      phase_rad=float(np.angle(corr[idx])),
                      amplitude=float(np.abs(corr[idx]) / p_energy),
                      peak_metric=metric)


def _rx_lowpass_ntaps(rf_rate_hz: int, inter_rate_hz: int) -> int:
    # transition band from inter/4 up to the decimated Nyquist inter/2;
    # 3.3/N is the Hamming transition width in normalized frequency
    n = int(3.3 * rf_rate_hz / (inter_rate_hz / 4.0))
    return max(129, n | 1)


def demodulate_band(rf: SampleBuffer, band: BandConfig, link: LinkConfig,
                    sps: int = DEFAULT_SPS, span: int = DEFAULT_SPAN):
    """Recover one band's bit stream from the combined RF signal.

    Returns (bits, evm_rms, SyncResult). ``bits`` start at the SFD and run
    to the end of the buffer; frame extraction is the caller's job.
    """
    fs = link.rf_sample_rate_hz
    inter = sps * band.symbol_rate_hz
    if fs % inter != 0:
        raise ValueError("rf rate must be a multiple of sps*symbol_rate_hz")
    up = fs // inter

    iq = downconvert(rf, band.carrier_hz)
    # the quadrature square carrier leads the in-phase one, which puts the
    # mirrored constellation on the +fc sideband; undo the mirror here
    np.conjugate(iq, out=iq)
    # zero-order-hold delay in the transmitter: (up - 1) / 2 RF samples
    iq = iq[(up - 1) // 2:]
    z = lowpass_decimate(iq, inter / 4.0, up, fs,
                         ntaps=_rx_lowpass_ntaps(fs, inter))
    del iq
    filt = rrc_taps(band.rolloff, sps, span)
    symbols = matched_filter(z, filt, len(filt.taps) - 1)

    preamble = framing.preamble_symbols()
    sync = synchronize(symbols, preamble)
    payload_syms = symbols[sync.sample_offset + len(preamble):]
    payload_syms = payload_syms * np.exp(-1j * sync.phase_rad) / sync.amplitude

    bits = demap_symbols(payload_syms)
    # bound the EVM measurement to the frame region via the length field
    # so the matched-filter tail does not pollute it; the bits themselves
    # are returned in full (the length field may be corrupted by noise)
    n_syms = payload_syms.size
    hdr = framing.SFD_BITS + framing.LENGTH_BITS
    if bits.size >= hdr:
        length = int(framing.bits_to_int(bits[framing.SFD_BITS:hdr]))
        frame_syms = (hdr + 8 * length + framing.CRC_BITS) // 4
        if frame_syms <= n_syms:
            n_syms = frame_syms
    used = payload_syms[:n_syms]
    ideal = slice_symbols(used)
    denom = np.mean(np.abs(ideal) ** 2)
    evm = float(np.sqrt(np.mean(np.abs(used - ideal) ** 2) / denom))
    return bits, evm, sync
