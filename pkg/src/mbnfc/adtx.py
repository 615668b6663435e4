"""All-digital transmitter: sigma-delta modulation, XOR square-wave mixing
and multiband power combining.

The datapath is fully digital: the pulse-shaped baseband is held at the RF
rate (zero-order hold), each of I/Q is collapsed to a +/-1 stream by an
error-feedback sigma-delta modulator, mixed with a quadrature pair of
square-wave carriers by sample-wise product, and the per-band outputs are
summed.
"""
from __future__ import annotations

import math

import numpy as np

from .core import LinkConfig, BandConfig, SampleBuffer
from .modem import RrcFilter, rrc_taps, pulse_shape, DEFAULT_SPS, DEFAULT_SPAN

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

DEFAULT_CLAMP = 4.0


@njit(cache=True)
def _sdm_loop(x, order, clamp, out):
    e1 = 0.0
    e2 = 0.0
    for n in range(x.shape[0]):
        if order == 1:
            v = x[n] + e1
        else:
            v = x[n] + 2.0 * e1 - e2
        y = 1.0 if v >= 0.0 else -1.0
        out[n] = y
        e2 = e1
        e = v - y
        if e > clamp:
            e = clamp
        elif e < -clamp:
            e = -clamp
        e1 = e


def sdm_modulate(x, order: int = 2, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    """Error-feedback sigma-delta modulator, 1-bit quantizer, NTF (1-z^-1)^order.

    Returns an int8 array over {-1, +1}. The input must already be backed
    off to |x| <= 1.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if clamp < 2.0:
        raise ValueError("clamp must be >= 2")
    xa = np.ascontiguousarray(x, dtype=np.float64)
    if xa.size and np.max(np.abs(xa)) > 1.0:
        raise ValueError("sigma-delta input must satisfy |x| <= 1")
    out = np.empty(xa.size, dtype=np.int8)
    _sdm_loop(xa, order, clamp, out)
    return out


def square_carrier(carrier_hz: int, rf_rate_hz: int, n: int):
    """Quadrature square-wave carriers of length ``n`` as int8 +/-1 arrays.

    The in-phase wave is high for the first half of each period; the
    quadrature wave leads it by a quarter period.
    """
    if carrier_hz <= 0 or rf_rate_hz <= 0:
        raise ValueError("rates must be positive")
    if rf_rate_hz % (4 * carrier_hz) != 0:
        raise ValueError("rf_rate_hz must be a multiple of 4*carrier_hz")
    period = rf_rate_hz // carrier_hz
    k = np.arange(period)
    one_i = np.where(k % period < period // 2, 1, -1).astype(np.int8)
    one_q = np.roll(one_i, -(period // 4))
    reps = -(-n // period)
    i = np.tile(one_i, reps)[:n]
    q = np.tile(one_q, reps)[:n]
    return i, q


def xor_mix(data: np.ndarray, carrier: np.ndarray) -> np.ndarray:
    """Sample-wise product of two +/-1 streams (XOR up to global sign)."""
    if len(data) != len(carrier):
        raise ValueError("data and carrier lengths differ")
    return (np.asarray(data, dtype=np.int8) * np.asarray(carrier, dtype=np.int8))


def upconvert_baseband(i_bb: np.ndarray, q_bb: np.ndarray, band: BandConfig,
                       link: LinkConfig) -> np.ndarray:
    """Sigma-delta modulate I/Q at the RF rate and XOR-mix onto the carrier.

    Inputs are real sequences already at rf_sample_rate_hz with |x| <= 1.
    Output values lie in gain * {-2, 0, +2}.
    """
    ibits = sdm_modulate(i_bb, link.sdm_order)
    qbits = sdm_modulate(q_bb, link.sdm_order)
    ci, cq = square_carrier(band.carrier_hz, link.rf_sample_rate_hz, len(ibits))
    mixed = xor_mix(ibits, ci).astype(np.float32) - xor_mix(qbits, cq)
    return (band.gain * mixed).astype(np.float32)


def transmit_band(symbols, band: BandConfig, link: LinkConfig,
                  sps: int = DEFAULT_SPS, span: int = DEFAULT_SPAN,
                  filt: RrcFilter | None = None) -> SampleBuffer:
    """Full per-band ADTX chain: shape, hold to RF rate, SDM, XOR mix."""
    syms = np.asarray(symbols, dtype=np.complex128)
    fs = link.rf_sample_rate_hz
    if syms.size == 0:
        return SampleBuffer(np.zeros(0, dtype=np.float32), fs)
    inter_rate = sps * band.symbol_rate_hz
    if fs % inter_rate != 0:
        raise ValueError(
            f"rf_sample_rate_hz must be a multiple of sps*symbol_rate_hz "
            f"({sps}*{band.symbol_rate_hz} does not divide {fs})")
    up = fs // inter_rate
    if filt is None:
        filt = rrc_taps(band.rolloff, sps, span)
    shaped = pulse_shape(syms, filt)
    i_bb = np.repeat(link.backoff * shaped.real, up)
    q_bb = np.repeat(link.backoff * shaped.imag, up)
    return SampleBuffer(upconvert_baseband(i_bb, q_bb, band, link), fs)


def combine_bands(band_signals: list[SampleBuffer]) -> SampleBuffer:
    """Element-wise sum of per-band RF signals (ideal power combiner)."""
    if not band_signals:
        raise ValueError("band_signals must be nonempty")
    n = len(band_signals[0].samples)
    rate = band_signals[0].sample_rate_hz
    for sig in band_signals[1:]:
        if len(sig.samples) != n or sig.sample_rate_hz != rate:
            raise ValueError("band signals must share length and rate")
    total = np.zeros(n, dtype=np.float32)
    for sig in band_signals:
        total += sig.samples
    return SampleBuffer(total, rate)
