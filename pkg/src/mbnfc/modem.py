"""QAM-16 mapping/demapping and root-raised-cosine pulse shaping.

The constellation is the 16-point grid {-3,-1,+1,+3}^2 scaled by 1/sqrt(10)
(unit average energy), Gray-coded per axis: b3b2 select I, b1b0 select Q,
with 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

QAM_SCALE = 1.0 / np.sqrt(10.0)

# Gray code per axis, indexed by the 2-bit value (b_hi, b_lo) -> level
_BITS_TO_LEVEL = {(0, 0): -3, (0, 1): -1, (1, 1): +1, (1, 0): +3}
_LEVEL_TO_BITS = {v: k for k, v in _BITS_TO_LEVEL.items()}

# lookup table: nibble value b3b2b1b0 -> complex symbol
_MAP_TABLE = np.empty(16, dtype=np.complex128)
for _n in range(16):
    _b = [(_n >> k) & 1 for k in (3, 2, 1, 0)]
    _i = _BITS_TO_LEVEL[(_b[0], _b[1])]
    _q = _BITS_TO_LEVEL[(_b[2], _b[3])]
    _MAP_TABLE[_n] = (_i + 1j * _q) * QAM_SCALE

DEFAULT_SPS = 8
DEFAULT_SPAN = 8


def qam16_map(nibble) -> complex:
    """Map 4 bits (order b3 b2 b1 b0) to a unit-average-energy QAM-16 point."""
    b3, b2, b1, b0 = (int(b) for b in nibble)
    return complex(_MAP_TABLE[(b3 << 3) | (b2 << 2) | (b1 << 1) | b0])


def map_bits(bits) -> np.ndarray:
    """Map a bit sequence (length divisible by 4, MSB-first) to symbols."""
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size % 4 != 0:
        raise ValueError("bit count must be a multiple of 4")
    nib = arr.reshape(-1, 4)
    idx = (nib[:, 0] << 3) | (nib[:, 1] << 2) | (nib[:, 2] << 1) | nib[:, 3]
    return _MAP_TABLE[idx]


def _slice_axis(x: np.ndarray) -> np.ndarray:
    """Nearest level in {-3,-1,1,3}; boundary ties go to the lower amplitude."""
    t = 2.0 * QAM_SCALE
    inner = np.where(x >= 0, 1, -1)
    outer = np.where(x >= 0, 3, -3)
    return np.where(np.abs(x) <= t, inner, outer)


def qam16_demap(sample) -> tuple[int, int, int, int]:
    """Demap one complex sample to its 4 bits (b3, b2, b1, b0)."""
    z = complex(sample)
    bi = _LEVEL_TO_BITS[int(_slice_axis(np.array([z.real]))[0])]
    bq = _LEVEL_TO_BITS[int(_slice_axis(np.array([z.imag]))[0])]
    return (bi[0], bi[1], bq[0], bq[1])


def demap_symbols(symbols) -> np.ndarray:
    """Hard-decide a symbol array into an MSB-first bit array (4 per symbol)."""
    z = np.asarray(symbols, dtype=np.complex128)
    li = _slice_axis(z.real)
    lq = _slice_axis(z.imag)
    bits = np.empty((z.size, 4), dtype=np.uint8)
    # Gray per axis: -3 -> 00, -1 -> 01, +1 -> 11, +3 -> 10
    for col, levels in ((0, li), (2, lq)):
        bits[:, col] = levels > 0
        bits[:, col + 1] = np.abs(levels) == 1
    return bits.reshape(-1)


def slice_symbols(symbols) -> np.ndarray:
    """Nearest ideal constellation point for each sample."""
    z = np.asarray(symbols, dtype=np.complex128)
    return (_slice_axis(z.real) + 1j * _slice_axis(z.imag)) * QAM_SCALE


@dataclass(frozen=True)
class RrcFilter:
    """Root-raised-cosine filter taps plus the geometry they were built for."""

    taps: np.ndarray
    samples_per_symbol: int
    rolloff: float
    span_symbols: int


def rrc_taps(rolloff: float, samples_per_symbol: int = DEFAULT_SPS,
             span_symbols: int = DEFAULT_SPAN) -> RrcFilter:
    """Unit-energy RRC impulse response over ``span_symbols`` symbols.

    Singularities at t = 0 and |t| = Ts/(4*beta) are filled with their
    analytic limits.
    """
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError("rolloff must be in [0, 1]")
    if samples_per_symbol < 2:
        raise ValueError("samples_per_symbol must be >= 2")
    if span_symbols < 4 or span_symbols % 2 != 0:
        raise ValueError("span_symbols must be even and >= 4")
    sps = samples_per_symbol
    n = span_symbols * sps + 1
    t = (np.arange(n) - (n - 1) / 2) / sps  # in symbol periods
    beta = rolloff
    taps = np.zeros(n)
    if beta == 0.0:
        taps = np.sinc(t)
    else:
        sing = np.isclose(np.abs(t), 1.0 / (4 * beta))
        center = np.isclose(t, 0.0)
        regular = ~(sing | center)
        tr = t[regular]
        num = (np.sin(np.pi * tr * (1 - beta))
               + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta)))
        den = np.pi * tr * (1 - (4 * beta * tr) ** 2)
        taps[regular] = num / den
        taps[center] = 1 - beta + 4 * beta / np.pi
        taps[sing] = (beta / np.sqrt(2)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
            + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta)))
    taps = taps / np.sqrt(np.sum(taps ** 2))
    return RrcFilter(taps=taps, samples_per_symbol=sps, rolloff=rolloff,
                     span_symbols=span_symbols)


def pulse_shape(symbols, filt: RrcFilter) -> np.ndarray:
    """Upsample by zero insertion and convolve with the RRC taps.

    Output length is n*sps + len(taps) - 1, at rate sps * symbol_rate.
    """
    syms = np.asarray(symbols, dtype=np.complex128)
    if syms.size == 0:
        raise ValueError("symbols must be nonempty")
    up = np.zeros(syms.size * filt.samples_per_symbol, dtype=np.complex128)
    up[::filt.samples_per_symbol] = syms
    return np.convolve(up, filt.taps)


def matched_filter(samples, filt: RrcFilter, timing_offset: int) -> np.ndarray:
    """Convolve with the RRC taps and decimate to symbol rate.

    For a back-to-back pulse_shape -> matched_filter chain the correct
    offset is len(taps) - 1.
    """
    x = np.asarray(samples, dtype=np.complex128)
    y = np.convolve(x, filt.taps)
    if not 0 <= timing_offset < y.size:
        raise ValueError("timing_offset out of range")
    return y[timing_offset::filt.samples_per_symbol]
