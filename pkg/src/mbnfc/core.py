"""Shared domain types, bit packing, CRC-32 and deterministic seed derivation.

Everything in the pipeline is bit-order MSB-first: frames, QAM nibbles and
byte serialization all follow the same convention so no stage has to guess.
"""
from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np

#: 64-bit golden-ratio increment used to decorrelate derived seed streams.
SEED_INCREMENT = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class MbnfcError(Exception):
    """Base class for all library errors."""


class ConfigError(MbnfcError):
    """A link or band configuration violates an invariant."""


def pack_bits(bits) -> bytes:
    """Pack a bit sequence into bytes, MSB-first, zero-padding the tail."""
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1 and arr.size > 0:
        arr = arr.ravel()
    if np.any(arr > 1):
        raise ValueError("bits must be 0 or 1")
    return np.packbits(arr).tobytes()


def unpack_bits(data: bytes, length: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns exactly ``length`` bits."""
    if length < 0:
        raise ValueError("length must be >= 0")
    if length > 8 * len(data):
        raise ValueError("length exceeds available bits")
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=length)


def crc32(data: bytes) -> int:
    """Reflected CRC-32 (poly 0x04C11DB7, init/final 0xFFFFFFFF)."""
    return zlib.crc32(data) & 0xFFFFFFFF


def derive_seed(seed: int, stream_index: int) -> int:
    """Derive an independent 64-bit seed for sub-stream ``stream_index``."""
    if stream_index < 0:
        raise ValueError("stream_index must be >= 0")
    return (seed + stream_index * SEED_INCREMENT) & _MASK64


@dataclass
class SampleBuffer:
    """A real-valued sample sequence with its sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class BandConfig:
    """One carrier band of the multiband plan."""

    carrier_hz: int
    symbol_rate_hz: int
    gain: float = 1.0
    rolloff: float = 0.25

    @property
    def occupied_bandwidth_hz(self) -> float:
        return self.symbol_rate_hz * (1.0 + self.rolloff)

    @property
    def bits_per_second(self) -> int:
        # QAM-16 carries 4 bits per symbol
        return 4 * self.symbol_rate_hz

    def validate(self, index: int = 0) -> list[str]:
        errs = []
        tag = f"band.{index}"
        if self.carrier_hz <= 0:
            errs.append(f"{tag}.carrier_hz must be positive")
        if self.symbol_rate_hz <= 0:
            errs.append(f"{tag}.symbol_rate_hz must be positive")
        if self.gain <= 0:
            errs.append(f"{tag}.gain must be positive")
        if not 0.0 <= self.rolloff <= 1.0:
            errs.append(f"{tag}.rolloff must be in [0, 1]")
        if (self.carrier_hz > 0 and self.symbol_rate_hz > 0
                and self.occupied_bandwidth_hz >= 2 * self.carrier_hz):
            errs.append(f"{tag}: occupied bandwidth must be below 2*carrier_hz")
        return errs


@dataclass(frozen=True)
class LinkConfig:
    """Global configuration: band plan, RF rate, SDM settings and RNG seed."""

    bands: tuple[BandConfig, ...]
    rf_sample_rate_hz: int
    seed: int = 1
    sdm_order: int = 2
    backoff: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))

    def validate(self) -> list[str]:
        """Return human-readable messages for every violated invariant."""
        errs: list[str] = []
        fs = self.rf_sample_rate_hz
        if fs <= 0:
            return ["rf_sample_rate_hz must be positive"]
        if not self.bands:
            errs.append("at least one band is required")
        if self.sdm_order not in (1, 2):
            errs.append("sdm_order must be 1 or 2")
        if not 0.0 < self.backoff <= 1.0:
            errs.append("backoff must be in (0, 1]")
        if not 0 <= self.seed <= _MASK64:
            errs.append("seed must fit in 64 bits")
        for i, band in enumerate(self.bands):
            errs.extend(band.validate(i))
            if band.carrier_hz > 0 and fs % (4 * band.carrier_hz) != 0:
                errs.append(
                    f"rf_sample_rate_hz must be a multiple of 4*carrier_hz "
                    f"(band {i}: 4*{band.carrier_hz} does not divide {fs})")
            if band.symbol_rate_hz > 0 and fs % band.symbol_rate_hz != 0:
                errs.append(
                    f"rf_sample_rate_hz must be a multiple of symbol_rate_hz "
                    f"(band {i}: {band.symbol_rate_hz} does not divide {fs})")
        spans = [(b.carrier_hz - b.occupied_bandwidth_hz / 2,
                  b.carrier_hz + b.occupied_bandwidth_hz / 2) for b in self.bands]
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                lo = max(spans[i][0], spans[j][0])
                hi = min(spans[i][1], spans[j][1])
                if lo < hi:
                    errs.append(f"passbands of bands {i} and {j} overlap")
        if self.bands:
            top = max(s[1] for s in spans)
            if fs <= 2 * top:
                errs.append("rf_sample_rate_hz must exceed twice the highest "
                            "band edge")
        # square-wave third harmonics falling into another passband degrade
        # that band; the plan is legal but worth flagging
        for i, b in enumerate(self.bands):
            h3 = 3 * b.carrier_hz
            for j, (lo, hi) in enumerate(spans):
                if i != j and lo < h3 < hi:
                    warnings.warn(
                        f"third harmonic of band {i} ({h3} Hz) falls inside "
                        f"the passband of band {j}", stacklevel=2)
        return errs

    def require_valid(self) -> "LinkConfig":
        errs = self.validate()
        if errs:
            raise ConfigError("; ".join(errs))
        return self
