"""Sample-file serialization, link configuration files and CSV reports.

Sample files are a small binary container:

    magic           6 bytes, b"MBNFC1"
    kind            1 byte, 0 = real, 1 = complex interleaved
    reserved        1 zero byte
    sample_rate_hz  unsigned 64-bit little-endian
    samples         float32 little-endian (I,Q interleaved when complex)

Configuration files are line-oriented ``key = value`` text with ``#``
comments; CSVs carry coupler tables, PSDs and per-band receive reports.
"""
from __future__ import annotations

import csv
import struct
from os import PathLike, fspath
from pathlib import Path

import numpy as np

from .core import BandConfig, ConfigError, LinkConfig, MbnfcError, SampleBuffer
from .channel import CouplerModel, default_coupler, flat_coupler

MAGIC = b"MBNFC1"
KIND_REAL = 0
KIND_COMPLEX = 1
_HEADER = struct.Struct("<6sBBQ")


class FileFormatError(MbnfcError):
    """A file does not follow the expected binary or CSV layout."""


def write_samples(path: str | PathLike, buf: SampleBuffer) -> None:
    """Serialize a sample buffer; complex data is stored I,Q interleaved."""
    x = np.asarray(buf.samples)
    if np.iscomplexobj(x):
        kind = KIND_COMPLEX
        flat = np.empty(2 * x.size, dtype="<f4")
        flat[0::2] = x.real
        flat[1::2] = x.imag
    else:
        kind = KIND_REAL
        flat = x.astype("<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, kind, 0, int(buf.sample_rate_hz)))
        fh.write(flat.tobytes())


def read_samples(path: str | PathLike) -> SampleBuffer:
    """Inverse of :func:`write_samples`; validates magic and payload size."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FileFormatError(f"{fspath(path)}: truncated header")
        magic, kind, reserved, rate = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FileFormatError(f"{fspath(path)}: bad magic {magic!r}")
        if reserved != 0:
            raise FileFormatError(f"{fspath(path)}: reserved byte must be 0")
        if kind not in (KIND_REAL, KIND_COMPLEX):
            raise FileFormatError(f"{fspath(path)}: unknown kind {kind}")
        if rate == 0:
            raise FileFormatError(f"{fspath(path)}: zero sample rate")
        body = fh.read()
    if len(body) % 4:
        raise FileFormatError(f"{fspath(path)}: payload not float32-aligned")
    flat = np.frombuffer(body, dtype="<f4")
    if kind == KIND_COMPLEX:
        if flat.size % 2:
            raise FileFormatError(
                f"{fspath(path)}: complex payload has an odd float count")
        samples = (flat[0::2] + 1j * flat[1::2]).astype(np.complex64)
    else:
        samples = flat.astype(np.float32)
    return SampleBuffer(samples, int(rate))


def load_coupler_csv(path: str | PathLike) -> CouplerModel:
    """Read a ``freq_hz,loss_db`` table, rows ascending in frequency."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{fspath(path)}: empty coupler table")
        if [h.strip() for h in header] != ["freq_hz", "loss_db"]:
            raise FileFormatError(
                f"{fspath(path)}: expected header 'freq_hz,loss_db'")
        points = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                points.append((float(row[0]), float(row[1])))
            except (IndexError, ValueError):
                raise FileFormatError(
                    f"{fspath(path)}:{lineno}: bad coupler row {row!r}")
    try:
        return CouplerModel(points=tuple(points))
    except ValueError as exc:
        raise FileFormatError(f"{fspath(path)}: {exc}")


def write_coupler_csv(path: str | PathLike, model: CouplerModel) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "loss_db"])
        for f, l in model.points:
            writer.writerow([f"{f:.6g}", f"{l:.6g}"])


def write_psd_csv(path: str | PathLike, psd) -> None:
    """PSD as ``freq_hz,power_db`` rows with 6 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "power_db"])
        for f, p in zip(psd.freqs_hz, psd.power_db):
            writer.writerow([f"{f:.6g}", f"{p:.6g}"])


def write_report_csv(path: str | PathLike, link: LinkConfig, report) -> None:
    """Per-band receive report: band,carrier_hz,sync,ber,evm_rms,bits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["band", "carrier_hz", "sync", "ber", "evm_rms",
                         "bits"])
        for i, (band, row) in enumerate(zip(link.bands, report.per_band)):
            writer.writerow([
                i, band.carrier_hz, int(row.sync_ok),
                "" if np.isnan(row.ber) else f"{row.ber:.6g}",
                "" if np.isnan(row.evm_rms) else f"{row.evm_rms:.6g}",
                row.bit_count])


def write_sweep_csv(path: str | PathLike, rows) -> None:
    """Eb/N0 sweep results: ebn0_db,band,ber,evm_rms rows, noiseless
    points written with an empty ebn0_db field."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ebn0_db", "band", "ber", "evm_rms"])
        for ebn0_db, band, ber, evm in rows:
            writer.writerow([
                "" if ebn0_db is None else f"{ebn0_db:.6g}", band,
                "" if np.isnan(ber) else f"{ber:.6g}",
                "" if np.isnan(evm) else f"{evm:.6g}"])


_LINK_KEYS = {"rf_sample_rate_hz", "sdm_order", "backoff", "seed",
              "coupler_table"}
_BAND_KEYS = {"carrier_hz", "symbol_rate_hz", "rolloff", "gain"}


def _parse_scalar(key: str, value: str):
    try:
        if key in ("backoff", "rolloff", "gain"):
            return float(value)
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r}")


def parse_config(text: str,
                 base_dir: str | PathLike = ".") -> tuple[LinkConfig,
                                                          CouplerModel]:
    """Parse ``key = value`` configuration text into a validated link
    configuration and its coupler model.

    Relative coupler-table paths resolve against ``base_dir``. Unknown keys
    are rejected.
    """
    link_kw: dict = {}
    band_kw: dict[int, dict] = {}
    coupler_spec: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _LINK_KEYS:
            if key == "coupler_table":
                coupler_spec = value
            else:
                link_kw[key] = _parse_scalar(key, value)
            continue
        parts = key.split(".")
        if len(parts) == 3 and parts[0] == "band" and parts[2] in _BAND_KEYS:
            try:
                idx = int(parts[1])
            except ValueError:
                raise ConfigError(f"line {lineno}: bad band index in {key!r}")
            band_kw.setdefault(idx, {})[parts[2]] = _parse_scalar(
                parts[2], value)
            continue
        raise ConfigError(f"line {lineno}: unknown key {key!r}")

    if not band_kw:
        raise ConfigError("at least one band.N.carrier_hz entry is required")
    indices = sorted(band_kw)
    if indices != list(range(len(indices))):
        raise ConfigError("band indices must be contiguous starting at 0")
    bands = []
    for idx in indices:
        kw = band_kw[idx]
        for req in ("carrier_hz", "symbol_rate_hz"):
            if req not in kw:
                raise ConfigError(f"band.{idx}.{req} is required")
        bands.append(BandConfig(**kw))
    if "rf_sample_rate_hz" not in link_kw:
        raise ConfigError("rf_sample_rate_hz is required")
    link = LinkConfig(bands=tuple(bands), **link_kw)
    errs = link.validate()
    if errs:
        raise ConfigError("; ".join(errs))

    if coupler_spec is None:
        coupler = default_coupler()
    elif coupler_spec.startswith("flat:"):
        try:
            coupler = flat_coupler(float(coupler_spec[5:]))
        except ValueError:
            raise ConfigError(f"coupler_table: cannot parse {coupler_spec!r}")
    else:
        table_path = Path(base_dir) / coupler_spec
        try:
            coupler = load_coupler_csv(table_path)
        except OSError as exc:
            raise ConfigError(f"coupler_table: {exc}")
        except FileFormatError as exc:
            raise ConfigError(str(exc))
    return link, coupler


def load_config(path: str | PathLike) -> tuple[LinkConfig, CouplerModel]:
    """Read and parse a configuration file; see :func:`parse_config`."""
    p = Path(path)
    return parse_config(p.read_text(), base_dir=p.parent)
