"""Command-line front end.

Subcommands: tx, channel, rx, simulate, spectrum. Exit codes: 0 success,
2 configuration error, 3 I/O error, 4 demodulation failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .analysis import SpectrumError, find_peaks, welch_psd
from .channel import add_awgn, apply_coupler, calibrated_noise_std
from .core import ConfigError, derive_seed
from .fileio import FileFormatError
from .link import (LinkReceiveError, aggregate_bits_per_second, link_receive,
                   link_transmit)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DEMOD = 4

#: RNG stream index reserved for channel noise (transmit uses index 0).
NOISE_STREAM = 1


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def cmd_tx(args) -> int:
    link, _ = fileio.load_config(args.config)
    payload = _read_bytes(args.payload)
    rf = link_transmit(payload, link)
    fileio.write_samples(args.out, rf)
    print(f"{aggregate_bits_per_second(link)} bps")
    return EXIT_OK


def cmd_channel(args) -> int:
    link, coupler = fileio.load_config(args.config)
    rf = fileio.read_samples(args.infile)
    out = apply_coupler(rf, coupler)
    if args.ebn0 is not None:
        std = calibrated_noise_std(out, link, args.ebn0)
        out = add_awgn(out, std, derive_seed(link.seed, NOISE_STREAM))
    fileio.write_samples(args.out, out)
    return EXIT_OK


def cmd_rx(args) -> int:
    link, _ = fileio.load_config(args.config)
    rf = fileio.read_samples(args.infile)
    ref = _read_bytes(args.ref) if args.ref else None
    try:
        payload, report = link_receive(rf, link, ref_data=ref)
    except LinkReceiveError as exc:
        if args.report:
            fileio.write_report_csv(args.report, link, exc.report)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEMOD
    with open(args.out, "wb") as fh:
        fh.write(payload)
    if args.report:
        fileio.write_report_csv(args.report, link, report)
    return EXIT_OK


def _parse_ebn0_list(spec: str) -> list[float | None]:
    if spec.strip().lower() == "none":
        return [None]
    try:
        return [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"--ebn0: cannot parse {spec!r}")


def cmd_simulate(args) -> int:
    link, coupler = fileio.load_config(args.config)
    points = _parse_ebn0_list(args.ebn0)
    rng = np.random.default_rng(args.seed)
    payload = rng.integers(0, 256, args.bytes, dtype=np.uint8).tobytes()
    rf = link_transmit(payload, link)
    coupled = apply_coupler(rf, coupler)
    rows = []
    failures = 0
    for ebn0 in sorted(points, key=lambda p: (p is not None, p)):
        rx_in = coupled
        if ebn0 is not None:
            std = calibrated_noise_std(coupled, link, ebn0)
            rx_in = add_awgn(coupled, std,
                             derive_seed(link.seed, NOISE_STREAM))
        try:
            _, report = link_receive(rx_in, link, ref_data=payload)
        except LinkReceiveError as exc:
            # frames failing CRC under noise still yield BER/EVM rows;
            # only a lost band (no sync, no measurement) is a failure
            report = exc.report
            if any(not row.sync_ok for row in report.per_band):
                failures += 1
        for band, row in enumerate(report.per_band):
            rows.append((ebn0, band, row.ber, row.evm_rms))
            label = "none" if ebn0 is None else f"{ebn0:g} dB"
            ber = "n/a" if np.isnan(row.ber) else f"{row.ber:.3e}"
            evm = "n/a" if np.isnan(row.evm_rms) else f"{100 * row.evm_rms:.2f}%"
            print(f"ebn0={label} band={band} ber={ber} evm={evm}")
    if args.report:
        fileio.write_sweep_csv(args.report, rows)
    return EXIT_DEMOD if failures else EXIT_OK


def cmd_spectrum(args) -> int:
    buf = fileio.read_samples(args.infile)
    try:
        psd = welch_psd(buf, segment=args.segment)
    except SpectrumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.out:
        fileio.write_psd_csv(args.out, psd)
    sep = (args.min_separation if args.min_separation is not None
           else 10 * psd.resolution_hz)
    try:
        peaks = find_peaks(psd, 2, sep)
    except SpectrumError:
        peaks = find_peaks(psd, 1, sep)
    for f, p in peaks:
        print(f"peak {f:.6g} Hz {p:.2f} dB")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbnfc",
        description="Multiband near-field link simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tx", help="modulate a payload file to RF samples")
    p.add_argument("config")
    p.add_argument("payload")
    p.add_argument("out")
    p.set_defaults(func=cmd_tx)

    p = sub.add_parser("channel", help="apply the coupler and optional noise")
    p.add_argument("config")
    p.add_argument("infile")
    p.add_argument("out")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--ebn0", type=float, default=None,
                       help="per-band Eb/N0 in dB")
    group.add_argument("--no-noise", action="store_true")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("rx", help="demodulate RF samples to a payload file")
    p.add_argument("config")
    p.add_argument("infile")
    p.add_argument("out")
    p.add_argument("--ref", default=None,
                   help="reference payload for BER measurement")
    p.add_argument("--report", default=None, help="per-band report CSV")
    p.set_defaults(func=cmd_rx)

    p = sub.add_parser("simulate",
                       help="in-memory tx, channel and rx over Eb/N0 points")
    p.add_argument("config")
    p.add_argument("--bytes", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0,
                   help="payload RNG seed (independent of the link seed)")
    p.add_argument("--ebn0", default="none",
                   help="comma-separated Eb/N0 list in dB, or 'none'")
    p.add_argument("--report", default=None, help="sweep CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="Welch PSD of a sample file")
    p.add_argument("infile")
    p.add_argument("--segment", type=int, default=4096)
    p.add_argument("--out", default=None, help="PSD CSV")
    p.add_argument("--min-separation", type=float, default=None,
                   help="minimum peak separation in Hz")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
