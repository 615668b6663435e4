"""Multiband near-field communication link simulator.

QAM-16 baseband, an all-digital transmitter (sigma-delta modulation plus
square-wave XOR mixing per band), a parametric coupler channel with AWGN,
and a full coherent receiver, plus spectral analysis and a CLI.
"""
from .core import (BandConfig, ConfigError, LinkConfig, MbnfcError,
                   SampleBuffer, crc32, derive_seed, pack_bits, unpack_bits)
from .modem import (RrcFilter, demap_symbols, map_bits, matched_filter,
                    pulse_shape, qam16_demap, qam16_map, rrc_taps,
                    slice_symbols)
from .adtx import (combine_bands, sdm_modulate, square_carrier, transmit_band,
                   xor_mix)
from .channel import (CouplerModel, add_awgn, apply_coupler,
                      calibrated_noise_std, coupler_loss_at, default_coupler,
                      flat_coupler, noise_std_for_ebn0)
from .framing import (frame_bits, frame_decode, frame_encode, merge_streams,
                      preamble_symbols, split_stream)
from .receiver import (SyncError, SyncResult, demodulate_band, downconvert,
                       lowpass_decimate, synchronize)
from .link import (BandReport, LinkReceiveError, LinkReport,
                   aggregate_bits_per_second, link_receive, link_transmit)
from .analysis import Psd, band_power, band_sndr, find_peaks, welch_psd
from .fileio import (FileFormatError, load_config, read_samples,
                     write_samples)

__version__ = "0.1.0"

__all__ = [
    "BandConfig", "ConfigError", "LinkConfig", "MbnfcError", "SampleBuffer",
    "crc32", "derive_seed", "pack_bits", "unpack_bits",
    "RrcFilter", "demap_symbols", "map_bits", "matched_filter", "pulse_shape",
    "qam16_demap", "qam16_map", "rrc_taps", "slice_symbols",
    "combine_bands", "sdm_modulate", "square_carrier", "transmit_band",
    "xor_mix",
    "CouplerModel", "add_awgn", "apply_coupler", "calibrated_noise_std",
    "coupler_loss_at", "default_coupler", "flat_coupler", "noise_std_for_ebn0",
    "frame_bits", "frame_decode", "frame_encode", "merge_streams",
    "preamble_symbols", "split_stream",
    "SyncError", "SyncResult", "demodulate_band", "downconvert",
    "lowpass_decimate", "synchronize",
    "BandReport", "LinkReceiveError", "LinkReport",
    "aggregate_bits_per_second", "link_receive", "link_transmit",
    "Psd", "band_power", "band_sndr", "find_peaks", "welch_psd",
    "FileFormatError", "load_config", "read_samples", "write_samples",
]
