"""Unscaled DFT of segmented series and the two amplitude-stripping normalizations."""
import logging
import struct
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy import fft as sp_fft

from spectral_dependence.exceptions import (
    ConfigurationError,
    DegenerateSegmentError,
    DimensionError,
    FrequencyRangeError,
    MalformedInputError,
    NormModeError,
)
from spectral_dependence.models import BlockPartition, SegmentSet, SpectralEnsemble
from spectral_dependence.params import NormMode

logger = logging.getLogger(__name__)

POSITIVE_HALF = "positive-half"
SPECTRAL_MAGIC = b"SDSPC1"
_COUNTS = struct.Struct("<III")
_MODE = struct.Struct("<B")
_HEADER_SIZE = len(SPECTRAL_MAGIC) + _COUNTS.size + _MODE.size

# a coefficient (or block sub-vector) whose norm is below this fraction of the
# largest coefficient in the ensemble has no usable phase
DEGENERATE_RTOL = 1e-12

FreqSelection = Union[str, Sequence[int]]


def positive_half(n_t: int) -> List[int]:
    """1 .. floor(N_T/2); bin 0 is excluded, the Nyquist bin (even N_T) kept"""
    return list(range(1, n_t // 2 + 1))


def bin_frequencies(freq_indices: Sequence[int], n_t: int, sampling_rate: float) -> np.ndarray:
    return np.asarray(freq_indices, dtype=np.float64) * sampling_rate / n_t


def _resolve_freqs(n_t: int, freq_selection: FreqSelection) -> List[int]:
    if isinstance(freq_selection, str):
        if freq_selection != POSITIVE_HALF:
            raise ConfigurationError(f"unknown frequency selection {freq_selection!r}")
        return positive_half(n_t)
    freqs = [int(w) for w in freq_selection]
    if not freqs:
        raise FrequencyRangeError("explicit frequency list is empty")
    bad = [w for w in freqs if not 0 <= w < n_t]
    if bad:
        raise FrequencyRangeError(f"frequencies {bad} outside 0..{n_t - 1}")
    if len(set(freqs)) != len(freqs):
        raise FrequencyRangeError("explicit frequency list repeats a frequency")
    return freqs


def dft(s: SegmentSet, freq_selection: FreqSelection = POSITIVE_HALF) -> SpectralEnsemble:
    """X_jw = sum_t X_jt exp(-2 pi i w t / N_T), without 1/N_T scaling."""
    freqs = _resolve_freqs(s.n_samples, freq_selection)
    full = sp_fft.fft(s.data, axis=1)
    return SpectralEnsemble(
        coeffs=full[:, freqs, :],
        freq_indices=freqs,
        norm_mode=NormMode.raw,
        n_samples=s.n_samples,
        sampling_rate=s.sampling_rate,
        channel_names=s.channel_names,
    )


def direct_dft(s: SegmentSet, freq_selection: FreqSelection = POSITIVE_HALF) -> SpectralEnsemble:
    """O(N_T^2) summation of the same transform; the reference path for dft."""
    freqs = _resolve_freqs(s.n_samples, freq_selection)
    t = np.arange(s.n_samples)
    kernel = np.exp(-2j * np.pi * np.outer(freqs, t) / s.n_samples)
    coeffs = np.einsum("ft,jtm->jfm", kernel, s.data)
    return SpectralEnsemble(
        coeffs=coeffs,
        freq_indices=freqs,
        norm_mode=NormMode.raw,
        n_samples=s.n_samples,
        sampling_rate=s.sampling_rate,
        channel_names=s.channel_names,
    )


def _degenerate_floor(e: SpectralEnsemble) -> float:
    return DEGENERATE_RTOL * float(np.max(np.abs(e.coeffs))) if e.coeffs.size else 0.0


def normalize_block(e: SpectralEnsemble, partition: BlockPartition) -> SpectralEnsemble:
    """Divide each block sub-vector by its Euclidean norm, per segment and frequency."""
    if e.norm_mode is NormMode.block and e.partition != partition:
        raise NormModeError("ensemble is already block-normalized under a different partition")
    if e.norm_mode is NormMode.channel:
        raise NormModeError("cannot block-normalize a channel-normalized ensemble")
    partition.validate_for(e.n_channels)
    floor = _degenerate_floor(e)
    coeffs = np.array(e.coeffs)
    for b, block in enumerate(partition.blocks):
        idx = list(block)
        sub = coeffs[:, :, idx]
        norms = np.linalg.norm(sub, axis=-1)
        bad = np.argwhere(~(norms > floor))
        if bad.size:
            j, f = bad[0]
            raise DegenerateSegmentError(segment=int(j), freq=e.freq_indices[f], block=b)
        coeffs[:, :, idx] = sub / norms[..., None]
    return e.derive(coeffs, NormMode.block, partition)


def normalize_channel(e: SpectralEnsemble, channels: Optional[Sequence[int]] = None) -> SpectralEnsemble:
    """Divide every coefficient by its own modulus.

    With `channels` the result keeps only those channels, in that order, so a
    silent channel outside the selection does not stop the run.
    """
    if e.norm_mode is NormMode.block:
        raise NormModeError("cannot channel-normalize a block-normalized ensemble")
    if channels is not None:
        picked = [int(c) for c in channels]
        if len(set(picked)) != len(picked) or any(not 0 <= c < e.n_channels for c in picked):
            raise DimensionError(f"invalid channel selection {picked}")
        e = SpectralEnsemble(
            coeffs=e.coeffs[:, :, picked],
            freq_indices=e.freq_indices,
            norm_mode=e.norm_mode,
            n_samples=e.n_samples,
            sampling_rate=e.sampling_rate,
            channel_names=[e.channel_names[c] for c in picked],
        )
    floor = _degenerate_floor(e)
    mods = np.abs(e.coeffs)
    bad = np.argwhere(~(mods > floor))
    if bad.size:
        j, f, m = bad[0]
        raise DegenerateSegmentError(segment=int(j), freq=e.freq_indices[f], channel=int(m))
    return e.derive(e.coeffs / mods, NormMode.channel)


def write_ensemble(e: SpectralEnsemble, path: Union[str, Path]) -> None:
    payload = np.ascontiguousarray(e.coeffs, dtype="<c16").tobytes()
    header = SPECTRAL_MAGIC + _COUNTS.pack(e.n_segments, e.n_freqs, e.n_channels) + _MODE.pack(e.norm_mode.code)
    Path(path).write_bytes(header + payload)


def read_ensemble(
    path: Union[str, Path],
    *,
    partition: Optional[BlockPartition] = None,
    freq_indices: Optional[Sequence[int]] = None,
    n_samples: Optional[int] = None,
    sampling_rate: Optional[float] = None,
) -> SpectralEnsemble:
    """Load coefficients computed elsewhere (any transform) in the SDSPC1 layout.

    The format carries no frequency labels; they default to 0..F-1.
    Block-normalized files need the partition they were normalized with.
    """
    buf = Path(path).read_bytes()
    if len(buf) == 0:
        raise MalformedInputError("empty file", byte=0)
    if buf[: len(SPECTRAL_MAGIC)] != SPECTRAL_MAGIC:
        raise MalformedInputError(f"bad magic, expected {SPECTRAL_MAGIC!r}", byte=0)
    if len(buf) < _HEADER_SIZE:
        raise MalformedInputError("truncated header", byte=len(buf))
    n_r, n_f, m = _COUNTS.unpack_from(buf, len(SPECTRAL_MAGIC))
    (code,) = _MODE.unpack_from(buf, len(SPECTRAL_MAGIC) + _COUNTS.size)
    try:
        mode = NormMode.from_code(code)
    except ValueError as exc:
        raise MalformedInputError(str(exc), byte=_HEADER_SIZE - 1)
    expected = _HEADER_SIZE + 16 * n_r * n_f * m
    if len(buf) != expected:
        raise MalformedInputError(
            f"header declares {n_r}x{n_f}x{m} coefficients ({expected} bytes) but file has {len(buf)} bytes",
            byte=min(len(buf), expected),
        )
    coeffs = np.frombuffer(buf, dtype="<c16", offset=_HEADER_SIZE).reshape(n_r, n_f, m)
    if freq_indices is None:
        freq_indices = list(range(n_f))
    return SpectralEnsemble(
        coeffs=coeffs.astype(np.complex128),
        freq_indices=freq_indices,
        norm_mode=mode,
        partition=partition,
        n_samples=n_samples,
        sampling_rate=sampling_rate,
    )
