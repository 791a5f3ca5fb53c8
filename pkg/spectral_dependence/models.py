from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from spectral_dependence.exceptions import (
    ConfigurationError,
    DimensionError,
    FrequencyRangeError,
    InternalConsistencyError,
    MalformedInputError,
    NumericalError,
)
from spectral_dependence.params import NormMode
from spectral_dependence.utils import check_hermitian, hermitian_from_lower

UNIT_NORM_TOL = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class SegmentSet:
    """Real segmented recording indexed [segment][time][channel]."""

    def __init__(
        self,
        *,
        data: np.ndarray,
        sampling_rate: Optional[float] = None,
        channel_names: Optional[Sequence[str]] = None,
    ):
        data = np.array(data, dtype=np.float64)
        if data.ndim != 3:
            raise DimensionError(f"segment data must be 3-dimensional [segment][time][channel], got {data.ndim}")
        n_r, n_t, m = data.shape
        if n_r < 1 or n_t < 2 or m < 1:
            raise DimensionError(f"need N_R >= 1, N_T >= 2, M >= 1; got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise MalformedInputError("segment data contains NaN or Inf")
        if sampling_rate is not None and not sampling_rate > 0:
            raise ConfigurationError(f"sampling rate must be > 0, got {sampling_rate}")
        if channel_names is None:
            channel_names = [f"ch_{i}" for i in range(m)]
        if len(channel_names) != m:
            raise DimensionError(f"{len(channel_names)} channel names for {m} channels")
        self.data = _frozen(data)
        self.sampling_rate = sampling_rate
        self.channel_names = list(channel_names)

    @property
    def n_segments(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def n_channels(self) -> int:
        return self.data.shape[2]

    def replace(self, data: np.ndarray) -> "SegmentSet":
        return SegmentSet(data=data, sampling_rate=self.sampling_rate, channel_names=self.channel_names)

    def __repr__(self) -> str:
        return f"SegmentSet(n_segments={self.n_segments}, n_samples={self.n_samples}, n_channels={self.n_channels})"


class BlockPartition:
    """Ordered disjoint grouping of channel indices into blocks."""

    def __init__(
        self,
        blocks: Sequence[Sequence[int]],
        *,
        names: Optional[Sequence[str]] = None,
        n_channels: Optional[int] = None,
    ):
        if len(blocks) < 1:
            raise ConfigurationError("a partition needs at least one block")
        seen = set()
        clean: List[Tuple[int, ...]] = []
        for b, block in enumerate(blocks):
            members = tuple(int(i) for i in block)
            if not members:
                raise ConfigurationError(f"block {b} is empty")
            for i in members:
                if i < 0:
                    raise ConfigurationError(f"negative channel index {i} in block {b}")
                if i in seen:
                    raise ConfigurationError(f"channel {i} appears in more than one block")
                seen.add(i)
            clean.append(members)
        if names is None:
            names = [f"B{b}" for b in range(len(clean))]
        if len(names) != len(clean) or len(set(names)) != len(names):
            raise ConfigurationError("block names must be distinct, one per block")
        self.blocks: Tuple[Tuple[int, ...], ...] = tuple(clean)
        self.names: Tuple[str, ...] = tuple(names)
        if n_channels is not None:
            self.validate_for(n_channels)

    def validate_for(self, n_channels: int) -> None:
        top = max(max(b) for b in self.blocks)
        if top >= n_channels:
            raise DimensionError(f"partition references channel {top} but only {n_channels} channels exist")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def dims(self) -> List[int]:
        return [len(b) for b in self.blocks]

    @property
    def indices(self) -> List[int]:
        """channel indices in joint (block-concatenated) order"""
        return [i for b in self.blocks for i in b]

    def local_slices(self) -> List[slice]:
        """position of each block inside the joint sub-matrix"""
        out, start = [], 0
        for d in self.dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def reordered(self, order: Iterable[int]) -> "BlockPartition":
        order = list(order)
        return BlockPartition([self.blocks[i] for i in order], names=[self.names[i] for i in order])

    def sub_partition(self, which: Sequence[int]) -> "BlockPartition":
        return self.reordered(which)

    def blocks_within(self, other: "BlockPartition") -> bool:
        """every block here is, as a channel set, a block of `other`"""
        groups = {frozenset(b) for b in other.blocks}
        return all(frozenset(b) in groups for b in self.blocks)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BlockPartition) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={list(b)}" for n, b in zip(self.names, self.blocks))
        return f"BlockPartition({inner})"


class SpectralEnsemble:
    """Per-segment, per-frequency complex coefficients [segment][frequency][channel]."""

    def __init__(
        self,
        *,
        coeffs: np.ndarray,
        freq_indices: Sequence[int],
        norm_mode: NormMode = NormMode.raw,
        partition: Optional[BlockPartition] = None,
        n_samples: Optional[int] = None,
        sampling_rate: Optional[float] = None,
        channel_names: Optional[Sequence[str]] = None,
    ):
        coeffs = np.array(coeffs, dtype=np.complex128)
        if coeffs.ndim != 3:
            raise DimensionError(f"coefficients must be [segment][frequency][channel], got {coeffs.ndim} dims")
        freq_indices = [int(w) for w in freq_indices]
        if len(freq_indices) != coeffs.shape[1]:
            raise DimensionError(f"{len(freq_indices)} frequency labels for {coeffs.shape[1]} frequencies")
        if len(set(freq_indices)) != len(freq_indices):
            raise DimensionError("frequency labels must be distinct")
        if not np.all(np.isfinite(coeffs)):
            raise MalformedInputError("spectral coefficients contain NaN or Inf")
        norm_mode = NormMode(norm_mode)
        if norm_mode is NormMode.block:
            if partition is None:
                raise ConfigurationError("block-normalized ensembles need their partition")
            partition.validate_for(coeffs.shape[2])
        self.coeffs = _frozen(coeffs)
        self.freq_indices = freq_indices
        self.norm_mode = norm_mode
        self.partition = partition if norm_mode is NormMode.block else None
        self.n_samples = n_samples
        self.sampling_rate = sampling_rate
        self.channel_names = list(channel_names) if channel_names is not None else [
            f"ch_{i}" for i in range(coeffs.shape[2])
        ]
        self._check_normalization()

    def _check_normalization(self) -> None:
        if self.norm_mode is NormMode.channel:
            err = np.max(np.abs(np.abs(self.coeffs) - 1.0)) if self.coeffs.size else 0.0
            if err > UNIT_NORM_TOL:
                raise InternalConsistencyError(f"channel-normalized coefficients deviate from unit modulus by {err:.3e}")
        elif self.norm_mode is NormMode.block:
            for b, block in enumerate(self.partition.blocks):
                sq = np.sum(np.abs(self.coeffs[:, :, list(block)]) ** 2, axis=-1)
                err = np.max(np.abs(sq - 1.0)) if sq.size else 0.0
                if err > UNIT_NORM_TOL:
                    raise InternalConsistencyError(f"block {b} sub-vectors deviate from unit norm by {err:.3e}")

    @property
    def n_segments(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_freqs(self) -> int:
        return self.coeffs.shape[1]

    @property
    def n_channels(self) -> int:
        return self.coeffs.shape[2]

    def freq_position(self, omega: int) -> int:
        try:
            return self.freq_indices.index(int(omega))
        except ValueError:
            raise FrequencyRangeError(f"frequency {omega} is not retained in this ensemble")

    def derive(self, coeffs: np.ndarray, norm_mode: NormMode, partition: Optional[BlockPartition] = None) -> "SpectralEnsemble":
        return SpectralEnsemble(
            coeffs=coeffs,
            freq_indices=self.freq_indices,
            norm_mode=norm_mode,
            partition=partition,
            n_samples=self.n_samples,
            sampling_rate=self.sampling_rate,
            channel_names=self.channel_names,
        )

    def __repr__(self) -> str:
        return (
            f"SpectralEnsemble(n_segments={self.n_segments}, n_freqs={self.n_freqs}, "
            f"n_channels={self.n_channels}, norm_mode={self.norm_mode.value})"
        )


class FrequencyBand:
    """Named set of discrete frequencies, possibly disjoint."""

    def __init__(self, name: str, freq_indices: Iterable[int]):
        indices = [int(w) for w in freq_indices]
        if not indices:
            raise ConfigurationError(f"band {name!r} has no frequencies")
        if len(set(indices)) != len(indices):
            raise ConfigurationError(f"band {name!r} repeats a frequency")
        self.name = name
        self.freq_indices: Tuple[int, ...] = tuple(sorted(indices))

    def __len__(self) -> int:
        return len(self.freq_indices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FrequencyBand) and (self.name, self.freq_indices) == (other.name, other.freq_indices)

    def __hash__(self) -> int:
        return hash((self.name, self.freq_indices))

    def __repr__(self) -> str:
        return f"FrequencyBand({self.name!r}, {list(self.freq_indices)})"


Freq = Union[int, FrequencyBand]


def freq_label(freq: Freq) -> Union[int, str]:
    return freq.name if isinstance(freq, FrequencyBand) else int(freq)


class CrossSpectrum:
    """Joint Hermitian covariance over all channels at one frequency or one pooled band."""

    def __init__(
        self,
        *,
        matrix: np.ndarray,
        freq: Freq,
        n_segments: int,
        norm_mode: NormMode = NormMode.raw,
        partition: Optional[BlockPartition] = None,
    ):
        matrix = np.array(matrix, dtype=np.complex128)
        check_hermitian(matrix)
        matrix = hermitian_from_lower(matrix)
        diag = np.real(np.diag(matrix))
        if np.any(diag < 0):
            raise NumericalError(f"negative diagonal entry {diag.min():.3e} in cross-spectrum")
        norm_mode = NormMode(norm_mode)
        if norm_mode is NormMode.channel and diag.size and np.max(np.abs(diag - 1.0)) > UNIT_NORM_TOL:
            raise InternalConsistencyError("channel-normalized cross-spectrum must have a unit diagonal")
        if norm_mode is NormMode.block and partition is None:
            raise ConfigurationError("block-normalized cross-spectra need their partition")
        if n_segments < 1:
            raise DimensionError("n_segments must be >= 1")
        self.matrix = _frozen(matrix)
        self.freq = freq
        self.n_segments = int(n_segments)
        self.norm_mode = norm_mode
        self.partition = partition if norm_mode is NormMode.block else None

    @property
    def n_channels(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_pooled(self) -> int:
        """number of discrete frequencies averaged into this matrix"""
        return len(self.freq) if isinstance(self.freq, FrequencyBand) else 1

    def submatrix(self, indices: Sequence[int]) -> np.ndarray:
        idx = list(indices)
        return self.matrix[np.ix_(idx, idx)]

    def is_psd(self, tol: float = 1e-9) -> bool:
        m = self.n_channels
        eig = np.linalg.eigvalsh(self.matrix)
        trace = float(np.real(np.trace(self.matrix)))
        return bool(eig.min() >= -tol * trace / m)

    def __repr__(self) -> str:
        return f"CrossSpectrum(freq={freq_label(self.freq)!r}, n_channels={self.n_channels}, norm_mode={self.norm_mode.value})"
