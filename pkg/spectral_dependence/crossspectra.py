"""Hermitian covariance matrices over segments, and their pooling over bands."""
import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from spectral_dependence.exceptions import ConfigurationError, CoverageError, DimensionError
from spectral_dependence.models import CrossSpectrum, FrequencyBand, SpectralEnsemble, freq_label
from spectral_dependence.reports import CrossSpectrumRecord
from spectral_dependence.spectral import bin_frequencies
from spectral_dependence.utils import outer_products, pairwise_mean

logger = logging.getLogger(__name__)


def _spectrum(e: SpectralEnsemble, matrix: np.ndarray, freq) -> CrossSpectrum:
    return CrossSpectrum(
        matrix=matrix,
        freq=freq,
        n_segments=e.n_segments,
        norm_mode=e.norm_mode,
        partition=e.partition,
    )


def accumulate(e: SpectralEnsemble, omega: int) -> CrossSpectrum:
    """(1/N_R) sum_j v_jw v_jw^H over the full M-channel coefficient vectors."""
    pos = e.freq_position(omega)
    matrix = pairwise_mean(outer_products(e.coeffs[:, pos, :]), axis=0)
    return _spectrum(e, matrix, int(omega))


def accumulate_all(e: SpectralEnsemble) -> List[CrossSpectrum]:
    matrices = pairwise_mean(outer_products(e.coeffs), axis=0)
    return [_spectrum(e, matrices[f], w) for f, w in enumerate(e.freq_indices)]


def pool(spectra: Sequence[CrossSpectrum], band: FrequencyBand) -> CrossSpectrum:
    """Unweighted mean of per-frequency matrices that exactly cover the band."""
    if not spectra:
        raise CoverageError(f"nothing to pool for band {band.name!r}")
    first = spectra[0]
    for s in spectra[1:]:
        if s.n_channels != first.n_channels or s.n_segments != first.n_segments:
            raise DimensionError("pooled cross-spectra must share channel and segment counts")
        if s.norm_mode is not first.norm_mode or s.partition != first.partition:
            raise DimensionError("pooled cross-spectra must share one normalization mode")
    freqs = []
    for s in spectra:
        if isinstance(s.freq, FrequencyBand):
            raise CoverageError("only single-frequency cross-spectra can be pooled")
        freqs.append(int(s.freq))
    if len(set(freqs)) != len(freqs):
        raise CoverageError(f"duplicate frequencies in the pool for band {band.name!r}")
    missing = sorted(set(band.freq_indices) - set(freqs))
    if missing:
        raise CoverageError(f"band {band.name!r} is missing frequencies {missing}")
    extra = sorted(set(freqs) - set(band.freq_indices))
    if extra:
        raise CoverageError(f"frequencies {extra} do not belong to band {band.name!r}")
    logger.debug("pooling %d frequencies into band %r", len(spectra), band.name)
    matrix = pairwise_mean(np.stack([s.matrix for s in spectra]), axis=0)
    return CrossSpectrum(
        matrix=matrix,
        freq=band,
        n_segments=first.n_segments,
        norm_mode=first.norm_mode,
        partition=first.partition,
    )


def accumulate_band(e: SpectralEnsemble, band: FrequencyBand) -> CrossSpectrum:
    missing = [w for w in band.freq_indices if w not in e.freq_indices]
    if missing:
        raise CoverageError(f"band {band.name!r} frequencies {missing} are not retained")
    return pool([accumulate(e, w) for w in band.freq_indices], band)


def band_from_bins(name: str, bins: Iterable[int], retained: Sequence[int]) -> FrequencyBand:
    band = FrequencyBand(name, bins)
    missing = [w for w in band.freq_indices if w not in retained]
    if missing:
        raise CoverageError(f"band {name!r} frequencies {missing} are not retained")
    return band


def band_from_hz(
    name: str,
    low: float,
    high: float,
    *,
    n_t: int,
    sampling_rate: Optional[float],
    retained: Sequence[int],
) -> FrequencyBand:
    """bins {w : w * rate / N_T in [low, high]} among the retained ones"""
    if sampling_rate is None:
        raise ConfigurationError(f"band {name!r} is given in Hz but the sampling rate is unknown")
    hz = bin_frequencies(retained, n_t, sampling_rate)
    chosen = [w for w, f in zip(retained, hz) if low <= f <= high]
    if not chosen:
        raise ConfigurationError(f"band {name!r} ({low}-{high} Hz) contains no retained frequency")
    return FrequencyBand(name, chosen)


def coherency(s: CrossSpectrum) -> np.ndarray:
    d = np.sqrt(np.real(np.diag(s.matrix)))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = s.matrix / np.outer(d, d)
    return np.where(np.outer(d, d) > 0, out, 0)


def to_record(s: CrossSpectrum) -> CrossSpectrumRecord:
    return CrossSpectrumRecord(
        freq=freq_label(s.freq),
        n_segments=s.n_segments,
        norm_mode=s.norm_mode.value,
        matrix_re=np.real(s.matrix).tolist(),
        matrix_im=np.imag(s.matrix).tolist(),
    )
