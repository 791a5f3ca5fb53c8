__version__ = "1.0"

from spectral_dependence.crossspectra import accumulate, accumulate_all, accumulate_band, pool
from spectral_dependence.inference import chi_square_sf, degrees_of_freedom, test_dependence, test_report
from spectral_dependence.ingest import detrend, load_segments, segment, taper, write_segments
from spectral_dependence.measures import (
    all_univariate_linear,
    all_univariate_nonlinear,
    legacy_2007a,
    linear_dependence,
    logdet_psd,
    nonlinear_dependence,
)
from spectral_dependence.models import BlockPartition, CrossSpectrum, FrequencyBand, SegmentSet, SpectralEnsemble
from spectral_dependence.simulate import lagged_coupling, parseval_oracle, volume_conduction, white_noise
from spectral_dependence.spectral import dft, normalize_block, normalize_channel

__all__ = [
    "SegmentSet",
    "BlockPartition",
    "SpectralEnsemble",
    "FrequencyBand",
    "CrossSpectrum",
    "load_segments",
    "write_segments",
    "segment",
    "detrend",
    "taper",
    "dft",
    "normalize_block",
    "normalize_channel",
    "accumulate",
    "accumulate_all",
    "accumulate_band",
    "pool",
    "logdet_psd",
    "linear_dependence",
    "nonlinear_dependence",
    "all_univariate_linear",
    "all_univariate_nonlinear",
    "legacy_2007a",
    "degrees_of_freedom",
    "chi_square_sf",
    "test_dependence",
    "test_report",
    "white_noise",
    "volume_conduction",
    "lagged_coupling",
    "parseval_oracle",
]
