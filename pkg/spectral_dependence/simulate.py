"""Seeded generators for null, confound and positive-control data, and the zero-lag covariance oracle."""
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import fft as sp_fft

from spectral_dependence.config import SimulationConfig
from spectral_dependence.exceptions import ConfigurationError, FrequencyRangeError, SingularityRiskError
from spectral_dependence.models import BlockPartition, SegmentSet, SpectralEnsemble
from spectral_dependence.params import Scenario, SourceSpec
from spectral_dependence.spectral import normalize_block
from spectral_dependence.utils import outer_products, pairwise_mean

logger = logging.getLogger(__name__)

# Philox4x64-10 counter-based bit generator, numpy's implementation
PRNG_NAME = "numpy.random.Philox-4x64-10"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _delay(x: np.ndarray, lag: int) -> np.ndarray:
    """shift along time (axis 1) by `lag`, zero-padding the head of every segment"""
    out = np.zeros_like(x)
    out[:, lag:] = x[:, :-lag]
    return out


def white_noise(
    n_segments: int,
    n_samples: int,
    n_channels: int,
    seed: int,
    *,
    sampling_rate: Optional[float] = None,
) -> SegmentSet:
    rng = make_rng(seed)
    return SegmentSet(
        data=rng.standard_normal((n_segments, n_samples, n_channels)),
        sampling_rate=sampling_rate,
    )


def _guard_noise(noise_sd: float, acknowledged: bool) -> None:
    if noise_sd < 0:
        raise ConfigurationError(f"noise_sd must be >= 0, got {noise_sd}")
    if noise_sd == 0 and not acknowledged:
        raise SingularityRiskError(
            "noise_sd = 0 makes the joint cross-spectrum singular; set allow_zero_noise to proceed"
        )


def _sources(cfg: SimulationConfig, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((cfg.n_segments, cfg.n_samples, cfg.n_sources))
    if cfg.source_spec is SourceSpec.ar_pair:
        # z2_t = coupling * z1_{t-lag} + innovation
        z[:, :, 1] = cfg.coupling * _delay(z[:, :, 0], cfg.lag) + z[:, :, 1]
    return z


def volume_conduction(cfg: SimulationConfig) -> Tuple[SegmentSet, BlockPartition]:
    """X = C Z + noise, Y = D Z + noise; X and Y share only the sources Z.

    With white sources the only X-Y relation is instantaneous mixing.
    """
    _guard_noise(cfg.noise_sd, cfg.allow_zero_noise)
    c = np.asarray(cfg.mixing_C, dtype=np.float64)
    d = np.asarray(cfg.mixing_D, dtype=np.float64)
    p, q = c.shape[0], d.shape[0]
    rng = make_rng(cfg.seed)
    z = _sources(cfg, rng)
    x = z @ c.T + cfg.noise_sd * rng.standard_normal((cfg.n_segments, cfg.n_samples, p))
    y = z @ d.T + cfg.noise_sd * rng.standard_normal((cfg.n_segments, cfg.n_samples, q))
    names = [f"x{i}" for i in range(p)] + [f"y{i}" for i in range(q)]
    s = SegmentSet(data=np.concatenate([x, y], axis=2), sampling_rate=cfg.sampling_rate, channel_names=names)
    partition = BlockPartition([range(p), range(p, p + q)], names=["X", "Y"], n_channels=p + q)
    return s, partition


def lagged_coupling(
    n_segments: int,
    n_samples: int,
    lag: int,
    coupling: float,
    noise_sd: float,
    seed: int,
    *,
    sampling_rate: Optional[float] = None,
) -> SegmentSet:
    """channel 1 white; channel 2 = coupling * channel 1 delayed by `lag` + noise"""
    if not 1 <= lag < n_samples:
        raise ConfigurationError(f"lag must lie in 1..{n_samples - 1}, got {lag}")
    if noise_sd < 0:
        raise ConfigurationError(f"noise_sd must be >= 0, got {noise_sd}")
    rng = make_rng(seed)
    x = rng.standard_normal((n_segments, n_samples))
    y = coupling * _delay(x, lag) + noise_sd * rng.standard_normal((n_segments, n_samples))
    return SegmentSet(data=np.stack([x, y], axis=2), sampling_rate=sampling_rate, channel_names=["x", "y"])


def run_simulation(cfg: SimulationConfig) -> Tuple[SegmentSet, BlockPartition]:
    logger.info("simulating %s with seed %d (%s)", cfg.scenario.value, cfg.seed, PRNG_NAME)
    if cfg.scenario is Scenario.volume_conduction:
        return volume_conduction(cfg)
    if cfg.scenario is Scenario.lagged_coupling:
        s = lagged_coupling(
            cfg.n_segments, cfg.n_samples, cfg.lag, cfg.coupling, cfg.noise_sd, cfg.seed,
            sampling_rate=cfg.sampling_rate,
        )
        return s, BlockPartition([[0], [1]], names=["x", "y"])
    s = white_noise(cfg.n_segments, cfg.n_samples, cfg.n_channels, cfg.seed, sampling_rate=cfg.sampling_rate)
    return s, BlockPartition([[i] for i in range(cfg.n_channels)], names=s.channel_names)


class ParsevalCheck(NamedTuple):
    A: np.ndarray
    lhs: np.ndarray
    max_rel_err: float


def parseval_oracle(s: SegmentSet, omega: int, partition: Optional[BlockPartition] = None) -> ParsevalCheck:
    """Compare Re S at bin omega with (N_T^2 / 2) A, where A is the zero-lag
    covariance of the data filtered to that single bin.

    With a partition the bin's coefficients are block-normalized first and the
    filtered series are rebuilt from the normalized coefficients.
    """
    n_t, n_r = s.n_samples, s.n_segments
    if not 1 <= omega <= n_t // 2 - 1:
        raise FrequencyRangeError(f"frequency {omega} is not an interior bin of 1..{n_t // 2 - 1}")
    v = sp_fft.fft(s.data, axis=1)[:, omega, :]
    if partition is not None:
        e = SpectralEnsemble(coeffs=v[:, None, :], freq_indices=[omega], n_samples=n_t)
        v = normalize_block(e, partition).coeffs[:, 0, :]
    kept = np.zeros((n_r, n_t, s.n_channels), dtype=np.complex128)
    kept[:, omega, :] = v
    kept[:, n_t - omega, :] = np.conj(v)
    filtered = np.real(sp_fft.ifft(kept, axis=1))
    a = np.einsum("jtm,jtn->mn", filtered, filtered) / (n_t * n_r)
    lhs = np.real(pairwise_mean(outer_products(v), axis=0))
    rhs = (n_t ** 2 / 2.0) * a
    scale = float(np.max(np.abs(lhs)))
    diff = float(np.max(np.abs(lhs - rhs)))
    return ParsevalCheck(A=a, lhs=lhs, max_rel_err=diff / scale if scale > 0 else diff)
