import numpy as np
import pytest

from spectral_dependence.models import BlockPartition, CrossSpectrum, SegmentSet
from spectral_dependence.params import NormMode
from spectral_dependence.simulate import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def pair():
    return BlockPartition([[0], [1]], names=["x", "y"])


@pytest.fixture
def make_spectrum():
    def make(matrix, norm_mode=NormMode.raw, partition=None, freq=1, n_segments=64):
        return CrossSpectrum(
            matrix=np.asarray(matrix, dtype=np.complex128),
            freq=freq,
            n_segments=n_segments,
            norm_mode=norm_mode,
            partition=partition,
        )
    return make


@pytest.fixture
def random_psd(rng):
    """complex Wishart-like matrix with a common component, well conditioned"""
    def make(m, n=None):
        n = n or 3 * m
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        shared = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        a[:, :2] += shared[:, None]
        return a @ a.conj().T / n
    return make


@pytest.fixture
def segments(rng):
    def make(n_segments=16, n_samples=32, n_channels=3, **kw):
        return SegmentSet(data=rng.standard_normal((n_segments, n_samples, n_channels)), **kw)
    return make
