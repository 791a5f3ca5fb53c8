import numpy as np
import pytest

from spectral_dependence.crossspectra import (
    accumulate,
    accumulate_all,
    accumulate_band,
    band_from_bins,
    band_from_hz,
    coherency,
    pool,
)
from spectral_dependence.exceptions import ConfigurationError, CoverageError, NotHermitianError
from spectral_dependence.models import CrossSpectrum, FrequencyBand
from spectral_dependence.spectral import dft


@pytest.fixture
def ensemble(segments):
    return dft(segments(n_segments=12, n_samples=16, n_channels=3))


class TestAccumulate:
    def test_mean_of_outer_products(self, ensemble):
        s = accumulate(ensemble, 3)
        v = ensemble.coeffs[:, ensemble.freq_position(3), :]
        expected = sum(np.outer(x, x.conj()) for x in v) / len(v)
        np.testing.assert_allclose(s.matrix, expected, rtol=1e-12, atol=1e-12)
        assert s.n_segments == 12

    def test_hermitian_and_psd(self, ensemble):
        s = accumulate(ensemble, 5)
        np.testing.assert_array_equal(s.matrix, s.matrix.conj().T)
        assert s.is_psd()

    def test_segment_order_does_not_matter(self, ensemble, rng):
        shuffled = ensemble.derive(ensemble.coeffs[rng.permutation(ensemble.n_segments)], ensemble.norm_mode)
        np.testing.assert_allclose(accumulate(shuffled, 4).matrix, accumulate(ensemble, 4).matrix, atol=1e-12)

    def test_all_frequencies_at_once(self, ensemble):
        spectra = accumulate_all(ensemble)
        assert [s.freq for s in spectra] == ensemble.freq_indices
        np.testing.assert_allclose(spectra[2].matrix, accumulate(ensemble, 3).matrix, rtol=1e-12)

    def test_non_hermitian_matrix_rejected(self):
        with pytest.raises(NotHermitianError):
            CrossSpectrum(matrix=np.array([[1.0, 0.5], [0.1, 1.0]]), freq=1, n_segments=4)


class TestPool:
    def test_unweighted_mean(self, ensemble):
        band = FrequencyBand("b", [2, 3, 4])
        pooled = pool([accumulate(ensemble, w) for w in (2, 3, 4)], band)
        expected = np.mean([accumulate(ensemble, w).matrix for w in (2, 3, 4)], axis=0)
        np.testing.assert_allclose(pooled.matrix, expected, rtol=1e-12)
        assert pooled.freq == band
        assert pooled.n_pooled == 3

    def test_band_is_mean_over_all_segment_frequency_pairs(self, ensemble):
        band = FrequencyBand("b", [2, 5, 7])
        positions = [ensemble.freq_position(w) for w in band.freq_indices]
        vectors = ensemble.coeffs[:, positions, :].reshape(-1, ensemble.n_channels)
        expected = sum(np.outer(v, v.conj()) for v in vectors) / len(vectors)
        pooled = accumulate_band(ensemble, band)
        np.testing.assert_allclose(pooled.matrix, expected, atol=1e-12)
        eig = np.linalg.eigvalsh(pooled.matrix)
        assert eig.min() >= -1e-12 * eig.max()

    def test_accumulate_band_matches_pool(self, ensemble):
        band = FrequencyBand("b", [1, 6])
        a = accumulate_band(ensemble, band)
        b = pool([accumulate(ensemble, 1), accumulate(ensemble, 6)], band)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_missing_member(self, ensemble):
        with pytest.raises(CoverageError):
            pool([accumulate(ensemble, 2)], FrequencyBand("b", [2, 3]))

    def test_extra_member(self, ensemble):
        with pytest.raises(CoverageError):
            pool([accumulate(ensemble, w) for w in (2, 3, 4)], FrequencyBand("b", [2, 3]))

    def test_duplicate_member(self, ensemble):
        with pytest.raises(CoverageError):
            pool([accumulate(ensemble, 2), accumulate(ensemble, 2)], FrequencyBand("b", [2]))


class TestBands:
    def test_hz_range_resolves_to_bins(self):
        band = band_from_hz("mid", 2.0, 3.0, n_t=8, sampling_rate=8.0, retained=[1, 2, 3, 4])
        assert band.freq_indices == (2, 3)

    def test_hz_range_needs_rate(self):
        with pytest.raises(ConfigurationError):
            band_from_hz("mid", 2.0, 3.0, n_t=8, sampling_rate=None, retained=[1, 2, 3, 4])

    def test_empty_hz_range(self):
        with pytest.raises(ConfigurationError):
            band_from_hz("none", 2.2, 2.8, n_t=8, sampling_rate=8.0, retained=[1, 2, 3, 4])

    def test_bins_must_be_retained(self):
        with pytest.raises(CoverageError):
            band_from_bins("b", [0, 1], retained=[1, 2, 3])


def test_coherency_has_unit_diagonal(ensemble):
    c = coherency(accumulate(ensemble, 4))
    np.testing.assert_allclose(np.diag(c), 1.0, atol=1e-12)
    assert np.all(np.abs(c) <= 1.0 + 1e-12)
