import numpy as np
import pytest
from pydantic import ValidationError

from spectral_dependence import inference, measures
from spectral_dependence.config import SimulationConfig
from spectral_dependence.crossspectra import accumulate, accumulate_all
from spectral_dependence.exceptions import ConfigurationError, FrequencyRangeError, SingularityRiskError
from spectral_dependence.models import BlockPartition, SegmentSet
from spectral_dependence.params import Measure, Scale, Scenario
from spectral_dependence.simulate import (
    lagged_coupling,
    parseval_oracle,
    run_simulation,
    volume_conduction,
    white_noise,
)
from spectral_dependence.spectral import dft

MIXING = dict(mixing_C=[[1.0], [0.6]], mixing_D=[[0.8], [-0.5]])


class TestGenerators:
    def test_seeded_streams_repeat(self):
        a = white_noise(4, 16, 2, seed=99)
        b = white_noise(4, 16, 2, seed=99)
        c = white_noise(4, 16, 2, seed=100)
        np.testing.assert_array_equal(a.data, b.data)
        assert not np.array_equal(a.data, c.data)

    def test_standard_normal_moments(self):
        x = white_noise(1000, 1000, 1, seed=3).data
        assert abs(x.mean()) < 5e-3
        assert x.std() == pytest.approx(1.0, abs=5e-3)

    def test_volume_conduction_layout(self):
        cfg = SimulationConfig(
            n_segments=10, n_samples=16, mixing_C=[[1, 0.5], [0.2, 1], [1, 1]], mixing_D=[[0.3, 1]], seed=7
        )
        s, partition = volume_conduction(cfg)
        assert s.data.shape == (10, 16, 4)
        assert s.channel_names == ["x0", "x1", "x2", "y0"]
        assert partition.dims == [3, 1]
        assert partition.names == ("X", "Y")
        s2, _ = volume_conduction(cfg)
        np.testing.assert_array_equal(s.data, s2.data)

    def test_zero_noise_needs_acknowledgement(self):
        cfg = SimulationConfig(n_segments=4, n_samples=16, noise_sd=0.0, **MIXING)
        with pytest.raises(SingularityRiskError):
            volume_conduction(cfg)
        s, _ = volume_conduction(cfg.copy(update={"allow_zero_noise": True}))
        # X and Y are exact multiples of the single source
        np.testing.assert_allclose(s.data[:, :, 1], 0.6 * s.data[:, :, 0])

    def test_zero_noise_is_a_configuration_error(self):
        assert issubclass(SingularityRiskError, ConfigurationError)

    def test_delayed_copy(self):
        s = lagged_coupling(2, 16, 3, 2.0, 0.0, seed=1)
        x, y = s.data[:, :, 0], s.data[:, :, 1]
        np.testing.assert_array_equal(y[:, 3:], 2.0 * x[:, :-3])
        np.testing.assert_array_equal(y[:, :3], 0.0)
        assert s.channel_names == ["x", "y"]

    @pytest.mark.parametrize("lag", [0, 16])
    def test_lag_range(self, lag):
        with pytest.raises(ConfigurationError):
            lagged_coupling(2, 16, lag, 1.0, 1.0, seed=1)

    def test_uncoupled_is_allowed(self):
        s = lagged_coupling(2, 16, 1, 0.0, 1.0, seed=1)
        assert s.data.shape == (2, 16, 2)

    def test_run_simulation_dispatch(self):
        s, partition = run_simulation(SimulationConfig(scenario=Scenario.lagged_coupling, n_segments=3, n_samples=8, lag=2))
        assert partition.names == ("x", "y")
        s, partition = run_simulation(SimulationConfig(scenario=Scenario.white_noise, n_segments=3, n_samples=8, n_channels=4))
        assert s.n_channels == 4
        assert partition.k == 4

    def test_ar_pair_sources(self):
        cfg = SimulationConfig(
            n_segments=3, n_samples=8, source_spec="ar-pair", coupling=0.9, lag=2,
            mixing_C=[[1.0, 0.0]], mixing_D=[[0.0, 1.0]], noise_sd=0.0, allow_zero_noise=True,
        )
        s, _ = volume_conduction(cfg)
        assert s.data.shape == (3, 8, 2)


class TestSimulationConfig:
    def test_source_columns_must_match(self):
        with pytest.raises(ValidationError):
            SimulationConfig(mixing_C=[[1.0, 0.0]], mixing_D=[[1.0]])

    def test_ragged_mixing(self):
        with pytest.raises(ValidationError):
            SimulationConfig(mixing_C=[[1.0, 0.0], [1.0]], mixing_D=[[1.0, 0.0]])

    def test_ar_pair_needs_two_sources(self):
        with pytest.raises(ValidationError):
            SimulationConfig(source_spec="ar-pair")

    def test_lag_below_segment_length(self):
        with pytest.raises(ValidationError):
            SimulationConfig(n_samples=8, lag=8)

    def test_negative_noise(self):
        with pytest.raises(ValidationError):
            SimulationConfig(noise_sd=-1.0)

    def test_unknown_keys(self):
        with pytest.raises(ValidationError):
            SimulationConfig(mixing=[[1.0]])


class TestZeroLagOracle:
    def test_cosine(self):
        t = np.arange(32)
        s = SegmentSet(data=np.cos(2 * np.pi * 5 * t / 32)[None, :, None])
        check = parseval_oracle(s, 5)
        assert check.lhs[0, 0] == pytest.approx(256.0)
        assert check.A[0, 0] == pytest.approx(0.5)
        assert check.max_rel_err < 1e-12

    def test_zeros(self):
        check = parseval_oracle(SegmentSet(data=np.zeros((2, 16, 2))), 3)
        assert check.max_rel_err == 0.0

    @pytest.mark.parametrize("omega", [0, 16, 20])
    def test_interior_bins_only(self, omega):
        with pytest.raises(FrequencyRangeError):
            parseval_oracle(SegmentSet(data=np.ones((2, 32, 1))), omega)

    @pytest.mark.parametrize("partition", [None, BlockPartition([[0, 1], [2]])])
    def test_random_data(self, segments, partition):
        s = segments(n_segments=8, n_samples=64, n_channels=3)
        for omega in (1, 7, 31):
            assert parseval_oracle(s, omega, partition).max_rel_err < 1e-8


class TestControls:
    @pytest.mark.slow
    def test_delayed_copy_is_lagged(self, pair):
        n_segments, n_samples = 200, 128
        detected = 0
        for replicate in range(100):
            e = dft(lagged_coupling(n_segments, n_samples, 3, 1.0, 0.1, seed=1000 + replicate))
            spectra = accumulate_all(e)
            significant = 0
            for s in spectra:
                results = inference.test_report(
                    measures.linear_dependence(s, pair), n_samples, n_segments, Scale.calibrated
                )
                significant += results[Measure.lagged].p_value < 0.001
            detected += significant > len(spectra) / 2
        assert detected >= 95

    def test_half_turn_is_instantaneous(self, pair):
        # a lag of 2 samples rotates bin 32 of 128 by exactly pi
        e = dft(lagged_coupling(200, 128, 2, 1.0, 0.1, seed=12))
        at_pi = measures.linear_dependence(accumulate(e, 32), pair)
        at_quarter = measures.linear_dependence(accumulate(e, 16), pair)
        assert at_pi.rho2.total > 0.9
        assert at_pi.rho2.lagged < 0.05
        assert at_quarter.rho2.lagged > 0.5


@pytest.mark.slow
@pytest.mark.parametrize("gain", [1.0, 2.0])
def test_volume_conduction_is_instantaneous(gain):
    n_segments, n_samples = 200, 128
    partition = BlockPartition([[0], [1]], names=["X", "Y"])
    lagged_hits = inst_hits = total = 0
    for replicate in range(500):
        cfg = SimulationConfig(
            n_segments=n_segments, n_samples=n_samples,
            mixing_C=[[gain]], mixing_D=[[gain]], seed=500 + replicate,
        )
        s, _ = volume_conduction(cfg)
        for spectrum in accumulate_all(dft(s)):
            if spectrum.freq == n_samples // 2:
                continue
            results = inference.test_report(
                measures.linear_dependence(spectrum, partition), n_samples, n_segments, Scale.calibrated
            )
            lagged_hits += results[Measure.lagged].p_value < 0.05
            inst_hits += results[Measure.instantaneous].p_value < 0.05
            total += 1
    assert 0.02 <= lagged_hits / total <= 0.09
    assert inst_hits / total > 0.95
