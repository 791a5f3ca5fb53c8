import csv
import json
import math

import numpy as np
import pytest

from spectral_dependence import measures
from spectral_dependence.config import AnalysisConfig, BandSpec
from spectral_dependence.crossspectra import accumulate
from spectral_dependence.exceptions import ConfigurationError
from spectral_dependence.ingest import write_segments
from spectral_dependence.models import BlockPartition, SegmentSet
from spectral_dependence.params import Analysis, Flag, MeasureKind, NormMode, Scale, Scope
from spectral_dependence.pipeline import Analyzer, prepare_segments, run_analysis, write_outputs
from spectral_dependence.spectral import dft

THREE = BlockPartition([[0], [1, 2], [3]], names=["a", "b", "c"])


@pytest.fixture
def recording(segments):
    return segments(n_segments=20, n_samples=16, n_channels=4, sampling_rate=64.0)


class TestAnalyzer:
    def test_every_frequency_and_pair(self, recording):
        result = Analyzer(recording, THREE).run()
        assert [e.freq for e in result.frequencies] == list(range(1, 9))
        assert len(result.tests) == 8
        assert len(result.pairs) == 8 * 3
        assert [(p.block_a, p.block_b) for p in result.pairs[:3]] == [("a", "b"), ("a", "c"), ("b", "c")]
        entry = result.frequencies[2]
        assert entry.reports[0].scope is Scope.k_block
        assert entry.legacy == []
        assert entry.hz == [12.0, 12.0]

    def test_matches_direct_computation(self, recording):
        result = Analyzer(recording, THREE).run()
        direct = measures.linear_dependence(accumulate(dft(recording), 5), THREE)
        assert result.frequencies[4].reports[0] == direct

    def test_band(self, recording):
        result = Analyzer(recording, THREE, bands=[BandSpec("low", bins=(1, 2, 3))]).run()
        band = result.bands[0]
        assert band.freq == "low"
        assert band.n_pooled == 3
        assert band.hz == [4.0, 12.0]
        assert result.tests[-1].n_effective == 60
        assert result.tests[0].n_effective == 20

    def test_hz_band(self, recording):
        result = Analyzer(recording, THREE, bands=[BandSpec("theta", hz=(6.0, 14.0))]).run()
        assert result.bands[0].n_pooled == 2

    def test_worker_count_does_not_change_results(self, recording):
        kw = dict(requested=[Analysis.linear, Analysis.all_univariate], bands=[BandSpec("all", bins=(1, 8))])
        one = Analyzer(recording, THREE, **kw).run(1)
        four = Analyzer(recording, THREE, **kw).run(4)
        assert [e.json() for e in one.frequencies + one.bands] == [e.json() for e in four.frequencies + four.bands]
        assert [g.json() for g in one.tests] == [g.json() for g in four.tests]

    def test_all_families(self, segments, pair):
        s = segments(n_segments=20, n_samples=16, n_channels=2)
        result = Analyzer(
            s,
            pair,
            requested=[Analysis.linear, Analysis.nonlinear, Analysis.all_univariate],
            norms=[NormMode.block, NormMode.channel],
            keep_spectra=True,
        ).run()
        entry = result.frequencies[0]
        assert [(r.kind, r.scope) for r in entry.reports] == [
            (MeasureKind.linear, Scope.two_block),
            (MeasureKind.linear, Scope.all_univariate),
            (MeasureKind.nonlinear, Scope.two_block),
            (MeasureKind.nonlinear, Scope.all_univariate),
        ]
        assert [r.kind for r in entry.legacy] == [MeasureKind.linear, MeasureKind.nonlinear]
        # singleton blocks: block and channel normalization coincide
        assert entry.reports[2].total == pytest.approx(entry.reports[3].total, abs=1e-12)
        assert len(result.spectra) == 8 * 3
        assert {p.kind for p in result.pairs} == {MeasureKind.linear, MeasureKind.nonlinear}

    def test_one_block_is_not_enough(self, recording):
        with pytest.raises(ConfigurationError):
            Analyzer(recording, BlockPartition([[0, 1, 2, 3]]))

    def test_unused_normalization_is_ignored(self, recording):
        analyzer = Analyzer(
            recording, BlockPartition([[0, 1, 2, 3]]), requested=[Analysis.all_univariate], norms=[NormMode.block]
        )
        assert analyzer.block is None
        assert len(analyzer.run().tests) == 8


class TestOutputs:
    def test_files(self, recording, tmp_path):
        result = Analyzer(recording, THREE, scale=Scale.literal_nt).run()
        written = write_outputs(result, tmp_path, s=recording, partition=THREE, scale=Scale.literal_nt)
        assert set(written) == {"reports", "tests", "connectivity"}
        reports = json.loads((tmp_path / "reports.json").read_text())
        assert reports["partition"] == {"a": [0], "b": [1, 2], "c": [3]}
        assert len(reports["frequencies"]) == 8
        tests = json.loads((tmp_path / "tests.json").read_text())
        assert tests["scale"] == "paper-NT"
        assert tests["tests"][0]["results"][0]["scale_value"] == 16.0
        with open(tmp_path / "connectivity.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 24
        assert rows[0]["block_a"] == "a" and rows[0]["kind"] == "linear"
        assert float(rows[0]["rho2_total"]) == result.pairs[0].report.rho2.total
        assert not (tmp_path / "spectra.json").exists()

    def test_spectra_dump(self, recording, tmp_path):
        result = Analyzer(recording, THREE, keep_spectra=True).run()
        write_outputs(result, tmp_path, s=recording, partition=THREE, scale=Scale.calibrated, dump_spectra=True)
        spectra = json.loads((tmp_path / "spectra.json").read_text())
        assert len(spectra) == 8
        assert spectra[0]["norm_mode"] == "raw"


class TestRunAnalysis:
    def test_from_file(self, recording, tmp_path):
        write_segments(recording, tmp_path / "rec.bin")
        cfg = AnalysisConfig(
            input=tmp_path / "rec.bin", out=tmp_path / "out", partition="X=0,1;Y=2,3",
            sampling_rate=64.0, scale="calibrated-2NRm1", detrend="none",
        )
        result = run_analysis(cfg)
        assert (tmp_path / "out" / "connectivity.csv").exists()
        direct = measures.linear_dependence(
            accumulate(dft(recording), 3), BlockPartition([[0, 1], [2, 3]], names=["X", "Y"])
        )
        assert result.frequencies[2].reports[0].total == pytest.approx(direct.total, abs=1e-12)

    def test_continuous_recording_is_segmented(self, rng, tmp_path):
        write_segments(SegmentSet(data=rng.standard_normal((1, 100, 2))), tmp_path / "long.bin")
        cfg = AnalysisConfig(input=tmp_path / "long.bin", out=tmp_path, segment_length=20, overlap=0.5)
        s = prepare_segments(cfg)
        assert (s.n_segments, s.n_samples) == (9, 20)
        np.testing.assert_allclose(s.data.mean(axis=1), 0.0, atol=1e-12)

    def test_segment_length_needs_a_continuous_recording(self, recording, tmp_path):
        write_segments(recording, tmp_path / "rec.bin")
        cfg = AnalysisConfig(input=tmp_path / "rec.bin", out=tmp_path, segment_length=8)
        with pytest.raises(ConfigurationError):
            prepare_segments(cfg)


def _reject_constant(name):
    raise ValueError(f"{name} is not standard JSON")


class TestDegenerateRecordings:
    def test_single_segment_with_ridge(self, rng, pair):
        s = SegmentSet(data=rng.standard_normal((1, 16, 2)))
        result = Analyzer(s, pair, ridge=0.1, scale=Scale.segments_nr).run()
        entry = result.frequencies[0]
        assert Flag.ridge in entry.reports[0].flags
        assert Flag.ridge in entry.legacy[0].flags
        assert 0.0 <= entry.legacy[0].rho2_G <= 1.0
        assert len(result.tests) == 8

    def test_copied_channel_is_perfect_dependence(self, rng, pair):
        x = rng.standard_normal((8, 16, 1))
        s = SegmentSet(data=np.concatenate([x, 2.0 * x], axis=2))
        result = Analyzer(s, pair, scale=Scale.segments_nr).run()
        entry = result.frequencies[0]
        assert math.isinf(entry.reports[0].total)
        assert Flag.perfect_dependence in entry.reports[0].flags
        legacy = entry.legacy[0]
        assert legacy.rho2_G == 1.0
        assert math.isnan(legacy.rho2_GL)
        assert Flag.perfect_dependence in legacy.flags
        assert result.tests[0].results[0].p_value == 0.0

    def test_outputs_stay_strict_json(self, rng, tmp_path):
        x = rng.standard_normal((8, 16, 2))
        s = SegmentSet(data=np.concatenate([x, 2.0 * x[:, :, :1]], axis=2))
        partition = BlockPartition([[0], [1], [2]], names=["a", "b", "c"])
        result = Analyzer(s, partition, scale=Scale.segments_nr).run()
        write_outputs(result, tmp_path, s=s, partition=partition, scale=Scale.segments_nr)
        reports = json.loads((tmp_path / "reports.json").read_text(), parse_constant=_reject_constant)
        tests = json.loads((tmp_path / "tests.json").read_text(), parse_constant=_reject_constant)
        report = reports["frequencies"][0]["reports"][0]
        assert report["total"] == "inf"
        assert report["lagged"] == "nan"
        assert tests["tests"][0]["results"][0]["statistic"] == "inf"
        with open(tmp_path / "connectivity.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["total"] for r in rows if (r["block_a"], r["block_b"]) == ("a", "c")][0] == "inf"

    def test_floats_carry_seventeen_digits(self, recording, tmp_path):
        result = Analyzer(recording, THREE).run()
        write_outputs(result, tmp_path, s=recording, partition=THREE, scale=Scale.calibrated)
        text = (tmp_path / "reports.json").read_text()
        reports = json.loads(text)
        total = result.frequencies[0].reports[0].total
        assert reports["frequencies"][0]["reports"][0]["total"] == total
        assert f'"total": {format(total, ".17g")}' in text

    def test_silent_channel_outside_partition(self, rng, pair):
        data = np.concatenate([rng.standard_normal((10, 16, 2)), np.zeros((10, 16, 1))], axis=2)
        result = Analyzer(
            SegmentSet(data=data),
            pair,
            requested=[Analysis.nonlinear],
            norms=[NormMode.channel],
            keep_spectra=True,
        ).run()
        report = result.frequencies[0].reports[0]
        assert (report.kind, report.scope) == (MeasureKind.nonlinear, Scope.all_univariate)
        assert list(report.block_names) == ["ch_0", "ch_1"]
        assert len(result.spectra[1].matrix_re) == 2
