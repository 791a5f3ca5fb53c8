import json
import logging

import pytest
from pydantic import ValidationError

from spectral_dependence.config import (
    AnalysisConfig,
    BandSpec,
    build_analysis_config,
    load_simulation_config,
    parse_band_spec,
    parse_partition_spec,
    read_config_file,
    resolve_partition,
)
from spectral_dependence.exceptions import ConfigurationError, ConfigValidationError
from spectral_dependence.params import Analysis, NormMode, Scale, Scenario

CHANNELS = ["Fz", "Cz", "Pz", "Oz"]


class TestPartitionSpec:
    def test_parse(self):
        assert parse_partition_spec("X=0,1;Y=Fz|2") == [("X", ["0", "1"]), ("Y", ["Fz", "2"])]

    def test_names_and_indices(self):
        partition = resolve_partition("front=Fz,Cz;back=2|Oz", CHANNELS)
        assert partition.names == ("front", "back")
        assert partition.dims == [2, 2]
        assert list(partition.blocks[1]) == [2, 3]

    def test_default_is_one_block_per_channel(self):
        partition = resolve_partition(None, CHANNELS)
        assert partition.k == 4
        assert list(partition.names) == CHANNELS

    @pytest.mark.parametrize("text", ["X=Fz;Y=T7", "X=Fz,Cz;Y=Cz", "X=", "X=0;Y=9", "nonsense"])
    def test_rejected(self, text):
        with pytest.raises(ConfigurationError):
            resolve_partition(text, CHANNELS)


class TestBandSpec:
    def test_bins_and_hz(self):
        assert parse_band_spec("low=1:3;mid=5,7;alpha=8-12Hz") == [
            BandSpec("low", bins=(1, 2, 3)),
            BandSpec("mid", bins=(5, 7)),
            BandSpec("alpha", hz=(8.0, 12.0)),
        ]

    @pytest.mark.parametrize("text", ["a=1;a=2", "a=12-8Hz", "a=x:y", "a=8Hz"])
    def test_rejected(self, text):
        with pytest.raises(ConfigurationError):
            parse_band_spec(text)


class TestAnalysisConfig:
    def test_defaults(self, tmp_path):
        cfg = AnalysisConfig(input=tmp_path / "x.bin", out=tmp_path)
        assert cfg.measures == [Analysis.linear]
        assert cfg.norm == []
        assert cfg.band_specs == []

    def test_comma_lists(self, tmp_path):
        cfg = AnalysisConfig(input="x.bin", out=tmp_path, measures="linear,nonlinear,linear", norm="block, channel")
        assert cfg.measures == [Analysis.linear, Analysis.nonlinear]
        assert cfg.norm == [NormMode.block, NormMode.channel]

    def test_nonlinear_needs_a_normalization(self, tmp_path):
        with pytest.raises(ValidationError):
            AnalysisConfig(input="x.bin", out=tmp_path, measures="nonlinear")

    def test_raw_is_not_a_normalization(self, tmp_path):
        with pytest.raises(ValidationError):
            AnalysisConfig(input="x.bin", out=tmp_path, measures="nonlinear", norm="raw")

    def test_hz_bands_need_a_rate(self, tmp_path):
        with pytest.raises(ValidationError):
            AnalysisConfig(input="x.bin", out=tmp_path, bands="alpha=8-12Hz")
        cfg = AnalysisConfig(input="x.bin", out=tmp_path, bands="alpha=8-12Hz", sampling_rate=128)
        assert cfg.band_specs == [BandSpec("alpha", hz=(8.0, 12.0))]

    @pytest.mark.parametrize("field, value", [("ridge", -0.1), ("overlap", 1.0), ("n_jobs", 0), ("segment_length", 1)])
    def test_ranges(self, tmp_path, field, value):
        with pytest.raises(ValidationError):
            AnalysisConfig(input="x.bin", out=tmp_path, **{field: value})

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ValidationError):
            AnalysisConfig(input="x.bin", out=tmp_path, colour="blue")

    def test_scale_defaults_with_a_warning(self, tmp_path, caplog):
        cfg = AnalysisConfig(input="x.bin", out=tmp_path)
        with caplog.at_level(logging.WARNING, logger="spectral_dependence.config"):
            assert cfg.effective_scale is Scale.calibrated
        assert "paper-NT" in caplog.text

    def test_explicit_scale_is_silent(self, tmp_path, caplog):
        cfg = AnalysisConfig(input="x.bin", out=tmp_path, scale="paper-NT")
        with caplog.at_level(logging.WARNING, logger="spectral_dependence.config"):
            assert cfg.effective_scale is Scale.literal_nt
        assert caplog.text == ""


class TestConfigFiles:
    def test_key_value_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# run\ninput = data.bin\nsampling-rate = 256  # Hz\n\nmeasures = linear,all-univariate\n")
        assert read_config_file(path) == {
            "input": "data.bin",
            "sampling_rate": "256",
            "measures": "linear,all-univariate",
        }

    def test_bad_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("input data.bin\n")
        with pytest.raises(ConfigurationError, match="line 1"):
            read_config_file(path)

    def test_json_must_be_an_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigurationError):
            read_config_file(path)

    def test_command_line_wins(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"input": "a.bin", "out": str(tmp_path), "ridge": 0.5, "n_jobs": 2}))
        cfg = build_analysis_config({"input": "b.bin", "ridge": None, "n_jobs": 4}, path)
        assert cfg.input.name == "b.bin"
        assert cfg.ridge == 0.5
        assert cfg.n_jobs == 4

    def test_validation_errors_are_wrapped(self, tmp_path):
        with pytest.raises(ConfigValidationError) as info:
            build_analysis_config({"input": "a.bin", "out": str(tmp_path), "n_jobs": 0})
        assert info.value.exit_code == 2
        assert info.value.errors[0]["loc"] == ("n_jobs",)
        assert "command line" in info.value.reason

    def test_simulation_file(self, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text(json.dumps({"scenario": "lagged-coupling", "lag": 3, "coupling": 1.0, "seed": 4}))
        cfg = load_simulation_config(path)
        assert cfg.scenario is Scenario.lagged_coupling
        assert cfg.lag == 3

    def test_bad_simulation_file(self, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text(json.dumps({"noise_sd": -1}))
        with pytest.raises(ConfigValidationError) as info:
            load_simulation_config(path)
        assert str(path) in info.value.reason
