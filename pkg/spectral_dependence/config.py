"""Run configuration: validated pydantic models plus the partition and band mini-languages."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, root_validator, validator

from spectral_dependence.exceptions import ConfigurationError, ConfigValidationError
from spectral_dependence.models import BlockPartition
from spectral_dependence.params import (
    Analysis,
    DetrendMode,
    FileFormat,
    NormMode,
    Scale,
    Scenario,
    SourceSpec,
    Taper,
)
from spectral_dependence.utils import parse_hz_range, parse_index_list, split_assignments

logger = logging.getLogger(__name__)


class BandSpec(NamedTuple):
    """a band as written: explicit bins, or a Hz range resolved once the rate is known"""

    name: str
    bins: Optional[Tuple[int, ...]] = None
    hz: Optional[Tuple[float, float]] = None


def parse_partition_spec(text: str) -> List[Tuple[str, List[str]]]:
    """'X=0,1;Y=Fz|2' -> [('X', ['0', '1']), ('Y', ['Fz', '2'])]"""
    out = []
    for name, members in split_assignments(text):
        refs = [m.strip() for m in members.replace("|", ",").split(",") if m.strip()]
        if not refs:
            raise ConfigurationError(f"block {name!r} has no members")
        out.append((name, refs))
    if not out:
        raise ConfigurationError(f"empty partition spec {text!r}")
    return out


def resolve_partition(text: Optional[str], channel_names: Sequence[str]) -> BlockPartition:
    """Members are channel names or indices; no spec means one block per channel."""
    names = list(channel_names)
    if not text:
        return BlockPartition([[i] for i in range(len(names))], names=names, n_channels=len(names))
    blocks, labels = [], []
    for label, refs in parse_partition_spec(text):
        members = []
        for ref in refs:
            if ref in names:
                members.append(names.index(ref))
            elif ref.isdigit() and int(ref) < len(names):
                members.append(int(ref))
            else:
                raise ConfigurationError(f"block {label!r}: unknown channel {ref!r}")
        blocks.append(members)
        labels.append(label)
    return BlockPartition(blocks, names=labels, n_channels=len(names))


def parse_band_spec(text: str) -> List[BandSpec]:
    bands = []
    for name, body in split_assignments(text):
        hz = parse_hz_range(body)
        if hz is not None:
            bands.append(BandSpec(name, hz=hz))
        else:
            bands.append(BandSpec(name, bins=tuple(parse_index_list(body))))
    if len({b.name for b in bands}) != len(bands):
        raise ConfigurationError("band names must be distinct")
    return bands


def _split_list(value: Any) -> List[str]:
    if value is None:
        return []
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return [str(v) for v in value]


def _as_value_error(fn, text):
    try:
        return fn(text)
    except ConfigurationError as exc:
        raise ValueError(exc.reason)


class AnalysisConfig(BaseModel):
    input: Path
    format: FileFormat = FileFormat.binary_f64
    partition: Optional[str] = None
    bands: Optional[str] = None
    measures: List[Analysis] = [Analysis.linear]
    norm: List[NormMode] = []
    scale: Optional[Scale] = None
    ridge: float = Field(0.0, ge=0)
    taper: Taper = Taper.none
    detrend: DetrendMode = DetrendMode.mean
    sampling_rate: Optional[float] = Field(None, gt=0)
    segment_length: Optional[int] = Field(None, ge=2)
    overlap: float = Field(0.0, ge=0, lt=1)
    n_jobs: int = Field(1, ge=1)
    out: Path
    dump_spectra: bool = False

    class Config:
        extra = "forbid"

    @validator("measures", "norm", pre=True)
    def split_comma_list(cls, value):
        return _split_list(value)

    @validator("measures")
    def at_least_one_measure(cls, value):
        if not value:
            raise ValueError("at least one measure family is required")
        return list(dict.fromkeys(value))

    @validator("norm")
    def normalizations_only(cls, value):
        if NormMode.raw in value:
            raise ValueError("raw is not a normalization; pass block and/or channel")
        return list(dict.fromkeys(value))

    @validator("partition")
    def partition_syntax(cls, value):
        if value:
            _as_value_error(parse_partition_spec, value)
        return value

    @validator("bands")
    def band_syntax(cls, value):
        if value:
            _as_value_error(parse_band_spec, value)
        return value

    @root_validator(skip_on_failure=True)
    def nonlinear_needs_norm(cls, values):
        measures, norm = values["measures"], values["norm"]
        if Analysis.nonlinear in measures and not norm:
            raise ValueError("nonlinear measures need --norm block and/or channel")
        if norm and Analysis.nonlinear not in measures:
            logger.warning("normalization %s requested without nonlinear measures; ignored", [n.value for n in norm])
        bands = values.get("bands")
        if bands and values.get("sampling_rate") is None:
            if any(b.hz is not None for b in parse_band_spec(bands)):
                raise ValueError("Hz bands need a sampling rate")
        return values

    @property
    def band_specs(self) -> List[BandSpec]:
        return parse_band_spec(self.bands) if self.bands else []

    @property
    def effective_scale(self) -> Scale:
        if self.scale is None:
            logger.warning(
                "no --scale given: using %s; the literal large-sample statement scales by N_T (%s)",
                Scale.calibrated.value,
                Scale.literal_nt.value,
            )
            return Scale.calibrated
        return self.scale


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """`.json` objects, anything else as `key = value` lines with `#` comments"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}")
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: line {exc.lineno}: {exc.msg}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: top level must be an object")
        return data
    data = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"{path}: line {lineno}: expected key = value")
        data[key.strip().replace("-", "_")] = value.strip()
    return data


def build_analysis_config(
    overrides: Mapping[str, Any], config_file: Optional[Union[str, Path]] = None
) -> AnalysisConfig:
    """file values first, then every override that is not None"""
    values: Dict[str, Any] = read_config_file(config_file) if config_file else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return AnalysisConfig.parse_obj(values)
    except ValidationError as exc:
        raise ConfigValidationError(exc, source=str(config_file) if config_file else "command line")


class SimulationConfig(BaseModel):
    """One simulated data set.

    volume-conduction mixes r common sources into X (p channels, via C) and
    Y (q channels, via D); lagged-coupling builds two channels with the second
    a delayed copy of the first; white-noise has independent channels.
    """

    scenario: Scenario = Scenario.volume_conduction
    n_segments: int = Field(200, ge=1)
    n_samples: int = Field(128, ge=2)
    n_channels: int = Field(2, ge=1)
    mixing_C: List[List[float]] = [[1.0]]
    mixing_D: List[List[float]] = [[1.0]]
    source_spec: SourceSpec = SourceSpec.white
    lag: int = Field(1, ge=1)
    coupling: float = 0.0
    noise_sd: float = Field(1.0, ge=0)
    allow_zero_noise: bool = False
    seed: int = Field(0, ge=0, lt=2 ** 64)
    sampling_rate: Optional[float] = Field(None, gt=0)

    class Config:
        extra = "forbid"

    @validator("mixing_C", "mixing_D")
    def rectangular(cls, value, field):
        if not value or not value[0]:
            raise ValueError(f"{field.name} must be a non-empty matrix")
        if len({len(row) for row in value}) != 1:
            raise ValueError(f"{field.name} rows differ in length")
        return value

    @root_validator(skip_on_failure=True)
    def consistent(cls, values):
        r_c, r_d = len(values["mixing_C"][0]), len(values["mixing_D"][0])
        if r_c != r_d:
            raise ValueError(f"mixing_C has {r_c} source columns but mixing_D has {r_d}")
        if values["source_spec"] is SourceSpec.ar_pair and r_c != 2:
            raise ValueError("an ar-pair source needs exactly two source columns")
        if values["lag"] >= values["n_samples"]:
            raise ValueError(f"lag {values['lag']} must be below n_samples {values['n_samples']}")
        return values

    @property
    def n_sources(self) -> int:
        return len(self.mixing_C[0])


def load_simulation_config(path: Union[str, Path]) -> SimulationConfig:
    path = Path(path)
    data = read_config_file(path)
    try:
        return SimulationConfig.parse_obj(data)
    except ValidationError as exc:
        raise ConfigValidationError(exc, source=str(path))
