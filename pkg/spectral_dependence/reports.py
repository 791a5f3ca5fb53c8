from typing import List, Optional, Union

from pydantic import BaseModel, StrictInt

from spectral_dependence.params import Flag, Measure, MeasureKind, Scale, Scope

FreqLabel = Union[StrictInt, str]


class Rho2(BaseModel):
    total: float
    lagged: float
    instantaneous: float


class DependenceReport(BaseModel):
    """Total / lagged / instantaneous dependence (F or G, nats) at one frequency or band."""

    kind: MeasureKind
    scope: Scope
    freq: FreqLabel
    block_dims: List[int]
    block_names: List[str] = []
    total: float
    lagged: float
    instantaneous: float
    rho2: Rho2
    flags: List[Flag] = []

    def value(self, measure: Measure) -> float:
        return float(getattr(self, Measure(measure).value))

    def has_flag(self, flag: Flag) -> bool:
        return flag in self.flags


class LegacyReport(BaseModel):
    """Superseded general coherence and zero-lag removed coherence, for comparison."""

    kind: MeasureKind
    freq: FreqLabel
    rho2_G: float
    rho2_GL: float
    flags: List[Flag] = []

    @property
    def ps_GL(self) -> float:
        """the old index is stated as a square root"""
        return max(self.rho2_GL, 0.0) ** 0.5


class TestResult(BaseModel):
    __test__ = False

    measure: Measure
    statistic: float
    df: int
    p_value: float
    scale_used: Scale
    scale_value: float
    flags: List[Flag] = []


class CrossSpectrumRecord(BaseModel):
    freq: FreqLabel
    n_segments: int
    norm_mode: str
    matrix_re: List[List[float]]
    matrix_im: List[List[float]]


class FrequencyEntry(BaseModel):
    """one analysed frequency or band with its reports"""

    freq: FreqLabel
    hz: Optional[List[float]] = None
    n_pooled: int = 1
    reports: List[DependenceReport] = []
    legacy: List[LegacyReport] = []


class TestGroup(BaseModel):
    """the three tests of one linear report"""

    __test__ = False

    freq: FreqLabel
    scope: Scope
    block_names: List[str]
    n_effective: int
    results: List[TestResult]


class PairRow(BaseModel):
    """one block pair at one frequency or band, as plotted"""

    freq: FreqLabel
    hz_low: Optional[float] = None
    hz_high: Optional[float] = None
    block_a: str
    block_b: str
    kind: MeasureKind
    report: DependenceReport
