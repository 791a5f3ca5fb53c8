from enum import Enum


class FileFormat(str, Enum):
    csv_long = "csv-long"
    binary_f64 = "binary-f64"


class DetrendMode(str, Enum):
    mean = "mean"
    none = "none"


class Taper(str, Enum):
    none = "none"
    hann = "hann"


class NormMode(str, Enum):
    raw = "raw"
    block = "block"
    channel = "channel"

    @property
    def code(self) -> int:
        """u8 tag used by the SDSPC1 ensemble format"""
        return _NORM_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "NormMode":
        for mode, c in _NORM_CODES.items():
            if c == code:
                return mode
        raise ValueError(f"unknown normalization code {code}")


_NORM_CODES = {NormMode.raw: 0, NormMode.block: 1, NormMode.channel: 2}


class MeasureKind(str, Enum):
    linear = "linear"
    nonlinear = "nonlinear"


class Scope(str, Enum):
    two_block = "two-block"
    k_block = "k-block"
    all_univariate = "all-univariate"


class DfScope(str, Enum):
    blocks = "blocks"
    all_univariate = "all-univariate"


class Measure(str, Enum):
    total = "total"
    lagged = "lagged"
    instantaneous = "instantaneous"


class Scale(str, Enum):
    literal_nt = "paper-NT"
    segments_nr = "segments-NR"
    calibrated = "calibrated-2NRm1"

    def value_for(self, n_t: int, n_r: int) -> float:
        if self is Scale.literal_nt:
            return float(n_t)
        if self is Scale.segments_nr:
            return float(n_r)
        return 2.0 * (n_r - 1)


class Scenario(str, Enum):
    volume_conduction = "volume-conduction"
    lagged_coupling = "lagged-coupling"
    white_noise = "white-noise"


class SourceSpec(str, Enum):
    white = "white"
    ar_pair = "ar-pair"


class Flag(str, Enum):
    perfect_dependence = "perfect-dependence"
    negative_lagged = "negative-lagged"
    ridge = "ridge"
    infinite_statistic = "infinite-statistic"
    clamped = "clamped"


class Analysis(str, Enum):
    """measure families an analysis run can request"""

    linear = "linear"
    nonlinear = "nonlinear"
    all_univariate = "all-univariate"
