from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError


class SpectralDependenceError(Exception):
    exit_code: int = 1

    def __init__(self, reason: str, **context: Any) -> None:
        self.reason = reason
        self.context = context
        super().__init__(reason)

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(reason={self.reason!r}, context={self.context!r})"


# ============ configuration (exit 2) ============
class ConfigurationError(SpectralDependenceError):
    exit_code = 2


class SingularityRiskError(ConfigurationError):
    pass


class ConfigValidationError(ConfigurationError):
    def __init__(self, exc: ValidationError, *, source: Optional[str] = None) -> None:
        self.errors: List[Dict[str, Any]] = exc.errors()
        self.source = source
        fields = ", ".join(".".join(str(p) for p in e["loc"]) + ": " + e["msg"] for e in self.errors)
        where = f"{source}: " if source else ""
        super().__init__(f"{where}invalid configuration ({fields})", source=source)


# ============ data (exit 3) ============
class DataError(SpectralDependenceError):
    exit_code = 3


class MalformedInputError(DataError):
    def __init__(self, reason: str, *, line: Optional[int] = None, byte: Optional[int] = None) -> None:
        self.line = line
        self.byte = byte
        if line is not None:
            reason = f"line {line}: {reason}"
        elif byte is not None:
            reason = f"byte {byte}: {reason}"
        super().__init__(reason, line=line, byte=byte)


class DimensionError(DataError):
    pass


class FrequencyRangeError(DataError):
    pass


class CoverageError(DataError):
    pass


class NormModeError(DataError):
    pass


class DegenerateSegmentError(DataError):
    def __init__(
        self,
        *,
        segment: int,
        freq: int,
        block: Optional[int] = None,
        channel: Optional[int] = None,
    ) -> None:
        self.segment = segment
        self.freq = freq
        self.block = block
        self.channel = channel
        what = f"block {block}" if block is not None else f"channel {channel}"
        super().__init__(
            f"zero-norm coefficients at segment {segment}, frequency {freq}, {what}",
            segment=segment, freq=freq, block=block, channel=channel,
        )


# ============ numerical (exit 4) ============
class NumericalError(SpectralDependenceError):
    exit_code = 4


class SingularMatrixError(NumericalError):
    def __init__(self, *, pivot_index: int, pivot: float, hint: str = "") -> None:
        self.pivot_index = pivot_index
        self.pivot = pivot
        reason = f"non-positive pivot {pivot:.3e} at index {pivot_index}"
        if hint:
            reason = f"{reason} ({hint})"
        super().__init__(reason, pivot_index=pivot_index, pivot=pivot)


class NotHermitianError(NumericalError):
    pass


class InternalConsistencyError(NumericalError):
    pass


__all__: Sequence[str] = [
    "SpectralDependenceError",
    "ConfigurationError",
    "SingularityRiskError",
    "ConfigValidationError",
    "DataError",
    "MalformedInputError",
    "DimensionError",
    "FrequencyRangeError",
    "CoverageError",
    "NormModeError",
    "DegenerateSegmentError",
    "NumericalError",
    "SingularMatrixError",
    "NotHermitianError",
    "InternalConsistencyError",
]
