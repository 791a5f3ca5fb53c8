"""Asymptotic chi-square tests of zero linear dependence."""
import logging
import math
from typing import Dict, List, Sequence, Union

from scipy import special

from spectral_dependence.exceptions import ConfigurationError
from spectral_dependence.params import DfScope, Flag, Measure, MeasureKind, Scale, Scope
from spectral_dependence.reports import DependenceReport, TestResult
from spectral_dependence.utils import pairs_of

logger = logging.getLogger(__name__)

MEASURES = (Measure.total, Measure.lagged, Measure.instantaneous)


def degrees_of_freedom(
    block_dims: Sequence[int],
    measure: Union[Measure, str],
    scope: Union[DfScope, str] = DfScope.blocks,
) -> int:
    """total: 2 * sum_{i<j} p_i p_j, lagged and instantaneous: half of it.

    all-univariate scope takes a single p and uses p(p-1), p(p-1)/2.
    """
    dims = [int(p) for p in block_dims]
    if not dims or any(p < 1 for p in dims):
        raise ConfigurationError(f"block dimensions must be >= 1, got {dims}")
    measure, scope = Measure(measure), DfScope(scope)
    if scope is DfScope.all_univariate:
        if len(dims) != 1:
            raise ConfigurationError("all-univariate degrees of freedom take a single channel count")
        base = dims[0] * (dims[0] - 1) // 2
    else:
        base = sum(a * b for a, b in pairs_of(dims))
    if base == 0:
        raise ConfigurationError(f"no dependence to test between blocks {dims}")
    return 2 * base if measure is Measure.total else base


def chi_square_sf(x: float, df: int) -> float:
    """P(chi2(df) > x) as the regularized upper incomplete gamma Q(df/2, x/2)"""
    if df < 1:
        raise ConfigurationError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(x):
        return math.nan
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return float(special.gammaincc(df / 2.0, x / 2.0))


def _df_for(report: DependenceReport, measure: Measure) -> int:
    if report.scope is Scope.all_univariate:
        return degrees_of_freedom([len(report.block_dims)], measure, DfScope.all_univariate)
    return degrees_of_freedom(report.block_dims, measure, DfScope.blocks)


def _one(report: DependenceReport, measure: Measure, scale: Scale, scale_value: float) -> TestResult:
    value = report.value(measure)
    df = _df_for(report, measure)
    flags: List[Flag] = []
    if math.isinf(value) or math.isnan(value):
        flags.append(Flag.infinite_statistic)
        logger.debug("%s %s measure is %s; reporting p = 0", report.freq, measure.value, value)
        statistic, p_value = math.inf, 0.0
    else:
        if value < 0:
            flags.append(Flag.clamped)
            logger.debug("%s %s measure %.3e clamped to 0 for the test", report.freq, measure.value, value)
            value = 0.0
        statistic = scale_value * value
        p_value = chi_square_sf(statistic, df)
    return TestResult(
        measure=measure,
        statistic=statistic,
        df=df,
        p_value=p_value,
        scale_used=scale,
        scale_value=scale_value,
        flags=flags,
    )


def test_report(
    report: DependenceReport, n_t: int, n_r: int, scale: Union[Scale, str]
) -> Dict[Measure, TestResult]:
    """Chi-square test of each measure of a linear report.

    `n_r` is the number of independent spectral samples behind the report:
    segments, times pooled frequencies for a band.
    """
    if report.kind is not MeasureKind.linear:
        raise ConfigurationError("asymptotic tests exist for linear measures only; use simulated nulls for G")
    scale = Scale(scale)
    scale_value = scale.value_for(n_t, n_r)
    if not scale_value > 0:
        raise ConfigurationError(f"scale {scale.value} is {scale_value} for N_T={n_t}, N_R={n_r}")
    return {m: _one(report, m, scale, scale_value) for m in MEASURES}


def test_dependence(report: DependenceReport, n_t: int, n_r: int, scale: Union[Scale, str]) -> List[TestResult]:
    """TestResults for total, lagged and instantaneous, in that order"""
    results = test_report(report, n_t, n_r, scale)
    return [results[m] for m in MEASURES]


test_report.__test__ = False  # type: ignore[attr-defined]
test_dependence.__test__ = False  # type: ignore[attr-defined]
