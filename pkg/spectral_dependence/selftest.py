"""Release-gate checks: each suite returns True when every case holds."""
import logging
import math
from typing import Callable, Dict, List, NamedTuple, Tuple

import numpy as np

from spectral_dependence import measures
from spectral_dependence.crossspectra import accumulate
from spectral_dependence.exceptions import SpectralDependenceError
from spectral_dependence.inference import degrees_of_freedom
from spectral_dependence.models import BlockPartition, CrossSpectrum, SegmentSet, SpectralEnsemble
from spectral_dependence.params import DfScope, Flag, Measure, NormMode
from spectral_dependence.simulate import make_rng, parseval_oracle
from spectral_dependence.spectral import normalize_block, normalize_channel

logger = logging.getLogger(__name__)

SELFTEST_SEED = 20240229
PAIR = BlockPartition([[0], [1]], names=["x", "y"])


def _univariate_spectrum(rng: np.random.Generator, norm_mode: NormMode) -> Tuple[CrossSpectrum, float, float, complex]:
    if norm_mode is NormMode.raw:
        s_xx, s_yy = rng.uniform(0.2, 5.0, size=2)
    else:
        s_xx = s_yy = 1.0
    c = rng.uniform(0.0, 0.95) * np.exp(1j * rng.uniform(-np.pi, np.pi))
    s_yx = complex(c * math.sqrt(s_xx * s_yy))
    matrix = np.array([[s_xx, np.conj(s_yx)], [s_yx, s_yy]])
    partition = PAIR if norm_mode is NormMode.block else None
    return CrossSpectrum(matrix=matrix, freq=1, n_segments=64, norm_mode=norm_mode, partition=partition), s_xx, s_yy, s_yx


def closed_form_parity(rng: np.random.Generator, cases: int = 200) -> bool:
    for norm_mode, fn in ((NormMode.raw, measures.linear_dependence), (NormMode.block, measures.nonlinear_dependence)):
        for _ in range(cases):
            s, s_xx, s_yy, s_yx = _univariate_spectrum(rng, norm_mode)
            report = fn(s, PAIR)
            expected = measures.univariate_closed_forms(s_xx, s_yy, s_yx)
            got = (report.total, report.lagged, report.instantaneous)
            if max(abs(a - b) for a, b in zip(got, expected)) > 1e-10:
                logger.error("closed form mismatch at %s: %s vs %s", norm_mode.value, got, expected)
                return False
    return True


def _ensemble(rng: np.random.Generator, n_segments: int, m: int) -> SpectralEnsemble:
    coeffs = rng.standard_normal((n_segments, 1, m)) + 1j * rng.standard_normal((n_segments, 1, m))
    # a shared component so the channels are dependent
    coeffs += rng.standard_normal((n_segments, 1, 1)) * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return SpectralEnsemble(coeffs=coeffs, freq_indices=[1])


def additivity(rng: np.random.Generator, cases: int = 100) -> bool:
    scopes = [
        BlockPartition([[0], [1]]),
        BlockPartition([[0, 1, 2], [3, 4], [5]]),
    ]
    for _ in range(cases):
        for partition in scopes:
            e = _ensemble(rng, 24, len(partition.indices))
            reports = [
                measures.linear_dependence(accumulate(e, 1), partition),
                measures.nonlinear_dependence(accumulate(normalize_block(e, partition), 1), partition),
            ]
            if not all(_additive(r) for r in reports):
                return False
        e = _ensemble(rng, 24, 4)
        reports = [
            measures.all_univariate_linear(accumulate(e, 1)),
            measures.all_univariate_nonlinear(accumulate(normalize_channel(e), 1)),
        ]
        if not all(_additive(r) for r in reports):
            return False
    return True


def _additive(report) -> bool:
    ok = abs(report.total - report.lagged - report.instantaneous) <= 1e-9
    ok = ok and report.total >= 0 and report.instantaneous >= 0
    ok = ok and (report.lagged >= 0 or report.has_flag(Flag.negative_lagged))
    if not ok:
        logger.error("additivity or sign failure: %s", report)
    return ok


def parseval(rng: np.random.Generator, cases: int = 20) -> bool:
    partition = BlockPartition([[0, 1], [2]])
    for _ in range(cases):
        s = SegmentSet(data=rng.standard_normal((8, 64, 3)))
        for omega in range(1, 64 // 2):
            for p in (None, partition):
                err = parseval_oracle(s, omega, p).max_rel_err
                if not err < 1e-8:
                    logger.error("zero-lag covariance identity off by %.3e at bin %d", err, omega)
                    return False
    return True


DF_TABLE: List[Tuple[List[int], DfScope, Tuple[int, int, int]]] = [
    ([1, 1], DfScope.blocks, (2, 1, 1)),
    ([3, 2, 1], DfScope.blocks, (22, 11, 11)),
    ([2], DfScope.all_univariate, (2, 1, 1)),
    ([3], DfScope.all_univariate, (6, 3, 3)),
    ([4], DfScope.all_univariate, (12, 6, 6)),
]


def df_table(rng: np.random.Generator) -> bool:
    for dims, scope, expected in DF_TABLE:
        got = tuple(degrees_of_freedom(dims, m, scope) for m in (Measure.total, Measure.lagged, Measure.instantaneous))
        if got != expected:
            logger.error("degrees of freedom %s %s: %s != %s", dims, scope.value, got, expected)
            return False
    return True


def dual_path(rng: np.random.Generator, cases: int = 100) -> bool:
    for _ in range(cases):
        e = _ensemble(rng, 16, 2)
        raw = accumulate(e, 1)
        two = measures.linear_dependence(raw, PAIR)
        uni = measures.all_univariate_linear(raw)
        block = accumulate(normalize_block(e, PAIR), 1)
        channel = accumulate(normalize_channel(e), 1)
        pairs = [
            (two, uni),
            (measures.nonlinear_dependence(block, PAIR), measures.all_univariate_nonlinear(channel)),
        ]
        for a, b in pairs:
            if max(abs(a.total - b.total), abs(a.lagged - b.lagged), abs(a.instantaneous - b.instantaneous)) > 1e-12:
                logger.error("two-block and all-univariate paths disagree: %s vs %s", a, b)
                return False
        if abs(measures.legacy_2007a(raw, PAIR).rho2_GL - two.rho2.lagged) > 1e-12:
            logger.error("superseded zero-lag removed coherence differs from the lagged coherence")
            return False
    return True


class Suite(NamedTuple):
    name: str
    check: Callable[[np.random.Generator], bool]


SUITES: List[Suite] = [
    Suite("closed-form-parity", closed_form_parity),
    Suite("additivity", additivity),
    Suite("parseval-oracle", parseval),
    Suite("degrees-of-freedom", df_table),
    Suite("dual-path-consistency", dual_path),
]


def run_suites(seed: int = SELFTEST_SEED) -> Dict[str, bool]:
    results = {}
    # random within-block spectra trigger expected negative-lagged warnings
    measures_logger = logging.getLogger(measures.__name__)
    level = measures_logger.level
    measures_logger.setLevel(logging.ERROR)
    try:
        for suite in SUITES:
            try:
                results[suite.name] = bool(suite.check(make_rng(seed)))
            except (SpectralDependenceError, ArithmeticError) as exc:
                logger.error("%s raised %r", suite.name, exc)
                results[suite.name] = False
    finally:
        measures_logger.setLevel(level)
    return results
