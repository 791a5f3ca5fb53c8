"""Linear (F) and nonlinear (G) dependence, split into lagged and instantaneous parts.

Every measure is a ratio of determinants of sub-block arrangements of one
joint cross-spectral matrix. Determinants are only ever taken as logs through
the active log-determinant kernel.
"""
import logging
import math
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from spectral_dependence.exceptions import (
    ConfigurationError,
    DimensionError,
    InternalConsistencyError,
    NormModeError,
    SingularMatrixError,
)
from spectral_dependence.models import BlockPartition, CrossSpectrum, freq_label
from spectral_dependence.params import Flag, MeasureKind, NormMode, Scope
from spectral_dependence.reports import DependenceReport, LegacyReport, Rho2
from spectral_dependence.utils import check_hermitian, pairs_of

logger = logging.getLogger(__name__)

PIVOT_RTOL = 1e-12
CLAMP_TOL = 1e-12
REAL_BLOCK_RTOL = 1e-12


def _pivot_at(a: np.ndarray, k: int) -> float:
    """k-th LDL^H pivot: a_kk minus the squared solve against the factored leading block"""
    if k == 0:
        return float(np.real(a[0, 0]))
    lead = linalg.cholesky(a[:k, :k], lower=True)
    y = linalg.solve_triangular(lead, a[:k, k], lower=True)
    return float(np.real(a[k, k]) - np.sum(np.abs(y) ** 2))


def logdet_psd(matrix: np.ndarray, n: Optional[int] = None) -> float:
    """ln|A| of a Hermitian (or real symmetric) positive definite matrix.

    LAPACK Cholesky (potrf) on the lower triangle; the LDL^H pivots are the
    squared diagonal of the factor and ln|A| is the sum of their logs. A pivot
    that is not larger than PIVOT_RTOL times its own diagonal entry means the
    matrix is singular or indefinite.
    """
    a = np.asarray(matrix)
    if n is not None and a.shape != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix, got {a.shape}")
    check_hermitian(a)
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    potrf, = linalg.get_lapack_funcs(("potrf",), (a,))
    factor, info = potrf(a, lower=True, clean=True)
    if info > 0:
        k = info - 1
        raise SingularMatrixError(pivot_index=k, pivot=_pivot_at(a, k))
    pivots = np.abs(np.diag(factor)) ** 2
    diag = np.real(np.diag(a))
    weak = np.flatnonzero(~(pivots > PIVOT_RTOL * diag))
    if weak.size:
        k = int(weak[0])
        raise SingularMatrixError(pivot_index=k, pivot=float(pivots[k]))
    return math.fsum(np.log(pivots))


_kernel: Callable[[np.ndarray], float] = logdet_psd


@contextmanager
def logdet_kernel(fn: Callable[[np.ndarray], float]) -> Iterator[None]:
    """temporarily route every determinant through `fn` (self-test harness hook)"""
    global _kernel
    previous = _kernel
    _kernel = fn
    try:
        yield
    finally:
        _kernel = previous


def _logdet(matrix: np.ndarray) -> float:
    return _kernel(matrix)


def rho2_from(measure: float) -> float:
    """1 - exp(-F)"""
    if math.isnan(measure):
        return math.nan
    if math.isinf(measure):
        return 1.0 if measure > 0 else -math.inf
    return -math.expm1(-measure)


def _settle(value: float, name: str, guaranteed: bool, flags: List[Flag]) -> float:
    if math.isnan(value) or value >= 0:
        return value
    if value >= -CLAMP_TOL:
        return 0.0
    if guaranteed:
        raise InternalConsistencyError(f"{name} dependence {value:.3e} is negative beyond tolerance")
    # multi-channel blocks with within-block lagged structure can push the
    # lagged part below zero; keep the value so total = lagged + instantaneous
    flags.append(Flag.negative_lagged)
    logger.warning("%s dependence is negative (%.3e): within-block spectra carry lagged structure", name, value)
    return value


def _is_real(block: np.ndarray) -> bool:
    scale = float(np.max(np.abs(block)))
    return float(np.max(np.abs(np.imag(block)))) <= REAL_BLOCK_RTOL * scale


def _with_ridge(s: CrossSpectrum, ridge: float, flags: List[Flag]) -> np.ndarray:
    if ridge < 0:
        raise ConfigurationError(f"ridge must be >= 0, got {ridge}")
    if ridge == 0:
        return s.matrix
    flags.append(Flag.ridge)
    m = s.n_channels
    load = ridge * float(np.real(np.trace(s.matrix))) / m
    logger.info("adding ridge %.3e * trace/M = %.3e to the diagonal", ridge, load)
    return s.matrix + load * np.eye(m)


def _decompose(
    matrix: np.ndarray,
    indices: Sequence[int],
    slices: Sequence[slice],
    effective_samples: int,
    flags: List[Flag],
) -> Tuple[float, float, float]:
    """(total, lagged, instantaneous) for the blocks of matrix[indices, indices]"""
    idx = list(indices)
    joint = matrix[np.ix_(idx, idx)]
    blocks = [joint[sl, sl] for sl in slices]
    num_complex = num_real = 0.0
    for b, block in enumerate(blocks):
        try:
            num_complex += _logdet(block)
            num_real += _logdet(np.real(block))
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                pivot_index=exc.pivot_index, pivot=exc.pivot, hint=f"block {b} is singular (collinear channels?)"
            )
    try:
        den_complex = _logdet(joint)
    except SingularMatrixError as exc:
        if effective_samples < len(idx):
            raise SingularMatrixError(
                pivot_index=exc.pivot_index,
                pivot=exc.pivot,
                hint=f"{effective_samples} segments cannot support {len(idx)} channels",
            )
        den_complex = -math.inf
    try:
        den_real = _logdet(np.real(joint))
    except SingularMatrixError:
        den_real = -math.inf
    total = num_complex - den_complex
    instantaneous = num_real - den_real
    if math.isinf(total) or math.isinf(instantaneous):
        flags.append(Flag.perfect_dependence)
        logger.warning("joint cross-spectrum is singular with nonsingular blocks: perfect dependence")
        lagged = math.inf if not math.isinf(instantaneous) else math.nan
    else:
        lagged = total - instantaneous
    guaranteed = all(_is_real(b) for b in blocks)
    total = _settle(total, "total", True, flags)
    instantaneous = _settle(instantaneous, "instantaneous", True, flags)
    lagged = _settle(lagged, "lagged", guaranteed, flags)
    return total, lagged, instantaneous


def _report(
    kind: MeasureKind,
    scope: Scope,
    s: CrossSpectrum,
    dims: List[int],
    names: Sequence[str],
    values: Tuple[float, float, float],
    flags: List[Flag],
) -> DependenceReport:
    total, lagged, instantaneous = values
    return DependenceReport(
        kind=kind,
        scope=scope,
        freq=freq_label(s.freq),
        block_dims=dims,
        block_names=list(names),
        total=total,
        lagged=lagged,
        instantaneous=instantaneous,
        rho2=Rho2(total=rho2_from(total), lagged=rho2_from(lagged), instantaneous=rho2_from(instantaneous)),
        flags=sorted(set(flags), key=lambda f: f.value),
    )


def _block_measures(kind: MeasureKind, s: CrossSpectrum, partition: BlockPartition, ridge: float) -> DependenceReport:
    partition.validate_for(s.n_channels)
    flags: List[Flag] = []
    matrix = _with_ridge(s, ridge, flags)
    values = _decompose(
        matrix, partition.indices, partition.local_slices(), s.n_segments * s.n_pooled, flags
    )
    scope = Scope.two_block if partition.k == 2 else Scope.k_block
    return _report(kind, scope, s, partition.dims, partition.names, values, flags)


def linear_dependence(s: CrossSpectrum, partition: BlockPartition, *, ridge: float = 0.0) -> DependenceReport:
    """F between the blocks of `partition`: total, lagged and instantaneous."""
    if s.norm_mode is not NormMode.raw:
        raise NormModeError(f"linear measures need raw cross-spectra, got {s.norm_mode.value}")
    return _block_measures(MeasureKind.linear, s, partition, ridge)


def nonlinear_dependence(s: CrossSpectrum, partition: BlockPartition, *, ridge: float = 0.0) -> DependenceReport:
    """G: the same determinant arithmetic on the phase-information cross-spectrum."""
    if s.norm_mode is not NormMode.block:
        raise NormModeError(f"nonlinear measures need block-normalized cross-spectra, got {s.norm_mode.value}")
    if not partition.blocks_within(s.partition):
        raise NormModeError(f"cross-spectrum was normalized under {s.partition}, not compatible with {partition}")
    return _block_measures(MeasureKind.nonlinear, s, partition, ridge)


def _univariate(
    kind: MeasureKind,
    s: CrossSpectrum,
    channels: Optional[Sequence[int]],
    ridge: float,
    names: Optional[Sequence[str]],
) -> DependenceReport:
    channels = list(range(s.n_channels)) if channels is None else [int(c) for c in channels]
    if len(set(channels)) != len(channels) or any(not 0 <= c < s.n_channels for c in channels):
        raise DimensionError(f"invalid channel selection {channels}")
    labels = [f"ch_{c}" for c in channels] if names is None else list(names)
    if len(labels) != len(channels):
        raise DimensionError(f"{len(labels)} names for {len(channels)} channels")
    flags: List[Flag] = []
    matrix = _with_ridge(s, ridge, flags)
    # singleton blocks: the numerators reduce to ln|Diag S|, which is ln|Diag Re S|
    slices = [slice(i, i + 1) for i in range(len(channels))]
    values = _decompose(matrix, channels, slices, s.n_segments * s.n_pooled, flags)
    return _report(kind, Scope.all_univariate, s, [1] * len(channels), labels, values, flags)


def all_univariate_linear(
    s: CrossSpectrum, channels: Optional[Sequence[int]] = None,
    *,
    ridge: float = 0.0,
    names: Optional[Sequence[str]] = None,
) -> DependenceReport:
    if s.norm_mode is not NormMode.raw:
        raise NormModeError(f"linear measures need raw cross-spectra, got {s.norm_mode.value}")
    return _univariate(MeasureKind.linear, s, channels, ridge, names)


def all_univariate_nonlinear(
    s: CrossSpectrum, channels: Optional[Sequence[int]] = None,
    *,
    ridge: float = 0.0,
    names: Optional[Sequence[str]] = None,
) -> DependenceReport:
    """G = -ln|S| on the channel-normalized cross-spectrum (unit diagonal)."""
    if s.norm_mode is not NormMode.channel:
        raise NormModeError(f"all-univariate nonlinear measures need channel-normalized spectra, got {s.norm_mode.value}")
    return _univariate(MeasureKind.nonlinear, s, channels, ridge, names)


def dependence(s: CrossSpectrum, partition: BlockPartition, kind: MeasureKind, *, ridge: float = 0.0) -> DependenceReport:
    if MeasureKind(kind) is MeasureKind.linear:
        return linear_dependence(s, partition, ridge=ridge)
    return nonlinear_dependence(s, partition, ridge=ridge)


def pairwise_dependence(
    s: CrossSpectrum, partition: BlockPartition, kind: MeasureKind = MeasureKind.linear, *, ridge: float = 0.0
) -> List[Tuple[int, int, DependenceReport]]:
    """two-block report for every pair of blocks, in partition order"""
    return [
        (i, j, dependence(s, partition.sub_partition([i, j]), kind, ridge=ridge))
        for i, j in pairs_of(list(range(partition.k)))
    ]


def legacy_2007a(s: CrossSpectrum, partition: BlockPartition, *, ridge: float = 0.0) -> LegacyReport:
    """General coherence and zero-lag removed coherence as first defined.

    On block-normalized spectra these are the phase-synchronization variants.
    Ridge loading and the singular-matrix rules are those of the block measures.
    """
    if partition.k != 2:
        raise ConfigurationError("the superseded definitions are for exactly two blocks")
    if s.norm_mode is NormMode.raw:
        kind = MeasureKind.linear
    elif s.norm_mode is NormMode.block and partition.blocks_within(s.partition):
        kind = MeasureKind.nonlinear
    else:
        raise NormModeError("superseded definitions need raw or block-normalized spectra of the same partition")
    partition.validate_for(s.n_channels)
    flags: List[Flag] = []
    matrix = _with_ridge(s, ridge, flags)
    y_idx, x_idx = (list(b) for b in partition.blocks)
    s_yy = matrix[np.ix_(y_idx, y_idx)]
    s_xx = matrix[np.ix_(x_idx, x_idx)]
    s_yx = matrix[np.ix_(y_idx, x_idx)]
    for b, block in enumerate((s_yy, s_xx)):
        try:
            _logdet(block)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                pivot_index=exc.pivot_index, pivot=exc.pivot, hint=f"block {b} is singular (collinear channels?)"
            )
    idx = partition.indices
    joint = matrix[np.ix_(idx, idx)]
    effective_samples = s.n_segments * s.n_pooled
    try:
        ld_joint = _logdet(joint)
    except SingularMatrixError as exc:
        if effective_samples < len(idx):
            raise SingularMatrixError(
                pivot_index=exc.pivot_index,
                pivot=exc.pivot,
                hint=f"{effective_samples} segments cannot support {len(idx)} channels",
            )
        ld_joint = None
    if ld_joint is None:
        flags.append(Flag.perfect_dependence)
        logger.warning("joint cross-spectrum is singular with nonsingular blocks: perfect dependence")
        rho2_g = 1.0
        try:
            _logdet(np.real(joint))
            rho2_gl = 1.0
        except SingularMatrixError:
            rho2_gl = math.nan
    else:
        schur = s_yy - s_yx @ np.linalg.solve(s_xx, s_yx.conj().T)
        schur = (schur + schur.conj().T) / 2
        try:
            rho2_g = -math.expm1(_logdet(schur) - _logdet(s_yy))
        except SingularMatrixError:
            # the joint matrix passed, so the residual is singular only to rounding
            flags.append(Flag.perfect_dependence)
            rho2_g = 1.0
        rho2_gl = -math.expm1(ld_joint - _logdet(np.real(joint)))
    return LegacyReport(
        kind=kind,
        freq=freq_label(s.freq),
        rho2_G=rho2_g,
        rho2_GL=rho2_gl,
        flags=sorted(set(flags), key=lambda f: f.value),
    )


def imaginary_coherence(s: CrossSpectrum, a: int, b: int) -> float:
    """[Im s_ab]^2 / (s_aa s_bb), the squared imaginary part of coherency"""
    s_ab = s.matrix[a, b]
    return float(np.imag(s_ab) ** 2 / (np.real(s.matrix[a, a]) * np.real(s.matrix[b, b])))


def univariate_closed_forms(s_xx: float, s_yy: float, s_yx: complex) -> Tuple[float, float, float]:
    """(total, lagged, instantaneous) for two univariate series, written out directly"""
    prod = s_xx * s_yy
    re2, im2 = s_yx.real ** 2, s_yx.imag ** 2
    total = math.log(prod / (prod - re2 - im2))
    instantaneous = math.log(prod / (prod - re2))
    lagged = math.log((prod - re2) / (prod - re2 - im2))
    return total, lagged, instantaneous