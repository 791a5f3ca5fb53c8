from typing import List, Optional, Sequence, Tuple

import numpy as np

from spectral_dependence.exceptions import ConfigurationError, NotHermitianError

HERMITIAN_RTOL = 1e-10


def check_hermitian(matrix: np.ndarray, *, rtol: float = HERMITIAN_RTOL) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {matrix.shape}")
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    asym = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if asym > rtol * scale:
        raise NotHermitianError(f"matrix is not Hermitian: max |A - A^H| = {asym:.3e}, max |A| = {scale:.3e}")


def hermitian_from_lower(matrix: np.ndarray) -> np.ndarray:
    """rebuild a Hermitian matrix from its lower triangle; the diagonal is made real"""
    lower = np.tril(matrix, -1)
    out = lower + lower.conj().T
    if np.iscomplexobj(matrix):
        out = out + np.diag(np.real(np.diag(matrix))).astype(matrix.dtype)
    else:
        out = out + np.diag(np.diag(matrix))
    return out


def pairwise_mean(values: np.ndarray, axis: int = 0) -> np.ndarray:
    # numpy sums the contiguous last axis pairwise
    moved = np.ascontiguousarray(np.moveaxis(values, axis, -1))
    return np.sum(moved, axis=-1) / moved.shape[-1]


def outer_products(vectors: np.ndarray) -> np.ndarray:
    """v v^H for every leading index of a [..., M] array -> [..., M, M]"""
    return vectors[..., :, None] * np.conj(vectors[..., None, :])


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def parse_index_list(text: str) -> List[int]:
    """'3,4,7' or '3:6' (inclusive) or a mix of both -> sorted distinct ints"""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                lo, hi = part.split(":", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigurationError(f"cannot parse index list {text!r}")
    if not out:
        raise ConfigurationError(f"empty index list {text!r}")
    return sorted(set(out))


def parse_hz_range(text: str) -> Optional[Tuple[float, float]]:
    """'8-12Hz' -> (8.0, 12.0); None when text is not a Hz range"""
    stripped = text.strip()
    if not stripped.lower().endswith("hz"):
        return None
    body = stripped[:-2].strip()
    lo, sep, hi = body.partition("-")
    if not sep:
        raise ConfigurationError(f"Hz range must look like 'lo-hiHz', got {text!r}")
    try:
        low, high = float(lo), float(hi)
    except ValueError:
        raise ConfigurationError(f"cannot parse Hz range {text!r}")
    if low > high:
        raise ConfigurationError(f"Hz range {text!r} has lo > hi")
    return low, high


def split_assignments(text: str) -> List[Tuple[str, str]]:
    """'A=0,1;B=2' -> [('A', '0,1'), ('B', '2')]"""
    pairs: List[Tuple[str, str]] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, value = chunk.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ConfigurationError(f"expected NAME=VALUE, got {chunk!r}")
        pairs.append((name.strip(), value.strip()))
    return pairs


def pairs_of(items: Sequence[int]) -> List[Tuple[int, int]]:
    return [(a, b) for i, a in enumerate(items) for b in items[i + 1:]]
