"""Loading, segmenting and preconditioning multichannel recordings."""
import csv
import io
import logging
import struct
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.signal import windows

from spectral_dependence.exceptions import ConfigurationError, DimensionError, MalformedInputError
from spectral_dependence.models import SegmentSet
from spectral_dependence.params import DetrendMode, FileFormat, Taper
from spectral_dependence.utils import format_float

logger = logging.getLogger(__name__)

SEGMENT_MAGIC = b"SDSEG1"
_COUNTS = struct.Struct("<III")
_HEADER_SIZE = len(SEGMENT_MAGIC) + _COUNTS.size

PathLike = Union[str, Path]


def load_segments(
    path: PathLike,
    fmt: Union[FileFormat, str] = FileFormat.binary_f64,
    *,
    sampling_rate: Optional[float] = None,
) -> SegmentSet:
    fmt = FileFormat(fmt)
    path = Path(path)
    if fmt is FileFormat.csv_long:
        s = _read_csv_long(path.read_text(encoding="utf-8"), sampling_rate)
    else:
        s = _read_binary(path.read_bytes(), sampling_rate)
    logger.info("loaded %s from %s", s, path)
    return s


def write_segments(s: SegmentSet, path: PathLike, fmt: Union[FileFormat, str] = FileFormat.binary_f64) -> None:
    fmt = FileFormat(fmt)
    path = Path(path)
    if fmt is FileFormat.csv_long:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["segment", "time"] + list(s.channel_names))
        for j in range(s.n_segments):
            for t in range(s.n_samples):
                writer.writerow([j, t] + [format_float(v) for v in s.data[j, t]])
        path.write_text(buf.getvalue(), encoding="utf-8")
    else:
        payload = np.ascontiguousarray(s.data, dtype="<f8").tobytes()
        path.write_bytes(SEGMENT_MAGIC + _COUNTS.pack(s.n_segments, s.n_samples, s.n_channels) + payload)


def _read_binary(buf: bytes, sampling_rate: Optional[float]) -> SegmentSet:
    if len(buf) == 0:
        raise MalformedInputError("empty file", byte=0)
    if buf[: len(SEGMENT_MAGIC)] != SEGMENT_MAGIC:
        raise MalformedInputError(f"bad magic, expected {SEGMENT_MAGIC!r}", byte=0)
    if len(buf) < _HEADER_SIZE:
        raise MalformedInputError("truncated header", byte=len(buf))
    n_r, n_t, m = _COUNTS.unpack_from(buf, len(SEGMENT_MAGIC))
    expected = _HEADER_SIZE + 8 * n_r * n_t * m
    if len(buf) != expected:
        raise MalformedInputError(
            f"header declares {n_r}x{n_t}x{m} samples ({expected} bytes) but file has {len(buf)} bytes",
            byte=min(len(buf), expected),
        )
    data = np.frombuffer(buf, dtype="<f8", offset=_HEADER_SIZE).reshape(n_r, n_t, m)
    return SegmentSet(data=data.astype(np.float64), sampling_rate=sampling_rate)


def _read_csv_long(text: str, sampling_rate: Optional[float]) -> SegmentSet:
    rows = csv.reader(io.StringIO(text))
    header: Optional[List[str]] = None
    segments: List[List[List[float]]] = []
    last_seg, last_t = -1, -1
    for row in rows:
        lineno = rows.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if header is None:
            header = [f.strip() for f in row]
            if len(header) < 3 or header[0] != "segment" or header[1] != "time":
                raise MalformedInputError("header must be 'segment,time,<channel>,...'", line=lineno)
            continue
        n_channels = len(header) - 2
        if len(row) != n_channels + 2:
            raise DimensionError(
                f"line {lineno}: row carries {len(row) - 2} channels but the header declares {n_channels}"
            )
        try:
            seg, t = int(row[0]), int(row[1])
        except ValueError:
            raise MalformedInputError(f"segment/time must be integers, got {row[0]!r},{row[1]!r}", line=lineno)
        try:
            values = [float(f) for f in row[2:]]
        except ValueError:
            raise MalformedInputError("non-numeric sample value", line=lineno)
        if seg == last_seg and t == last_t + 1:
            segments[-1].append(values)
        elif seg == last_seg + 1 and t == 0:
            segments.append([values])
        else:
            raise MalformedInputError(
                f"rows must be sorted by (segment, time) without gaps; got ({seg}, {t}) after ({last_seg}, {last_t})",
                line=lineno,
            )
        last_seg, last_t = seg, t
    if header is None:
        raise MalformedInputError("empty file", line=1)
    if not segments:
        raise MalformedInputError("no sample rows after the header", line=2)
    lengths = {len(s) for s in segments}
    if len(lengths) != 1:
        raise DimensionError(f"ragged segment lengths {sorted(lengths)}")
    return SegmentSet(data=np.array(segments), sampling_rate=sampling_rate, channel_names=header[2:])


def segment(
    continuous: np.ndarray,
    n_t: int,
    overlap: float = 0.0,
    *,
    sampling_rate: Optional[float] = None,
    channel_names: Optional[Sequence[str]] = None,
) -> SegmentSet:
    """Cut a [time][channel] recording into windows of n_t samples.

    The step between window starts is round(n_t * (1 - overlap)), rounding
    halves up. Trailing samples that do not fill a window are dropped.
    """
    x = np.asarray(continuous, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DimensionError(f"continuous input must be [time][channel], got {x.ndim} dims")
    if n_t < 2:
        raise ConfigurationError(f"segment length must be >= 2, got {n_t}")
    if not 0.0 <= overlap < 1.0:
        raise ConfigurationError(f"overlap must lie in [0, 1), got {overlap}")
    step = int(np.floor(n_t * (1.0 - overlap) + 0.5))
    if step < 1:
        raise ConfigurationError(f"overlap {overlap} leaves a step of {step} samples")
    total = x.shape[0]
    if total < n_t:
        raise DimensionError(f"recording has {total} samples, fewer than the segment length {n_t}")
    starts = np.arange((total - n_t) // step + 1) * step
    data = np.stack([x[s: s + n_t] for s in starts])
    dropped = total - (int(starts[-1]) + n_t)
    if dropped:
        logger.debug("dropped %d trailing samples that do not fill a segment", dropped)
    return SegmentSet(data=data, sampling_rate=sampling_rate, channel_names=channel_names)


def detrend(s: SegmentSet, mode: Union[DetrendMode, str] = DetrendMode.mean) -> SegmentSet:
    if DetrendMode(mode) is DetrendMode.none:
        return s
    return s.replace(s.data - s.data.mean(axis=1, keepdims=True))


def taper(s: SegmentSet, window: Union[Taper, str] = Taper.hann) -> SegmentSet:
    # applied before the DFT; an estimation choice, not part of the measures
    if Taper(window) is Taper.none:
        return s
    w = windows.hann(s.n_samples, sym=False)
    return s.replace(s.data * w[None, :, None])
