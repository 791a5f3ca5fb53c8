"""Segments in, reports, tests and plot tables out."""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence

from spectral_dependence import crossspectra, inference, measures
from spectral_dependence.config import AnalysisConfig, BandSpec, resolve_partition
from spectral_dependence.exceptions import ConfigurationError
from spectral_dependence.ingest import detrend, load_segments, segment, taper
from spectral_dependence.models import BlockPartition, CrossSpectrum, Freq, FrequencyBand, SegmentSet, freq_label
from spectral_dependence.params import Analysis, MeasureKind, NormMode, Scale
from spectral_dependence.reports import CrossSpectrumRecord, FrequencyEntry, PairRow, TestGroup
from spectral_dependence.spectral import POSITIVE_HALF, bin_frequencies, dft, normalize_block, normalize_channel
from spectral_dependence.writers import ConnectivityCsv, JsonArtifact

logger = logging.getLogger(__name__)


class AnalysisResult(NamedTuple):
    frequencies: List[FrequencyEntry]
    bands: List[FrequencyEntry]
    tests: List[TestGroup]
    pairs: List[PairRow]
    spectra: List[CrossSpectrumRecord]


class _Unit(NamedTuple):
    entry: FrequencyEntry
    tests: List[TestGroup]
    pairs: List[PairRow]
    spectra: List[CrossSpectrumRecord]


class Analyzer:
    """Every requested measure at every retained frequency and band of one SegmentSet."""

    def __init__(
        self,
        s: SegmentSet,
        partition: BlockPartition,
        *,
        requested: Sequence[Analysis] = (Analysis.linear,),
        norms: Sequence[NormMode] = (),
        scale: Scale = Scale.calibrated,
        ridge: float = 0.0,
        bands: Sequence[BandSpec] = (),
        keep_spectra: bool = False,
    ):
        partition.validate_for(s.n_channels)
        norms = set(norms) if Analysis.nonlinear in requested else set()
        if partition.k < 2 and (Analysis.linear in requested or NormMode.block in norms):
            raise ConfigurationError(f"block measures need at least two blocks, got {partition}")
        if Analysis.all_univariate in requested and len(partition.indices) < 2:
            raise ConfigurationError("all-univariate measures need at least two channels")
        self.s = s
        self.partition = partition
        self.requested = set(requested)
        self.norms = norms
        self.scale = scale
        self.ridge = ridge
        self.keep_spectra = keep_spectra
        self.raw = dft(s, POSITIVE_HALF)
        self.block = normalize_block(self.raw, partition) if NormMode.block in self.norms else None
        self.channel = normalize_channel(self.raw, partition.indices) if NormMode.channel in self.norms else None
        self.bands = [self._resolve_band(b) for b in bands]

    def _resolve_band(self, spec: BandSpec) -> FrequencyBand:
        retained = self.raw.freq_indices
        if spec.hz is not None:
            return crossspectra.band_from_hz(
                spec.name, spec.hz[0], spec.hz[1],
                n_t=self.s.n_samples, sampling_rate=self.s.sampling_rate, retained=retained,
            )
        return crossspectra.band_from_bins(spec.name, spec.bins, retained)

    def _hz(self, freq: Freq) -> Optional[List[float]]:
        if self.s.sampling_rate is None:
            return None
        bins = freq.freq_indices if isinstance(freq, FrequencyBand) else [freq]
        hz = bin_frequencies(bins, self.s.n_samples, self.s.sampling_rate)
        return [float(hz.min()), float(hz.max())]

    def _spectrum(self, ensemble, freq: Freq) -> CrossSpectrum:
        if isinstance(freq, FrequencyBand):
            return crossspectra.accumulate_band(ensemble, freq)
        return crossspectra.accumulate(ensemble, freq)

    def _tests(self, report, s: CrossSpectrum) -> TestGroup:
        n_effective = s.n_segments * s.n_pooled
        return TestGroup(
            freq=report.freq,
            scope=report.scope,
            block_names=report.block_names,
            n_effective=n_effective,
            results=inference.test_dependence(report, self.s.n_samples, n_effective, self.scale),
        )

    def _pairs(self, kind: MeasureKind, s: CrossSpectrum, freq: Freq, whole) -> List[PairRow]:
        hz = self._hz(freq)
        low, high = (hz[0], hz[1]) if hz else (None, None)
        if self.partition.k == 2:
            found = [(0, 1, whole)]
        else:
            found = measures.pairwise_dependence(s, self.partition, kind, ridge=self.ridge)
        return [
            PairRow(
                freq=freq_label(freq), hz_low=low, hz_high=high,
                block_a=self.partition.names[i], block_b=self.partition.names[j], kind=kind, report=r,
            )
            for i, j, r in found
        ]

    def analyze(self, freq: Freq) -> _Unit:
        n_pooled = len(freq) if isinstance(freq, FrequencyBand) else 1
        entry = FrequencyEntry(freq=freq_label(freq), hz=self._hz(freq), n_pooled=n_pooled)
        tests: List[TestGroup] = []
        pairs: List[PairRow] = []
        spectra: List[CrossSpectrumRecord] = []

        raw = self._spectrum(self.raw, freq)
        spectra.append(crossspectra.to_record(raw))
        if Analysis.linear in self.requested:
            report = measures.linear_dependence(raw, self.partition, ridge=self.ridge)
            entry.reports.append(report)
            tests.append(self._tests(report, raw))
            pairs.extend(self._pairs(MeasureKind.linear, raw, freq, report))
            if self.partition.k == 2:
                entry.legacy.append(measures.legacy_2007a(raw, self.partition, ridge=self.ridge))
        if Analysis.all_univariate in self.requested:
            report = measures.all_univariate_linear(raw, self.partition.indices, ridge=self.ridge)
            entry.reports.append(report)
            tests.append(self._tests(report, raw))
        if self.block is not None:
            s_block = self._spectrum(self.block, freq)
            spectra.append(crossspectra.to_record(s_block))
            report = measures.nonlinear_dependence(s_block, self.partition, ridge=self.ridge)
            entry.reports.append(report)
            pairs.extend(self._pairs(MeasureKind.nonlinear, s_block, freq, report))
            if self.partition.k == 2:
                entry.legacy.append(measures.legacy_2007a(s_block, self.partition, ridge=self.ridge))
        if self.channel is not None:
            s_channel = self._spectrum(self.channel, freq)
            spectra.append(crossspectra.to_record(s_channel))
            # the channel ensemble holds only the partition channels, in joint order
            labels = [f"ch_{c}" for c in self.partition.indices]
            entry.reports.append(measures.all_univariate_nonlinear(s_channel, ridge=self.ridge, names=labels))
        return _Unit(entry, tests, pairs, spectra if self.keep_spectra else [])

    def run(self, n_jobs: int = 1) -> AnalysisResult:
        work: List[Freq] = list(self.raw.freq_indices) + list(self.bands)
        logger.debug("analysing %d frequencies and %d bands with %d workers", len(self.raw.freq_indices), len(self.bands), n_jobs)
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            # map yields in submission order whatever the completion order
            units = list(pool.map(self.analyze, work))
        n_freqs = len(self.raw.freq_indices)
        return AnalysisResult(
            frequencies=[u.entry for u in units[:n_freqs]],
            bands=[u.entry for u in units[n_freqs:]],
            tests=[g for u in units for g in u.tests],
            pairs=[p for u in units for p in u.pairs],
            spectra=[r for u in units for r in u.spectra],
        )


def prepare_segments(cfg: AnalysisConfig) -> SegmentSet:
    s = load_segments(cfg.input, cfg.format, sampling_rate=cfg.sampling_rate)
    if cfg.segment_length is not None:
        if s.n_segments != 1:
            raise ConfigurationError("segment_length applies to continuous (single-segment) recordings only")
        s = segment(
            s.data[0], cfg.segment_length, cfg.overlap,
            sampling_rate=s.sampling_rate, channel_names=s.channel_names,
        )
        logger.info("segmented into %s", s)
    return taper(detrend(s, cfg.detrend), cfg.taper)


def run_analysis(cfg: AnalysisConfig) -> AnalysisResult:
    s = prepare_segments(cfg)
    partition = resolve_partition(cfg.partition, s.channel_names)
    analyzer = Analyzer(
        s,
        partition,
        requested=cfg.measures,
        norms=cfg.norm,
        scale=cfg.effective_scale,
        ridge=cfg.ridge,
        bands=cfg.band_specs,
        keep_spectra=cfg.dump_spectra,
    )
    result = analyzer.run(cfg.n_jobs)
    write_outputs(result, cfg.out, s=s, partition=partition, scale=analyzer.scale, dump_spectra=cfg.dump_spectra)
    return result


def write_outputs(
    result: AnalysisResult,
    out: Path,
    *,
    s: SegmentSet,
    partition: BlockPartition,
    scale: Scale,
    dump_spectra: bool = False,
) -> Dict[str, Path]:
    meta = {
        "n_segments": s.n_segments,
        "n_samples": s.n_samples,
        "sampling_rate": s.sampling_rate,
        "channels": s.channel_names,
        "partition": {name: list(block) for name, block in zip(partition.names, partition.blocks)},
    }
    written = {
        "reports": JsonArtifact(out / "reports.json").set_content(
            {**meta, "frequencies": result.frequencies, "bands": result.bands}
        ),
        "tests": JsonArtifact(out / "tests.json").set_content({"scale": scale, "tests": result.tests}),
        "connectivity": ConnectivityCsv(out / "connectivity.csv").set_content(result.pairs),
    }
    if dump_spectra:
        written["spectra"] = JsonArtifact(out / "spectra.json").set_content(result.spectra)
    for path in written.values():
        logger.info("wrote %s", path)
    return written
