import functools
import logging
import typing as t
from pathlib import Path

import click

from spectral_dependence import __version__, measures
from spectral_dependence.config import build_analysis_config, load_simulation_config
from spectral_dependence.exception_handlers import DEFAULT_HANDLERS
from spectral_dependence.ingest import write_segments
from spectral_dependence.params import DetrendMode, FileFormat, Scale, Taper
from spectral_dependence.pipeline import run_analysis
from spectral_dependence.selftest import run_suites
from spectral_dependence.simulate import PRNG_NAME, run_simulation
from spectral_dependence.writers import JsonArtifact

logger = logging.getLogger(__name__)

SELFTEST_FAILED = 1


class CommandGuard:
    """Turns library exceptions into exit codes by walking the exception's MRO."""

    def __init__(
        self,
        exception_handlers: t.Optional[t.Dict[t.Type[BaseException], t.Callable[[t.Any], int]]] = None,
    ):
        self.exception_handlers = dict(exception_handlers or {})
        for exc_class, handler in DEFAULT_HANDLERS.items():
            self.exception_handlers.setdefault(exc_class, handler)

    def chain_exception_handlers(self) -> t.Callable:
        def wrapper(command):
            @functools.wraps(command)
            def inner(*args, **kwargs):
                try:
                    return command(*args, **kwargs)
                except Exception as exc:
                    for cls in type(exc).__mro__:
                        if cls in self.exception_handlers:
                            code = self.exception_handlers[cls](exc)
                            click.get_current_context().exit(code)
                    raise exc
            return inner
        return wrapper

    def __call__(self, command: t.Callable) -> t.Callable:
        return self.chain_exception_handlers()(command)


guard = CommandGuard()


def _choices(enum_cls) -> click.Choice:
    return click.Choice([m.value for m in enum_cls])


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@click.group()
@click.version_option(__version__, prog_name="spectral-dependence")
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for debug detail.")
def main(verbose: int) -> None:
    """Lagged and instantaneous dependence between multivariate time series."""
    _configure_logging(verbose)


@main.command()
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), help="JSON or key = value file.")
@click.option("--input", "-i", "input_path", type=click.Path(dir_okay=False), help="Segmented recording.")
@click.option("--format", "fmt", type=_choices(FileFormat), help="Input format (default binary-f64).")
@click.option("--partition", help="Blocks, e.g. 'X=0,1;Y=Fz|Cz'. Default: one block per channel.")
@click.option("--bands", help="Bands, e.g. 'alpha=8-12Hz;low=1:4'.")
@click.option("--measures", help="Comma list of linear, nonlinear, all-univariate (default linear).")
@click.option("--norm", help="Normalization for nonlinear measures: block, channel or both.")
@click.option("--scale", type=_choices(Scale), help="Test statistic scale (default calibrated-2NRm1).")
@click.option("--ridge", type=float, help="Diagonal loading, as a fraction of trace/M.")
@click.option("--taper", type=_choices(Taper), help="Window applied before the DFT.")
@click.option("--detrend", type=_choices(DetrendMode), help="Per-segment detrending (default mean).")
@click.option("--sampling-rate", type=float, help="Samples per second; enables Hz bands.")
@click.option("--segment-length", type=int, help="Cut a continuous recording into segments of this length.")
@click.option("--overlap", type=float, help="Fractional overlap between consecutive segments.")
@click.option("--n-jobs", type=int, help="Worker threads.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--dump-spectra", is_flag=True, default=None, help="Also write spectra.json.")
@guard
def analyze(config_file, input_path, fmt, **options) -> None:
    """Measures, tests and a connectivity table for one recording."""
    overrides = dict(options, input=input_path, format=fmt)
    cfg = build_analysis_config(overrides, config_file)
    logger.info("analysing %s into %s", cfg.input, cfg.out)
    result = run_analysis(cfg)
    click.echo(f"{len(result.frequencies)} frequencies, {len(result.bands)} bands -> {cfg.out}")


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--format", "fmt", type=_choices(FileFormat), default=FileFormat.binary_f64.value, show_default=True)
@guard
def simulate(spec_path: str, out: str, fmt: str) -> None:
    """Generate a seeded data set plus a JSON sidecar echoing its configuration."""
    cfg = load_simulation_config(spec_path)
    s, partition = run_simulation(cfg)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = FileFormat(fmt)
    data_path = out_dir / ("segments.csv" if fmt is FileFormat.csv_long else "segments.bin")
    write_segments(s, data_path, fmt)
    JsonArtifact(out_dir / "simulation.json").set_content(
        {
            "config": cfg,
            "prng": PRNG_NAME,
            "data": data_path.name,
            "format": fmt,
            "channels": s.channel_names,
            "partition": {name: list(block) for name, block in zip(partition.names, partition.blocks)},
        }
    )
    click.echo(f"wrote {data_path}")


@main.command()
@click.option("--perturb-logdet", type=float, default=None, hidden=True)
def selftest(perturb_logdet: t.Optional[float]) -> None:
    """Closed forms, additivity, the zero-lag oracle, df table, dual paths."""
    if perturb_logdet:
        def kernel(matrix):
            return measures.logdet_psd(matrix) + perturb_logdet

        with measures.logdet_kernel(kernel):
            results = run_suites()
    else:
        results = run_suites()
    for name, passed in results.items():
        click.echo(f"{name}: {'PASS' if passed else 'FAIL'}")
    if not all(results.values()):
        click.get_current_context().exit(SELFTEST_FAILED)
