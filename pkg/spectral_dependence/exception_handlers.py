import json
import typing as t

import click
from pydantic import ValidationError

from spectral_dependence.exceptions import (
    ConfigurationError,
    DataError,
    NumericalError,
    SpectralDependenceError,
)


def _report(name: str, code: int, reason: str) -> int:
    click.echo(f"error={name} exit={code} reason={json.dumps(reason)}", err=True)
    return code


def spectral_dependence_exception_handler(exc: SpectralDependenceError) -> int:
    return _report(type(exc).__name__, exc.exit_code, exc.reason)


def configuration_exception_handler(exc: ConfigurationError) -> int:
    return _report(type(exc).__name__, 2, exc.reason)


def data_exception_handler(exc: DataError) -> int:
    return _report(type(exc).__name__, 3, exc.reason)


def numerical_exception_handler(exc: NumericalError) -> int:
    return _report(type(exc).__name__, 4, exc.reason)


def validation_exception_handler(exc: ValidationError) -> int:
    fields = "; ".join(".".join(str(p) for p in e["loc"]) + ": " + e["msg"] for e in exc.errors())
    return _report("ConfigValidationError", 2, fields)


def io_exception_handler(exc: OSError) -> int:
    # missing or unreadable input files are data problems
    return _report(type(exc).__name__, 3, f"{exc.strerror or exc}: {exc.filename}")


DEFAULT_HANDLERS: t.Dict[t.Type[BaseException], t.Callable[[t.Any], int]] = {
    SpectralDependenceError: spectral_dependence_exception_handler,
    ConfigurationError: configuration_exception_handler,
    DataError: data_exception_handler,
    NumericalError: numerical_exception_handler,
    ValidationError: validation_exception_handler,
    OSError: io_exception_handler,
}
