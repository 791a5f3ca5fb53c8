import csv
import io
import json
import math
import typing as t
from pathlib import Path

from pydantic.json import pydantic_encoder

from spectral_dependence.reports import PairRow
from spectral_dependence.utils import format_float


class Artifact:
    """One output file; subclasses decide how content is rendered."""

    def __init__(self, path: t.Union[str, Path]):
        self.path = Path(path)

    def render(self, data: t.Any) -> str:
        raise NotImplementedError

    def set_content(self, data: t.Any) -> Path:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(self.render(data), encoding="utf-8")
        return self.path


NON_FINITE = {math.inf: "inf", -math.inf: "-inf"}


def finite_only(value: t.Any) -> t.Any:
    """Non-finite floats as the strings "inf", "-inf" and "nan"; pydantic float fields parse them back."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else NON_FINITE[value]
    if isinstance(value, dict):
        return {k: finite_only(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite_only(v) for v in value]
    return value


class _Float17Encoder(json.JSONEncoder):
    """Standard JSON text whose floats carry 17 significant digits, like the CSV outputs."""

    def iterencode(self, o: t.Any, _one_shot: bool = False) -> t.Iterator[str]:
        def floatstr(value: float) -> str:
            if not math.isfinite(value):
                raise ValueError(f"non-finite float {value!r} is not valid JSON")
            text = format_float(value)
            return text if any(c in text for c in ".e") else f"{text}.0"

        return json.encoder._make_iterencode(  # type: ignore[attr-defined]
            {} if self.check_circular else None,
            self.default,
            json.encoder.py_encode_basestring_ascii if self.ensure_ascii else json.encoder.py_encode_basestring,
            self.indent,
            floatstr,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )(o, 0)


class JsonArtifact(Artifact):
    indent = 2
    separators = (",", ": ")

    def render(self, data: t.Any) -> str:
        plain = finite_only(json.loads(json.dumps(data, default=pydantic_encoder)))
        text = json.dumps(
            plain, cls=_Float17Encoder, allow_nan=False, indent=self.indent, separators=self.separators
        )
        return f"{text}\n"


class CsvArtifact(Artifact):
    header: t.Sequence[str] = ()

    def row(self, item: t.Any) -> t.Sequence[str]:
        return item

    def render(self, data: t.Iterable[t.Any]) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.header:
            writer.writerow(self.header)
        for item in data:
            writer.writerow(self.row(item))
        return buf.getvalue()


def _num(value: t.Optional[float]) -> str:
    return "" if value is None else format_float(value)


class ConnectivityCsv(CsvArtifact):
    """block pair x frequency/band table, rho2 first, the raw measures after"""

    header = (
        "freq", "hz_low", "hz_high", "block_a", "block_b", "kind",
        "rho2_total", "rho2_lagged", "rho2_instantaneous",
        "total", "lagged", "instantaneous", "flags",
    )

    def row(self, item: PairRow) -> t.Sequence[str]:
        r = item.report
        return (
            str(item.freq), _num(item.hz_low), _num(item.hz_high), item.block_a, item.block_b, item.kind.value,
            _num(r.rho2.total), _num(r.rho2.lagged), _num(r.rho2.instantaneous),
            _num(r.total), _num(r.lagged), _num(r.instantaneous),
            "|".join(f.value for f in r.flags),
        )
