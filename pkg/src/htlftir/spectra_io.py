"""Reading, writing and unit conversion of infrared spectra.

Two interchange formats are supported:

* CSV: optional ``# key: value`` metadata comments, an optional header row,
  then two numeric columns (wavenumber, intensity) separated by a comma or
  whitespace.
* A JCAMP-DX subset: single block, ``##XYDATA=(X++(Y..Y))`` with plain AFFN
  numerals. Compressed forms (SQZ/DIF/DUP) are rejected.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    DuplicateWavenumber,
    IntensityOutOfRange,
    MalformedRow,
    MissingRecord,
    NonFiniteValue,
    NonIncreasingAxis,
    NonUniformGrid,
    ParseError,
    PointCountMismatch,
    TooFewPoints,
    UnknownYUnit,
    UnsupportedEncoding,
    UnsupportedXUnits,
)

MIN_POINTS = 16
TRANSMITTANCE_FLOOR = 1e-6


class YUnit(str, enum.Enum):
    TRANSMITTANCE_PERCENT = "TransmittancePercent"
    TRANSMITTANCE_FRACTION = "TransmittanceFraction"
    ABSORBANCE = "Absorbance"

    @property
    def is_transmittance(self) -> bool:
        return self is not YUnit.ABSORBANCE


# CLI flag spellings and header tokens, compared after lower-casing and
# stripping spaces/underscores.
_Y_UNIT_ALIASES = {
    "percent-t": YUnit.TRANSMITTANCE_PERCENT,
    "transmittancepercent": YUnit.TRANSMITTANCE_PERCENT,
    "%t": YUnit.TRANSMITTANCE_PERCENT,
    "t%": YUnit.TRANSMITTANCE_PERCENT,
    "transmittance(%)": YUnit.TRANSMITTANCE_PERCENT,
    "%transmittance": YUnit.TRANSMITTANCE_PERCENT,
    "fraction-t": YUnit.TRANSMITTANCE_FRACTION,
    "transmittancefraction": YUnit.TRANSMITTANCE_FRACTION,
    "transmittance": YUnit.TRANSMITTANCE_FRACTION,
    "t": YUnit.TRANSMITTANCE_FRACTION,
    "absorbance": YUnit.ABSORBANCE,
    "abs": YUnit.ABSORBANCE,
    "a": YUnit.ABSORBANCE,
    "absorbance(au)": YUnit.ABSORBANCE,
}


def parse_y_unit(token: str | YUnit) -> YUnit:
    """Map a CLI flag value or header token onto a :class:`YUnit`."""
    if isinstance(token, YUnit):
        return token
    key = re.sub(r"[\s_]+", "", token.strip().lower())
    try:
        return _Y_UNIT_ALIASES[key]
    except KeyError:
        raise UnknownYUnit(f"unrecognized intensity unit {token!r}") from None


def _readonly(values) -> np.ndarray:
    out = np.array(values, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Immutable wavenumber/intensity series.

    ``x`` is in cm^-1 and strictly increasing; ``y`` is expressed in
    ``y_unit``. Construction validates the invariants and raises a
    :class:`~htlftir.errors.ParseError` subclass on violation.
    """

    id: str
    x: np.ndarray
    y: np.ndarray
    y_unit: YUnit
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        x = _readonly(self.x)
        y = _readonly(self.y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "y_unit", parse_y_unit(self.y_unit))
        object.__setattr__(self, "metadata", dict(self.metadata))

        if x.ndim != 1 or x.shape != y.shape:
            raise ParseError("x and y must be one-dimensional and of equal length")
        if x.size < MIN_POINTS:
            raise TooFewPoints(f"{x.size} points, at least {MIN_POINTS} required")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise NonFiniteValue("spectrum contains NaN or infinite values")
        if np.any(np.diff(x) <= 0):
            raise NonIncreasingAxis("wavenumbers must be strictly increasing")
        if self.y_unit is YUnit.TRANSMITTANCE_PERCENT:
            if y.min() <= 0 or y.max() > 100:
                raise IntensityOutOfRange("percent transmittance must lie in (0, 100]")
        elif self.y_unit is YUnit.TRANSMITTANCE_FRACTION:
            if y.min() <= 0 or y.max() > 1:
                raise IntensityOutOfRange("fractional transmittance must lie in (0, 1]")

    def __len__(self) -> int:
        return int(self.x.size)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def replace(self, y=None, x=None, y_unit=None, **meta) -> "Spectrum":
        """Derived spectrum sharing id and metadata, with updated arrays."""
        metadata = dict(self.metadata)
        metadata.update(meta)
        return Spectrum(
            id=self.id,
            x=self.x if x is None else x,
            y=self.y if y is None else y,
            y_unit=self.y_unit if y_unit is None else y_unit,
            metadata=metadata,
        )

    def isclose(self, other: "Spectrum", atol: float = 1e-9) -> bool:
        """True if both spectra share y_unit and every point agrees within ``atol``."""
        return (
            self.y_unit is other.y_unit
            and self.x.shape == other.x.shape
            and bool(np.all(np.abs(self.x - other.x) <= atol))
            and bool(np.all(np.abs(self.y - other.y) <= atol))
        )

    def is_uniform(self, rtol: float = 1e-6) -> bool:
        dx = np.diff(self.x)
        return bool(np.all(np.abs(dx - dx.mean()) <= rtol * dx.mean()))


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc}") from None


def _fmt(value: float) -> str:
    # shortest repr round-trips exactly
    return repr(float(value))


def _to_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedRow(line, f"not a number: {token!r}") from None
    if not math.isfinite(value):
        raise NonFiniteValue(f"line {line}: non-finite value {token!r}")
    return value


def _finish(id: str, x: list[float], y: list[float], y_unit: YUnit, metadata) -> Spectrum:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    order = np.argsort(xa, kind="stable")
    xa, ya = xa[order], ya[order]
    dup = np.flatnonzero(np.diff(xa) == 0)
    if dup.size:
        raise DuplicateWavenumber(f"wavenumber {xa[dup[0]]!r} appears more than once")
    return Spectrum(id=id, x=xa, y=ya, y_unit=y_unit, metadata=metadata)


# --------------------------------------------------------------------------- CSV

_SPLIT = re.compile(r"[,\s]+")


def parse_csv(data: bytes | str, y_unit: str | YUnit | None = None, id: str = "") -> Spectrum:
    """Parse two-column CSV text into a :class:`Spectrum` sorted by wavenumber.

    ``y_unit`` overrides any unit token found in the header row. One header
    row is tolerated, and only before the first data row.
    """
    text = _decode(data)
    metadata: dict[str, str] = {}
    header_unit: YUnit | None = None
    seen_header = False
    xs: list[float] = []
    ys: list[float] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body and not xs:
                key, value = body.split(":", 1)
                metadata[key.strip()] = value.strip()
            continue
        fields = [f for f in _SPLIT.split(line) if f]
        if not xs and not seen_header and not _numeric(fields[0]):
            seen_header = True
            if len(fields) >= 2 and y_unit is None:
                # take the whole last comma field so multi-word unit names survive
                try:
                    header_unit = parse_y_unit(line.split(",")[-1] if "," in line else fields[-1])
                except UnknownYUnit:
                    header_unit = None
            continue
        if len(fields) != 2:
            raise MalformedRow(lineno, f"expected 2 columns, found {len(fields)}")
        xs.append(_to_float(fields[0], lineno))
        ys.append(_to_float(fields[1], lineno))

    unit = parse_y_unit(y_unit) if y_unit is not None else header_unit
    if unit is None:
        raise UnknownYUnit("intensity unit not given by header or caller")
    return _finish(id, xs, ys, unit, metadata)


def _numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def write_csv(s: Spectrum) -> bytes:
    """Serialize ``s`` as CSV; metadata becomes leading ``# key: value`` lines."""
    lines = []
    for key, value in s.metadata.items():
        lines.append(f"# {_one_line(key)}: {_one_line(value)}")
    lines.append(f"wavenumber_cm-1,{s.y_unit.value}")
    lines.extend(f"{_fmt(xv)},{_fmt(yv)}" for xv, yv in zip(s.x, s.y))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _one_line(value) -> str:
    return " ".join(str(value).split())


# ------------------------------------------------------------------------ JCAMP

_REQUIRED = ("TITLE", "XUNITS", "YUNITS", "FIRSTX", "LASTX", "NPOINTS", "XYDATA")
_STRUCTURAL = {
    "JCAMPDX", "DATATYPE", "XUNITS", "YUNITS", "XFACTOR", "YFACTOR", "FIRSTX",
    "LASTX", "NPOINTS", "FIRSTY", "XYDATA", "END", "$YSCALE", "MAXX", "MINX",
    "MAXY", "MINY", "DELTAX",
}
# characters used by SQZ, DIF and DUP pseudo-digits
_COMPRESSED = re.compile(r"[@%A-DF-Za-df-z]")


def _norm_label(label: str) -> str:
    return re.sub(r"[\s\-/_]+", "", label).upper()


def parse_jcamp(data: bytes | str, y_unit: str | YUnit | None = None, id: str = "") -> Spectrum:
    """Parse the supported JCAMP-DX subset.

    The wavenumber axis is rebuilt from FIRSTX, LASTX and NPOINTS; the X
    value leading each data line is only used as a line marker. Y values are
    multiplied by YFACTOR.
    """
    text = _decode(data)
    records: dict[str, str] = {}
    metadata: dict[str, str] = {}
    ys: list[float] = []
    in_data = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("$$", 1)[0].strip()
        if not line:
            continue
        if line.startswith("##"):
            in_data = False
            label, _, value = line[2:].partition("=")
            key = _norm_label(label)
            value = value.strip()
            if key in records and key in ("TITLE", "XYDATA"):
                raise UnsupportedEncoding("multi-block JCAMP files are not supported")
            records[key] = value
            if key == "XYDATA":
                if re.sub(r"\s+", "", value).upper() != "(X++(Y..Y))":
                    raise UnsupportedEncoding(f"data table form {value!r} is not supported")
                in_data = True
            elif key not in _STRUCTURAL:
                metadata[label.strip().lstrip("$").strip().lower()] = value
            continue
        if not in_data:
            continue
        tokens = line.split()
        for token in tokens:
            if not _numeric(token):
                if _COMPRESSED.search(token):
                    raise UnsupportedEncoding(
                        f"line {lineno}: compressed (SQZ/DIF/DUP) data is not supported"
                    )
                raise MalformedRow(lineno, f"not a number: {token!r}")
        ys.extend(_to_float(t, lineno) for t in tokens[1:])

    missing = [k for k in _REQUIRED if k not in records]
    if missing:
        raise MissingRecord(f"missing required record(s): {', '.join('##' + m for m in missing)}")

    if _norm_label(records["XUNITS"]) != "1CM":
        raise UnsupportedXUnits(f"XUNITS={records['XUNITS']!r}; only 1/CM is supported")

    def number(key: str, default: float | None = None) -> float:
        if key not in records:
            return default
        try:
            return float(records[key])
        except ValueError:
            raise ParseError(f"##{key} is not numeric: {records[key]!r}") from None

    firstx, lastx = number("FIRSTX"), number("LASTX")
    npoints = number("NPOINTS")
    if npoints != int(npoints) or npoints < 1:
        raise ParseError(f"##NPOINTS must be a positive integer, got {records['NPOINTS']!r}")
    npoints = int(npoints)
    yfactor = number("YFACTOR", 1.0)
    if len(ys) != npoints:
        raise PointCountMismatch(f"NPOINTS={npoints} but {len(ys)} values found")

    y = np.asarray(ys, dtype=np.float64) * yfactor
    x = np.linspace(firstx, lastx, npoints)

    if y_unit is not None:
        unit = parse_y_unit(y_unit)
    else:
        yunits = _norm_label(records["YUNITS"])
        if yunits == "ABSORBANCE":
            unit = YUnit.ABSORBANCE
        elif yunits == "TRANSMITTANCE":
            scale = _norm_label(records.get("$YSCALE", ""))
            if scale == "PERCENT":
                unit = YUnit.TRANSMITTANCE_PERCENT
            elif scale == "FRACTION":
                unit = YUnit.TRANSMITTANCE_FRACTION
            else:
                # the subset carries no percent/fraction flag; any value above 1 means percent
                unit = YUnit.TRANSMITTANCE_FRACTION if y.max(initial=0) <= 1 else YUnit.TRANSMITTANCE_PERCENT
        else:
            raise UnknownYUnit(f"YUNITS={records['YUNITS']!r}; expected TRANSMITTANCE or ABSORBANCE")

    return _finish(id or records["TITLE"], x.tolist(), y.tolist(), unit, metadata)


def write_jcamp(s: Spectrum, values_per_line: int = 8) -> bytes:
    """Serialize ``s`` in the JCAMP-DX subset. The grid must be uniform."""
    expected = np.linspace(s.x[0], s.x[-1], s.x.size)
    if np.max(np.abs(expected - s.x)) > 1e-9:
        raise NonUniformGrid("JCAMP (X++(Y..Y)) output needs a uniform wavenumber grid")

    meta = dict(s.metadata)
    title = meta.pop("title", None) or s.id or "untitled"
    yunits = "ABSORBANCE" if s.y_unit is YUnit.ABSORBANCE else "TRANSMITTANCE"
    lines = [
        f"##TITLE={_one_line(title)}",
        "##JCAMP-DX=4.24",
        "##DATA TYPE=INFRARED SPECTRUM",
        "##XUNITS=1/CM",
        f"##YUNITS={yunits}",
    ]
    if s.y_unit is YUnit.TRANSMITTANCE_PERCENT:
        lines.append("##$Y SCALE=PERCENT")
    elif s.y_unit is YUnit.TRANSMITTANCE_FRACTION:
        lines.append("##$Y SCALE=FRACTION")
    for key, value in meta.items():
        lines.append(f"##${_one_line(key).upper()}={_one_line(value)}")
    lines += [
        "##XFACTOR=1",
        "##YFACTOR=1",
        f"##FIRSTX={_fmt(s.x[0])}",
        f"##LASTX={_fmt(s.x[-1])}",
        f"##NPOINTS={s.x.size}",
        f"##FIRSTY={_fmt(s.y[0])}",
        "##XYDATA=(X++(Y..Y))",
    ]
    for start in range(0, s.x.size, values_per_line):
        chunk = s.y[start:start + values_per_line]
        lines.append(" ".join([_fmt(s.x[start])] + [_fmt(v) for v in chunk]))
    lines.append("##END=")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ------------------------------------------------------------------ conversion

def to_absorbance(s: Spectrum) -> Spectrum:
    """Convert a transmittance spectrum to absorbance, ``A = -log10(T)``.

    Percent transmittance is divided by 100 first. Transmittance is floored at
    1e-6, capping absorbance at 6. Absorbance input is returned unchanged.
    """
    if s.y_unit is YUnit.ABSORBANCE:
        return s
    t = s.y / 100.0 if s.y_unit is YUnit.TRANSMITTANCE_PERCENT else s.y
    a = -np.log10(np.maximum(t, TRANSMITTANCE_FLOOR)) + 0.0
    return s.replace(y=a, y_unit=YUnit.ABSORBANCE)


# ----------------------------------------------------------------------- files

JCAMP_SUFFIXES = {".jdx", ".dx", ".jcamp", ".jcm"}
CSV_SUFFIXES = {".csv", ".txt", ".tsv", ".dat"}


def read_spectrum(path: str | Path, y_unit: str | YUnit | None = None) -> Spectrum:
    """Read a spectrum file, choosing the parser by suffix or leading ``##``."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
    is_jcamp = path.suffix.lower() in JCAMP_SUFFIXES or data.lstrip().startswith(b"##")
    parser = parse_jcamp if is_jcamp else parse_csv
    s = parser(data, y_unit=y_unit, id=path.stem)
    return s.replace(source_file=path.name)
