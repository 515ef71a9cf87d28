"""Peak location, diagnostic band heights, band assignment and separation QC.

All functions expect a baseline-corrected absorbance spectrum. Values below
zero are treated as zero (below the baseline), so every reported height and
prominence is non-negative and prominence never exceeds height.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import peak_prominences

from .errors import ConfigError, WindowOutOfRange
from .spectra_io import Spectrum

DEFAULT_HALF_WIDTH = 10.0
DEFAULT_REL_THRESHOLD = 0.05
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class Peak:
    position: float
    height: float
    prominence: float

    def to_dict(self) -> dict:
        return {"position": self.position, "height": self.height, "prominence": self.prominence}


@dataclass(frozen=True)
class BandDefinition:
    label: str
    lo: float
    hi: float
    group: str
    vibration: str = ""

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"band {self.label!r}: lo must be below hi")
        if self.lo < 800 or self.hi > 4000:
            raise ConfigError(f"band {self.label!r}: [{self.lo}, {self.hi}] leaves 800-4000 cm-1")

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def contains(self, position: float) -> bool:
        return self.lo <= position <= self.hi

    def to_dict(self) -> dict:
        return {
            "label": self.label, "lo": self.lo, "hi": self.hi,
            "group": self.group, "vibration": self.vibration,
        }


ALIPHATIC_STRETCH = BandDefinition(
    "aliphatic C-H stretch", 2800.0, 3000.0,
    "aliphatic hydrocarbon (-CH3, -CH2-)", "C-H stretching",
)
ALIPHATIC_BEND = BandDefinition(
    "aliphatic C-H bend", 1350.0, 1460.0,
    "aliphatic hydrocarbon (-CH2-)", "C-H bending",
)

DEFAULT_BANDS: tuple[BandDefinition, ...] = (
    ALIPHATIC_STRETCH,
    ALIPHATIC_BEND,
    BandDefinition(
        "carbonyl C=O", 1590.0, 1800.0,
        "ketones, carboxylic acids, aldehydes, esters", "C=O stretching",
    ),
    BandDefinition("C-O", 1024.0, 1100.0, "alcohols, phenols", "C-O stretching"),
    BandDefinition("N-H stretch 1645", 1630.0, 1660.0, "amine (NH2)", "N-H stretching"),
    BandDefinition("N-H stretch 3385", 3370.0, 3400.0, "amine (NH2)", "N-H stretching"),
)

ALIPHATIC_BANDS = (ALIPHATIC_STRETCH, ALIPHATIC_BEND)


def _nonneg(y: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(y, dtype=np.float64), 0.0)


def band_height(s: Spectrum, center: float, half_width: float = DEFAULT_HALF_WIDTH) -> Peak:
    """Largest absorbance inside ``center +/- half_width``.

    The prominence is measured against the lowest sample on each side of the
    maximum within the window, taking the higher of the two.
    """
    lo, hi = center - half_width, center + half_width
    if lo < s.x[0] - _EDGE_TOL or hi > s.x[-1] + _EDGE_TOL:
        raise WindowOutOfRange(
            f"window [{lo:g}, {hi:g}] not covered by spectrum [{s.x[0]:g}, {s.x[-1]:g}]"
        )
    mask = (s.x >= lo - _EDGE_TOL) & (s.x <= hi + _EDGE_TOL)
    if not mask.any():
        raise WindowOutOfRange(f"no samples inside window [{lo:g}, {hi:g}]")
    xw = s.x[mask]
    yw = _nonneg(s.y[mask])
    i = int(np.argmax(yw))
    height = float(yw[i])
    floor = max(yw[: i + 1].min(), yw[i:].min())
    return Peak(position=float(xw[i]), height=height, prominence=float(height - floor))


def local_maxima(y: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima."""
    y = np.asarray(y)
    if y.size < 3:
        return np.empty(0, dtype=np.intp)
    mid = y[1:-1]
    return np.flatnonzero((mid > y[:-2]) & (mid > y[2:])) + 1


def detect_peaks(s: Spectrum, min_prominence: float = 0.0) -> list[Peak]:
    """All strict local maxima with topographic prominence >= ``min_prominence``.

    Prominence is the peak value minus the higher of the two flanking minima,
    each taken between the peak and the nearest strictly higher sample (or the
    spectrum edge) on that side.
    """
    y = _nonneg(s.y)
    idx = local_maxima(y)
    if idx.size == 0:
        return []
    prom = peak_prominences(y, idx)[0]
    return [
        Peak(position=float(s.x[i]), height=float(y[i]), prominence=float(p))
        for i, p in zip(idx, prom)
        if p >= min_prominence
    ]


def assign_bands(peaks, table=DEFAULT_BANDS) -> list[tuple[Peak, BandDefinition]]:
    """Pair each peak with every band whose closed range contains it."""
    return [(p, band) for p in peaks for band in table if band.contains(p.position)]


class SeparationStatus(str, enum.Enum):
    COMPLETE = "Complete"
    INCOMPLETE = "Incomplete"


@dataclass(frozen=True)
class SeparationVerdict:
    status: SeparationStatus
    offending_bands: tuple[tuple[BandDefinition, Peak], ...] = field(default_factory=tuple)
    threshold_used: float = DEFAULT_REL_THRESHOLD
    global_max: float = 0.0

    @property
    def complete(self) -> bool:
        return self.status is SeparationStatus.COMPLETE

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "threshold_used": self.threshold_used,
            "threshold_kind": "relative to global maximum absorbance",
            "absolute_threshold": self.threshold_used * self.global_max,
            "global_max": self.global_max,
            "offending_bands": [
                {"band": band.to_dict(), "peak": peak.to_dict()}
                for band, peak in self.offending_bands
            ],
        }


def separation_verdict(
    aqueous: Spectrum,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    bands=ALIPHATIC_BANDS,
) -> SeparationVerdict:
    """Decide whether an aqueous-phase spectrum is free of carbon-chain bands.

    The separation is ``Incomplete`` when the height in any aliphatic window
    exceeds ``rel_threshold`` times the spectrum's global maximum.
    """
    if not 0 <= rel_threshold <= 1:
        raise ConfigError("rel_threshold must lie in [0, 1]")
    gmax = float(_nonneg(aqueous.y).max())
    limit = rel_threshold * gmax
    offending = []
    for band in bands:
        peak = band_height(aqueous, band.center, band.half_width)
        if peak.height > limit:
            offending.append((band, peak))
    status = SeparationStatus.INCOMPLETE if offending else SeparationStatus.COMPLETE
    return SeparationVerdict(status, tuple(offending), rel_threshold, gmax)


def load_band_table(path: str | Path) -> tuple[BandDefinition, ...]:
    """Read a band table: CSV rows ``label, lo, hi, group[, vibration]``.

    Blank lines, ``#`` comments and a single header row are skipped.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read band table {path}: {exc.strerror or exc}") from None
    bands = []
    header_seen = False
    rows = csv.reader(io.StringIO(text), skipinitialspace=True)
    for lineno, row in enumerate(rows, start=1):
        row = [c.strip() for c in row]
        if not row or not any(row) or row[0].startswith("#"):
            continue
        if len(row) not in (4, 5):
            raise ConfigError(f"{path}:{lineno}: expected 4 or 5 columns, got {len(row)}")
        try:
            lo, hi = float(row[1]), float(row[2])
        except ValueError:
            if not bands and not header_seen:
                header_seen = True
                continue
            raise ConfigError(f"{path}:{lineno}: lo/hi must be numeric") from None
        bands.append(BandDefinition(row[0], lo, hi, row[3], row[4] if len(row) == 5 else ""))
    if not bands:
        raise ConfigError(f"band table {path} has no rows")
    return tuple(bands)
