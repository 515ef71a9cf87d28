"""A-Factor / C-Factor computation and kerogen / maturity classification.

The A-Factor is the aliphatic share of the aliphatic plus aromatic band
heights, ``(h2930 + h2860) / (h2930 + h2860 + h1630)``; the C-Factor is the
carbonyl share of carbonyl plus aromatic, ``h1705 / (h1705 + h1630)``.

The published A/C classification diagram is not available as numbers, so the
default :class:`ClassificationGrid` is a single-anchor calibration: it maps
``A = 0.68, C = 0.58`` to Type II, VR 0.32 %, Immature. Any grid can be
loaded from a TOML file to replace it.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._toml import load_toml
from .errors import ConfigError, ZeroDenominator
from .peaks import DEFAULT_HALF_WIDTH, band_height
from .spectra_io import Spectrum

DIAGNOSTIC_BANDS = {"h2930": 2930.0, "h2860": 2860.0, "h1705": 1705.0, "h1630": 1630.0}
VR_MIN, VR_MAX = 0.0, 4.0


class KerogenType(str, enum.Enum):
    IV = "IV"
    III = "III"
    II = "II"
    I = "I"  # noqa: E741


class MaturityLevel(str, enum.Enum):
    IMMATURE = "Immature"
    MATURE = "Mature"
    PEAK_MATURE = "PeakMature"
    POSTMATURE = "Postmature"


# ordered from least to most oil-prone, matching the break intervals
_KEROGEN_ORDER = (KerogenType.IV, KerogenType.III, KerogenType.II, KerogenType.I)
_MATURITY_ORDER = (
    MaturityLevel.IMMATURE, MaturityLevel.MATURE,
    MaturityLevel.PEAK_MATURE, MaturityLevel.POSTMATURE,
)

OIL_INTENSITY = {
    KerogenType.I: "highly oil-prone",
    KerogenType.II: "moderate oil-prone",
    KerogenType.III: "low oil-prone / gas-prone",
    KerogenType.IV: "no hydrocarbon potential",
}

MATURITY_ZONE = {
    MaturityLevel.IMMATURE: "biogenic gas zone",
    MaturityLevel.MATURE: "oil window",
    MaturityLevel.PEAK_MATURE: "light oil zone",
    MaturityLevel.POSTMATURE: "thermogenic / dry gas zone",
}


def a_factor(h2930: float, h2860: float, h1630: float) -> float:
    """Aliphatic over aliphatic-plus-aromatic band height ratio."""
    _check_heights(h2930, h2860, h1630)
    aliphatic = h2930 + h2860
    total = aliphatic + h1630
    if total == 0:
        raise ZeroDenominator("A-Factor undefined: 2930, 2860 and 1630 heights are all zero")
    return aliphatic / total


def c_factor(h1705: float, h1630: float) -> float:
    """Carbonyl over carbonyl-plus-aromatic band height ratio."""
    _check_heights(h1705, h1630)
    total = h1705 + h1630
    if total == 0:
        raise ZeroDenominator("C-Factor undefined: 1705 and 1630 heights are both zero")
    return h1705 / total


def _check_heights(*heights: float) -> None:
    if any(h < 0 for h in heights):
        raise ValueError("band heights must be non-negative")


@dataclass(frozen=True)
class FactorResult:
    h2930: float
    h2860: float
    h1705: float
    h1630: float
    a_factor: float
    c_factor: float

    @classmethod
    def from_heights(cls, h2930: float, h2860: float, h1705: float, h1630: float) -> "FactorResult":
        return cls(
            h2930, h2860, h1705, h1630,
            a_factor=a_factor(h2930, h2860, h1630),
            c_factor=c_factor(h1705, h1630),
        )

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compute_factors(s: Spectrum, half_width: float = DEFAULT_HALF_WIDTH) -> FactorResult:
    """Measure the four diagnostic band heights and form both factors."""
    heights = {
        name: band_height(s, center, half_width).height
        for name, center in DIAGNOSTIC_BANDS.items()
    }
    return FactorResult.from_heights(**heights)


@dataclass(frozen=True)
class ClassificationGrid:
    """Break points for kerogen typing and maturity, and the C-Factor to VR map.

    ``vr_map`` knots are ``(c_factor, vr_percent)`` pairs with c strictly
    increasing and vr strictly decreasing.
    """

    kerogen_a_breaks: tuple[float, float, float] = (0.30, 0.55, 0.80)
    vr_map: tuple[tuple[float, float], ...] = ((0.0, 0.90), (0.9, 0.0))
    maturity_breaks: tuple[float, float, float] = (0.6, 1.0, 1.35)
    source: str = "default (single-anchor calibration to A=0.68, C=0.58 -> Type II, VR 0.32)"

    def __post_init__(self):
        kb = tuple(float(v) for v in self.kerogen_a_breaks)
        mb = tuple(float(v) for v in self.maturity_breaks)
        try:
            knots = tuple((float(c), float(v)) for c, v in self.vr_map)
        except (TypeError, ValueError):
            raise ConfigError("vr_map must be a list of [c_factor, vr_percent] pairs") from None
        object.__setattr__(self, "kerogen_a_breaks", kb)
        object.__setattr__(self, "maturity_breaks", mb)
        object.__setattr__(self, "vr_map", knots)

        for name, breaks in (("kerogen_a_breaks", kb), ("maturity_breaks", mb)):
            if len(breaks) != 3:
                raise ConfigError(f"{name} needs exactly three thresholds")
            if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
                raise ConfigError(f"{name} must be strictly increasing")
        if len(knots) < 2:
            raise ConfigError("vr_map needs at least two knots")
        cs = [c for c, _ in knots]
        vrs = [v for _, v in knots]
        if any(c1 <= c0 for c0, c1 in zip(cs, cs[1:])):
            raise ConfigError("vr_map c values must be strictly increasing")
        if any(v1 >= v0 for v0, v1 in zip(vrs, vrs[1:])):
            raise ConfigError("vr_map vr values must strictly decrease as c increases")

    def vr_percent(self, c: float) -> float:
        """Piecewise-linear VR estimate at ``c``, end segments extended, clamped to [0, 4]."""
        cs = np.array([k[0] for k in self.vr_map])
        vrs = np.array([k[1] for k in self.vr_map])
        if c <= cs[0]:
            i = 0
        elif c >= cs[-1]:
            i = cs.size - 2
        else:
            i = int(np.searchsorted(cs, c, side="right")) - 1
        slope = (vrs[i + 1] - vrs[i]) / (cs[i + 1] - cs[i])
        vr = vrs[i] + slope * (c - cs[i])
        return float(min(max(vr, VR_MIN), VR_MAX))

    def to_dict(self) -> dict:
        return {
            "kerogen_a_breaks": list(self.kerogen_a_breaks),
            "vr_map": [list(k) for k in self.vr_map],
            "maturity_breaks": list(self.maturity_breaks),
            "source": self.source,
        }

    @classmethod
    def from_file(cls, path: str | Path) -> "ClassificationGrid":
        data = load_toml(path)
        data = data.get("grid", data)
        known = {"kerogen_a_breaks", "vr_map", "maturity_breaks"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown grid key(s): {', '.join(sorted(unknown))}")
        defaults = cls()
        return cls(
            kerogen_a_breaks=data.get("kerogen_a_breaks", defaults.kerogen_a_breaks),
            vr_map=data.get("vr_map", defaults.vr_map),
            maturity_breaks=data.get("maturity_breaks", defaults.maturity_breaks),
            source=str(path),
        )


DEFAULT_GRID = ClassificationGrid()


@dataclass(frozen=True)
class MaturityResult:
    vr_percent: float
    maturity_level: MaturityLevel
    kerogen_type: KerogenType
    oil_intensity: str

    def to_dict(self) -> dict:
        return {
            "vr_percent": self.vr_percent,
            "maturity_level": self.maturity_level.value,
            "maturity_zone": MATURITY_ZONE[self.maturity_level],
            "kerogen_type": self.kerogen_type.value,
            "oil_intensity": self.oil_intensity,
        }


def classify(a: float, c: float, grid: ClassificationGrid = DEFAULT_GRID) -> MaturityResult:
    """Map an (A-Factor, C-Factor) pair to kerogen type, VR and maturity.

    Intervals are half-open and closed below: a value equal to a break point
    falls in the interval that starts at that break.
    """
    if not (0 <= a <= 1 and 0 <= c <= 1):
        raise ValueError("A-Factor and C-Factor must lie in [0, 1]")
    kerogen = _KEROGEN_ORDER[bisect.bisect_right(grid.kerogen_a_breaks, a)]
    vr = grid.vr_percent(c)
    maturity = _MATURITY_ORDER[bisect.bisect_right(grid.maturity_breaks, vr)]
    return MaturityResult(vr, maturity, kerogen, OIL_INTENSITY[kerogen])
