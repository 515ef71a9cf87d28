"""Synthetic FTIR spectra built from Gaussian bands.

Used for the golden fixtures shipped with the tests and for demos. The
biocrude spectrum is constructed so that its diagnostic band heights give
A-Factor 0.68 and C-Factor 0.58 once the linear baseline is removed.
"""

from __future__ import annotations

import numpy as np

from .spectra_io import Spectrum, YUnit

GRID = np.arange(800.0, 4000.0 + 1.0, 2.0)

# h1705 / (h1705 + 0.32) = 0.58
H1705_GOLDEN = 0.58 * 0.32 / 0.42

BIOCRUDE_BANDS = (
    # center, height, sigma
    (2930.0, 0.40, 12.0),
    (2860.0, 0.28, 12.0),
    (1705.0, H1705_GOLDEN, 12.0),
    (1630.0, 0.32, 12.0),
    (1455.0, 0.15, 10.0),
    (1375.0, 0.10, 10.0),
    (1050.0, 0.20, 15.0),
    (3400.0, 0.25, 80.0),
)

NH2_BANDS = (
    (3385.0, 0.90, 70.0),
    (1645.0, 0.50, 25.0),
)

ALIPHATIC_CONTAMINATION = (
    (2920.0, 0.27, 15.0),
    (2850.0, 0.15, 12.0),
    (1455.0, 0.12, 10.0),
    (1380.0, 0.08, 10.0),
    (1710.0, 0.10, 15.0),
    (1050.0, 0.10, 15.0),
)


def gaussian(x, center: float, height: float, sigma: float) -> np.ndarray:
    return height * np.exp(-0.5 * ((np.asarray(x, dtype=float) - center) / sigma) ** 2)


def absorbance_curve(x, bands, offset: float = 0.0, slope: float = 0.0) -> np.ndarray:
    """Sum of Gaussian bands on the line ``offset + slope * (x - x[0])``."""
    x = np.asarray(x, dtype=float)
    y = offset + slope * (x - x[0])
    for center, height, sigma in bands:
        y = y + gaussian(x, center, height, sigma)
    return y


def absorbance_spectrum(id: str, bands, offset: float = 0.0, slope: float = 0.0, x=GRID) -> Spectrum:
    return Spectrum(id, x, absorbance_curve(x, bands, offset, slope), YUnit.ABSORBANCE)


def to_percent_transmittance(s: Spectrum) -> Spectrum:
    return s.replace(y=100.0 * 10.0 ** (-s.y), y_unit=YUnit.TRANSMITTANCE_PERCENT)


def golden_biocrude() -> Spectrum:
    """Absorbance spectrum on a tilted baseline whose factors are 0.68 / 0.58."""
    return absorbance_spectrum("golden_biocrude", BIOCRUDE_BANDS, offset=0.05, slope=2e-5)


def aqueous_nh2_only() -> Spectrum:
    """Aqueous phase with NH2 bands only (fully separated)."""
    return absorbance_spectrum("aqueous_9000rpm", NH2_BANDS, offset=0.02, slope=1e-5)


def aqueous_with_aliphatics() -> Spectrum:
    """Aqueous phase still carrying aliphatic, carbonyl and C-O bands."""
    return absorbance_spectrum(
        "aqueous_6000rpm", NH2_BANDS + ALIPHATIC_CONTAMINATION, offset=0.02, slope=1e-5
    )


def descending_csv(s: Spectrum, metadata: dict | None = None) -> bytes:
    """CSV with rows from high to low wavenumber, as instruments usually export."""
    header = {YUnit.TRANSMITTANCE_PERCENT: "%T", YUnit.TRANSMITTANCE_FRACTION: "T",
              YUnit.ABSORBANCE: "absorbance"}[s.y_unit]
    lines = [f"# {k}: {v}" for k, v in (metadata or {}).items()]
    lines.append(f"wavenumber_cm-1,{header}")
    lines += [f"{x!r},{y!r}" for x, y in zip(s.x[::-1].tolist(), s.y[::-1].tolist())]
    return ("\n".join(lines) + "\n").encode("utf-8")
