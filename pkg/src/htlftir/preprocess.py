"""Uniform resampling, Savitzky-Golay smoothing and baseline removal."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.signal import savgol_filter

from .errors import ConfigError, NonUniformGrid, StepTooLarge, UnitMismatch, WindowTooLarge
from .spectra_io import MIN_POINTS, Spectrum, YUnit
from ._toml import load_toml


class BaselineMethod(str, enum.Enum):
    LINEAR_ENDPOINTS = "LinearEndpoints"
    RUBBER_BAND = "RubberBand"
    NONE = "None"

    @classmethod
    def parse(cls, value: "str | BaselineMethod") -> "BaselineMethod":
        if isinstance(value, cls):
            return value
        key = str(value).replace("-", "").replace("_", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        aliases = {"linear": cls.LINEAR_ENDPOINTS, "rubber": cls.RUBBER_BAND, "off": cls.NONE}
        if key in aliases:
            return aliases[key]
        raise ConfigError(f"unknown baseline method {value!r}")


@dataclass(frozen=True)
class PreprocessConfig:
    grid_step: float = 2.0
    smooth_window: int = 9
    smooth_poly_order: int = 2
    baseline_method: BaselineMethod = BaselineMethod.RUBBER_BAND
    smoothing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "baseline_method", BaselineMethod.parse(self.baseline_method))
        if not self.grid_step > 0:
            raise ConfigError("grid_step must be positive")
        if self.smooth_window < 3 or self.smooth_window % 2 == 0:
            raise ConfigError("smooth_window must be odd and at least 3")
        if not 0 <= self.smooth_poly_order < self.smooth_window:
            raise ConfigError("smooth_poly_order must be in [0, smooth_window)")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["baseline_method"] = self.baseline_method.value
        return d

    @classmethod
    def from_mapping(cls, mapping) -> "PreprocessConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown preprocess key(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**mapping)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path) -> "PreprocessConfig":
        data = load_toml(path)
        return cls.from_mapping(data.get("preprocess", data))


def uniform_grid(x_min: float, x_max: float, step: float) -> np.ndarray:
    """Multiples of ``step`` inside ``[x_min, x_max]``."""
    # tolerance keeps exact multiples from being dropped by rounding in the division
    k0 = math.ceil(x_min / step - 1e-9)
    k1 = math.floor(x_max / step + 1e-9)
    if k1 < k0:
        return np.empty(0)
    grid = np.arange(k0, k1 + 1, dtype=np.float64) * step
    return np.clip(grid, x_min, x_max)


def interpolate_uniform(x, y, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Linear interpolation of ``(x, y)`` onto :func:`uniform_grid`, no size limit."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    grid = uniform_grid(x[0], x[-1], step)
    return grid, np.interp(grid, x, y)


def resample_uniform(s: Spectrum, step: float) -> Spectrum:
    """Resample onto the multiples of ``step`` within the spectrum's range.

    Raises
    ------
    StepTooLarge
        If fewer than 16 grid points fall inside the range.
    """
    if not step > 0:
        raise ConfigError("step must be positive")
    grid = uniform_grid(s.x[0], s.x[-1], step)
    if grid.size < MIN_POINTS:
        raise StepTooLarge(f"step {step} leaves {grid.size} points, at least {MIN_POINTS} needed")
    return s.replace(x=grid, y=np.interp(grid, s.x, s.y))


def smooth(s: Spectrum, cfg: PreprocessConfig) -> Spectrum:
    """Savitzky-Golay smoothing with mirror padding at both ends."""
    if not s.is_uniform():
        raise NonUniformGrid("smoothing needs a uniform grid; resample first")
    if cfg.smooth_window > len(s):
        raise WindowTooLarge(f"window {cfg.smooth_window} exceeds {len(s)} points")
    y = savgol_filter(s.y, cfg.smooth_window, cfg.smooth_poly_order, mode="mirror")
    return s.replace(y=y)


def lower_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull vertices, left to right (monotone chain)."""
    hull: list[int] = []
    for i in range(x.size):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.intp)


def rubber_band(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Lower convex hull of the points, evaluated at every ``x``."""
    idx = lower_hull(x, y)
    return np.interp(x, x[idx], y[idx])


def baseline_correct(s: Spectrum, method: BaselineMethod | str = BaselineMethod.RUBBER_BAND) -> Spectrum:
    """Subtract a baseline from an absorbance spectrum.

    ``LinearEndpoints`` removes the straight line through the first and last
    points. ``RubberBand`` removes the lower convex hull and clips rounding
    residue so the result is never negative.
    """
    method = BaselineMethod.parse(method)
    if s.y_unit is not YUnit.ABSORBANCE:
        raise UnitMismatch("baseline correction expects an absorbance spectrum")
    x, y = s.x, s.y
    if method is BaselineMethod.NONE:
        return s
    if method is BaselineMethod.LINEAR_ENDPOINTS:
        line = y[0] + (y[-1] - y[0]) * (x - x[0]) / (x[-1] - x[0])
        out = y - line
        out[0] = out[-1] = 0.0
    else:
        out = np.maximum(y - rubber_band(x, y), 0.0)
    return s.replace(y=out)


def preprocess(s: Spectrum, cfg: PreprocessConfig) -> Spectrum:
    """Resample, optionally smooth, then baseline-correct an absorbance spectrum."""
    out = resample_uniform(s, cfg.grid_step)
    if cfg.smoothing:
        out = smooth(out, cfg)
    return baseline_correct(out, cfg.baseline_method)
