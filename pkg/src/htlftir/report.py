"""Pipeline orchestration and report rendering (JSON and aligned text)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from .classification import (
    DEFAULT_GRID,
    ClassificationGrid,
    FactorResult,
    MaturityResult,
    classify,
    compute_factors,
)
from .errors import AnalysisError
from .peaks import (
    DEFAULT_BANDS,
    DEFAULT_HALF_WIDTH,
    DEFAULT_REL_THRESHOLD,
    Peak,
    SeparationVerdict,
    assign_bands,
    detect_peaks,
    separation_verdict,
)
from .preprocess import PreprocessConfig, preprocess
from .proximate import DEFAULT_TOLERANCE, ProximateComposition, validate_composition
from .spectra_io import Spectrum, to_absorbance

SCHEMA = "htlftir/analysis-report"
SCHEMA_VERSION = 1
DEFAULT_MIN_PROMINENCE = 0.01


@dataclass(frozen=True)
class AnalysisOptions:
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    grid: ClassificationGrid = DEFAULT_GRID
    bands: tuple = DEFAULT_BANDS
    half_width: float = DEFAULT_HALF_WIDTH
    min_prominence: float = DEFAULT_MIN_PROMINENCE
    rel_threshold: float = DEFAULT_REL_THRESHOLD
    band_table_source: str = "default"

    def to_dict(self) -> dict:
        return {
            "preprocess": self.preprocess.to_dict(),
            "grid": self.grid.to_dict(),
            "band_table": {
                "source": self.band_table_source,
                "bands": [b.to_dict() for b in self.bands],
            },
            "half_width": self.half_width,
            "min_prominence": self.min_prominence,
            "rel_threshold": self.rel_threshold,
        }


@dataclass
class AnalysisReport:
    mode: str
    spectrum: Spectrum
    input_y_unit: str
    corrected: Spectrum
    options: AnalysisOptions
    peaks: list[Peak]
    assignments: list
    factors: FactorResult | None = None
    maturity: MaturityResult | None = None
    separation: SeparationVerdict | None = None
    proximate: ProximateComposition | None = None
    proximate_tolerance: float = DEFAULT_TOLERANCE
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        labels = {}
        for peak, band in self.assignments:
            labels.setdefault(peak, []).append(band.label)
        d = {
            "schema": SCHEMA,
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "mode": self.mode,
            "spectrum": {
                "id": self.spectrum.id,
                "input_y_unit": self.input_y_unit,
                "n_points": len(self.spectrum),
                "x_min": float(self.spectrum.x[0]),
                "x_max": float(self.spectrum.x[-1]),
                "metadata": dict(self.spectrum.metadata),
            },
            "config": self.options.to_dict(),
            "peaks": [dict(p.to_dict(), bands=labels.get(p, [])) for p in self.peaks],
            "factors": self.factors.to_dict() if self.factors else None,
            "classification": self.maturity.to_dict() if self.maturity else None,
            "separation": self.separation.to_dict() if self.separation else None,
            "proximate": None,
            "notes": list(self.notes),
        }
        if self.proximate is not None:
            d["proximate"] = {
                "composition": self.proximate.to_dict(),
                "tolerance": self.proximate_tolerance,
                "violations": validate_composition(self.proximate, self.proximate_tolerance),
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        return render_text(self)


def _prepare(s: Spectrum, options: AnalysisOptions) -> Spectrum:
    return preprocess(to_absorbance(s), options.preprocess)


def analyze(
    s: Spectrum,
    options: AnalysisOptions = AnalysisOptions(),
    aqueous: bool = False,
    proximate: ProximateComposition | None = None,
) -> AnalysisReport:
    """Full biocrude pipeline: absorbance, resample, smooth, baseline, factors, class.

    In ``aqueous`` mode the separation verdict is added and a factor failure
    is recorded as a note instead of raising.
    """
    corrected = _prepare(s, options)
    peaks = detect_peaks(corrected, options.min_prominence)
    report = AnalysisReport(
        mode="aqueous" if aqueous else "biocrude",
        spectrum=s,
        input_y_unit=s.y_unit.value,
        corrected=corrected,
        options=options,
        peaks=peaks,
        assignments=assign_bands(peaks, options.bands),
        proximate=proximate,
        notes=_notes(options),
    )
    try:
        report.factors = compute_factors(corrected, options.half_width)
        report.maturity = classify(report.factors.a_factor, report.factors.c_factor, options.grid)
    except AnalysisError as exc:
        if not aqueous:
            raise
        report.notes.append(f"factors unavailable: {type(exc).__name__}: {exc}")
    if aqueous:
        report.separation = separation_verdict(corrected, options.rel_threshold)
    return report


def qc(s: Spectrum, options: AnalysisOptions = AnalysisOptions()) -> AnalysisReport:
    """Separation-quality check of an aqueous-phase spectrum."""
    corrected = _prepare(s, options)
    peaks = detect_peaks(corrected, options.min_prominence)
    return AnalysisReport(
        mode="qc",
        spectrum=s,
        input_y_unit=s.y_unit.value,
        corrected=corrected,
        options=options,
        peaks=peaks,
        assignments=assign_bands(peaks, options.bands),
        separation=separation_verdict(corrected, options.rel_threshold),
        notes=_notes(options, qc=True),
    )


def _notes(options: AnalysisOptions, qc: bool = False) -> list[str]:
    notes = []
    if not qc:
        notes.append(f"classification grid: {options.grid.source}")
    notes.append(
        f"separation threshold {options.rel_threshold:g} is relative to the global "
        "maximum absorbance and is a tool default, not a published criterion"
    )
    return notes


# ------------------------------------------------------------------------ text

_LABEL_W = 30


def _row(label: str, value: str) -> str:
    return f"{label:<{_LABEL_W}}{value}"


def render_text(r: AnalysisReport) -> str:
    s = r.spectrum
    cfg = r.options.preprocess
    smoothing = (
        f"Savitzky-Golay {cfg.smooth_window}/{cfg.smooth_poly_order}" if cfg.smoothing else "off"
    )
    out = [
        f"htlftir {__version__}  {r.mode} report: {s.id}",
        _row("Spectrum", f"{s.x[0]:g}-{s.x[-1]:g} cm-1, {len(s)} points ({r.input_y_unit})"),
        _row("Preprocessing", f"grid {cfg.grid_step:g} cm-1, baseline {cfg.baseline_method.value}, "
                              f"smoothing {smoothing}"),
        "",
    ]
    if r.factors is not None:
        m = r.maturity
        out += [
            _row("Parameters", "Value"),
            _row("A-Factor", f"{r.factors.a_factor:.2f}"),
            _row("C-Factor", f"{r.factors.c_factor:.2f}"),
            _row("Vitrinite Reflectance (VR%)", f"{m.vr_percent:.2f}"),
            _row("Maturity Level", m.maturity_level.value),
            _row("Kerogen Type", f"Type-{m.kerogen_type.value}"),
            _row("Oil Intensity", m.oil_intensity.title()),
            "",
            "Diagnostic band heights (absorbance)",
        ]
        f = r.factors
        for name, h in (("2930", f.h2930), ("2860", f.h2860), ("1705", f.h1705), ("1630", f.h1630)):
            out.append(_row(f"  {name} cm-1", f"{h:.4f}"))
        out.append("")
    if r.separation is not None:
        v = r.separation
        out.append(_row("Separation", v.status.value))
        out.append(_row("  threshold", f"{v.threshold_used:g} x max ({v.threshold_used * v.global_max:.4f})"))
        for band, peak in v.offending_bands:
            out.append(_row(f"  offending", f"{band.label} [{band.lo:g}-{band.hi:g}] "
                                            f"height {peak.height:.4f} at {peak.position:g}"))
        out.append("")
    if r.proximate is not None:
        p = r.proximate
        violations = validate_composition(p, r.proximate_tolerance)
        out.append("Proximate analysis (wt %)")
        for name in ("mc", "ts", "vs", "ac", "fc"):
            out.append(_row(f"  {name.upper()}", f"{getattr(p, name):.1f} +/- {getattr(p, 'u_' + name):.1f}"))
        out.append(_row("  closure", "ok" if not violations else ", ".join(violations)))
        out.append("")
    labels = {}
    for peak, band in r.assignments:
        labels.setdefault(peak, []).append(band.label)
    out.append(f"Peaks (prominence >= {r.options.min_prominence:g})")
    out.append(f"  {'position':>9}  {'height':>8}  {'prominence':>10}  bands")
    for p in r.peaks:
        out.append(f"  {p.position:>9.1f}  {p.height:>8.4f}  {p.prominence:>10.4f}  "
                   f"{'; '.join(labels.get(p, [])) or '-'}")
    out.append("")
    out += [f"note: {n}" for n in r.notes]
    return "\n".join(out) + "\n"
