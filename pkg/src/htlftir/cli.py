"""Command-line interface: ``htlftir {analyze,qc,batch,convert}``.

Exit codes: 0 success, 1 input/parse/config error, 2 analysis error,
3 separation incomplete (``qc`` only).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .classification import ClassificationGrid
from .errors import AnalysisError, ConfigError, HtlFtirError, ParseError
from .peaks import load_band_table
from .preprocess import BaselineMethod, PreprocessConfig
from .proximate import load_composition
from .report import AnalysisOptions, analyze, qc
from .spectra_io import (
    CSV_SUFFIXES,
    JCAMP_SUFFIXES,
    Spectrum,
    read_spectrum,
    to_absorbance,
    write_csv,
    write_jcamp,
)

CONFIG_DIR_ENV = "HTLFTIR_CONFIG_DIR"
EXIT_OK, EXIT_PARSE, EXIT_ANALYSIS, EXIT_INCOMPLETE = 0, 1, 2, 3

_Y_UNITS = ("percent-t", "fraction-t", "absorbance")
_BASELINES = {
    "rubber-band": BaselineMethod.RUBBER_BAND,
    "linear-endpoints": BaselineMethod.LINEAR_ENDPOINTS,
    "none": BaselineMethod.NONE,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage mistakes are input errors, keep exit 2 for analysis failures
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--y-unit", choices=_Y_UNITS, help="intensity unit of the input (overrides file)")
    g.add_argument("--baseline", choices=sorted(_BASELINES), help="baseline method (default rubber-band)")
    g.add_argument("--smooth-window", type=int, metavar="N", help="enable Savitzky-Golay smoothing with N points")
    g.add_argument("--grid-step", type=float, metavar="CM", help="resampling step in cm-1 (default 2)")
    g.add_argument("--config", metavar="PATH", help="preprocess TOML file")
    g.add_argument("--grid", metavar="PATH", help="classification grid TOML file")
    g.add_argument("--band-table", metavar="PATH", help="band table CSV (label, lo, hi, group[, vibration])")
    g.add_argument("--threshold", type=float, metavar="F", help="relative aqueous threshold (default 0.05)")
    g.add_argument("--half-width", type=float, metavar="CM", help="diagnostic window half-width (default 10)")
    g.add_argument("--min-prominence", type=float, metavar="A", help="peak listing prominence cut (default 0.01)")
    g.add_argument("--emit-plot", action="store_true", help="also write the baseline-corrected spectrum as CSV")
    g.add_argument("--output", "-o", metavar="PATH", help="output directory (file for convert)")
    g.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="htlftir", description="FTIR characterization of HTL biocrude and aqueous phase.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="factors, kerogen type and maturity of one spectrum")
    a.add_argument("input")
    a.add_argument("--aqueous", action="store_true", help="also run the separation check")
    a.add_argument("--proximate", metavar="SPEC", help="key=value file or inline 'mc=..,vs=..,ac=..'")

    q = sub.add_parser("qc", parents=[common], help="separation verdict for an aqueous-phase spectrum")
    q.add_argument("input")

    b = sub.add_parser("batch", parents=[common], help="analyze every spectrum file in a directory")
    b.add_argument("directory")
    b.add_argument("--aqueous", action="store_true", help="also run the separation check")
    b.add_argument("--jobs", type=int, default=1, metavar="N", help="files processed concurrently")

    c = sub.add_parser("convert", parents=[common], help="convert between CSV and JCAMP-DX")
    c.add_argument("input")
    c.add_argument("--to", choices=("csv", "jcamp"), help="output format (default from --output suffix)")
    c.add_argument("--to-absorbance", action="store_true", help="convert transmittance to absorbance")
    return parser


# ----------------------------------------------------------------------- config

def _config_dir() -> Path | None:
    value = os.environ.get(CONFIG_DIR_ENV)
    return Path(value) if value else None


def _default_file(name: str) -> Path | None:
    d = _config_dir()
    if d is not None and (d / name).is_file():
        return d / name
    return None


def build_options(args: argparse.Namespace) -> AnalysisOptions:
    """Defaults, then config files (flag or $HTLFTIR_CONFIG_DIR), then flags."""
    cfg_path = args.config or _default_file("preprocess.toml")
    cfg = PreprocessConfig.from_file(cfg_path) if cfg_path else PreprocessConfig()
    overrides = {}
    if args.baseline:
        overrides["baseline_method"] = _BASELINES[args.baseline]
    if args.smooth_window is not None:
        overrides.update(smooth_window=args.smooth_window, smoothing=True)
    if args.grid_step is not None:
        overrides["grid_step"] = args.grid_step
    if overrides:
        cfg = PreprocessConfig.from_mapping({**cfg.__dict__, **overrides})

    grid_path = args.grid or _default_file("grid.toml")
    grid = ClassificationGrid.from_file(grid_path) if grid_path else ClassificationGrid()

    options = AnalysisOptions(preprocess=cfg, grid=grid)
    table_path = args.band_table or _default_file("bands.csv")
    if table_path:
        options = replace(options, bands=load_band_table(table_path), band_table_source=str(table_path))
    for flag, name in (("threshold", "rel_threshold"), ("half_width", "half_width"),
                       ("min_prominence", "min_prominence")):
        value = getattr(args, flag)
        if value is not None:
            options = replace(options, **{name: value})
    return options


# ---------------------------------------------------------------------- output

def _write(path: Path, data: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, bytes):
        path.write_bytes(data)
    else:
        path.write_text(data, encoding="utf-8")


def _plot_csv(s: Spectrum) -> bytes:
    return write_csv(Spectrum(s.id, s.x, s.y, s.y_unit, {}))


def _emit_report(report, args, out_dir: Path | None, echo: bool = True) -> None:
    stem = report.spectrum.id or "spectrum"
    if out_dir is not None:
        _write(out_dir / f"{stem}.report.json", report.to_json())
        _write(out_dir / f"{stem}.report.txt", report.to_text())
    if args.emit_plot:
        _write((out_dir or Path.cwd()) / f"{stem}.plot.csv", _plot_csv(report.corrected))
    if echo:
        sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())


def _fail(exc: HtlFtirError) -> int:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ANALYSIS if isinstance(exc, AnalysisError) else EXIT_PARSE


# -------------------------------------------------------------------- commands

def cmd_analyze(args) -> int:
    options = build_options(args)
    proximate = None
    if args.proximate:
        try:
            proximate = load_composition(args.proximate)
        except ValueError as exc:
            if isinstance(exc, HtlFtirError):
                raise
            raise ConfigError(str(exc)) from None
    s = read_spectrum(args.input, args.y_unit)
    report = analyze(s, options, aqueous=args.aqueous, proximate=proximate)
    _emit_report(report, args, Path(args.output) if args.output else None)
    return EXIT_OK


def cmd_qc(args) -> int:
    options = build_options(args)
    s = read_spectrum(args.input, args.y_unit)
    report = qc(s, options)
    _emit_report(report, args, Path(args.output) if args.output else None)
    return EXIT_OK if report.separation.complete else EXIT_INCOMPLETE


SUMMARY_FIELDS = (
    "file", "id", "status", "a_factor", "c_factor", "vr_percent",
    "kerogen_type", "maturity_level", "verdict", "error",
)


def _batch_one(path: Path, args, options, out_dir: Path) -> dict:
    row = dict.fromkeys(SUMMARY_FIELDS)
    row.update(file=path.name, id=path.stem)
    try:
        report = analyze(read_spectrum(path, args.y_unit), options, aqueous=args.aqueous)
    except HtlFtirError as exc:
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
        return row
    _emit_report(report, args, out_dir, echo=False)
    row["status"] = "ok"
    if report.factors is not None:
        row.update(a_factor=report.factors.a_factor, c_factor=report.factors.c_factor,
                   vr_percent=report.maturity.vr_percent,
                   kerogen_type=report.maturity.kerogen_type.value,
                   maturity_level=report.maturity.maturity_level.value)
    if report.separation is not None:
        row["verdict"] = report.separation.status.value
    return row


def _summary_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _summary_table(rows) -> str:
    def fmt(v):
        if v is None:
            return "-"
        return f"{v:.3f}" if isinstance(v, float) else str(v)

    cols = ("file", "status", "a_factor", "c_factor", "vr_percent", "kerogen_type",
            "maturity_level", "verdict")
    cells = [[fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    for r in rows:
        if r["error"]:
            lines.append(f"{r['file']}: {r['error']}")
    return "\n".join(lines) + "\n"


def cmd_batch(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise ParseError(f"not a directory: {directory}")
    files = sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in CSV_SUFFIXES | JCAMP_SUFFIXES
    )
    if not files:
        print(f"error: no spectrum files in {directory}", file=sys.stderr)
        return EXIT_PARSE
    options = build_options(args)
    out_dir = Path(args.output) if args.output else directory / "htlftir_reports"
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda p: _batch_one(p, args, options, out_dir), files))
    _write(out_dir / "summary.json", json.dumps(
        {"tool_version": __version__, "config": options.to_dict(), "rows": rows},
        indent=2, sort_keys=True) + "\n")
    _write(out_dir / "summary.csv", _summary_csv(rows))
    if args.format == "json":
        sys.stdout.write(json.dumps(rows, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(_summary_table(rows))
    return EXIT_OK if any(r["status"] == "ok" for r in rows) else EXIT_PARSE


def cmd_convert(args) -> int:
    fmt = args.to
    if fmt is None and args.output:
        fmt = "jcamp" if Path(args.output).suffix.lower() in JCAMP_SUFFIXES else "csv"
    if fmt is None:
        raise ParseError("give --to {csv,jcamp} or an --output path with a known suffix")
    s = read_spectrum(args.input, args.y_unit)
    meta = dict(s.metadata)
    meta.pop("source_file", None)
    s = Spectrum(s.id, s.x, s.y, s.y_unit, meta)
    if args.to_absorbance:
        s = to_absorbance(s)
    data = write_jcamp(s) if fmt == "jcamp" else write_csv(s)
    if args.output:
        _write(Path(args.output), data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "qc": cmd_qc, "batch": cmd_batch, "convert": cmd_convert}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except HtlFtirError as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
