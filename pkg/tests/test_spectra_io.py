import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from htlftir import errors
from htlftir.spectra_io import (
    Spectrum,
    YUnit,
    parse_csv,
    parse_jcamp,
    parse_y_unit,
    read_spectrum,
    to_absorbance,
    write_csv,
    write_jcamp,
)

from conftest import absorbance


def _csv(rows, header="wavenumber,%T"):
    lines = [header] if header else []
    lines += [f"{x},{y}" for x, y in rows]
    return ("\n".join(lines) + "\n").encode()


def _rows(n=20, start=4000.0, step=-2.0):
    return [(start + i * step, 90.0 - 0.1 * i) for i in range(n)]


# ------------------------------------------------------------------ parse_csv

def test_parse_csv_descending_input_sorted_ascending():
    s = parse_csv(_csv(_rows()))
    assert s.y_unit is YUnit.TRANSMITTANCE_PERCENT
    assert np.all(np.diff(s.x) > 0)
    assert s.x[0] == 3962.0 and s.x[-1] == 4000.0
    assert s.y[-1] == 90.0


def test_parse_csv_too_few_points():
    with pytest.raises(errors.TooFewPoints):
        parse_csv(b"4000,98.2\n3998,97.9\n", y_unit="percent-t")


def test_parse_csv_full_range_1601_points():
    x = np.arange(800.0, 4000.0 + 1, 2.0)
    text = "\n".join(f"{a!r},{b!r}" for a, b in zip(x.tolist(), (50 + 10 * np.sin(x / 100)).tolist()))
    s = parse_csv(text.encode(), y_unit="percent-t")
    assert len(s) == 1601
    np.testing.assert_array_equal(s.x, x)


def test_parse_csv_whitespace_delimited_and_flag_overrides_header():
    text = "cm-1 %T\n" + "\n".join(f"{x}\t{y / 100}" for x, y in _rows())
    s = parse_csv(text, y_unit="fraction-t")
    assert s.y_unit is YUnit.TRANSMITTANCE_FRACTION


def test_parse_csv_reports_line_of_malformed_row():
    rows = _csv(_rows()).decode().splitlines()
    rows[5] = "3992,abc"
    with pytest.raises(errors.MalformedRow) as exc:
        parse_csv("\n".join(rows))
    assert exc.value.line == 6


def test_parse_csv_three_columns_is_malformed():
    rows = _csv(_rows()).decode().splitlines()
    rows[3] += ",1"
    with pytest.raises(errors.MalformedRow):
        parse_csv("\n".join(rows))


def test_parse_csv_duplicate_wavenumber():
    rows = _rows()
    rows[4] = (rows[3][0], 50.0)
    with pytest.raises(errors.DuplicateWavenumber):
        parse_csv(_csv(rows))


def test_parse_csv_nonfinite():
    rows = _rows()
    rows[2] = (rows[2][0], "nan")
    with pytest.raises(errors.NonFiniteValue):
        parse_csv(_csv(rows))


def test_parse_csv_needs_a_unit():
    with pytest.raises(errors.UnknownYUnit):
        parse_csv(_csv(_rows(), header=None))


def test_parse_csv_transmittance_range_enforced():
    rows = _rows()
    rows[0] = (rows[0][0], 101.0)
    with pytest.raises(errors.IntensityOutOfRange):
        parse_csv(_csv(rows))


def test_parse_csv_metadata_comments():
    text = "# instrument: IRTracer-100\n# resolution: 2 cm-1\n" + _csv(_rows()).decode()
    s = parse_csv(text)
    assert s.metadata == {"instrument": "IRTracer-100", "resolution": "2 cm-1"}


@pytest.mark.parametrize("token,unit", [
    ("percent-t", YUnit.TRANSMITTANCE_PERCENT),
    ("%T", YUnit.TRANSMITTANCE_PERCENT),
    ("TransmittancePercent", YUnit.TRANSMITTANCE_PERCENT),
    ("fraction-t", YUnit.TRANSMITTANCE_FRACTION),
    ("Absorbance", YUnit.ABSORBANCE),
])
def test_parse_y_unit(token, unit):
    assert parse_y_unit(token) is unit


# ------------------------------------------------------------------ write_csv

def test_write_csv_header_and_no_metadata():
    s = absorbance(np.linspace(0, 1, 20))
    text = write_csv(s).decode()
    assert text.splitlines()[0] == "wavenumber_cm-1,Absorbance"
    assert not text.startswith("#")


def test_write_csv_metadata_comment_lines():
    s = absorbance(np.linspace(0, 1, 20)).replace(instrument="IRTracer-100")
    lines = write_csv(s).decode().splitlines()
    assert lines[0] == "# instrument: IRTracer-100"
    assert lines[1].startswith("wavenumber_cm-1,")


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def spectra(draw):
    n = draw(st.integers(16, 60))
    x = sorted(draw(st.sets(st.floats(400, 5000, allow_nan=False), min_size=n, max_size=n)))
    unit = draw(st.sampled_from(list(YUnit)))
    if unit is YUnit.ABSORBANCE:
        y = draw(st.lists(finite, min_size=n, max_size=n))
    else:
        top = 100.0 if unit is YUnit.TRANSMITTANCE_PERCENT else 1.0
        y = draw(st.lists(st.floats(1e-9, top, allow_nan=False), min_size=n, max_size=n))
    return Spectrum("h", x, y, unit)


@given(spectra())
@settings(max_examples=200, deadline=None)
def test_csv_round_trip(s):
    back = parse_csv(write_csv(s))
    assert back.isclose(s, atol=1e-9)


@given(spectra())
@settings(max_examples=100, deadline=None)
def test_csv_order_independent(s):
    pts = s.points
    fwd = "\n".join(f"{a!r},{b!r}" for a, b in pts)
    rev = "\n".join(f"{a!r},{b!r}" for a, b in pts[::-1])
    a = parse_csv(fwd, y_unit=s.y_unit)
    b = parse_csv(rev, y_unit=s.y_unit)
    assert a.isclose(b, atol=0)


# ---------------------------------------------------------------- parse_jcamp

def _jcamp(ys, npoints=None, yfactor=1.0, firstx=4000.0, lastx=None, yunits="ABSORBANCE",
           xunits="1/CM", extra=""):
    n = len(ys)
    lastx = lastx if lastx is not None else firstx - 2.0 * (n - 1)
    lines = [
        "##TITLE=test", "##JCAMP-DX=4.24", f"##XUNITS={xunits}", f"##YUNITS={yunits}",
        f"##XFACTOR=1", f"##YFACTOR={yfactor}", f"##FIRSTX={firstx}", f"##LASTX={lastx}",
        f"##NPOINTS={npoints if npoints is not None else n}",
    ]
    if extra:
        lines.append(extra)
    lines.append("##XYDATA=(X++(Y..Y))")
    step = (lastx - firstx) / (n - 1) if n > 1 else 0
    for i in range(0, n, 5):
        lines.append(" ".join([repr(firstx + i * step)] + [str(v) for v in ys[i:i + 5]]))
    lines.append("##END=")
    return "\n".join(lines) + "\n"


def test_parse_jcamp_scaling_by_yfactor():
    ys = list(range(100, 100 + 16))
    s = parse_jcamp(_jcamp(ys, yfactor=0.01))
    np.testing.assert_allclose(s.y[::-1], np.array(ys) * 0.01, rtol=0, atol=1e-12)
    assert s.x[0] == 3970.0 and s.x[-1] == 4000.0


def test_parse_jcamp_minimal_five_points_scaled():
    # five points is below the 16-point spectrum minimum
    with pytest.raises(errors.TooFewPoints):
        parse_jcamp(_jcamp([10, 20, 30, 40, 50], yfactor=0.01))


def test_parse_jcamp_point_count_mismatch():
    with pytest.raises(errors.PointCountMismatch):
        parse_jcamp(_jcamp([0.1] * 99, npoints=100, lastx=4000.0 - 2 * 99))


def test_parse_jcamp_compressed_rejected():
    text = _jcamp([0.1] * 20).replace("4000.0 0.1", "4000@A1B2C3", 1)
    with pytest.raises(errors.UnsupportedEncoding):
        parse_jcamp(text)


def test_parse_jcamp_xypoints_rejected():
    text = _jcamp([0.1] * 20).replace("(X++(Y..Y))", "(XY..XY)")
    with pytest.raises(errors.UnsupportedEncoding):
        parse_jcamp(text)


def test_parse_jcamp_missing_record():
    text = _jcamp([0.1] * 20).replace("##NPOINTS=20\n", "")
    with pytest.raises(errors.MissingRecord):
        parse_jcamp(text)


def test_parse_jcamp_xunits():
    with pytest.raises(errors.UnsupportedXUnits):
        parse_jcamp(_jcamp([0.1] * 20, xunits="MICROMETERS"))


def test_parse_jcamp_transmittance_fraction_vs_percent():
    assert parse_jcamp(_jcamp([0.5] * 20, yunits="TRANSMITTANCE")).y_unit is YUnit.TRANSMITTANCE_FRACTION
    assert parse_jcamp(_jcamp([50] * 20, yunits="TRANSMITTANCE")).y_unit is YUnit.TRANSMITTANCE_PERCENT
    flagged = _jcamp([0.5] * 20, yunits="TRANSMITTANCE", extra="##$Y SCALE=PERCENT")
    assert parse_jcamp(flagged).y_unit is YUnit.TRANSMITTANCE_PERCENT


def _uniform_spectrum(unit=YUnit.TRANSMITTANCE_PERCENT, seed=0):
    rng = np.random.default_rng(seed)
    x = np.arange(800.0, 4000.0 + 1, 2.0)
    y = rng.uniform(1, 100, x.size) if unit.is_transmittance else rng.normal(0.3, 0.2, x.size)
    if unit is YUnit.TRANSMITTANCE_FRACTION:
        y = y / 100
    return Spectrum("dual", x, y, unit, {"instrument": "synthetic"})


@pytest.mark.parametrize("unit", list(YUnit))
def test_csv_and_jcamp_agree(unit):
    s = _uniform_spectrum(unit)
    via_csv = parse_csv(write_csv(s))
    via_jcamp = parse_jcamp(write_jcamp(s))
    assert via_csv.isclose(via_jcamp, atol=1e-9)
    assert via_jcamp.isclose(s, atol=1e-9)
    assert via_jcamp.metadata["instrument"] == "synthetic"


def test_write_jcamp_needs_uniform_grid():
    x = np.cumsum(np.arange(1.0, 21.0))
    with pytest.raises(errors.NonUniformGrid):
        write_jcamp(absorbance(np.ones(20), x=x))


def test_read_spectrum_dispatch(fixtures_dir):
    a = read_spectrum(fixtures_dir / "golden_biocrude.csv")
    b = read_spectrum(fixtures_dir / "golden_biocrude.jdx")
    assert a.isclose(b, atol=1e-9)
    assert a.id == "golden_biocrude"
    assert a.metadata["source_file"] == "golden_biocrude.csv"


def test_read_spectrum_missing_file(tmp_path):
    with pytest.raises(errors.ParseError):
        read_spectrum(tmp_path / "nope.csv")


# -------------------------------------------------------------- to_absorbance

def _flat(value, unit):
    return Spectrum("f", np.arange(16.0), np.full(16, value), unit)


@pytest.mark.parametrize("t,expected", [(100.0, 0.0), (10.0, 1.0), (1.0, 2.0)])
def test_decade_rule(t, expected):
    a = to_absorbance(_flat(t, YUnit.TRANSMITTANCE_PERCENT))
    assert a.y_unit is YUnit.ABSORBANCE
    assert np.all(np.abs(a.y - expected) <= 1e-12)


def test_clamp_caps_absorbance_at_six():
    a = to_absorbance(_flat(1e-9, YUnit.TRANSMITTANCE_FRACTION))
    assert np.all(a.y == 6.0)


def test_absorbance_identity():
    s = absorbance(np.linspace(-0.1, 1, 20))
    assert to_absorbance(s) is s


@given(st.lists(st.floats(1e-8, 1.0), min_size=16, max_size=16, unique=True))
def test_absorbance_monotone_decreasing_in_t(ts):
    ts = sorted(ts)
    a = to_absorbance(Spectrum("m", np.arange(16.0), ts, YUnit.TRANSMITTANCE_FRACTION)).y
    assert np.all(np.diff(a) <= 0)
    assert np.all(a >= 0) and np.all(a <= 6.0)
