import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from htlftir import errors
from htlftir.peaks import (
    ALIPHATIC_STRETCH,
    DEFAULT_BANDS,
    BandDefinition,
    Peak,
    SeparationStatus,
    assign_bands,
    band_height,
    detect_peaks,
    load_band_table,
    separation_verdict,
)
from htlftir.preprocess import baseline_correct
from htlftir.synthetic import NH2_BANDS, absorbance_curve, gaussian

from conftest import absorbance
from oracles import brute_force_peaks, window_max

X = np.arange(800.0, 4000.0 + 1, 2.0)


def _valid(p: Peak, s) -> bool:
    return p.height >= 0 and p.prominence <= p.height and s.x[0] <= p.position <= s.x[-1]


# --------------------------------------------------------------- band_height

def test_band_height_constructed_gaussian():
    s = absorbance(gaussian(X, 2930.0, 0.40, 15.0), x=X)
    p = band_height(s, 2930.0)
    assert abs(p.height - 0.40) <= 1e-3
    assert abs(p.position - 2930.0) <= 2.0
    assert _valid(p, s)


def test_band_height_flat_zero():
    s = absorbance(np.zeros(X.size), x=X)
    p = band_height(s, 2930.0)
    assert p.height == 0.0 and p.prominence == 0.0
    assert 2920.0 <= p.position <= 2940.0


def test_band_height_overlapping_gaussians_match_exhaustive_scan():
    # two bands centred just outside either window edge
    y = gaussian(X, 2915.0, 0.3, 12.0) + gaussian(X, 2946.0, 0.5, 9.0)
    s = absorbance(y, x=X)
    p = band_height(s, 2930.0, 10.0)
    pos, val = window_max(X.tolist(), y.tolist(), 2920.0, 2940.0)
    assert (p.position, p.height) == (pos, val)


def test_band_height_window_out_of_range():
    s = absorbance(np.zeros(100), x=X[:100])
    with pytest.raises(errors.WindowOutOfRange):
        band_height(s, 2930.0)


@given(st.floats(1e-4, 1e4))
def test_band_height_positively_homogeneous(k):
    y = absorbance_curve(X, ((2925.0, 0.3, 10.0), (2945.0, 0.2, 8.0)))
    a = band_height(absorbance(y, x=X), 2930.0)
    b = band_height(absorbance(k * y, x=X), 2930.0)
    assert b.position == a.position
    assert b.height == pytest.approx(k * a.height, rel=1e-12)
    assert b.prominence == pytest.approx(k * a.prominence, rel=1e-9, abs=1e-15)


# -------------------------------------------------------------- detect_peaks

def test_detect_peaks_monotone_ramp():
    assert detect_peaks(absorbance(np.linspace(0, 1, X.size), x=X)) == []


def test_detect_peaks_three_gaussians():
    centers = (1200.0, 2400.0, 3500.0)
    y = sum(gaussian(X, c, h, 20.0) for c, h in zip(centers, (0.2, 0.5, 0.3)))
    peaks = detect_peaks(absorbance(y, x=X), min_prominence=0.05)
    assert len(peaks) == 3
    for p, c in zip(peaks, centers):
        assert abs(p.position - c) <= 2.0


def test_detect_peaks_min_prominence_filters():
    y = gaussian(X, 1500.0, 0.5, 20.0) + gaussian(X, 2500.0, 0.02, 20.0)
    assert len(detect_peaks(absorbance(y, x=X), 0.01)) == 2
    assert len(detect_peaks(absorbance(y, x=X), 0.05)) == 1


def _compare_with_oracle(y):
    s = absorbance(y)
    got = [(int(round((p.position - 800.0) / 2.0)), p.prominence) for p in detect_peaks(s, 0.0)]
    assert got == brute_force_peaks(list(map(float, y)))


@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=16, max_size=200))
@settings(max_examples=300, deadline=None)
def test_detect_peaks_matches_oracle_hypothesis(y):
    _compare_with_oracle(y)


@given(st.lists(st.integers(0, 4), min_size=16, max_size=200))
@settings(max_examples=200, deadline=None)
def test_detect_peaks_matches_oracle_with_ties(y):
    # small integer alphabet forces plateaus and equal-height neighbours
    _compare_with_oracle([float(v) for v in y])


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=16, max_size=200))
@settings(max_examples=200, deadline=None)
def test_detected_peaks_satisfy_invariants(y):
    s = absorbance(y)
    assert all(_valid(p, s) for p in detect_peaks(s, 0.0))


# -------------------------------------------------------------- assign_bands

def _labels(position):
    return [b.label for _, b in assign_bands([Peak(position, 1.0, 1.0)])]


def test_assign_aliphatic_stretch():
    assert _labels(2920.0) == ["aliphatic C-H stretch"]


def test_assign_outside_all_bands():
    assert _labels(500.0) == []


def test_assign_overlapping_bands():
    assert set(_labels(1645.0)) == {"carbonyl C=O", "N-H stretch 1645"}


def test_default_table_ranges():
    table = {b.label: (b.lo, b.hi) for b in DEFAULT_BANDS}
    assert table == {
        "aliphatic C-H stretch": (2800.0, 3000.0),
        "aliphatic C-H bend": (1350.0, 1460.0),
        "carbonyl C=O": (1590.0, 1800.0),
        "C-O": (1024.0, 1100.0),
        "N-H stretch 1645": (1630.0, 1660.0),
        "N-H stretch 3385": (3370.0, 3400.0),
    }


@pytest.mark.parametrize("lo,hi", [(900, 900), (1000, 900), (700, 900), (3900, 4100)])
def test_band_definition_invariants(lo, hi):
    with pytest.raises(errors.ConfigError):
        BandDefinition("x", lo, hi, "g")


def test_load_band_table(tmp_path):
    path = tmp_path / "bands.csv"
    path.write_text(
        "# custom table\nlabel,lo,hi,group,vibration\n"
        "OH,3200,3550,hydroxyl,O-H stretch\n"
        "\"CH, aliphatic\",2800,3000,aliphatic\n"
    )
    bands = load_band_table(path)
    assert [b.label for b in bands] == ["OH", "CH, aliphatic"]
    assert bands[0].vibration == "O-H stretch" and bands[1].vibration == ""


def test_load_band_table_bad_row(tmp_path):
    path = tmp_path / "bands.csv"
    path.write_text("OH,3200,3550,hydroxyl\nCH,lots,3000,aliphatic\n")
    with pytest.raises(errors.ConfigError):
        load_band_table(path)


# ---------------------------------------------------------- separation_verdict

def _nh2_only():
    return absorbance(absorbance_curve(X, NH2_BANDS), x=X)


def test_nh2_only_is_complete():
    v = separation_verdict(_nh2_only())
    assert v.status is SeparationStatus.COMPLETE
    assert v.offending_bands == ()
    assert v.threshold_used == 0.05


def test_added_aliphatic_band_is_incomplete():
    base = absorbance_curve(X, NH2_BANDS)
    y = base + gaussian(X, 2920.0, 0.3 * base.max(), 15.0)
    v = separation_verdict(absorbance(y, x=X))
    assert v.status is SeparationStatus.INCOMPLETE
    assert [b for b, _ in v.offending_bands] == [ALIPHATIC_STRETCH]


def test_all_zero_is_complete():
    assert separation_verdict(absorbance(np.zeros(X.size), x=X)).complete


@pytest.mark.parametrize("k", [1e-3, 1.0, 1e3])
def test_verdict_scale_invariant(k):
    base = absorbance_curve(X, NH2_BANDS)
    for y in (base, base + gaussian(X, 2920.0, 0.1, 15.0)):
        a = separation_verdict(absorbance(y, x=X))
        b = separation_verdict(absorbance(k * y, x=X))
        assert a.status is b.status
        assert [band for band, _ in a.offending_bands] == [band for band, _ in b.offending_bands]


def test_verdict_status_matches_offending_list():
    for y in (absorbance_curve(X, NH2_BANDS), absorbance_curve(X, NH2_BANDS + ((1400.0, 0.2, 10.0),))):
        v = separation_verdict(baseline_correct(absorbance(y, x=X)))
        assert v.complete == (len(v.offending_bands) == 0)
