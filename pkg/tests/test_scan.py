import warnings

import numpy as np
import pytest

from gmedim.criteria import criterion_value
from gmedim.errors import ParameterError
from gmedim.scan import (
    REGION_HEADER,
    THRESHOLD_HEADER,
    Bisection,
    family_spec,
    noise_threshold,
    region_scan,
    rows_from_csv,
    rows_to_csv,
    threshold_table,
)
from gmedim.states import NamedStateSpec

GRID = [(n, d) for n in range(3, 7) for d in range(2, 6) if d**n <= 4096]


def _table(**kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return {(r["n"], r["d"]): r["p_star"] for r in threshold_table(**kw)}


def test_anchor_thresholds():
    ghz = NamedStateSpec.parse("ghz:n=3,d=3")
    w = NamedStateSpec.parse("w:n=3,d=3")
    assert noise_threshold(ghz, 0, 3) == pytest.approx(0.375, abs=1e-6)
    assert noise_threshold(w, 1, 3) == pytest.approx(9 / 34, abs=1e-6)
    assert noise_threshold(ghz, 0, 3, criterion="fidelity") == pytest.approx(9 / 26, abs=1e-6)
    assert noise_threshold(w, 1, 3, criterion="fidelity") == pytest.approx(27 / 156, abs=1e-6)


def test_undetected_pure_state_gives_zero():
    spec = NamedStateSpec.parse("bisep")
    assert noise_threshold(spec, 0, 2) == 0.0


def test_bisection_validation():
    with pytest.raises(ParameterError):
        Bisection(tol=0)
    with pytest.raises(ParameterError):
        noise_threshold(NamedStateSpec.parse("ghz:n=3,d=3"), 0, 4)
    with pytest.raises(ParameterError):
        noise_threshold(NamedStateSpec.parse("ghz:n=3,d=3"), 0, 3, criterion="bogus")


def test_ghz_full_table_closed_form():
    # Q_0 = (d-1)(1-p) + (d-1)p/d^n - (d-1)(2^(n-1)-1) p/d^n ... solved for Q_0 = d-2
    table = _table(m=0, f_mode="full")
    assert set(table) == set(GRID)
    for (n, d), p in table.items():
        expected = 1 / ((d - 1) * (1 + (2 ** (n - 1) - 1) / d ** (n - 1)))
        assert p == pytest.approx(expected, abs=1e-6)


def test_ghz_gme_table_closed_form():
    for (n, d), p in _table(m=0, f_mode="gme").items():
        assert p == pytest.approx(1 / (1 + (2 ** (n - 1) - 1) / d ** (n - 1)), abs=1e-6)


def test_ghz_fidelity_table_closed_form():
    for (n, d), p in _table(m=0, criterion="fidelity").items():
        assert p == pytest.approx(d ** (n - 1) / (d**n - 1), abs=1e-6)


def test_w_fidelity_table_closed_form():
    for (n, d), p in _table(m=1, criterion="fidelity").items():
        assert p == pytest.approx(1 / (n * (d - 1)) / (1 - d**-n), abs=1e-6)


# Regression pins: implementation-derived, not published values.
W_FULL_PINS = {
    (3, 2): 0.470588237,
    (3, 4): 0.207119733,
    (4, 3): 0.22375688,
    (5, 5): 0.193139702,
    (6, 4): 0.22763142,
}


def test_w_full_table_regression():
    table = _table(m=1, f_mode="full")
    for cell, p in W_FULL_PINS.items():
        assert table[cell] == pytest.approx(p, abs=1e-6)


@pytest.mark.parametrize("m,f_mode", [(0, "full"), (0, "gme"), (1, "full"), (1, "gme"), (2, "full")])
def test_threshold_is_on_the_boundary(m, f_mode):
    # Q is affine in p, so the bisected root reproduces Q(p*) = f - 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = threshold_table(range(4, 6), range(2, 4), m=m, f_mode=f_mode)
    for r in rows:
        n, d, p = r["n"], r["d"], r["p_star"]
        if p in (0.0, 1.0):
            continue
        f = 2 if f_mode == "gme" else d
        q = criterion_value(family_spec(n, d, m).with_noise(p).provider(), m)
        assert abs(q - (f - 2)) <= 1e-6


@pytest.mark.parametrize("n,d,m", [(3, 3, 0), (3, 3, 1), (4, 3, 2), (5, 2, 1)])
def test_affine_in_p(n, d, m):
    spec = family_spec(n, d, m)
    ps = np.linspace(0, 1, 7)
    qs = np.array([criterion_value(spec.with_noise(p).provider(), m) for p in ps])
    fit = np.polyval(np.polyfit(ps, qs, 1), ps)
    assert np.max(np.abs(fit - qs)) <= 1e-9


def test_q_beats_fidelity_full_mode():
    q0, q1 = _table(m=0), _table(m=1)
    f0, f1 = _table(m=0, criterion="fidelity"), _table(m=1, criterion="fidelity")
    for cell in GRID:
        n, d = cell
        assert q0[cell] >= f0[cell] - 1e-6 and q1[cell] >= f1[cell] - 1e-6
        if d > 2:
            assert q0[cell] > f0[cell] and q1[cell] > f1[cell]


def test_table_skips_large_cells():
    with pytest.warns(UserWarning, match="skipping"):
        rows = threshold_table(range(8, 9), range(3, 4))
    assert rows == []
    with pytest.raises(ParameterError):
        threshold_table(f_mode="half")
    with pytest.raises(ParameterError):
        threshold_table(m=2, criterion="fidelity")


def test_threshold_csv_roundtrip():
    rows = [{"n": 3, "d": 3, "p_star": 0.375}, {"n": 4, "d": 2, "p_star": 1 / 3}]
    text = rows_to_csv(rows, THRESHOLD_HEADER)
    assert text.splitlines()[0] == "n,d,p_star"
    back = rows_from_csv(text)
    assert back[0] == rows[0] and back[1]["p_star"] == pytest.approx(1 / 3, rel=1e-11)


def test_region_scan_coarse():
    rows = region_scan(11, 11)
    assert len(rows) == 66
    assert list(rows[0]) == list(REGION_HEADER)
    corner = next(r for r in rows if r["alpha"] == 1.0)
    assert corner["f_q"] == 4
    noise = next(r for r in rows if r["alpha"] == 0 and r["beta"] == 0)
    assert noise["f_q"] == 0 and noise["f_fid"] == 0
    for r in rows:
        if r["f_fid"] == 4:
            assert r["f_q"] == 4
        assert r["f_q"] in (0, 2, 3, 4)


def test_region_scan_workers_preserve_order():
    assert region_scan(6, 6, workers=2) == region_scan(6, 6)


def test_region_csv_header():
    assert rows_to_csv(region_scan(3, 3), REGION_HEADER).splitlines()[0] == "alpha,beta,f_q,f_fid"
    with pytest.raises(ParameterError):
        region_scan(1, 5)
