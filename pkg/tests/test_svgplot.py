import pytest

from fakeridge.errors import ConfigError
from fakeridge.experiment import CSV_HEADER
from fakeridge.svgplot import read_sweep_csv, render_svg

HEADER = ",".join(CSV_HEADER)


def _row(p_F, lam, jy):
    return f"{p_F},{lam},{jy},1,{jy},2,,,,4"


def test_single_row_renders_marker():
    series = read_sweep_csv(HEADER + "\n" + _row(0, 1.0, 250.0) + "\n")
    svg = render_svg(series)
    assert svg.count("<circle") == 1 and "<polyline" not in svg


def test_curves_and_legend():
    rows = [_row(p, lam, 200 + p + lam) for p in (0, 100, 300, 500) for lam in (0.001, 1.0, 1000.0)]
    svg = render_svg(read_sweep_csv(HEADER + "\n" + "\n".join(rows) + "\n"))
    assert svg.count("<polyline") == 4
    for p in (0, 100, 300, 500):
        assert f"p_F = {p}" in svg
    assert "log scale" in svg


def test_log_y_for_wide_range():
    rows = [_row(100, 0.001, 30000.0), _row(100, 1000.0, 250.0)]
    svg = render_svg(read_sweep_csv(HEADER + "\n" + "\n".join(rows) + "\n"))
    assert "J_y (log scale)" in svg


def test_zero_lambda_rows_skipped():
    series = read_sweep_csv(HEADER + "\n" + _row(0, 0.0, 250.0) + "\n" + _row(0, 1.0, 240.0) + "\n")
    assert series[0].points == ((1.0, 240.0),)


@pytest.mark.parametrize("text", ["", "x,y\n1,2\n", HEADER + "\n1,2\n", HEADER + "\n" + _row(0, 0.0, 1.0) + "\n"])
def test_schema_errors(text):
    with pytest.raises(ConfigError):
        read_sweep_csv(text)
