import numpy as np
import pytest

from trapinit.svg import Chart


def test_log_chart_drops_nonpositive_points():
    svg = (
        Chart("t", "x", "y", log_x=True, log_y=True)
        .add("s", [1e-2, 1.0, 0.0, 1e3], [1.0, -1.0, 2.0, 1e-4])
        .hline(0.5, "ref <1>")
        .render()
    )
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 1
    assert "ref &lt;1&gt;" in svg
    assert ">1e-4<" in svg or ">1e-3<" in svg


def test_linear_chart_ticks_cover_range(tmp_path):
    x = np.linspace(0, 7, 50)
    path = Chart("lin", "x", "y").add("sin", x, np.sin(x)).save(tmp_path / "c.svg")
    text = path.read_text()
    assert ">0<" in text and ">6<" in text


def test_empty_after_filtering_raises():
    with pytest.raises(ValueError):
        Chart("t", "x", "y", log_y=True).add("s", [1.0, 2.0], [-1.0, 0.0]).render()
