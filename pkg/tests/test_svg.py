import math
import xml.etree.ElementTree as ET

import pytest

from rackpinion.svg import nice_ticks, line_chart, phase_raster

NS = {"svg": "http://www.w3.org/2000/svg"}


def parse(text):
    return ET.fromstring(text.encode("utf-8"))


def texts(root, cls=None):
    return [t.text for t in root.iter("{http://www.w3.org/2000/svg}text")
            if cls is None or t.get("class") == cls]


def test_nice_ticks():
    assert nice_ticks(0, 1) == pytest.approx([0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert nice_ticks(0.5, 1.5)[0] >= 0.5
    assert nice_ticks(1, 1) == [1]


def test_line_chart_structure():
    xs = [i * 0.01 for i in range(10001)]
    doc = line_chart({"a": (xs, [math.sin(x) for x in xs]), "b & c": ([0, 1], [0, 1])},
                     title="t", xlabel="time s", ylabel="u")
    root = parse(doc)
    assert root.tag == "{http://www.w3.org/2000/svg}svg"
    lines = root.findall(".//svg:polyline[@class='series']", NS)
    assert len(lines) == 2
    # long series are decimated but keep their end point
    assert len(lines[0].get("points").split()) <= 4001
    assert texts(root, "xlabel") == ["time s"] and texts(root, "ylabel") == ["u"]
    assert texts(root, "xtick") and texts(root, "ytick")
    legend = root.find(".//svg:g[@class='legend']", NS)
    assert [t.text for t in legend.iter("{http://www.w3.org/2000/svg}text")] == ["a", "b & c"]


def test_constant_series_renders():
    parse(line_chart({"flat": ([0, 1, 2], [0.5, 0.5, 0.5])}))


def test_phase_raster_structure():
    kinds = [["I2", "II0", "I1"], ["II2", "II1", "I1"]]
    root = parse(phase_raster([1.0, 2.0], [0.5, 1.0, 1.5], kinds,
                              boundary=[(1.0, 1.0), (2.0, 1.1)], xlabel="phi1", ylabel="nu"))
    cells = root.findall(".//svg:rect[@class='cell']", NS)
    assert [c.get("data-kind") for c in cells] == [k for row in kinds for k in row]
    assert root.find(".//svg:polyline[@class='boundary']", NS).get("stroke-dasharray")
    assert "II0 line" in texts(root)
    assert {"I1", "II1", "II0", "II2", "I2"} <= set(texts(root))
