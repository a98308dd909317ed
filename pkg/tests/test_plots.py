import doekit
from doekit import datasets
import pytest
import xml.etree.ElementTree as ET


SVG = "{http://www.w3.org/2000/svg}"


def parse(document):
    root = ET.fromstring(document.encode())
    assert root.tag == f"{SVG}svg"
    return root


def groups(root, cls):
    return [g for g in root.iter(f"{SVG}g") if g.get("class") == cls]


def points(element):
    return [c for c in element.iter(f"{SVG}circle")
            if c.get("class") == "point"]


def test_PlotConfig():
    """Test the PlotConfig interface."""

    config = doekit.PlotConfig()
    assert config.width == 960

    with pytest.raises(doekit.ValidationError):
        doekit.PlotConfig(width=0)
    with pytest.raises(doekit.ValidationError):
        doekit.PlotConfig(margin=500)
    with pytest.raises(doekit.ValidationError):
        doekit.PlotConfig(y_range=(1, 0))


def test_render_main_effects():
    """Test the render_main_effects function."""

    panels = doekit.main_effects_panels(datasets.screening_results())
    document = doekit.render_main_effects(panels)
    assert document.startswith("<?xml")
    assert document == doekit.render_main_effects(panels)

    root = parse(document)
    assert root.get("width") == "960"
    found = groups(root, "panel")
    assert [g.get("data-factor") for g in found] == list("XABCDE")
    for g in found:
        assert len(points(g)) == 12
        means = [l for l in g.iter(f"{SVG}line") if l.get("class") == "mean"]
        assert len(means) == 1

    # The mean line of X rises (SVG y grows downwards).
    line = [l for l in found[0].iter(f"{SVG}line")
            if l.get("class") == "mean"][0]
    assert float(line.get("y2")) < float(line.get("y1"))

    document = doekit.render_main_effects(panels, benchmark="X")
    found = groups(parse(document), "panel")
    assert [g.get("data-factor") for g in found] == list("ABCDEX")

    with pytest.raises(doekit.ValidationError):
        doekit.render_main_effects(panels, benchmark="Z")

    config = doekit.PlotConfig(y_range=(0.0, 100.0))
    with pytest.raises(doekit.ValidationError):
        doekit.render_main_effects(panels, config)

    config = doekit.PlotConfig(width=600, height=300, y_range=(80.0, 120.0))
    root = parse(doekit.render_main_effects(panels, config))
    assert root.get("viewBox") == "0 0 600 300"


def test_render_structured():
    """Test the render_structured function."""

    data = datasets.screening_results()
    layout = doekit.structured_plot_layout(data, "X", ("A", "B"))
    document = doekit.render_structured(layout)
    assert document == doekit.render_structured(layout)

    root = parse(document)
    found = groups(root, "panel")
    assert [g.get("data-cell") for g in found] == \
        ["-1,-1", "+1,-1", "-1,+1", "+1,+1"]
    counts = [len(points(g)) for g in found]
    assert counts == [len(cell.points) for cell in layout.cells]
    assert sum(counts) == 12

    titles = [c.find(f"{SVG}title").text for c in points(found[2])]
    assert titles == ["run 2: 85.8", "run 3: 91.7", "run 9: 114.8"]

    # Pairs are separated by a wider gap than panels within a pair.
    lefts = [float(g.find(f"{SVG}rect").get("x")) for g in found]
    assert lefts[2] - lefts[1] > lefts[1] - lefts[0]
    assert lefts[1] - lefts[0] == pytest.approx(lefts[3] - lefts[2])


def test_render_design_geometry():
    """Test the render_design_geometry function."""

    design = datasets.factorial_protocol()
    root = parse(doekit.render_design_geometry(design, ("T", "Q", "M"), "M"))
    slices = groups(root, "slice")
    assert [g.get("data-level") for g in slices] == ["-1", "+1"]
    for g in slices:
        assert len(points(g)) == 4
        edges = [l for l in g.iter(f"{SVG}line") if l.get("class") == "edge"]
        assert len(edges) == 4

    # Runs at M = + are drawn on the right.
    left = [float(c.get("cx")) for c in points(slices[0])]
    right = [float(c.get("cx")) for c in points(slices[1])]
    assert max(left) < min(right)
    ids = [t.text for t in slices[1].iter(f"{SVG}text")
           if t.get("class") == "run-id"]
    assert sorted(ids, key=int) == ["9", "10", "11", "12"]

    design = datasets.ofat_protocol()
    root = parse(doekit.render_design_geometry(design, ("T", "Q", "M"), "M"))
    for g in groups(root, "slice"):
        assert len(points(g)) == 4
        edges = [l for l in g.iter(f"{SVG}line") if l.get("class") == "edge"]
        assert len(edges) == 3

    with pytest.raises(doekit.ValidationError):
        doekit.render_design_geometry(design, ("T", "Q"), "M")
    with pytest.raises(doekit.ValidationError):
        doekit.render_design_geometry(design, ("T", "Q", "M"), "T")
    with pytest.raises(doekit.ValidationError):
        doekit.render_design_geometry(design, ("T", "Q", "M"), "Z")


def test_write_svg(tmp_path):
    """Test the write_svg function."""

    panels = doekit.main_effects_panels(datasets.screening_results())
    document = doekit.render_main_effects(panels)
    path = tmp_path / "main.svg"
    doekit.write_svg(path, document)
    assert path.read_text() == document
