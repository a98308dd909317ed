"""Deterministic SVG figures.

Three figures are rendered: main-effects panels, structured plots (a
focal factor conditioned on two others) and the flattened geometry of a
three-factor design (two squares, one per level of a slicing factor).

Documents are built with :mod:`xml.etree.ElementTree`. Coordinates are
printed with two decimals and no identifier is generated, so that the
output bytes only depend on the input data and on the configuration.
"""

from dataclasses import dataclass
import logging
from typing import Optional, Tuple
import xml.etree.ElementTree as ET

import numpy

from .design import edge_pairs
from .errors import ValidationError
from .files import write_text

__all__ = [
    "PlotConfig",
    "render_design_geometry",
    "render_main_effects",
    "render_structured",
    "write_svg",
]

logger = logging.getLogger(__name__)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"

STYLE = """
.frame { fill: none; stroke: #888888; stroke-width: 1; }
.square { fill: none; stroke: #333333; stroke-width: 1.5; }
.axis { stroke: #333333; stroke-width: 1; }
.point { fill: #1f77b4; fill-opacity: 0.8; stroke: none; }
.mean { stroke: #d62728; stroke-width: 2; }
.edge { stroke: #2ca02c; stroke-width: 1; stroke-dasharray: 4 2; }
.title { font-weight: bold; }
"""


@dataclass(frozen=True)
class PlotConfig:
    """Figure geometry, in pixels (font size in points)."""

    width: int = 960
    height: int = 400
    margin: int = 56
    gap: int = 12
    point_radius: float = 3.5
    font_size: float = 11.0
    jitter: float = 4.0
    y_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        for name in ("width", "height", "point_radius", "font_size"):
            if not getattr(self, name) > 0:
                raise ValidationError(
                    f"bad {name.replace('_', ' ')} ({getattr(self, name)})"
                )
        for name in ("margin", "gap", "jitter"):
            if getattr(self, name) < 0:
                raise ValidationError(f"bad {name} ({getattr(self, name)})")
        if 2 * self.margin >= min(self.width, self.height):
            raise ValidationError(f"margin too large ({self.margin})")
        if self.y_range is not None:
            low, high = (float(v) for v in self.y_range)
            if not low < high:
                raise ValidationError(f"bad y range ({self.y_range})")
            object.__setattr__(self, "y_range", (low, high))


def fmt(value):
    """Fixed-precision coordinate."""
    return f"{value + 0.0:.2f}"


class Canvas:
    """An SVG document under construction."""

    def __init__(self, config, title):
        self.config = config
        self.root = ET.Element("svg", {
            "xmlns": SVG_NAMESPACE,
            "version": "1.1",
            "width": str(config.width),
            "height": str(config.height),
            "viewBox": f"0 0 {config.width} {config.height}",
            "font-family": "sans-serif",
            "font-size": fmt(config.font_size),
        })
        ET.SubElement(self.root, "title").text = title
        ET.SubElement(self.root, "style").text = STYLE

    def group(self, parent=None, cls=None, **data):
        attributes = {} if cls is None else {"class": cls}
        attributes.update({f"data-{k}": str(v) for k, v in data.items()})
        return ET.SubElement(
            self.root if parent is None else parent, "g", attributes
        )

    def circle(self, parent, x, y, cls="point", title=None):
        element = ET.SubElement(parent, "circle", {
            "class": cls,
            "cx": fmt(x),
            "cy": fmt(y),
            "r": fmt(self.config.point_radius),
        })
        if title is not None:
            ET.SubElement(element, "title").text = title
        return element

    def line(self, parent, x1, y1, x2, y2, cls):
        return ET.SubElement(parent, "line", {
            "class": cls,
            "x1": fmt(x1), "y1": fmt(y1), "x2": fmt(x2), "y2": fmt(y2),
        })

    def rect(self, parent, x, y, width, height, cls):
        return ET.SubElement(parent, "rect", {
            "class": cls,
            "x": fmt(x), "y": fmt(y),
            "width": fmt(width), "height": fmt(height),
        })

    def text(self, parent, x, y, string, anchor="middle", cls=None,
             rotate=False):
        attributes = {"x": fmt(x), "y": fmt(y), "text-anchor": anchor}
        if cls is not None:
            attributes["class"] = cls
        if rotate:
            attributes["transform"] = f"rotate(-90 {fmt(x)} {fmt(y)})"
        element = ET.SubElement(parent, "text", attributes)
        element.text = string
        return element

    def tostring(self):
        body = ET.tostring(self.root, encoding="unicode")
        return '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n' + \
               body + "\n"


class YScale:
    """Shared vertical axis, auto range padded by 5%."""

    def __init__(self, values, config, top, bottom):
        values = numpy.asarray(values, dtype=float)
        if config.y_range is None:
            low, high = float(values.min()), float(values.max())
            pad = 0.05 * (high - low) if high > low else \
                max(0.05 * abs(high), 1.0)
            low, high = low - pad, high + pad
        else:
            low, high = config.y_range
            if values.size and (values.min() < low or values.max() > high):
                raise ValidationError(
                    f"y range ({low}, {high}) does not contain all values"
                )
        self.low, self.high = low, high
        self.top, self.bottom = top, bottom

    def __call__(self, value):
        fraction = (self.high - value) / (self.high - self.low)
        return self.top + fraction * (self.bottom - self.top)

    def draw(self, canvas, x, label):
        group = canvas.group(cls="y-axis")
        canvas.line(group, x, self.top, x, self.bottom, "axis")
        size = canvas.config.font_size
        for tick in numpy.linspace(self.low, self.high, 5):
            y = self(tick)
            canvas.line(group, x - 4, y, x, y, "axis")
            canvas.text(group, x - 6, y + size / 3, f"{tick:.1f}", "end")
        canvas.text(group, x - 4.5 * size, (self.top + self.bottom) / 2,
                    label, rotate=True)


def jittered(points, x_of, jitter):
    """Horizontal positions, points sharing a level being spread apart in
    run id order."""

    positions = {}
    groups = {}
    for run_id, level, _ in points:
        groups.setdefault(level, []).append(run_id)
    for level, run_ids in groups.items():
        run_ids.sort()
        centre = (len(run_ids) - 1) / 2
        for k, run_id in enumerate(run_ids):
            positions[run_id] = x_of(level) + (k - centre) * jitter
    return positions


def draw_panel(canvas, group, points, means, labels, left, width, scale,
               title):
    """Points against a coded level, with a line joining the level means."""

    config = canvas.config
    canvas.rect(group, left, scale.top, width, scale.bottom - scale.top,
                "frame")
    canvas.text(group, left + width / 2, scale.top - config.font_size / 2,
                title, cls="title")

    def x_of(level):
        return left + width * (0.5 + 0.25 * level)

    for level, text in sorted(labels.items()):
        canvas.text(group, x_of(level), scale.bottom + 1.5 * config.font_size,
                    text)

    positions = jittered(points, x_of, config.jitter)
    for run_id, level, value in points:
        canvas.circle(group, positions[run_id], scale(value),
                      title=f"run {run_id}: {value:g}")

    if -1 in means and 1 in means:
        canvas.line(group, x_of(-1), scale(means[-1]), x_of(1),
                    scale(means[1]), "mean")


def render_main_effects(panels, config=None, benchmark=None):
    """One panel per factor over a shared y-axis.

    The ``benchmark`` factor, if given, is drawn rightmost.
    """

    config = PlotConfig() if config is None else config
    order = list(panels.panels)
    if not order:
        raise ValidationError("no panels to render")
    if benchmark is not None:
        try:
            panel = panels[benchmark]
        except KeyError:
            raise ValidationError(f"unknown factor ({benchmark!r})") from None
        order.remove(panel)
        order.append(panel)

    canvas = Canvas(config, f"{panels.response_name} vs. each factor")
    top = config.margin
    bottom = config.height - config.margin
    values = [v for panel in order for _, _, v in panel.points]
    scale = YScale(values, config, top, bottom)
    scale.draw(canvas, config.margin, panels.response_name)

    n = len(order)
    width = (config.width - 2 * config.margin - (n - 1) * config.gap) / n
    for i, panel in enumerate(order):
        left = config.margin + i * (width + config.gap)
        group = canvas.group(cls="panel", factor=panel.factor)
        draw_panel(canvas, group, panel.points, panel.means, panel.labels,
                   left, width, scale, panel.factor)

    logger.debug("rendered %d main-effects panels", n)
    return canvas.tostring()


def render_structured(layout, config=None):
    """Four panels of the focal factor, in layout cell order.

    Cells come as two contiguous pairs: the first conditioner alternates
    within a pair, the second one changes between pairs.
    """

    config = PlotConfig() if config is None else config
    if len(layout.cells) != 4 or len(layout.conditioners) != 2:
        raise ValidationError("a structured layout has 4 cells")

    first, second = layout.conditioners
    canvas = Canvas(
        config,
        f"{layout.response_name} vs. {layout.focal} by {first} and {second}",
    )
    size = config.font_size
    top = config.margin + 3 * size
    bottom = config.height - config.margin
    values = [v for cell in layout.cells for v in cell.values]
    scale = YScale(values, config, top, bottom)
    scale.draw(canvas, config.margin, layout.response_name)

    pair_gap = 3 * config.gap
    width = (config.width - 2 * config.margin - 2 * config.gap -
             pair_gap) / 4
    focal_labels = layout.labels[layout.focal]
    for i, cell in enumerate(layout.cells):
        left = config.margin + i * (width + config.gap) + \
            (pair_gap - config.gap) * (i // 2)
        a, b = cell.key
        group = canvas.group(cls="panel", cell=f"{a:+d},{b:+d}")
        canvas.text(group, left + width / 2, config.margin - size / 2,
                    f"{second}: {layout.labels[second][b]}", cls="legend")
        canvas.text(group, left + width / 2, config.margin + size,
                    f"{first}: {layout.labels[first][a]}", cls="legend")

        focal = {}
        for _, level, value in cell.points:
            focal.setdefault(level, []).append(value)
        means = {level: float(numpy.mean(v)) for level, v in focal.items()}
        draw_panel(canvas, group, cell.points, means, focal_labels, left,
                   width, scale, layout.focal)

    return canvas.tostring()


def render_design_geometry(design, axes, slice_factor, config=None):
    """Flatten a three-factor design into two squares.

    ``axes`` names three factors of the design, one of which is the two-level
    ``slice_factor``. The remaining two are the horizontal then vertical axes
    of each square. The left square holds the runs at the low level of the
    slicing factor, the right one those at its high level. Runs are labelled
    by id, and edge pairs (runs one level apart along an in-square factor) are
    joined.
    """

    config = PlotConfig() if config is None else config
    axes = tuple(axes)
    if len(axes) != 3 or len(set(axes)) != 3:
        raise ValidationError(f"expected 3 distinct axes (found {axes})")
    for name in axes:
        design.index(name)
    if slice_factor not in axes:
        raise ValidationError(
            f"slicing factor '{slice_factor}' is not one of the axes"
        )
    sliced = design.factor(slice_factor)
    if not sliced.is_two_level:
        raise ValidationError(
            f"slicing factor '{slice_factor}' must be two-level"
        )
    horizontal, vertical = (name for name in axes if name != slice_factor)
    ih, iv, islice = (design.index(n) for n in (horizontal, vertical,
                                                 slice_factor))

    canvas = Canvas(
        config, f"design geometry of {horizontal}, {vertical} by "
                f"{slice_factor}"
    )
    size = config.font_size
    side = min(
        config.height - 2 * config.margin - 2 * size,
        (config.width - 3 * config.margin) / 2,
    )
    top = config.margin + 2 * size
    lefts = {
        -1: config.margin,
        1: config.width - config.margin - side,
    }

    def position(run):
        left = lefts[run.settings[islice]]
        x = left + side * (run.settings[ih] + 1) / 2
        y = top + side * (1 - run.settings[iv]) / 2
        return x, y

    for level in (-1, 1):
        left = lefts[level]
        group = canvas.group(cls="slice", level=f"{level:+d}")
        canvas.rect(group, left, top, side, side, "square")
        canvas.text(group, left + side / 2, config.margin,
                    f"{slice_factor} = {sliced.label(level)}", cls="title")
        canvas.text(group, left + side / 2, top + side + 2.5 * size,
                    horizontal)
        canvas.text(group, left - 1.5 * size, top + side / 2, vertical,
                    rotate=True)

        edges = canvas.group(group, cls="edges")
        for name in (horizontal, vertical):
            levels = design.factor(name).levels
            for a, b in zip(levels, levels[1:]):
                for low, high in edge_pairs(design, name, a, b):
                    if low.settings[islice] != level:
                        continue
                    canvas.line(edges, *position(low), *position(high),
                                "edge")

        points = canvas.group(group, cls="runs")
        for run in design.runs:
            if run.settings[islice] != level:
                continue
            x, y = position(run)
            canvas.circle(points, x, y, title=f"run {run.run_id}")
            canvas.text(points, x + config.point_radius + 2,
                        y - config.point_radius - 2, str(run.run_id),
                        anchor="start", cls="run-id")

    return canvas.tostring()


def write_svg(path, document):
    """Write an SVG document to a file."""
    write_text(path, document)
