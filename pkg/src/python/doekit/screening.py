"""Graphical screening analysis of two-level designs.

The strategy assumes effect sparsity: rank the main effects, flag the few
factors whose effect is comparable with the largest one, then look at
those in more detail (interaction contrasts, conditional effects and a
structured plot conditioned on two factors).
"""

from dataclasses import dataclass, field
import itertools
import json
import logging
from typing import Dict, Optional, Tuple

import numpy

from .design import validate_design
from .effects import (
    EffectEstimate,
    conditional_effect,
    interaction_effect,
    main_effect,
)
from .errors import EstimationError, ValidationError

__all__ = [
    "ActiveSet",
    "Cell",
    "Panel",
    "PanelData",
    "ScreeningReport",
    "StructuredLayout",
    "default_structured_factors",
    "flag_active",
    "main_effects_panels",
    "rank_effects",
    "screen",
    "structured_plot_layout",
]

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1 / 3
MAX_FORWARDED = 4


def check_two_level(data, names):
    for name in names:
        if not data.design.factor(name).is_two_level:
            raise ValidationError(f"factor '{name}' is not two-level")


def rank_effects(data):
    """Main effects of all factors, largest magnitude first.

    Ties keep the declaration order.
    """

    check_two_level(data, data.design.names)
    effects = [main_effect(data, name) for name in data.design.names]
    return sorted(effects, key=lambda e: -abs(e.mean_difference))


@dataclass(frozen=True)
class ActiveSet:
    """Factors flagged as active, and the magnitude threshold used."""

    names: Tuple[str, ...]
    threshold_used: float


def flag_active(ranked, relative_threshold=DEFAULT_THRESHOLD,
                absolute_floor=0.0):
    """Flag the effects whose magnitude reaches a fraction of the largest.

    The threshold is ``max(relative_threshold * max|effect|,
    absolute_floor)``. If all effects vanish, nothing is active and the
    threshold is 0.
    """

    ranked = list(ranked)
    if not ranked:
        raise ValidationError("no effects to screen")
    if not 0.0 < relative_threshold < 1.0:
        raise ValidationError(
            f"relative threshold must lie in (0, 1) "
            f"(found {relative_threshold})"
        )
    if absolute_floor < 0.0:
        raise ValidationError(
            f"absolute floor must be non-negative (found {absolute_floor})"
        )

    largest = max(abs(e.mean_difference) for e in ranked)
    if largest == 0.0:
        return ActiveSet((), 0.0)

    threshold = max(relative_threshold * largest, absolute_floor)
    names = tuple(
        e.target for e in ranked if abs(e.mean_difference) >= threshold
    )
    return ActiveSet(names, threshold)


@dataclass(frozen=True)
class Panel:
    """Responses of one factor, with the mean at each level."""

    factor: str
    points: Tuple[Tuple[int, int, float], ...]  # (run_id, level, response)
    means: Dict[int, float] = field(hash=False)
    labels: Dict[int, str] = field(hash=False)


@dataclass(frozen=True)
class PanelData:
    """Main-effects panels, in declaration order."""

    panels: Tuple[Panel, ...]
    response_name: str

    def __len__(self):
        return len(self.panels)

    def __getitem__(self, factor):
        for panel in self.panels:
            if panel.factor == factor:
                return panel
        raise KeyError(factor)


def main_effects_panels(data):
    """Point clouds and level means behind a main-effects plot."""

    check_two_level(data, data.design.names)
    values = data.values
    panels = []
    for factor in data.design.factors:
        column = data.column(factor.name)
        points = tuple(
            (run.run_id, int(level), float(value))
            for run, level, value in zip(data.runs, column, values)
        )
        means = {
            level: float(numpy.mean(values[column == level]))
            for level in factor.levels if numpy.any(column == level)
        }
        labels = {level: factor.label(level) for level in factor.levels}
        panels.append(Panel(factor.name, points, means, labels))
    return PanelData(tuple(panels), data.response_name)


@dataclass(frozen=True)
class Cell:
    """Responses at one combination of the two conditioning factors."""

    key: Tuple[int, int]
    points: Tuple[Tuple[int, int, float], ...]  # (run_id, focal, response)

    @property
    def values(self):
        return tuple(p[2] for p in self.points)


@dataclass(frozen=True)
class StructuredLayout:
    """Four panels of the focal factor, conditioned on two factors.

    Cells are ordered (L, L), (H, L), (L, H), (H, H), the first conditioner
    varying fastest.
    """

    focal: str
    conditioners: Tuple[str, str]
    cells: Tuple[Cell, ...]
    response_name: str
    labels: Dict[str, Dict[int, str]] = field(hash=False)

    def cell(self, first, second):
        for cell in self.cells:
            if cell.key == (first, second):
                return cell
        raise KeyError((first, second))


def structured_plot_layout(data, focal, conditioners):
    """Split the runs into the four cells of a structured plot."""

    conditioners = tuple(conditioners)
    if len(conditioners) != 2:
        raise ValidationError(
            f"a structured plot needs exactly 2 conditioning factors "
            f"(found {len(conditioners)})"
        )
    names = (focal,) + conditioners
    if len(set(names)) != 3:
        raise ValidationError(
            f"focal and conditioning factors must differ ({names})"
        )
    check_two_level(data, names)

    first, second = (data.column(name) for name in conditioners)
    focal_column = data.column(focal)
    cells = []
    for b, a in itertools.product((-1, 1), (-1, 1)):
        points = sorted(
            (int(f), run.run_id, value)
            for run, f, value, x, y in zip(
                data.runs, focal_column, data.response, first, second
            )
            if x == a and y == b
        )
        cells.append(Cell(
            (a, b),
            tuple((run_id, f, value) for f, run_id, value in points)
        ))

    labels = {
        name: {level: data.design.factor(name).label(level)
               for level in (-1, 1)}
        for name in names
    }
    return StructuredLayout(
        focal, conditioners, tuple(cells), data.response_name, labels
    )


@dataclass(frozen=True)
class ScreeningReport:
    """Outcome of a screening analysis."""

    effects: Tuple[EffectEstimate, ...]
    active: Tuple[str, ...]
    threshold_used: float
    diagnostics: Optional[dict] = field(default=None, hash=False)
    warnings: Tuple[str, ...] = ()
    forwarded: Tuple[str, ...] = ()
    interactions: Tuple[EffectEstimate, ...] = ()
    conditional: Tuple[EffectEstimate, ...] = ()
    relative_threshold: float = DEFAULT_THRESHOLD
    response_name: str = "Resp"

    def to_dict(self):
        return {
            "response": self.response_name,
            "relative_threshold": self.relative_threshold,
            "threshold_used": self.threshold_used,
            "effects": [e.to_dict() for e in self.effects],
            "active": list(self.active),
            "forwarded": list(self.forwarded),
            "interactions": [e.to_dict() for e in self.interactions],
            "conditional": [e.to_dict() for e in self.conditional],
            "warnings": list(self.warnings),
            "diagnostics": self.diagnostics,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary(self):
        """Plain-text summary table."""

        width = max(
            [len("effect")] +
            [len(e.target) for e in self.effects + self.interactions +
             self.conditional]
        )
        header = (
            f"{'effect':<{width}}  {'mean_diff':>10}  {'half':>9}  "
            f"{'mean_low':>9}  {'mean_high':>9}  {'n_low':>5}  "
            f"{'n_high':>6}  active"
        )

        def row(e, flag=""):
            return (
                f"{e.target:<{width}}  {e.mean_difference:>10.3f}  "
                f"{e.half_effect:>9.3f}  {e.mean_low:>9.3f}  "
                f"{e.mean_high:>9.3f}  {e.n_low:>5d}  {e.n_high:>6d}  {flag}"
            ).rstrip()

        lines = [
            f"response: {self.response_name}",
            f"threshold: {self.threshold_used:.3f} "
            f"({self.relative_threshold:.4g} x largest effect)",
            "",
            header,
        ]
        lines += [row(e, "*" if e.target in self.active else "")
                  for e in self.effects]
        if self.interactions:
            lines += ["", "interactions"]
            lines += [row(e) for e in self.interactions]
        if self.conditional:
            lines += ["", "conditional effects"]
            lines += [row(e) for e in self.conditional]
        lines += ["", f"active: {', '.join(self.active) or '(none)'}"]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"


def screen(data, relative_threshold=DEFAULT_THRESHOLD, absolute_floor=0.0,
           max_forwarded=MAX_FORWARDED):
    """Rank effects, flag active factors and detail the forwarded ones.

    At most ``max_forwarded`` active factors are forwarded to the detailed
    analysis. Beyond 4 factors, a 12-run Plackett-Burman projection no
    longer covers a full factorial and the report carries a warning.
    """

    ranked = rank_effects(data)
    active = flag_active(ranked, relative_threshold, absolute_floor)

    warnings = []
    if len(active.names) > max_forwarded:
        warnings.append(
            f"{len(active.names)} factors passed the threshold; with more "
            f"than {max_forwarded} active factors the projection property "
            f"no longer protects the analysis"
        )
    forwarded = active.names[:max_forwarded]

    def estimate(effect, *args):
        try:
            return effect(data, *args)
        except EstimationError as e:
            warnings.append(f"skipped an unestimable contrast ({e})")
            return None

    interactions = [
        estimate(interaction_effect, f, g)
        for f, g in itertools.combinations(forwarded, 2)
    ]
    interactions = sorted(
        (e for e in interactions if e is not None),
        key=lambda e: -abs(e.mean_difference),
    )

    conditional = []
    if interactions:
        top = forwarded[0]
        partners = [e for e in interactions if top in e.target.split(":")]
        if partners:
            f, g = partners[0].target.split(":")
            other = g if f == top else f
            conditional = [
                estimate(conditional_effect, top, other, level)
                for level in (-1, 1)
            ]
            conditional = [e for e in conditional if e is not None]

    diagnostics = validate_design(data.design)
    if not diagnostics.orthogonal:
        warnings.append("the design is not orthogonal")

    for warning in warnings:
        logger.warning(warning)

    return ScreeningReport(
        effects = tuple(ranked),
        active = active.names,
        threshold_used = active.threshold_used,
        diagnostics = diagnostics.to_dict(),
        warnings = tuple(warnings),
        forwarded = forwarded,
        interactions = tuple(interactions),
        conditional = tuple(conditional),
        relative_threshold = relative_threshold,
        response_name = data.response_name,
    )


def default_structured_factors(report):
    """Focal and conditioning factors for a structured plot.

    The top-ranked factor is the focal one, the next two condition it.
    """

    names = [e.target for e in report.effects]
    if len(names) < 3:
        raise ValidationError(
            "a structured plot needs at least 3 factors"
        )
    return names[0], (names[1], names[2])
