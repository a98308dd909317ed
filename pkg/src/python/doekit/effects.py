"""Effect estimates from designed experiments.

Two kinds of arithmetic are provided: group contrasts (mean response at
the high level minus mean response at the low level of a coded column),
and paired differences between runs that only differ by one factor. Every
contrast is reported both as a raw mean difference and as a half effect
(the mean difference divided by 2).
"""

from dataclasses import dataclass
import logging
from typing import NamedTuple, Tuple

import numpy

from .design import DesignKind, DesignMatrix, RUN_COLUMN, code, edge_pairs
from .errors import EstimationError, ValidationError

__all__ = [
    "CellSummary",
    "EdgeDifference",
    "EffectEstimate",
    "ExperimentData",
    "cell_means",
    "conditional_effect",
    "edge_differences",
    "interaction_effect",
    "main_effect",
    "paired_effect",
    "paired_interaction",
]

logger = logging.getLogger(__name__)

DEFAULT_RESPONSE = "Resp"


@dataclass(frozen=True)
class ExperimentData:
    """A design joined with one response value per run."""

    design: DesignMatrix
    response: Tuple[float, ...]
    response_name: str = DEFAULT_RESPONSE

    def __post_init__(self):
        response = tuple(float(v) for v in self.response)
        if len(response) != len(self.design):
            raise ValidationError(
                f"found {len(response)} responses for {len(self.design)} runs"
            )
        if not all(numpy.isfinite(response)):
            raise ValidationError("responses must be finite")
        if not isinstance(self.response_name, str) \
                or not self.response_name.strip():
            raise ValidationError(
                f"bad response name ({self.response_name!r})"
            )
        if self.response_name == RUN_COLUMN:
            raise ValidationError(
                f"response name '{RUN_COLUMN}' is reserved for run ids"
            )
        if self.response_name in self.design.names:
            raise ValidationError(
                f"response name '{self.response_name}' is also a factor name"
            )
        object.__setattr__(self, "response", response)

    def __len__(self):
        return len(self.response)

    @property
    def runs(self):
        return self.design.runs

    @property
    def values(self):
        """Responses as a numpy array."""
        return numpy.array(self.response, dtype=float)

    def column(self, name):
        return self.design.column(name)

    def response_of(self, run_id):
        for run, value in zip(self.design.runs, self.response):
            if run.run_id == run_id:
                return value
        raise ValidationError(f"unknown run id ({run_id!r})")

    def restrict(self, name, level):
        """Keep only the runs where a factor sits at a given level."""

        level = code(level)
        if level not in self.design.factor(name).levels:
            raise ValidationError(
                f"undeclared level {level} for factor '{name}'"
            )
        mask = self.column(name) == level
        design = DesignMatrix(
            self.design.factors,
            tuple(r for r, keep in zip(self.design.runs, mask) if keep),
            DesignKind.CUSTOM,
        )
        response = tuple(v for v, keep in zip(self.response, mask) if keep)
        return ExperimentData(design, response, self.response_name)

    def with_response(self, values):
        return ExperimentData(self.design, tuple(values), self.response_name)


@dataclass(frozen=True)
class EffectEstimate:
    """A named two-group contrast."""

    target: str
    mean_difference: float
    half_effect: float
    mean_low: float
    mean_high: float
    n_low: int
    n_high: int

    @property
    def group_means(self):
        return (self.mean_low, self.mean_high)

    @property
    def group_counts(self):
        return (self.n_low, self.n_high)

    def to_dict(self):
        return {
            "target": self.target,
            "mean_difference": self.mean_difference,
            "half_effect": self.half_effect,
            "mean_low": self.mean_low,
            "mean_high": self.mean_high,
            "n_low": self.n_low,
            "n_high": self.n_high,
        }


def contrast(target, signs, values):
    """Estimate high minus low means over a column of -1/+1 signs."""

    low = values[signs == -1]
    high = values[signs == 1]
    if low.size == 0 or high.size == 0:
        side = "low" if low.size == 0 else "high"
        raise EstimationError(f"no runs in the {side} group of '{target}'")

    mean_low = float(numpy.mean(low))
    mean_high = float(numpy.mean(high))
    difference = mean_high - mean_low
    return EffectEstimate(
        target = target,
        mean_difference = difference,
        half_effect = difference / 2,
        mean_low = mean_low,
        mean_high = mean_high,
        n_low = int(low.size),
        n_high = int(high.size),
    )


def main_effect(data, factor):
    """Mean response at +1 minus mean response at -1.

    Centre points of a three-level factor are ignored.
    """

    estimate = contrast(factor, data.column(factor), data.values)
    logger.debug("main effect of %s: %g", factor, estimate.mean_difference)
    return estimate


def interaction_effect(data, factor_f, factor_g):
    """Contrast of the product column of two factors."""

    if factor_f == factor_g:
        raise ValidationError(
            f"an interaction needs two distinct factors ({factor_f!r})"
        )
    signs = data.column(factor_f) * data.column(factor_g)
    return contrast(f"{factor_f}:{factor_g}", signs, data.values)


def conditional_effect(data, focal, conditioning, cond_level):
    """Main effect of ``focal`` over the runs where ``conditioning`` is at
    ``cond_level``."""

    if focal == conditioning:
        raise ValidationError(
            f"cannot condition factor '{focal}' on itself"
        )
    cond_level = code(cond_level)
    subset = data.restrict(conditioning, cond_level)
    target = f"{focal}|{conditioning}={cond_level:+d}"
    return contrast(target, subset.column(focal), subset.values)


class EdgeDifference(NamedTuple):
    """Response difference across a pair of runs differing by one factor."""

    low_run: int
    high_run: int
    difference: float


def edge_differences(data, factor, level_low=-1, level_high=1):
    """Response differences over every edge pair of ``factor``."""

    responses = dict(zip(data.design.run_ids, data.response))
    return [
        EdgeDifference(
            low.run_id,
            high.run_id,
            responses[high.run_id] - responses[low.run_id],
        )
        for low, high in edge_pairs(data.design, factor, level_low, level_high)
    ]


def paired_effect(data, factor, level_low=-1, level_high=1):
    """Average of the edge differences of ``factor``."""

    differences = edge_differences(data, factor, level_low, level_high)
    if not differences:
        raise EstimationError(f"no edge pairs for factor '{factor}'")
    return float(numpy.mean([d.difference for d in differences]))


def paired_interaction(data, factor, conditioning):
    """Half the change of the edge differences of ``factor`` between the
    high and low levels of ``conditioning``."""

    if factor == conditioning:
        raise ValidationError(
            f"cannot condition factor '{factor}' on itself"
        )
    index = data.design.index(conditioning)
    settings = {run.run_id: run.settings for run in data.design.runs}

    groups = {-1: [], 1: []}
    for d in edge_differences(data, factor):
        level = settings[d.low_run][index]
        if level in groups:
            groups[level].append(d.difference)

    for level, values in groups.items():
        if not values:
            raise EstimationError(
                f"no edge pairs of '{factor}' at {conditioning}={level:+d}"
            )
    return float(numpy.mean(groups[1]) - numpy.mean(groups[-1])) / 2


class CellSummary(NamedTuple):
    """Responses sharing a combination of levels."""

    mean: float
    values: Tuple[float, ...]


def cell_means(data, names=()):
    """Group responses by the level combinations of ``names``."""

    names = tuple(names)
    indices = [data.design.index(name) for name in names]
    cells = {}
    for run, value in zip(data.design.runs, data.response):
        key = tuple(run.settings[i] for i in indices)
        cells.setdefault(key, []).append(value)
    return {
        key: CellSummary(float(numpy.mean(values)), tuple(values))
        for key, values in sorted(cells.items())
    }
