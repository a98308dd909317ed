"""Experimental designs in coded units.

Factor levels are coded as -1, 0 and +1. Raw settings (batch numbers,
temperatures, ...) only survive as display labels attached to a factor.
Every value defined here is immutable, and every operation returns a new
design.
"""

from collections import Counter
from dataclasses import dataclass, field, replace
import enum
import itertools
import logging
from typing import Dict, Mapping, Optional, Tuple

import numpy

from .errors import CapacityError, ValidationError
from .random import Random

__all__ = [
    "DesignDiagnostics",
    "DesignKind",
    "DesignMatrix",
    "FactorSpec",
    "Run",
    "cross_with_factor",
    "edge_pairs",
    "full_factorial",
    "ofat_design",
    "pb12_array",
    "pb12_design",
    "project_design",
    "randomize_order",
    "validate_design",
]

logger = logging.getLogger(__name__)

TWO_LEVELS = (-1, 1)
THREE_LEVELS = (-1, 0, 1)
DEFAULT_LABELS = {-1: "L", 0: "0", 1: "H"}

# Run id column of design and results files.
RUN_COLUMN = "run"

MAX_FACTORIAL_FACTORS = 16
PB12_RUNS = 12
PB12_GENERATOR = (1, 1, -1, 1, 1, 1, -1, -1, -1, 1, -1)


def code(value):
    """Convert a value to an integer level code."""

    if isinstance(value, bool):
        raise ValidationError(f"bad level code ({value!r})")
    try:
        result = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"bad level code ({value!r})") from None
    if isinstance(value, float) and value != result:
        raise ValidationError(f"bad level code ({value!r})")
    if result not in THREE_LEVELS:
        raise ValidationError(f"bad level code ({value!r})")
    return result


class DesignKind(str, enum.Enum):
    """Family a design was constructed from."""

    OFAT = "ofat"
    FULL_FACTORIAL = "full_factorial"
    PB12 = "pb12"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FactorSpec:
    """An experimental factor with coded levels and optional labels."""

    name: str
    levels: Tuple[int, ...] = TWO_LEVELS
    labels: Optional[Mapping[int, str]] = field(default=None, hash=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise ValidationError(f"bad factor name ({self.name!r})")
        if self.name != self.name.strip() \
                or any(c in self.name for c in ",\n\r\""):
            raise ValidationError(f"bad factor name ({self.name!r})")
        if self.name == RUN_COLUMN:
            raise ValidationError(
                f"factor name '{RUN_COLUMN}' is reserved for run ids"
            )

        levels = tuple(code(level) for level in self.levels)
        if levels not in (TWO_LEVELS, THREE_LEVELS):
            raise ValidationError(
                f"bad levels for factor '{self.name}' (expected (-1, 1) or "
                f"(-1, 0, 1), found {levels})"
            )
        object.__setattr__(self, "levels", levels)

        if self.labels is not None:
            labels = {}
            for level, text in self.labels.items():
                level = code(level)
                if level not in levels:
                    raise ValidationError(
                        f"label for undeclared level {level} of factor "
                        f"'{self.name}'"
                    )
                labels[level] = str(text)
            object.__setattr__(self, "labels", labels)

    @classmethod
    def two_level(cls, name, low=None, high=None):
        """Build a two-level factor, optionally labelled."""

        if low is None and high is None:
            return cls(name, TWO_LEVELS)
        labels = {-1: low or DEFAULT_LABELS[-1], 1: high or DEFAULT_LABELS[1]}
        return cls(name, TWO_LEVELS, labels)

    @classmethod
    def three_level(cls, name, low=None, centre=None, high=None):
        """Build a three-level factor, optionally labelled."""

        if low is None and centre is None and high is None:
            return cls(name, THREE_LEVELS)
        labels = {
            -1: low or DEFAULT_LABELS[-1],
            0: centre or DEFAULT_LABELS[0],
            1: high or DEFAULT_LABELS[1],
        }
        return cls(name, THREE_LEVELS, labels)

    @property
    def is_two_level(self):
        return self.levels == TWO_LEVELS

    def label(self, level):
        """Display text of a coded level."""

        if self.labels is not None and level in self.labels:
            return self.labels[level]
        return DEFAULT_LABELS[level]


@dataclass(frozen=True, order=True)
class Run:
    """One experimental run, i.e. a combination of coded settings."""

    run_id: int
    settings: Tuple[int, ...]

    def __post_init__(self):
        try:
            run_id = int(self.run_id)
        except (TypeError, ValueError):
            run_id = None
        if isinstance(self.run_id, bool) or run_id != self.run_id \
                or run_id < 1:
            raise ValidationError(f"bad run id ({self.run_id!r})")
        object.__setattr__(self, "run_id", run_id)
        object.__setattr__(
            self, "settings", tuple(code(v) for v in self.settings)
        )


def hamming(a, b):
    """Number of factors at which two settings differ."""
    return sum(x != y for x, y in zip(a, b))


@dataclass(frozen=True)
class DesignMatrix:
    """Ordered runs over a list of factors."""

    factors: Tuple[FactorSpec, ...]
    runs: Tuple[Run, ...]
    kind: DesignKind = DesignKind.CUSTOM

    def __post_init__(self):
        factors = tuple(self.factors)
        runs = tuple(self.runs)
        try:
            kind = DesignKind(self.kind)
        except ValueError:
            raise ValidationError(f"bad design kind ({self.kind!r})") from None
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "runs", runs)
        object.__setattr__(self, "kind", kind)

        if not factors:
            raise ValidationError("a design needs at least one factor")
        check_names(factors)

        ids = set()
        for run in runs:
            if run.run_id in ids:
                raise ValidationError(f"duplicate run id ({run.run_id})")
            ids.add(run.run_id)
            if len(run.settings) != len(factors):
                raise ValidationError(
                    f"run {run.run_id} has {len(run.settings)} settings for "
                    f"{len(factors)} factors"
                )
            for factor, level in zip(factors, run.settings):
                if level not in factor.levels:
                    raise ValidationError(
                        f"run {run.run_id} sets factor '{factor.name}' to "
                        f"undeclared level {level}"
                    )

        if kind is DesignKind.FULL_FACTORIAL:
            expected = int(numpy.prod([len(f.levels) for f in factors]))
            distinct = len({run.settings for run in runs})
            if len(runs) != expected or distinct != expected:
                raise ValidationError(
                    f"a full factorial over these factors needs {expected} "
                    f"distinct runs"
                )
        elif kind is DesignKind.PB12:
            if len(runs) != PB12_RUNS:
                raise ValidationError(
                    f"a 12-run Plackett-Burman design has {len(runs)} runs"
                )
            columns = self.matrix()
            if numpy.any(columns == 0) or numpy.any(columns.sum(axis=0) != 0):
                raise ValidationError(
                    "12-run Plackett-Burman columns must hold six -1 and six +1"
                )
        elif kind is DesignKind.OFAT:
            settings = [run.settings for run in runs]
            if not settings or not any(
                all(hamming(other, base) == 1
                    for j, other in enumerate(settings) if j != i)
                for i, base in enumerate(settings)
            ):
                raise ValidationError(
                    "OFAT runs must differ from a baseline run by exactly one "
                    "factor"
                )

    def __len__(self):
        return len(self.runs)

    def __iter__(self):
        return iter(self.runs)

    @property
    def names(self):
        """Factor names, in declaration order."""
        return tuple(f.name for f in self.factors)

    @property
    def run_ids(self):
        return tuple(run.run_id for run in self.runs)

    def index(self, name):
        """Column index of a factor."""

        for i, factor in enumerate(self.factors):
            if factor.name == name:
                return i
        raise ValidationError(f"unknown factor ({name!r})")

    def factor(self, name):
        return self.factors[self.index(name)]

    def column(self, name):
        """Coded settings of a factor, as a numpy array."""
        return self.matrix()[:, self.index(name)]

    def matrix(self):
        """Coded settings as a (runs, factors) numpy array."""

        if not self.runs:
            return numpy.empty((0, len(self.factors)), dtype=int)
        return numpy.array([run.settings for run in self.runs], dtype=int)

    def run(self, run_id):
        for run in self.runs:
            if run.run_id == run_id:
                return run
        raise ValidationError(f"unknown run id ({run_id!r})")

    def select(self, names):
        """Reorder or subset the design columns."""

        names = tuple(names)
        indices = [self.index(name) for name in names]
        if len(set(indices)) != len(indices):
            raise ValidationError(f"duplicate factor names ({names})")
        runs = tuple(
            Run(run.run_id, tuple(run.settings[i] for i in indices))
            for run in self.runs
        )
        factors = tuple(self.factors[i] for i in indices)
        kind = self.kind if len(indices) == len(self.factors) else \
            DesignKind.CUSTOM
        return DesignMatrix(factors, runs, kind)

    def renumber(self, start=1):
        """Reassign run ids sequentially, in run order."""

        runs = tuple(
            Run(start + i, run.settings) for i, run in enumerate(self.runs)
        )
        return replace(self, runs=runs)


def check_names(factors):
    """Check that factor names are unique."""

    names = [f.name for f in factors]
    duplicates = sorted(n for n, c in Counter(names).items() if c > 1)
    if duplicates:
        raise ValidationError(
            f"duplicate factor names ({', '.join(duplicates)})"
        )


def full_factorial(factors):
    """All level combinations, the first factor varying slowest."""

    factors = tuple(factors)
    if len(factors) > MAX_FACTORIAL_FACTORS:
        raise CapacityError(
            f"too many factors for a full factorial ({len(factors)} > "
            f"{MAX_FACTORIAL_FACTORS})"
        )
    if not factors:
        raise ValidationError("a full factorial needs at least one factor")
    check_names(factors)

    combinations = itertools.product(*(f.levels for f in factors))
    runs = tuple(
        Run(i, settings) for i, settings in enumerate(combinations, 1)
    )
    logger.debug("full factorial over %d factors (%d runs)", len(factors),
                 len(runs))
    return DesignMatrix(factors, runs, DesignKind.FULL_FACTORIAL)


def _factor_index(factors, key):
    if isinstance(key, str):
        for i, factor in enumerate(factors):
            if factor.name == key:
                return i
        raise ValidationError(f"unknown factor ({key!r})")
    if isinstance(key, bool) or not 0 <= int(key) < len(factors):
        raise ValidationError(f"bad factor index ({key!r})")
    return int(key)


def ofat_design(factors, baseline, excursions=()):
    """A baseline run followed by one single-factor excursion per entry.

    Excursions are ``(factor, level)`` pairs, where the factor is given by
    name or by column index.
    """

    factors = tuple(factors)
    check_names(factors)
    baseline = tuple(code(v) for v in baseline)
    if len(baseline) != len(factors):
        raise ValidationError(
            f"baseline has {len(baseline)} settings for {len(factors)} factors"
        )
    for factor, level in zip(factors, baseline):
        if level not in factor.levels:
            raise ValidationError(
                f"baseline sets factor '{factor.name}' to undeclared level "
                f"{level}"
            )

    settings = [baseline]
    seen = set()
    for key, level in excursions:
        i = _factor_index(factors, key)
        level = code(level)
        name = factors[i].name
        if level not in factors[i].levels:
            raise ValidationError(
                f"excursion sets factor '{name}' to undeclared level {level}"
            )
        if level == baseline[i]:
            raise ValidationError(
                f"excursion of factor '{name}' equals its baseline level "
                f"({level})"
            )
        if (i, level) in seen:
            raise ValidationError(
                f"duplicate excursion of factor '{name}' to level {level}"
            )
        seen.add((i, level))
        excursion = list(baseline)
        excursion[i] = level
        settings.append(tuple(excursion))

    runs = tuple(Run(i, s) for i, s in enumerate(settings, 1))
    return DesignMatrix(factors, runs, DesignKind.OFAT)


def cross_with_factor(design, new_factor, order=None):
    """Repeat every run once per level of a new (last) factor.

    The result is laid out block-wise: all runs at the first level of
    ``order`` (default, the declared levels), then all runs at the next one.
    Run ids are reassigned sequentially.
    """

    if new_factor.name in design.names:
        raise ValidationError(f"factor '{new_factor.name}' already in design")

    if order is None:
        order = new_factor.levels
    else:
        order = tuple(code(level) for level in order)
        if tuple(sorted(order)) != new_factor.levels:
            raise ValidationError(
                f"order must list each level of '{new_factor.name}' once"
            )

    runs = []
    for level in order:
        for run in design.runs:
            runs.append(Run(len(runs) + 1, run.settings + (level,)))

    kind = DesignKind.FULL_FACTORIAL \
        if design.kind is DesignKind.FULL_FACTORIAL else DesignKind.CUSTOM
    return DesignMatrix(design.factors + (new_factor,), tuple(runs), kind)


def pb12_array():
    """The 12 x 11 Plackett-Burman array.

    Rows 1 to 11 are right-cyclic shifts of the generator
    ``+ + - + + + - - - + -``; row 12 is all minus.
    """

    generator = numpy.array(PB12_GENERATOR, dtype=int)
    rows = [numpy.roll(generator, i) for i in range(len(generator))]
    rows.append(numpy.full(len(generator), -1, dtype=int))
    return numpy.array(rows)


def pb12_design(k, names=None):
    """12-run, two-level Plackett-Burman design over ``k`` factors.

    Factors are named ``F1`` ... ``Fk`` unless ``names`` (strings or
    FactorSpec) are given.
    """

    if isinstance(k, bool) or int(k) != k:
        raise ValidationError(f"bad factors count ({k!r})")
    k = int(k)
    if k > PB12_RUNS - 1:
        raise CapacityError(
            f"too many factors for a 12-run Plackett-Burman design ({k} > 11)"
        )
    if k < 1:
        raise ValidationError(f"bad factors count ({k})")

    if names is None:
        names = [f"F{i}" for i in range(1, k + 1)]
    names = list(names)
    if len(names) != k:
        raise ValidationError(f"expected {k} factor names, found {len(names)}")
    factors = tuple(
        name if isinstance(name, FactorSpec) else FactorSpec(name)
        for name in names
    )
    for factor in factors:
        if not factor.is_two_level:
            raise ValidationError(
                f"Plackett-Burman factor '{factor.name}' must be two-level"
            )

    array = pb12_array()[:, :k]
    runs = tuple(Run(i, tuple(row)) for i, row in enumerate(array.tolist(), 1))
    return DesignMatrix(factors, runs, DesignKind.PB12)


def project_design(design, names):
    """Count the occurrences of each level combination of a factor subset."""

    names = tuple(names)
    if not names:
        raise ValidationError("cannot project onto an empty factor subset")
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate factor names ({names})")
    indices = [design.index(name) for name in names]
    counts = Counter(
        tuple(run.settings[i] for i in indices) for run in design.runs
    )
    return dict(sorted(counts.items()))


def randomize_order(design, seed):
    """Permute the run order; run ids travel with their settings."""

    order = Random(seed).permutation(len(design))
    runs = tuple(design.runs[i] for i in order)
    logger.debug("randomized %d runs (seed=%d)", len(runs), seed)
    return replace(design, runs=runs)


def edge_pairs(design, factor, low=-1, high=1):
    """Pairs of runs identical but for ``factor``, at ``(low, high)``.

    Runs sharing the same other settings are paired in run id order. Pairs
    are sorted by the run ids of their low then high member.
    """

    i = design.index(factor)
    spec = design.factors[i]
    low, high = code(low), code(high)
    if low == high:
        raise ValidationError(f"edge levels of '{factor}' must differ")
    for level in (low, high):
        if level not in spec.levels:
            raise ValidationError(
                f"undeclared level {level} for factor '{factor}'"
            )

    groups = {}
    for run in design.runs:
        level = run.settings[i]
        if level not in (low, high):
            continue
        key = run.settings[:i] + run.settings[i + 1:]
        lows, highs = groups.setdefault(key, ([], []))
        (lows if level == low else highs).append(run)

    pairs = []
    for lows, highs in groups.values():
        pairs.extend(zip(sorted(lows), sorted(highs)))
    pairs.sort(key=lambda pair: (pair[0].run_id, pair[1].run_id))
    return pairs


@dataclass(frozen=True)
class DesignDiagnostics:
    """Balance, orthogonality and duplication report of a design."""

    level_counts: Dict[str, Dict[int, int]]
    imbalance: Dict[str, int]
    dot_products: Dict[Tuple[str, str], int]
    duplicates: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]
    edge_pair_counts: Dict[str, int]

    @property
    def balanced(self):
        return all(v == 0 for v in self.imbalance.values())

    @property
    def orthogonal(self):
        return all(v == 0 for v in self.dot_products.values())

    def to_dict(self):
        return {
            "balanced": self.balanced,
            "orthogonal": self.orthogonal,
            "level_counts": {
                name: {str(level): n for level, n in counts.items()}
                for name, counts in self.level_counts.items()
            },
            "imbalance": dict(self.imbalance),
            "dot_products": {
                f"{a}:{b}": v for (a, b), v in self.dot_products.items()
            },
            "duplicates": [
                {"settings": list(settings), "runs": list(ids)}
                for settings, ids in self.duplicates
            ],
            "edge_pairs": dict(self.edge_pair_counts),
        }


def validate_design(design):
    """Report per-column balance, pairwise dot products and duplicates."""

    matrix = design.matrix()
    level_counts, imbalance = {}, {}
    for j, factor in enumerate(design.factors):
        column = matrix[:, j]
        counts = {level: int(numpy.sum(column == level))
                  for level in factor.levels}
        level_counts[factor.name] = counts
        imbalance[factor.name] = max(counts.values()) - min(counts.values())

    dot_products = {}
    for i, j in itertools.combinations(range(len(design.factors)), 2):
        key = (design.factors[i].name, design.factors[j].name)
        dot_products[key] = int(matrix[:, i] @ matrix[:, j])

    ids = {}
    for run in design.runs:
        ids.setdefault(run.settings, []).append(run.run_id)
    duplicates = tuple(
        (settings, tuple(run_ids))
        for settings, run_ids in ids.items() if len(run_ids) > 1
    )

    edge_pair_counts = {
        factor.name: len(edge_pairs(design, factor.name))
        for factor in design.factors if factor.is_two_level
    }

    return DesignDiagnostics(
        level_counts, imbalance, dot_products, duplicates, edge_pair_counts
    )
