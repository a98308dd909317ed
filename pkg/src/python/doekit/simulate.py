"""Synthetic responses from a linear model with interactions.

The response of a run with coded settings ``x`` is

    round(intercept + sum(b_f x_f) + sum(c_fg x_f x_g) + noise, decimals)

where the noise is drawn from Normal(0, noise_sd) by :class:`doekit.Random`.
Rounding happens after the noise is added.
"""

from dataclasses import dataclass, field, replace
import json
import logging
from pathlib import Path
from typing import Mapping, Tuple

import numpy

from .effects import DEFAULT_RESPONSE, ExperimentData
from .errors import ParseError, ValidationError
from .files import read_text
from .random import Random, check_seed

try:
    import tomllib as toml
except ImportError:
    try:
        import tomli as toml
    except ImportError:
        toml = None

__all__ = ["SimModel", "simulate_response"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimModel:
    """Linear response model with pairwise interactions and Gaussian noise."""

    intercept: float = 0.0
    main_coefs: Mapping[str, float] = field(default_factory=dict, hash=False)
    interaction_coefs: Mapping[Tuple[str, str], float] = field(
        default_factory=dict, hash=False
    )
    noise_sd: float = 0.0
    round_decimals: int = 1
    seed: int = 0

    def __post_init__(self):
        main = {str(k): float(v) for k, v in self.main_coefs.items()}
        interactions = {}
        for pair, coef in self.interaction_coefs.items():
            a, b = pair
            if a == b:
                raise ValidationError(
                    f"interaction of factor '{a}' with itself"
                )
            if (a, b) in interactions or (b, a) in interactions:
                raise ValidationError(f"duplicate interaction ({a}, {b})")
            interactions[(str(a), str(b))] = float(coef)
        object.__setattr__(self, "main_coefs", main)
        object.__setattr__(self, "interaction_coefs", interactions)
        object.__setattr__(self, "intercept", float(self.intercept))

        noise_sd = float(self.noise_sd)
        if not noise_sd >= 0.0:
            raise ValidationError(f"bad noise sd ({self.noise_sd})")
        object.__setattr__(self, "noise_sd", noise_sd)

        if isinstance(self.round_decimals, bool) \
                or int(self.round_decimals) != self.round_decimals \
                or self.round_decimals < 0:
            raise ValidationError(
                f"bad rounding decimals ({self.round_decimals!r})"
            )
        object.__setattr__(self, "round_decimals", int(self.round_decimals))
        object.__setattr__(self, "seed", check_seed(self.seed))

    @property
    def factors(self):
        """Names of the factors the model refers to."""

        names = dict.fromkeys(self.main_coefs)
        for a, b in self.interaction_coefs:
            names.setdefault(a)
            names.setdefault(b)
        return tuple(names)

    def with_seed(self, seed):
        return replace(self, seed=check_seed(seed))

    @classmethod
    def from_dict(cls, data, path=None):
        """Build a model from its configuration mapping."""

        known = {"intercept", "main", "interactions", "sd", "round", "seed"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParseError(
                f"unknown model keys ({', '.join(unknown)})", path=path
            )
        try:
            interactions = {
                (term["a"], term["b"]): term["coef"]
                for term in data.get("interactions", ())
            }
            return cls(
                intercept = data.get("intercept", 0.0),
                main_coefs = dict(data.get("main", {})),
                interaction_coefs = interactions,
                noise_sd = data.get("sd", 0.0),
                round_decimals = data.get("round", 1),
                seed = data.get("seed", 0),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise ParseError(f"bad model configuration ({e})", path=path) \
                from None

    @classmethod
    def load(cls, path):
        """Load a model from a JSON or TOML file."""

        path = Path(path)
        if path.suffix == ".toml":
            if toml is None:
                raise ValidationError(
                    "loading TOML models requires the tomli package"
                )
            text = read_text(path)
            try:
                data = toml.loads(text)
            except toml.TOMLDecodeError as e:
                raise ParseError(str(e), path=path) from None
        else:
            text = read_text(path)
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ParseError(e.msg, path=path, row=e.lineno) from None
        if not isinstance(data, dict):
            raise ParseError("expected a mapping", path=path)
        return cls.from_dict(data, path=path)

    def to_dict(self):
        return {
            "intercept": self.intercept,
            "main": dict(self.main_coefs),
            "interactions": [
                {"a": a, "b": b, "coef": coef}
                for (a, b), coef in self.interaction_coefs.items()
            ],
            "sd": self.noise_sd,
            "round": self.round_decimals,
            "seed": self.seed,
        }


def simulate_response(design, model, response_name=DEFAULT_RESPONSE):
    """Simulate one response per run of a design."""

    unknown = [name for name in model.factors if name not in design.names]
    if unknown:
        raise ValidationError(
            f"model refers to unknown factors ({', '.join(unknown)})"
        )

    x = design.matrix().astype(float)
    mean = numpy.full(len(design), model.intercept)
    for name, coef in model.main_coefs.items():
        mean += coef * x[:, design.index(name)]
    for (a, b), coef in model.interaction_coefs.items():
        mean += coef * x[:, design.index(a)] * x[:, design.index(b)]

    noise = model.noise_sd * Random(model.seed).normal(len(design))
    response = numpy.round(mean + noise, model.round_decimals)
    logger.debug("simulated %d responses (seed=%d, sd=%g)", len(design),
                 model.seed, model.noise_sd)
    return ExperimentData(design, tuple(response.tolist()), response_name)
