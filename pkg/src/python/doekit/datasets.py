"""Worked examples, as designs and data.

Two reproducibility studies are provided. The first one compares an OFAT
plan with a factorial plan over three factors: presence of a molecule
``M``, batch ``Q`` of a reagent and incubation temperature ``T``. The second
one is a 12-run screening experiment of a research factor ``X`` and five
nuisance factors ``A`` to ``E``, with constructed responses.
"""

from pathlib import Path

from .design import FactorSpec, cross_with_factor, full_factorial, ofat_design
from .files import parse_results_csv
from .simulate import SimModel

__all__ = [
    "factorial_protocol",
    "ofat_protocol",
    "screening_model",
    "screening_results",
]

PREFIX = Path(__file__).parent / "data"

MOLECULE = FactorSpec.two_level("M", "-", "+")
BATCH = FactorSpec.two_level("Q", "1", "2")


def ofat_protocol():
    """Eight-run OFAT plan, run ids 1 to 8.

    With batch 1 at nominal temperature as baseline, the batch is switched
    once and the temperature is moved down and up; everything is repeated
    with and without ``M``.
    """

    temperature = FactorSpec.three_level("T", "-", "0", "+")
    core = ofat_design(
        (BATCH, temperature),
        baseline = (-1, 0),
        excursions = (("Q", 1), ("T", -1), ("T", 1)),
    )
    design = cross_with_factor(core, MOLECULE, order=(1, -1))
    return design.select(("M", "Q", "T"))


def factorial_protocol():
    """Eight-run full factorial plan, run ids 9 to 16."""

    temperature = FactorSpec.two_level("T", "-", "+")
    core = full_factorial((temperature, BATCH))
    design = cross_with_factor(core, MOLECULE, order=(1, -1))
    return design.select(("M", "Q", "T")).renumber(9)


def screening_results():
    """Constructed results of the 12-run screening experiment."""
    return parse_results_csv(PREFIX / "screening.csv")


def screening_model(seed=3001, noise_sd=3.0):
    """Model the screening responses were constructed from."""

    return SimModel(
        intercept = 100.0,
        main_coefs = {"X": 10.0, "A": 3.0, "B": 2.0},
        interaction_coefs = {("X", "B"): 3.0},
        noise_sd = noise_sd,
        round_decimals = 1,
        seed = seed,
    )
