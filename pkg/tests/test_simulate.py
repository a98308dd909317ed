import json

import doekit
from doekit import datasets
import numpy
from numpy.testing import assert_allclose
import pytest


def test_SimModel(tmp_path):
    """Test the SimModel interface."""

    model = doekit.SimModel(
        intercept = 100,
        main_coefs = {"X": 10, "A": 3},
        interaction_coefs = {("X", "B"): 3},
        noise_sd = 3,
        seed = 3001,
    )
    assert model.intercept == 100.0
    assert model.factors == ("X", "A", "B")
    assert model.round_decimals == 1
    assert model.with_seed(7).seed == 7
    assert model.seed == 3001

    content = model.to_dict()
    assert content["interactions"] == [{"a": "X", "b": "B", "coef": 3.0}]
    assert doekit.SimModel.from_dict(content) == model

    path = tmp_path / "model.json"
    path.write_text(json.dumps(content))
    assert doekit.SimModel.load(path) == model

    path = tmp_path / "model.toml"
    path.write_text("""\
intercept = 100.0
sd = 3.0
seed = 3001

[main]
X = 10.0
A = 3.0

[[interactions]]
a = "X"
b = "B"
coef = 3.0
""")
    if doekit.simulate.toml is not None:
        assert doekit.SimModel.load(path) == model

    with pytest.raises(doekit.ValidationError):
        doekit.SimModel(noise_sd=-1)
    with pytest.raises(doekit.ValidationError):
        doekit.SimModel(round_decimals=-1)
    with pytest.raises(doekit.ValidationError):
        doekit.SimModel(interaction_coefs={("A", "A"): 1.0})
    with pytest.raises(doekit.ValidationError):
        doekit.SimModel(interaction_coefs={("A", "B"): 1.0, ("B", "A"): 1.0})

    with pytest.raises(doekit.ParseError):
        doekit.SimModel.from_dict({"noise": 1.0})
    with pytest.raises(doekit.ParseError):
        doekit.SimModel.from_dict({"interactions": [{"a": "A"}]})

    path = tmp_path / "bad.json"
    path.write_text("{")
    with pytest.raises(doekit.ParseError):
        doekit.SimModel.load(path)

    path.write_bytes(b'{"intercept": 1.0,\n"sd": \xff}\n')
    with pytest.raises(doekit.ParseError, match="row 2"):
        doekit.SimModel.load(path)

    for seed in (1.5, "7", True):
        with pytest.raises(doekit.ValidationError):
            doekit.SimModel(seed=seed)
        with pytest.raises(doekit.ValidationError):
            model.with_seed(seed)
    with pytest.raises(doekit.ValidationError):
        doekit.SimModel.from_dict({"seed": 1.5})


def test_simulate_response():
    """Test the simulate_response function."""

    design = doekit.pb12_design(6, "XABCDE")
    model = datasets.screening_model(noise_sd=0.0)
    data = doekit.simulate_response(design, model)
    assert data.response_name == "Resp"
    assert data.design is design

    x = design.matrix()
    expected = 100 + 10 * x[:, 0] + 3 * x[:, 1] + 2 * x[:, 2] + \
               3 * x[:, 0] * x[:, 2]
    assert_allclose(data.values, expected)

    # Noiseless main effects recover twice the coefficients, up to the
    # partial aliasing of the X:B interaction (one third of it, twice).
    assert_allclose(doekit.main_effect(data, "X").mean_difference, 20.0)
    assert_allclose(doekit.main_effect(data, "B").mean_difference, 4.0)
    for name in "ACDE":
        effect = doekit.main_effect(data, name)
        bias = effect.mean_difference - 2 * model.main_coefs.get(name, 0.0)
        assert_allclose(abs(bias), 2.0)

    noisy = datasets.screening_model()
    a = doekit.simulate_response(design, noisy, "Yield")
    b = doekit.simulate_response(design, noisy, "Yield")
    assert a.response_name == "Yield"
    assert a.response == b.response
    c = doekit.simulate_response(design, noisy.with_seed(3002), "Yield")
    assert a.response != c.response

    # Rounding happens after the noise is added.
    assert_allclose(a.values, numpy.round(a.values, 1))
    z = doekit.seeded_gaussian(3001, 12)
    assert_allclose(a.values, numpy.round(expected + 3.0 * z, 1))

    with pytest.raises(doekit.ValidationError):
        doekit.simulate_response(
            design, doekit.SimModel(main_coefs={"Z": 1.0})
        )


def test_simulate_full_factorial():
    """Test noiseless effect recovery over a 6-factor full factorial."""

    design = doekit.full_factorial([doekit.FactorSpec(n) for n in "XABCDE"])
    model = datasets.screening_model(noise_sd=0.0)
    data = doekit.simulate_response(design, model)
    assert len(data) == 64

    expected = {"X": 20.0, "A": 6.0, "B": 4.0, "C": 0.0, "D": 0.0, "E": 0.0}
    for name, value in expected.items():
        effect = doekit.main_effect(data, name)
        assert_allclose(effect.mean_difference, value, atol=1e-9)
    xb = doekit.interaction_effect(data, "X", "B")
    assert_allclose(xb.mean_difference, 6.0, atol=1e-9)

    ranked = doekit.rank_effects(data)
    assert [e.target for e in ranked] == list("XABCDE")
    assert doekit.screen(data, 0.15).active == ("X", "A", "B")


@pytest.mark.statistical
def test_simulate_recovery():
    """Test effect recovery over many simulated experiments."""

    design = doekit.pb12_design(6, "XABCDE")
    model = datasets.screening_model()
    hits, ranked_first, effects = 0, 0, []
    for seed in range(100):
        data = doekit.simulate_response(design, model.with_seed(seed))
        x = doekit.main_effect(data, "X").mean_difference
        hits += abs(x - 20.0) <= 6.0
        ranked_first += doekit.rank_effects(data)[0].target == "X"
        effects.append(x)
    assert hits >= 99
    assert ranked_first >= 95
    assert abs(numpy.mean(effects) - 20.0) < 1.5
