import json

import doekit
from doekit import datasets
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
import pytest


@pytest.fixture
def screening():
    return datasets.screening_results()


def estimate(target, value):
    return doekit.EffectEstimate(target, value, value / 2, 0.0, value, 6, 6)


def test_rank_effects(screening):
    """Test the rank_effects function."""

    ranked = doekit.rank_effects(screening)
    assert [e.target for e in ranked] == ["X", "A", "B", "D", "C", "E"]

    # Ties keep the declaration order.
    design = doekit.full_factorial([doekit.FactorSpec(n) for n in "AB"])
    data = doekit.simulate_response(
        design, doekit.SimModel(0.0, {"A": 1.0, "B": -1.0})
    )
    assert [e.target for e in doekit.rank_effects(data)] == ["A", "B"]

    t = doekit.FactorSpec.three_level("T")
    data = doekit.ExperimentData(doekit.full_factorial((t,)), (1, 2, 3))
    with pytest.raises(doekit.ValidationError):
        doekit.rank_effects(data)


def test_flag_active(screening):
    """Test the flag_active function."""

    ranked = doekit.rank_effects(screening)
    active = doekit.flag_active(ranked)
    assert active.names == ("X", "A", "B")
    assert_allclose(active.threshold_used, 16.3167 / 3, atol=1e-4)

    active = doekit.flag_active(ranked, relative_threshold=0.2)
    assert active.names == ("X", "A", "B", "D", "C")

    active = doekit.flag_active(ranked, absolute_floor=10.0)
    assert active.names == ("X",)
    assert active.threshold_used == 10.0

    # Exact ties with the threshold are active.
    active = doekit.flag_active(
        (estimate("P", 3.0), estimate("Q", -1.5)), 0.5
    )
    assert active.names == ("P", "Q")

    active = doekit.flag_active((estimate("P", 0.0), estimate("Q", 0.0)))
    assert active.names == ()
    assert active.threshold_used == 0.0

    with pytest.raises(doekit.ValidationError):
        doekit.flag_active(ranked, relative_threshold=1.0)
    with pytest.raises(doekit.ValidationError):
        doekit.flag_active(ranked, absolute_floor=-1.0)
    with pytest.raises(doekit.ValidationError):
        doekit.flag_active(())


def test_screen(screening):
    """Test the screen function."""

    report = doekit.screen(screening)
    assert report.active == ("X", "A", "B")
    assert report.forwarded == ("X", "A", "B")
    assert report.warnings == ()
    assert report.diagnostics["orthogonal"]

    assert [e.target for e in report.interactions] == ["X:B", "A:B", "X:A"]
    assert_allclose(report.interactions[0].mean_difference, 10.0167,
                    atol=1e-4)

    assert [e.target for e in report.conditional] == ["X|B=-1", "X|B=+1"]
    assert_allclose(
        [e.mean_difference for e in report.conditional], (6.30, 26.3333),
        atol=1e-4
    )

    content = json.loads(report.to_json())
    assert content["active"] == ["X", "A", "B"]
    assert content["effects"][0]["target"] == "X"
    assert content["response"] == "Resp"

    summary = report.summary()
    assert "active: X, A, B" in summary
    lines = summary.splitlines()
    flagged = [line.split()[0] for line in lines if line.endswith("*")]
    assert flagged == ["X", "A", "B"]


def test_screen_warnings():
    """Test the warnings raised by the screen function."""

    design = doekit.pb12_design(6)
    model = doekit.SimModel(
        0.0, {name: 1.0 for name in design.names}
    )
    data = doekit.simulate_response(design, model)
    report = doekit.screen(data)
    assert len(report.active) == 6
    assert len(report.forwarded) == 4
    assert len(report.warnings) == 1
    assert "projection" in report.warnings[0]

    report = doekit.screen(data, max_forwarded=6)
    assert len(report.forwarded) == 6
    assert len(report.interactions) == 15
    assert report.warnings == ()

    report = doekit.screen(datasets.screening_results(), max_forwarded=2)
    assert report.forwarded == ("X", "A")
    assert [e.target for e in report.interactions] == ["X:A"]
    assert len(report.warnings) == 1
    assert "more than 2 active factors" in report.warnings[0]

    a, b = doekit.FactorSpec("A"), doekit.FactorSpec("B")
    runs = (
        doekit.Run(1, (-1, -1)),
        doekit.Run(2, (1, 1)),
        doekit.Run(3, (1, -1)),
        doekit.Run(4, (1, 1)),
        doekit.Run(5, (-1, 1)),
    )
    data = doekit.ExperimentData(
        doekit.DesignMatrix((a, b), runs), (1.0, 5.0, 3.0, 5.0, 2.0)
    )
    report = doekit.screen(data)
    assert "the design is not orthogonal" in report.warnings


def test_screen_aliased():
    """Test the screening of aliased factors."""

    a, b = doekit.FactorSpec("A"), doekit.FactorSpec("B")
    runs = (
        doekit.Run(1, (-1, -1)),
        doekit.Run(2, (1, 1)),
        doekit.Run(3, (-1, -1)),
        doekit.Run(4, (1, 1)),
    )
    data = doekit.ExperimentData(
        doekit.DesignMatrix((a, b), runs), (1.0, 8.9, 1.2, 9.1)
    )
    report = doekit.screen(data)
    assert report.active == ("A", "B")
    assert_allclose([e.mean_difference for e in report.effects], (7.9, 7.9))
    assert report.interactions == ()
    assert report.conditional == ()
    skipped = [w for w in report.warnings if "A:B" in w]
    assert len(skipped) == 1
    assert "the design is not orthogonal" in report.warnings
    assert "warning: skipped" in report.summary()


def test_main_effects_panels(screening):
    """Test the main_effects_panels function."""

    panels = doekit.main_effects_panels(screening)
    assert len(panels) == 6
    assert [p.factor for p in panels.panels] == list("XABCDE")
    assert panels.response_name == "Resp"

    x = panels["X"]
    assert len(x.points) == 12
    assert x.points[0] == (1, -1, 91.5)
    assert_allclose(x.means[1] - x.means[-1], 16.3167, atol=1e-4)
    assert x.labels == {-1: "L", 1: "H"}

    with pytest.raises(KeyError):
        panels["Z"]


def test_structured_plot_layout(screening):
    """Test the structured_plot_layout function."""

    layout = doekit.structured_plot_layout(screening, "X", ("A", "B"))
    assert layout.focal == "X"
    assert layout.conditioners == ("A", "B")
    assert [c.key for c in layout.cells] == \
        [(-1, -1), (1, -1), (-1, 1), (1, 1)]
    assert sum(len(c.points) for c in layout.cells) == 12

    cell = layout.cell(-1, 1)
    assert [p[0] for p in cell.points] == [2, 3, 9]
    assert cell.values == (85.8, 91.7, 114.8)
    assert [p[1] for p in cell.points] == [-1, -1, 1]

    with pytest.raises(doekit.ValidationError):
        doekit.structured_plot_layout(screening, "X", ("A",))
    with pytest.raises(doekit.ValidationError):
        doekit.structured_plot_layout(screening, "X", ("X", "B"))
    with pytest.raises(doekit.ValidationError):
        doekit.structured_plot_layout(screening, "X", ("A", "Z"))


def test_default_structured_factors(screening):
    """Test the default_structured_factors function."""

    report = doekit.screen(screening)
    assert doekit.default_structured_factors(report) == ("X", ("A", "B"))


effect_values = st.lists(st.integers(-1000, 1000), min_size=1, max_size=11)


@given(
    values=effect_values,
    scale=st.sampled_from((0.25, 0.5, 2.0, 8.0, -1.0, -4.0)),
)
@settings(max_examples=50, deadline=None)
def test_flag_active_scale(values, scale):
    """Test that active factors do not depend on the response scale."""

    ranked = [estimate(f"F{i}", v / 8) for i, v in enumerate(values)]
    scaled = [estimate(e.target, scale * e.mean_difference) for e in ranked]
    assert doekit.flag_active(scaled).names == \
        doekit.flag_active(ranked).names


@given(
    values=effect_values,
    thresholds=st.lists(
        st.floats(0.01, 0.99), min_size=2, max_size=2, unique=True
    ),
)
@settings(max_examples=50, deadline=None)
def test_flag_active_monotonic(values, thresholds):
    """Test that raising the threshold never adds active factors."""

    ranked = [estimate(f"F{i}", float(v)) for i, v in enumerate(values)]
    low, high = sorted(thresholds)
    loose = doekit.flag_active(ranked, low)
    strict = doekit.flag_active(ranked, high)
    assert set(strict.names) <= set(loose.names)
    assert strict.threshold_used >= loose.threshold_used
