import textwrap

import numpy as np
import pytest

from sirop.config import (
    ConfigError,
    Overrides,
    ValidationError,
    build_scenario,
    explicit_checks,
    load_document,
    parse_document,
    preset_document,
)
from sirop.scenario_gen import RingPlusChords, Uniform

RECIPE = dict(
    n=4, seed=3, beta_min=0.1, gamma_min=0.1, beta_range=[0.1, 0.5], gamma_range=[0.1, 0.2],
    x0={"uniform": [0.0, 0.3]}, s0="complement", o0=0.0, topology={"ring_plus_chords": 2},
)
EXPLICIT = dict(
    beta_min=0.2, gamma_min=0.07, transmission=[[0, 1, 0.5], [1, 0, 0.5]], gamma=[0.1, 0.1],
    initial={"s": 0.99, "x": 0.01, "o": 0.0},
)


def test_recipe_document():
    doc = parse_document({"recipe": RECIPE, "integration": {"dt": 0.02, "t_end": "50"}})
    assert doc.recipe.topology == RingPlusChords(2) and doc.recipe.x0 == Uniform(0.0, 0.3)
    sc = build_scenario(doc)
    assert sc.n == 4 and sc.integration.dt == 0.02 and sc.integration.t_end == 50.0


def test_preset_with_overrides():
    doc = parse_document({"preset": "fig2", "recipe": {"seed": 5}, "integration": {"record_stride": 5}})
    assert doc.recipe.seed == 5 and doc.recipe.beta_min == 0.2
    sc = build_scenario(doc, Overrides(t_end=10.0, seed=6))
    assert sc.integration.t_end == 10.0 and sc.integration.record_stride == 5
    base = build_scenario(preset_document("fig2"), Overrides(seed=6))
    np.testing.assert_array_equal(sc.transmission.entries, base.transmission.entries)


def test_preset_seed_override_is_identity_at_pinned_seed():
    a = build_scenario(preset_document("fig2"))
    b = build_scenario(preset_document("fig2"), Overrides(seed=42))
    np.testing.assert_array_equal(a.transmission.entries, b.transmission.entries)


def test_explicit_document():
    sc = build_scenario(parse_document({"explicit": EXPLICIT}))
    np.testing.assert_array_equal(sc.transmission.entries, [[0, 0.5], [0.5, 0]])
    np.testing.assert_array_equal(sc.opinion_net.adjacency, [[0, 1], [1, 0]])
    assert sc.integration.t_end == 200.0


def test_yaml_file(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text(textwrap.dedent("""
        explicit:
          beta_min: 0.2
          gamma_min: 0.07
          transmission: [[0, 1, 0.5], [1, 0, 0.5]]
          gamma: [0.1, 0.1]
          initial: {s: [0.99, 0.98], x: [0.01, 0.02], o: 0.0}
        integration: {clamp_tolerance: 1e-9}
        analysis: {peak_window: 3}
    """))
    doc = load_document(p)
    assert doc.name == "run" and doc.analysis.peak_window == 3
    assert build_scenario(doc).integration.clamp_tolerance == 1e-9


@pytest.mark.parametrize(
    "data",
    [
        [],
        {},
        {"preset": "fig2", "explicit": EXPLICIT},
        {"preset": "nope"},
        {"preset": 3},
        {"recipe": {**RECIPE, "colour": 1}},
        {"recipe": {k: v for k, v in RECIPE.items() if k != "n"}},
        {"recipe": {**RECIPE, "n": "many"}},
        {"recipe": {**RECIPE, "beta_min": True}},
        {"recipe": {**RECIPE, "topology": {"star": 3}}},
        {"recipe": {**RECIPE, "topology": "clone_epidemic_unit_weights"}},
        {"recipe": {**RECIPE, "x0": "lots"}},
        {"explicit": {**EXPLICIT, "transmission": [[0, 1]]}},
        {"explicit": {k: v for k, v in EXPLICIT.items() if k != "gamma"}},
        {"explicit": EXPLICIT, "integration": {"early_stop": "yes"}},
        {"explicit": EXPLICIT, "integration": {"speed": 2}},
    ],
)
def test_parse_errors(data):
    with pytest.raises(ConfigError):
        parse_document(data)


def test_yaml_syntax_error(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("preset: [fig2\n")
    with pytest.raises(ConfigError, match="YAML"):
        load_document(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_document(tmp_path / "none.yaml")


@pytest.mark.parametrize(
    "data, overrides",
    [
        ({"explicit": {**EXPLICIT, "transmission": [[0, 1, 0.5]]}}, Overrides()),
        ({"explicit": {**EXPLICIT, "gamma": [0.01, 0.1]}}, Overrides()),
        ({"explicit": {**EXPLICIT, "initial": {"s": 0.99, "x": 0.5, "o": 0}}}, Overrides()),
        ({"explicit": EXPLICIT}, Overrides(seed=1)),
        ({"explicit": EXPLICIT}, Overrides(dt=-1.0)),
        ({"recipe": {**RECIPE, "x0": 0.7, "s0": 0.7}}, Overrides()),
    ],
)
def test_validation_errors(data, overrides):
    with pytest.raises(ValidationError):
        build_scenario(parse_document(data), overrides)


def test_degenerate_interval_is_validation_error():
    with pytest.raises(ValidationError):
        parse_document({"recipe": {**RECIPE, "beta_range": [0.5, 0.1]}})


def test_explicit_checks_report_everything():
    spec = parse_document({"explicit": EXPLICIT}).explicit
    bad = dict(spec, transmission=((0, 1, 0.5),), gamma=[0.01, 0.1])
    checks = dict(explicit_checks(bad))
    assert "0->1" in checks["transmission network"]
    assert "gamma_min" in checks["recovery rates"]
    assert checks["initial state"] is None


def test_shipped_configs_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parent.parent / "configs"
    docs = {p.stem: load_document(p) for p in sorted(root.glob("*.yaml"))}
    assert docs
    for name, doc in docs.items():
        if name == "disconnected":
            with pytest.raises(ValidationError, match="not strongly connected"):
                build_scenario(doc)
        else:
            build_scenario(doc)
