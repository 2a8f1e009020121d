"""YAML scenario documents.

A document has exactly one scenario source plus optional sections::

    preset: fig2              # named preset; a `recipe:` mapping may override its fields
    recipe: {...}             # seeded recipe (see ScenarioRecipe)
    explicit: {...}           # explicit matrices and initial state
    integration: {dt: 0.01, t_end: 200, record_stride: 10, clamp_tolerance: 1.0e-9}
    analysis: {peak_window: 5, consensus_tol: 1.0e-6}

See ``docs/config.md`` for every key and its default. Node indices are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from .analysis import CONSENSUS_TOL, PEAK_WINDOW
from .graph import (
    GraphError,
    build_opinion_network,
    build_recovery,
    build_transmission,
    unit_opinion_network,
)
from .model import IntegrationSettings, Scenario, StateError, SystemState
from .scenario_gen import (
    CLONE_UNIT,
    COMPLEMENT,
    PRESETS,
    ExplicitEdges,
    RecipeError,
    RingPlusChords,
    ScenarioRecipe,
    Uniform,
    generate,
    preset,
)


class ConfigError(ValueError):
    """The document cannot be parsed into a scenario description."""


class ValidationError(ValueError):
    """The document parsed but describes an invalid scenario."""


TOP_KEYS = {"preset", "recipe", "explicit", "integration", "analysis"}
RECIPE_KEYS = {f.name for f in fields(ScenarioRecipe)} - {"integration"}
EXPLICIT_KEYS = {"beta_min", "gamma_min", "transmission", "gamma", "opinion", "initial"}
INTEGRATION_KEYS = {"dt", "t_end", "record_stride", "clamp_tolerance", "early_stop", "x_floor"}
ANALYSIS_KEYS = {"peak_window", "consensus_tol"}


@dataclass(frozen=True)
class AnalysisSettings:
    peak_window: int = PEAK_WINDOW
    consensus_tol: float = CONSENSUS_TOL


@dataclass(frozen=True)
class Overrides:
    dt: float | None = None
    t_end: float | None = None
    seed: int | None = None


@dataclass(frozen=True)
class ConfigDocument:
    recipe: ScenarioRecipe | None = None
    explicit: dict | None = None
    integration: dict = field(default_factory=dict)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    name: str = "scenario"


def _float(v, where):
    if isinstance(v, bool):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {v!r}") from None


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    try:
        return int(v)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {v!r}") from None


def _mapping(v, where, allowed):
    if not isinstance(v, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(v).__name__}")
    unknown = set(v) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; allowed {sorted(allowed)}")
    return v


def _interval(v, where):
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ConfigError(f"{where}: expected [low, high]")
    lo, hi = _float(v[0], where), _float(v[1], where)
    try:
        return Uniform(lo, hi)
    except RecipeError as e:
        raise ValidationError(f"{where}: {e}") from None


def _state_value(v, where):
    if isinstance(v, str):
        if v == COMPLEMENT:
            return v
        raise ConfigError(f"{where}: unknown initial-state value {v!r}")
    if isinstance(v, dict):
        _mapping(v, where, {"uniform"})
        return _interval(v["uniform"], f"{where}.uniform")
    if isinstance(v, (list, tuple)):
        return tuple(_float(e, where) for e in v)
    return _float(v, where)


def _edges(v, where, weighted):
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"{where}: expected a list of edges")
    out = []
    for e in v:
        if not isinstance(e, (list, tuple)) or len(e) not in ((3,) if weighted else (2, 3)):
            raise ConfigError(f"{where}: bad edge {e!r}; expected [i, j{', w' if weighted else '(, w)'}]")
        item = (_int(e[0], where), _int(e[1], where))
        if len(e) == 3:
            item += (_float(e[2], where),)
        out.append(item)
    return tuple(out)


def _topology(v, where):
    if v == CLONE_UNIT:
        return v
    if isinstance(v, dict) and len(v) == 1:
        (kind, arg), = v.items()
        if kind == "ring_plus_chords":
            return RingPlusChords(_int(arg, where))
        if kind == "explicit":
            return ExplicitEdges(_edges(arg, where, weighted=False))
    raise ConfigError(f"{where}: expected {{ring_plus_chords: k}} or {{explicit: [[i, j], ...]}}")


def _recipe_fields(v):
    _mapping(v, "recipe", RECIPE_KEYS)
    out = {}
    for key, val in v.items():
        where = f"recipe.{key}"
        if key in ("n", "seed"):
            out[key] = _int(val, where)
        elif key in ("beta_min", "gamma_min"):
            out[key] = _float(val, where)
        elif key in ("beta_range", "gamma_range"):
            out[key] = _interval(val, where)
        elif key in ("x0", "s0", "o0"):
            out[key] = _state_value(val, where)
        elif key == "topology":
            t = _topology(val, where)
            if t == CLONE_UNIT:
                raise ConfigError(f"{where}: {CLONE_UNIT} is only valid for opinion_topology")
            out[key] = t
        elif key == "opinion_topology":
            out[key] = _topology(val, where)
    return out


def parse_document(data, name: str = "scenario") -> ConfigDocument:
    """Turn a loaded YAML mapping into a :class:`ConfigDocument`."""
    _mapping(data, "document", TOP_KEYS)
    sources = [k for k in ("preset", "explicit") if k in data]
    if "recipe" in data and "preset" not in data:
        sources.append("recipe")
    if len(sources) != 1:
        raise ConfigError("document needs exactly one of: preset (optionally with recipe overrides), recipe, explicit")
    integration = {}
    if "integration" in data:
        raw = _mapping(data["integration"], "integration", INTEGRATION_KEYS)
        for k, val in raw.items():
            where = f"integration.{k}"
            if k == "record_stride":
                integration[k] = _int(val, where)
            elif k == "early_stop":
                if not isinstance(val, bool):
                    raise ConfigError(f"{where}: expected true/false")
                integration[k] = val
            else:
                integration[k] = _float(val, where)
    analysis = AnalysisSettings()
    if "analysis" in data:
        raw = _mapping(data["analysis"], "analysis", ANALYSIS_KEYS)
        analysis = AnalysisSettings(
            peak_window=_int(raw.get("peak_window", PEAK_WINDOW), "analysis.peak_window"),
            consensus_tol=_float(raw.get("consensus_tol", CONSENSUS_TOL), "analysis.consensus_tol"),
        )

    recipe = explicit = None
    if "preset" in data:
        if not isinstance(data["preset"], str):
            raise ConfigError("preset: expected a preset name")
        if data["preset"] not in PRESETS:
            raise ConfigError(f"preset: unknown preset {data['preset']!r}; choose from {sorted(PRESETS)}")
        recipe = preset(data["preset"])
        if "recipe" in data:
            recipe = replace(recipe, **_recipe_fields(data["recipe"]))
    elif "recipe" in data:
        flds = _recipe_fields(data["recipe"])
        required = RECIPE_KEYS - {"opinion_topology"}
        missing = required - set(flds)
        if missing:
            raise ConfigError(f"recipe: missing keys {sorted(missing)}")
        recipe = ScenarioRecipe(**flds)
    else:
        explicit = _explicit_fields(data["explicit"])
    return ConfigDocument(recipe, explicit, integration, analysis, name)


def _explicit_fields(v):
    _mapping(v, "explicit", EXPLICIT_KEYS)
    for key in ("beta_min", "gamma_min", "transmission", "gamma", "initial"):
        if key not in v:
            raise ConfigError(f"explicit: missing key {key!r}")
    init = _mapping(v["initial"], "explicit.initial", {"s", "x", "r", "o"})
    for key in ("s", "x", "o"):
        if key not in init:
            raise ConfigError(f"explicit.initial: missing key {key!r}")
    vec = lambda val, where: [_float(e, where) for e in (val if isinstance(val, (list, tuple)) else [val])]
    out = {
        "beta_min": _float(v["beta_min"], "explicit.beta_min"),
        "gamma_min": _float(v["gamma_min"], "explicit.gamma_min"),
        "transmission": _edges(v["transmission"], "explicit.transmission", weighted=True),
        "gamma": vec(v["gamma"], "explicit.gamma"),
        "opinion": _edges(v["opinion"], "explicit.opinion", weighted=True) if "opinion" in v else None,
        "initial": {k: vec(val, f"explicit.initial.{k}") for k, val in init.items()},
    }
    return out


def load_document(path) -> ConfigDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: YAML syntax error: {e}") from None
    return parse_document(data, name=path.stem)


def preset_document(name: str) -> ConfigDocument:
    return parse_document({"preset": name}, name=name)


def _settings(doc: ConfigDocument, overrides: Overrides, base: IntegrationSettings) -> IntegrationSettings:
    d = dict(base.__dict__)
    d.update(doc.integration)
    if overrides.dt is not None:
        d["dt"] = overrides.dt
    if overrides.t_end is not None:
        d["t_end"] = overrides.t_end
    try:
        return IntegrationSettings(**d)
    except ValueError as e:
        raise ValidationError(f"integration: {e}") from None


def _explicit_n(ex):
    return len(ex["gamma"])


def explicit_checks(ex) -> list[tuple[str, str | None]]:
    """Run every structural check on an explicit ex; ``(name, error or None)`` each."""
    n = _explicit_n(ex)
    checks = []

    def run(name, fn):
        try:
            fn()
            checks.append((name, None))
        except (GraphError, StateError, ValueError) as e:
            checks.append((name, str(e)))

    run("transmission network", lambda: build_transmission(n, ex["transmission"], ex["beta_min"]))
    run("recovery rates", lambda: build_recovery(ex["gamma"], ex["gamma_min"]))
    if ex["opinion"] is not None:
        run("opinion network", lambda: build_opinion_network(n, ex["opinion"]))
    run("initial state", lambda: _explicit_state(ex, n).validate())
    return checks


def _explicit_state(ex, n):
    init = ex["initial"]
    vals = {}
    for k in ("s", "x", "o"):
        v = init[k]
        vals[k] = np.full(n, v[0]) if len(v) == 1 else np.array(v)
        if vals[k].shape != (n,):
            raise StateError(f"initial.{k} has length {len(v)}, expected {n}")
    if "r" in init:
        r = init["r"]
        vals["r"] = np.full(n, r[0]) if len(r) == 1 else np.array(r)
        if vals["r"].shape != (n,):
            raise StateError(f"initial.r has length {len(r)}, expected {n}")
    else:
        vals["r"] = 1.0 - vals["s"] - vals["x"]
    return SystemState(0.0, vals["s"], vals["x"], vals["r"], vals["o"])


def build_scenario(doc: ConfigDocument, overrides: Overrides = Overrides()) -> Scenario:
    """Materialize the scenario; raises :class:`ValidationError` on invalid content."""
    if doc.recipe is not None:
        recipe = doc.recipe
        if overrides.seed is not None:
            recipe = recipe.with_seed(overrides.seed)
        recipe = replace(recipe, integration=_settings(doc, overrides, recipe.integration))
        try:
            return generate(recipe)
        except (RecipeError, GraphError, StateError) as e:
            raise ValidationError(str(e)) from None
    ex = doc.explicit
    if overrides.seed is not None:
        raise ValidationError("--seed applies to recipes and presets, not explicit scenarios")
    failed = [(name, err) for name, err in explicit_checks(ex) if err]
    if failed:
        raise ValidationError("; ".join(f"{name}: {err}" for name, err in failed))
    n = _explicit_n(ex)
    tm = build_transmission(n, ex["transmission"], ex["beta_min"])
    rr = build_recovery(ex["gamma"], ex["gamma_min"])
    on = unit_opinion_network(tm) if ex["opinion"] is None else build_opinion_network(n, ex["opinion"])
    return Scenario(tm, rr, on, _explicit_state(ex, n), _settings(doc, overrides, IntegrationSettings()))
