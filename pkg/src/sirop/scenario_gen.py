"""Seeded scenario construction.

A :class:`ScenarioRecipe` describes a family of instances (parameter ranges,
initial-condition specs, topology) and a 64-bit seed picks one. Draws come
from :class:`sirop.prng.Xoshiro256` in a fixed order:

1. transmission topology chords (``RingPlusChords``),
2. one ``beta_ij`` per edge, in topology order (ring first, then chords),
   unless the edge list carries explicit weights,
3. ``gamma_i`` for ``i = 0..n-1``,
4. opinion topology chords, if it is its own ``RingPlusChords``,
5. ``x0``, then ``s0``, then ``o0`` (only the ones given as intervals).

Same recipe and seed therefore give bit-identical scenarios everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .graph import (
    build_opinion_network,
    build_recovery,
    build_transmission,
    ring_plus_chords,
    unit_opinion_network,
)
from .model import IntegrationSettings, Scenario, SystemState
from .prng import Xoshiro256


class RecipeError(ValueError):
    pass


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    def __post_init__(self):
        if not self.low < self.high:
            raise RecipeError(f"degenerate interval [{self.low}, {self.high}]")


@dataclass(frozen=True)
class RingPlusChords:
    chords: int


@dataclass(frozen=True)
class ExplicitEdges:
    """Edge list of ``(i, j)`` or ``(i, j, weight)`` matrix positions."""

    edges: tuple


COMPLEMENT = "complement"
CLONE_UNIT = "clone_epidemic_unit_weights"

StateSpec = Union[float, Uniform, Sequence[float], str]


@dataclass(frozen=True)
class ScenarioRecipe:
    n: int
    seed: int
    beta_min: float
    gamma_min: float
    beta_range: Uniform
    gamma_range: Uniform
    x0: StateSpec
    s0: StateSpec
    o0: StateSpec
    topology: RingPlusChords | ExplicitEdges
    opinion_topology: RingPlusChords | ExplicitEdges | str = CLONE_UNIT
    integration: IntegrationSettings = field(default_factory=IntegrationSettings)

    def validate(self):
        if self.n < 2:
            raise RecipeError(f"n must be at least 2, got {self.n}")
        if not 0 <= self.seed < 2**64:
            raise RecipeError("seed must be an unsigned 64-bit integer")
        if not (self.beta_min > 0 and self.gamma_min > 0):
            raise RecipeError("beta_min and gamma_min must be positive")
        if self.beta_range.low < self.beta_min:
            raise RecipeError("beta_range lies below beta_min")
        if self.gamma_range.low < self.gamma_min:
            raise RecipeError("gamma_range lies below gamma_min")
        for name in ("x0", "o0", "s0"):
            value = getattr(self, name)
            if isinstance(value, str):
                if not (name == "s0" and value == COMPLEMENT):
                    raise RecipeError(f"{name}: unknown value {value!r}")
            elif isinstance(value, Uniform):
                if value.low < 0 or value.high > 1:
                    raise RecipeError(f"{name}: interval must lie within [0, 1]")
            elif np.ndim(value) == 0:
                if not 0 <= float(value) <= 1:
                    raise RecipeError(f"{name}: constant must lie within [0, 1]")
            elif len(value) != self.n:
                raise RecipeError(f"{name}: explicit vector must have length {self.n}")

    def with_seed(self, seed: int) -> "ScenarioRecipe":
        return replace(self, seed=seed)


def _state_vector(value, n, rng):
    if isinstance(value, Uniform):
        return np.array([rng.uniform(value.low, value.high) for _ in range(n)])
    if np.ndim(value) == 0:
        return np.full(n, float(value))
    return np.array(value, dtype=float)


def _topology_pairs(topo, n, rng):
    if isinstance(topo, RingPlusChords):
        return [(i, j, None) for i, j in ring_plus_chords(n, topo.chords, rng)]
    if isinstance(topo, ExplicitEdges):
        return [(e[0], e[1], e[2] if len(e) > 2 else None) for e in topo.edges]
    raise RecipeError(f"unknown topology {topo!r}")


def generate(recipe: ScenarioRecipe) -> Scenario:
    recipe.validate()
    n = recipe.n
    rng = Xoshiro256(recipe.seed)

    pairs = _topology_pairs(recipe.topology, n, rng)
    br = recipe.beta_range
    edges = [(i, j, rng.uniform(br.low, br.high) if w is None else w) for i, j, w in pairs]
    tm = build_transmission(n, edges, recipe.beta_min)
    gr = recipe.gamma_range
    rr = build_recovery([rng.uniform(gr.low, gr.high) for _ in range(n)], recipe.gamma_min)

    if recipe.opinion_topology == CLONE_UNIT:
        on = unit_opinion_network(tm)
    else:
        opairs = _topology_pairs(recipe.opinion_topology, n, rng)
        on = build_opinion_network(n, [(i, j, 1.0 if w is None else w) for i, j, w in opairs])

    x0 = _state_vector(recipe.x0, n, rng)
    s0 = 1.0 - x0 if recipe.s0 == COMPLEMENT else _state_vector(recipe.s0, n, rng)
    o0 = _state_vector(recipe.o0, n, rng)
    r0 = 1.0 - s0 - x0
    if (r0 < -1e-12).any():
        i = int(np.argmin(r0))
        raise RecipeError(f"infeasible initial state: s0[{i}] + x0[{i}] = {s0[i] + x0[i]:.6g} > 1")
    # 1 - 0.99 - 0.01 is 8.7e-18, not 0
    r0[np.abs(r0) < 1e-12] = 0.0
    initial = SystemState(0.0, s0, x0, r0, o0)
    initial.validate()
    return Scenario(tm, rr, on, initial, recipe.integration)


def _preset_base(**kw):
    base = dict(n=10, topology=RingPlusChords(10), opinion_topology=CLONE_UNIT)
    # chords beyond the free positions saturate, so 80 on 10 nodes is the complete digraph
    base.update(kw)
    return ScenarioRecipe(**base)


PRESETS = {
    "fig2": lambda: _preset_base(
        seed=42,
        beta_min=0.2,
        gamma_min=0.07,
        beta_range=Uniform(0.2, 1.0),
        gamma_range=Uniform(0.07, 0.1),
        x0=0.01,
        s0=0.99,
        o0=0.0,
        integration=IntegrationSettings(t_end=400.0),
    ),
    "fig3_consensus": lambda: _preset_base(
        seed=202,
        topology=RingPlusChords(80),
        beta_min=0.1,
        gamma_min=0.14,
        beta_range=Uniform(0.1, 0.6),
        gamma_range=Uniform(0.14, 0.30),
        x0=Uniform(0.0, 1.0),
        s0=COMPLEMENT,
        o0=Uniform(0.0, 1.0),
        integration=IntegrationSettings(t_end=300.0),
    ),
    "fig3_ones": lambda: _preset_base(
        seed=202,
        topology=RingPlusChords(80),
        beta_min=0.1,
        gamma_min=0.14,
        beta_range=Uniform(0.1, 0.6),
        gamma_range=Uniform(0.14, 0.30),
        x0=Uniform(0.0, 1.0),
        s0=COMPLEMENT,
        o0=1.0,
        integration=IntegrationSettings(t_end=300.0),
    ),
    "fig4_rebound": lambda: _preset_base(
        seed=42,
        beta_min=0.01,
        gamma_min=0.05,
        beta_range=Uniform(0.01, 0.4),
        gamma_range=Uniform(0.05, 0.1),
        x0=Uniform(0.3, 0.6),
        s0=COMPLEMENT,
        o0=1.0,
        integration=IntegrationSettings(t_end=500.0),
    ),
}


def preset(name: str) -> ScenarioRecipe:
    try:
        return PRESETS[name]()
    except KeyError:
        raise RecipeError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
