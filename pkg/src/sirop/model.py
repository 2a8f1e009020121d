"""Opinion-modulated networked SIR dynamics.

State per community ``i``: susceptible ``s_i``, infected ``x_i``, recovered
``r_i`` and belief in the severity of the epidemic ``o_i``. A community's
belief pulls its incoming transmission rates down toward ``beta_min`` and
its recovery rate up from ``gamma_min`` toward ``gamma_i``; its belief in
turn relaxes toward its infection level ``1 - s_i`` while averaging with
its opinion neighbours.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, OpinionNetwork, RecoveryRates, TransmissionMatrix

SIMPLEX_TOL = 1e-9


class StateError(ValueError):
    """A state vector is outside the unit box or off the s + x + r = 1 simplex."""


def _vec(v):
    a = np.array(v, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SystemState:
    t: float
    s: np.ndarray
    x: np.ndarray
    r: np.ndarray
    o: np.ndarray

    def __post_init__(self):
        for name in ("s", "x", "r", "o"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        object.__setattr__(self, "t", float(self.t))
        n = self.s.shape
        if len(n) != 1 or any(getattr(self, k).shape != n for k in ("x", "r", "o")):
            raise StateError("s, x, r, o must be vectors of the same length")

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @classmethod
    def from_sxo(cls, s, x, o, t=0.0):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        return cls(t, s, x, 1.0 - s - x, o)

    def validate(self, tol: float = SIMPLEX_TOL) -> None:
        for name in ("s", "x", "r", "o"):
            v = getattr(self, name)
            if not np.all(np.isfinite(v)):
                raise StateError(f"{name} has non-finite entries")
            if (v < -tol).any() or (v > 1 + tol).any():
                i = int(np.argmax((v < -tol) | (v > 1 + tol)))
                raise StateError(f"{name}[{i}]={v[i]} is outside [0, 1]")
        gap = np.abs(self.s + self.x + self.r - 1.0)
        if (gap > tol).any():
            i = int(np.argmax(gap))
            raise StateError(f"s+x+r deviates from 1 by {gap[i]:.3g} in community {i}")

    def replace(self, **kw) -> "SystemState":
        d = dict(t=self.t, s=self.s, x=self.x, r=self.r, o=self.o)
        d.update(kw)
        return SystemState(**d)


@dataclass(frozen=True)
class IntegrationSettings:
    """Fixed-step integration controls.

    ``early_stop`` ends the run once ``max(x) < x_floor``; it is off by
    default so that every run records the full horizon.
    """

    dt: float = 0.01
    t_end: float = 200.0
    record_stride: int = 10
    clamp_tolerance: float = 1e-9
    early_stop: bool = False
    x_floor: float = 1e-10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        if not self.clamp_tolerance > 0:
            raise ValueError("clamp_tolerance must be positive")

    @property
    def n_steps(self) -> int:
        return int(np.floor(self.t_end / self.dt + 1e-9))

    @property
    def n_records(self) -> int:
        return self.n_steps // self.record_stride + 1


@dataclass(frozen=True, eq=False)
class Scenario:
    transmission: TransmissionMatrix
    recovery: RecoveryRates
    opinion_net: OpinionNetwork
    initial: SystemState
    integration: IntegrationSettings = field(default_factory=IntegrationSettings)

    def __post_init__(self):
        n = self.transmission.n
        if (self.recovery.n, self.opinion_net.n, self.initial.n) != (n, n, n):
            raise GraphError(
                "dimension mismatch: transmission n=%d, recovery n=%d, opinion n=%d, state n=%d"
                % (n, self.recovery.n, self.opinion_net.n, self.initial.n)
            )
        self.initial.validate()

    @property
    def n(self) -> int:
        return self.transmission.n

    def with_initial(self, initial: SystemState) -> "Scenario":
        return Scenario(self.transmission, self.recovery, self.opinion_net, initial, self.integration)

    def with_integration(self, **kw) -> "Scenario":
        d = self.integration.__dict__.copy()
        d.update(kw)
        return Scenario(
            self.transmission, self.recovery, self.opinion_net, self.initial, IntegrationSettings(**d)
        )


def _check_o(o, n):
    o = np.asarray(o, dtype=float)
    if o.shape != (n,):
        raise ValueError(f"opinion vector has shape {o.shape}, expected ({n},)")
    return o


def effective_transmission(o, tm: TransmissionMatrix) -> np.ndarray:
    """Rates ``beta_ij - (beta_ij - beta_min) o_i`` on the support of ``B``, 0 elsewhere."""
    o = _check_o(o, tm.n)
    b = tm.entries
    return b - o[:, None] * (b - tm.floor_matrix)


def effective_recovery(o, rr: RecoveryRates) -> np.ndarray:
    """Diagonal matrix ``gamma_min + (gamma_i - gamma_min) o_i``."""
    o = _check_o(o, rr.n)
    return np.diag(rr.gamma_min + (rr.gamma - rr.gamma_min) * o)


@dataclass(frozen=True, eq=False)
class Derivative:
    ds: np.ndarray
    dx: np.ndarray
    dr: np.ndarray
    do: np.ndarray


def derivative(state: SystemState, scenario: Scenario) -> Derivative:
    s, x, o = state.s, state.x, state.o
    b = effective_transmission(o, scenario.transmission)
    g = np.diag(effective_recovery(o, scenario.recovery))
    lap = scenario.opinion_net.laplacian
    ds = -s * (b @ x)
    dr = g * x
    dx = -ds - dr
    do = (1.0 - s) - (lap @ o + o)
    return Derivative(ds, dx, dr, do)
