"""Fixed-step RK4 integration with projection onto the feasible box."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernel
from .model import IntegrationSettings, Scenario, SystemState

__all__ = ["IntegrationError", "IntegrationSettings", "Trajectory", "step", "integrate"]


class IntegrationError(RuntimeError):
    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"at t={t:.6g}: {message}"
        super().__init__(message)


@dataclass(eq=False)
class Trajectory:
    """Recorded samples; state arrays have shape ``(len(times), n)``.

    ``derived`` is filled by :func:`sirop.analysis.derive` on demand.
    """

    times: np.ndarray
    s: np.ndarray
    x: np.ndarray
    r: np.ndarray
    o: np.ndarray
    dt: float
    record_stride: int
    derived: object = None

    def __len__(self):
        return self.times.shape[0]

    @property
    def n(self) -> int:
        return self.s.shape[1]

    @property
    def sample_spacing(self) -> float:
        return self.dt * self.record_stride

    def state(self, k: int) -> SystemState:
        return SystemState(self.times[k], self.s[k], self.x[k], self.r[k], self.o[k])

    def final(self) -> SystemState:
        return self.state(len(self) - 1)

    def interpolate(self, k: int, theta: float) -> SystemState:
        """Linear blend of samples ``k`` and ``k+1``."""
        a, b = k, k + 1
        lerp = lambda v: (1.0 - theta) * v[a] + theta * v[b]
        s, x, o = lerp(self.s), lerp(self.x), lerp(self.o)
        t = (1.0 - theta) * self.times[a] + theta * self.times[b]
        return SystemState(t, s, x, 1.0 - s - x, o)


_NAMES = ("s", "x", "o")


def _operators(scenario: Scenario):
    tm, rr = scenario.transmission, scenario.recovery
    b = np.ascontiguousarray(tm.entries, dtype=float)
    return (
        b,
        np.ascontiguousarray(b - tm.floor_matrix),
        float(rr.gamma_min),
        np.ascontiguousarray(rr.gamma - rr.gamma_min, dtype=float),
        np.ascontiguousarray(scenario.opinion_net.laplacian + np.eye(scenario.n)),
    )


def _advance(scenario, state, dt, n_steps, stride, early_stop=False, x_floor=0.0):
    n = scenario.n
    y = np.concatenate([state.s, state.x, state.o]).astype(float)
    r = np.array(state.r, dtype=float)
    rec = np.empty((n_steps // stride + 1, 4 * n))
    rec[0] = np.concatenate([state.s, state.x, state.r, state.o])
    written, status, k, idx, mag = _kernel.run(
        y, r, *_operators(scenario), float(dt), int(n_steps), int(stride),
        float(scenario.integration.clamp_tolerance), bool(early_stop), float(x_floor), rec,
    )
    if status != _kernel.OK:
        tol = scenario.integration.clamp_tolerance
        if status == _kernel.CLAMP_OVERFLOW:
            what = f"projection moved {_NAMES[idx // n]}[{idx % n}] by {mag:.3g}"
        else:
            what = f"recovered share r[{idx}] fell {mag:.3g} below 0"
        raise IntegrationError(
            f"{what} (> clamp_tolerance {tol:g}); step size too large for this instance",
            t=state.t + k * dt,
        )
    return rec[:written]


def step(state: SystemState, scenario: Scenario, dt: float) -> SystemState:
    """Advance one RK4 step of size ``dt`` and project onto the box.

    Projection clamps s and x to [0, 1], rebuilds r = 1 - s - x, then clamps
    o. A clamp larger than ``clamp_tolerance`` raises :class:`IntegrationError`.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = scenario.n
    out = _advance(scenario, state, dt, 1, 1)[1]
    return SystemState(state.t + dt, out[:n], out[n : 2 * n], out[2 * n : 3 * n], out[3 * n :])


def integrate(scenario: Scenario) -> Trajectory:
    """Integrate from ``scenario.initial`` to ``t_end``, recording every ``record_stride`` steps.

    Sample times are ``t0 + k * dt`` computed directly, never accumulated.
    """
    cfg = scenario.integration
    n = scenario.n
    rec = _advance(
        scenario, scenario.initial, cfg.dt, cfg.n_steps, cfg.record_stride, cfg.early_stop, cfg.x_floor
    )
    steps = np.arange(rec.shape[0]) * cfg.record_stride
    return Trajectory(
        times=scenario.initial.t + steps * cfg.dt,
        s=rec[:, :n].copy(),
        x=rec[:, n : 2 * n].copy(),
        r=rec[:, 2 * n : 3 * n].copy(),
        o=rec[:, 3 * n :].copy(),
        dt=cfg.dt,
        record_stride=cfg.record_stride,
    )
