"""Trajectory diagnostics: reproduction-number traces, peaks, certificates, equilibria."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .integrator import Trajectory
from .model import Scenario
from .spectral import growth_spectrum, reproduction_bounds, reproduction_spectrum

PEAK_WINDOW = 5
CONSENSUS_TOL = 1e-6
EXTINCTION_TOL = 1e-8
DECAY_SLACK = 1e-6


class AnalysisError(RuntimeError):
    pass


class NotExtinctError(AnalysisError):
    pass


@dataclass(eq=False)
class DerivedQuantities:
    """Per-sample spectral traces; ``p`` is the growth-matrix left vector at each sample."""

    r_o: np.ndarray
    r_min: np.ndarray
    r_max: np.ndarray
    sigma: np.ndarray
    p: np.ndarray
    regularized: np.ndarray


def derive(trajectory: Trajectory, scenario: Scenario) -> DerivedQuantities:
    """Compute R_o, its bounds and sigma with p at every sample, and attach them.

    Each eigen-solve is warm-started from the previous sample's vector.
    """
    m, n = len(trajectory), trajectory.n
    r_o, r_min, r_max, sigma = (np.empty(m) for _ in range(4))
    p = np.empty((m, n))
    reg = np.zeros(m, dtype=bool)
    starts = [None] * 4
    for k in range(m):
        st = trajectory.state(k)
        parts = (
            reproduction_spectrum(st, scenario, start=starts[0]),
            reproduction_spectrum(st, scenario, o=1.0, start=starts[1]),
            reproduction_spectrum(st, scenario, o=0.0, start=starts[2]),
            growth_spectrum(st, scenario, start=starts[3]),
        )
        starts = [res.left_vector for res in parts]
        r_o[k], r_min[k], r_max[k], sigma[k] = (res.value for res in parts)
        p[k] = parts[3].left_vector
        reg[k] = any(res.regularized for res in parts)
    trajectory.derived = DerivedQuantities(r_o, r_min, r_max, sigma, p, reg)
    return trajectory.derived


def _derived(trajectory, scenario):
    return trajectory.derived if trajectory.derived is not None else derive(trajectory, scenario)


class CrossingReason(str, enum.Enum):
    UPWARD_CROSSING = "upward_crossing"
    NO_LOCAL_MAX = "no_local_max"


@dataclass(frozen=True, eq=False)
class PeakEvent:
    t_p: float
    r_at_peak: float
    p_vector: np.ndarray
    weighted_peak_value: float
    sample_index: int


@dataclass(frozen=True)
class RejectedCrossing:
    t: float
    reason: CrossingReason


@dataclass(eq=False)
class PeakReport:
    peaks: list = field(default_factory=list)
    rejected_crossings: list = field(default_factory=list)


def _crossing_state(trajectory, k, r):
    theta = (r[k] - 1.0) / (r[k] - r[k + 1])
    return trajectory.interpolate(k, float(theta))


def detect_peaks(trajectory: Trajectory, scenario: Scenario, window: int = PEAK_WINDOW) -> PeakReport:
    """Peak infection times from grid crossings of R_o through 1.

    A downward crossing between samples ``k`` and ``k+1`` is located by linear
    interpolation and accepted when ``w = p(t_p)^T x`` strictly increases over
    samples ``k-window..k`` and strictly decreases over ``k+1..k+1+window``.
    Upward crossings are always rejected.
    """
    m = len(trajectory)
    if m < 2 * window + 1:
        raise AnalysisError(
            f"trajectory has {m} samples; peak detection with window {window} needs at least {2 * window + 1}"
        )
    r = _derived(trajectory, scenario).r_o
    report = PeakReport()
    for k in range(m - 1):
        up = r[k] <= 1.0 < r[k + 1]
        down = r[k] > 1.0 >= r[k + 1]
        if not (up or down):
            continue
        st = _crossing_state(trajectory, k, r)
        if up:
            report.rejected_crossings.append(RejectedCrossing(st.t, CrossingReason.UPWARD_CROSSING))
            continue
        p = growth_spectrum(st, scenario).left_vector
        lo, hi = k - window, k + 1 + window
        ok = lo >= 0 and hi < m
        if ok:
            w = trajectory.x @ p
            ok = bool((np.diff(w[lo : k + 1]) > 0).all() and (np.diff(w[k + 1 : hi + 1]) < 0).all())
        if not ok:
            report.rejected_crossings.append(RejectedCrossing(st.t, CrossingReason.NO_LOCAL_MAX))
            continue
        report.peaks.append(
            PeakEvent(
                t_p=st.t,
                r_at_peak=reproduction_spectrum(st, scenario).value,
                p_vector=p,
                weighted_peak_value=float(p @ st.x),
                sample_index=k,
            )
        )
    return report


class Outbreak(str, enum.Enum):
    DIES_OUT_NO_PEAK = "DiesOutNoPeak"
    GUARANTEED_PEAK = "GuaranteedPeak"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class OutbreakClass:
    classification: Outbreak
    r_min_0: float
    r_max_0: float


def classify_outbreak(scenario: Scenario) -> OutbreakClass:
    r_min, r_max = reproduction_bounds(scenario.initial, scenario)
    if r_max < 1.0:
        c = Outbreak.DIES_OUT_NO_PEAK
    elif r_min > 1.0:
        c = Outbreak.GUARANTEED_PEAK
    else:
        c = Outbreak.INDETERMINATE
    return OutbreakClass(c, float(r_min), float(r_max))


@dataclass(frozen=True, eq=False)
class DecayCertificate:
    """Exponential decay bound ``p^T x(t) <= p^T x(t_f) exp(sigma_max (t - t_f))``.

    ``applicable`` is False when ``sigma_max >= 0``; ``holds`` is then None.
    """

    t_f: float
    sigma_max: float
    p_max: np.ndarray
    applicable: bool
    holds: Optional[bool]
    max_violation: float


def _grid_index(trajectory, t):
    k = int(np.argmin(np.abs(trajectory.times - t)))
    if abs(trajectory.times[k] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t={t} is not a recorded sample time")
    return k


def decay_certificate(trajectory: Trajectory, scenario: Scenario, t_f: float) -> DecayCertificate:
    k = _grid_index(trajectory, t_f)
    res = growth_spectrum(trajectory.state(k), scenario, o=0.0)
    sigma_max, p = res.value, res.left_vector
    t_f = float(trajectory.times[k])
    if sigma_max >= 0.0:
        return DecayCertificate(t_f, sigma_max, p, False, None, float("nan"))
    w = trajectory.x[k:] @ p
    bound = w[0] * np.exp(sigma_max * (trajectory.times[k:] - t_f))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(bound > 0, (w - bound) / bound, np.where(w > 0, np.inf, 0.0))
    worst = float(max(0.0, rel.max()))
    return DecayCertificate(t_f, sigma_max, p, True, worst <= DECAY_SLACK, worst)


@dataclass(frozen=True, eq=False)
class GrowthCertificate:
    """Strict growth of ``p_min(0)^T x(t)`` on ``[t_0, window_end]``."""

    sigma_min_0: float
    p_min_0: np.ndarray
    window_end: float
    applicable: bool
    holds: Optional[bool]


def growth_certificate(
    trajectory: Trajectory, scenario: Scenario, peaks: PeakReport | None = None, window: int = PEAK_WINDOW
) -> GrowthCertificate:
    """Check growth up to the earlier of the first peak minus ``window`` samples and a tenth of the run."""
    st0 = trajectory.state(0)
    res = growth_spectrum(st0, scenario, o=1.0)
    r_min0 = reproduction_spectrum(st0, scenario, o=1.0).value
    t0 = trajectory.times[0]
    horizon = t0 + (trajectory.times[-1] - t0) / 10.0
    if r_min0 <= 1.0:
        return GrowthCertificate(res.value, res.left_vector, horizon, False, None)
    if peaks is None:
        peaks = detect_peaks(trajectory, scenario, window)
    t_w = horizon
    if peaks.peaks:
        t_w = min(t_w, peaks.peaks[0].t_p - window * trajectory.sample_spacing)
    idx = trajectory.times <= t_w + 1e-12
    w = trajectory.x[idx] @ res.left_vector
    if not (st0.x > 0).any():
        holds = True
    else:
        holds = bool(res.value > 0 and (np.diff(w) > 0).all())
    return GrowthCertificate(res.value, res.left_vector, float(t_w), True, holds)


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    s_e: np.ndarray
    o_e: np.ndarray
    consensus: bool
    consensus_value: Optional[float]
    opinion_residual: float
    opinion_spread: float
    infection_spread: float
    consensus_consistent: bool


def equilibrium_opinions(s_e, scenario: Scenario) -> np.ndarray:
    """Solve ``(L + I) o = 1 - s_e``."""
    lap = scenario.opinion_net.laplacian
    return np.linalg.solve(lap + np.eye(lap.shape[0]), 1.0 - np.asarray(s_e, dtype=float))


def equilibrium_report(
    trajectory: Trajectory,
    scenario: Scenario,
    consensus_tol: float = CONSENSUS_TOL,
    extinction_tol: float = EXTINCTION_TOL,
) -> EquilibriumReport:
    """Disease-free equilibrium reached by the run, and whether opinions agree there.

    ``consensus_consistent`` checks both directions of the equal-infection
    criterion: equal ``s_e`` forces equal ``o_e``, and equal ``o_e`` forces
    ``s_e`` spread below ``||L + I||_inf * consensus_tol``.
    """
    final = trajectory.final()
    if final.x.max() >= extinction_tol:
        raise NotExtinctError(
            f"epidemic not extinct at t={final.t:.6g} (max x = {final.x.max():.3g} >= {extinction_tol:g}); "
            "increase t_end"
        )
    s_e = np.array(final.s)
    o_e = equilibrium_opinions(s_e, scenario)
    lap_i = scenario.opinion_net.laplacian + np.eye(scenario.n)
    spread_o = float(np.ptp(o_e))
    spread_s = float(np.ptp(s_e))
    consensus = spread_o <= consensus_tol
    cond = float(np.abs(lap_i).sum(axis=1).max())
    consistent = (spread_s > consensus_tol or consensus) and (not consensus or spread_s <= cond * consensus_tol)
    return EquilibriumReport(
        s_e=s_e,
        o_e=o_e,
        consensus=consensus,
        consensus_value=float(o_e.mean()) if consensus else None,
        opinion_residual=float(np.abs(final.o - o_e).max()),
        opinion_spread=spread_o,
        infection_spread=spread_s,
        consensus_consistent=bool(consistent),
    )
