"""Perron eigenpairs of nonnegative and Metzler matrices.

Everything here rests on one routine: power iteration, accelerated by
repeated squaring, on the transpose of a nonnegative irreducible matrix with
a positive diagonal (hence primitive), converging on the left residual ``||p^T A - lambda p^T||_inf``. Spectral
radii and abscissae are obtained from it by diagonal shifts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Scenario, SystemState, effective_recovery, effective_transmission

RESIDUAL_TOL = 1e-12
MAX_ITER = 100_000
REGULARIZATION = 1e-13


class SpectralConvergenceError(ArithmeticError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"power iteration did not converge in {iterations} iterations (last residual {residual:.3g})"
        )


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Dominant eigenvalue with its positive left eigenvector (entries sum to 1).

    ``regularized`` marks results computed on ``M + eps * support`` because
    ``M`` itself was reducible (some ``s_i = 0``).
    """

    value: float
    left_vector: np.ndarray
    iterations: int
    residual: float
    regularized: bool = False


def _perron_left(a, tol, max_iter, start=None):
    """Left Perron pair of a primitive nonnegative matrix ``a``.

    Power iteration accelerated by repeated squaring: pass ``k`` applies
    ``a^(2^(k-1))`` to the iterate, so clustered spectra (ratio close to 1)
    still converge in a few dozen passes. The residual and the eigenvalue
    are always measured against ``a`` itself.
    """
    n = a.shape[0]
    p = np.full(n, 1.0 / n) if start is None else np.array(start, dtype=float)
    if p.shape != (n,) or not (p > 0).all():
        p = np.full(n, 1.0 / n)
    p = p / p.sum()
    power = a / a.max()
    residual = np.inf
    for it in range(1, max_iter + 1):
        q = p @ a
        lam = q.sum()
        if lam <= 0.0:
            # only the zero matrix annihilates a positive vector here
            return 0.0, p, it, 0.0
        residual = float(np.abs(q - lam * p).max())
        if residual <= tol * max(1.0, abs(lam)):
            return float(lam), p, it, residual
        p = p @ power
        p = p / p.sum()
        power = power @ power
        power = power / power.max()
    raise SpectralConvergenceError(max_iter, residual)


def _polish(m, value, p):
    """Residual of the final pair against the unshifted matrix."""
    return float(np.abs(m.T @ p - value * p).max())


def spectral_radius(m, tol: float = RESIDUAL_TOL, max_iter: int = MAX_ITER, start=None) -> SpectralResult:
    """Perron root ``rho(M)`` of an irreducible nonnegative matrix.

    Iterates on ``M + alpha I`` with ``alpha`` half the largest row sum so
    periodic matrices (e.g. a directed ring) still converge.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if (m < 0).any():
        raise ValueError("matrix must be nonnegative")
    alpha = 0.5 * m.sum(axis=1).max()
    if alpha == 0.0:
        n = m.shape[0]
        return SpectralResult(0.0, np.full(n, 1.0 / n), 0, 0.0)
    lam, p, it, _ = _perron_left(m + alpha * np.eye(m.shape[0]), tol, max_iter, start)
    value = float(lam - alpha)
    return SpectralResult(value, p, it, _polish(m, value, p))


def spectral_abscissa_metzler(m, tol: float = RESIDUAL_TOL, max_iter: int = MAX_ITER, start=None) -> SpectralResult:
    """``sigma(M)`` of an irreducible Metzler matrix via the shift ``c = max|M_ii| + 1``."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    off = m - np.diag(np.diag(m))
    if (off < 0).any():
        raise ValueError("matrix must have nonnegative off-diagonal entries")
    c = np.abs(np.diag(m)).max() + 1.0
    lam, p, it, _ = _perron_left(m + c * np.eye(m.shape[0]), tol, max_iter, start)
    value = float(lam - c)
    return SpectralResult(value, p, it, _polish(m, value, p))


def _pieces(state: SystemState, scenario: Scenario, o):
    o = state.o if o is None else np.broadcast_to(np.asarray(o, dtype=float), state.o.shape)
    b = effective_transmission(o, scenario.transmission)
    g = np.diag(effective_recovery(o, scenario.recovery))
    sb = state.s[:, None] * b
    degenerate = bool((state.s <= 0.0).any())
    return sb, g, degenerate


def reproduction_spectrum(state: SystemState, scenario: Scenario, o=None, start=None) -> SpectralResult:
    """Perron pair of ``G(o)^-1 diag(s) B(o)``; ``o`` defaults to ``state.o``."""
    sb, g, degenerate = _pieces(state, scenario, o)
    mat = sb / g[:, None]
    if degenerate:
        mat = mat + REGULARIZATION * scenario.transmission.support
    res = spectral_radius(mat, start=start)
    if degenerate:
        res = SpectralResult(res.value, res.left_vector, res.iterations, res.residual, True)
    return res


def effective_reproduction_number(state: SystemState, scenario: Scenario) -> float:
    return reproduction_spectrum(state, scenario).value


def reproduction_bounds(state: SystemState, scenario: Scenario) -> tuple[float, float]:
    """``(R_min, R_max)``: the reproduction number at full and at zero belief, same ``s``."""
    r_min = reproduction_spectrum(state, scenario, o=1.0).value
    r_max = reproduction_spectrum(state, scenario, o=0.0).value
    return r_min, r_max


def growth_spectrum(state: SystemState, scenario: Scenario, o=None, start=None) -> SpectralResult:
    """Abscissa and left vector of ``diag(s) B(o) - G(o)``; ``o`` defaults to ``state.o``."""
    sb, g, degenerate = _pieces(state, scenario, o)
    mat = sb - np.diag(g)
    if degenerate:
        mat = mat + REGULARIZATION * scenario.transmission.support
    res = spectral_abscissa_metzler(mat, start=start)
    if degenerate:
        res = SpectralResult(res.value, res.left_vector, res.iterations, res.residual, True)
    return res


def sigma_and_p(state: SystemState, scenario: Scenario) -> SpectralResult:
    return growth_spectrum(state, scenario)
