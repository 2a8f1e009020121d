import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import two_node
from oracle import dominant_real, eigen_closed_form, max_modulus
from sirop.model import SystemState
from sirop.spectral import (
    SpectralConvergenceError,
    effective_reproduction_number,
    growth_spectrum,
    reproduction_bounds,
    reproduction_spectrum,
    spectral_abscissa_metzler,
    spectral_radius,
)


def test_closed_form_small_cases():
    assert sorted(r.real for r in eigen_closed_form([[0, 3.0], [3.0, 0]])) == pytest.approx([-3, 3])
    roots = eigen_closed_form([[-0.1, 0.5], [0.5, -0.1]])
    assert sorted(r.real for r in roots) == pytest.approx([-0.6, 0.4])


def test_reproduction_number_at_full_susceptibility(pinned):
    st_ = SystemState.from_sxo([1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    assert reproduction_spectrum(st_, pinned).value == pytest.approx(0.5 / 0.07, rel=1e-12)


def test_growth_abscissa_pinned(pinned):
    st_ = SystemState.from_sxo([1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    res = growth_spectrum(st_, pinned)
    assert res.value == pytest.approx(0.43, abs=1e-12)
    np.testing.assert_allclose(res.left_vector, [0.5, 0.5])
    # full belief: B_min - G with gamma = 0.1
    assert growth_spectrum(st_, pinned, o=1.0).value == pytest.approx(0.1, abs=1e-12)


def test_bounds_bracket(pinned):
    lo, hi = reproduction_bounds(pinned.initial, pinned)
    r = effective_reproduction_number(pinned.initial, pinned)
    assert lo <= r <= hi
    assert lo == pytest.approx(0.99 * 0.2 / 0.1)
    assert hi == pytest.approx(0.99 * 0.5 / 0.07)


def test_directed_ring_is_periodic_but_converges():
    ring = np.roll(np.eye(3), 1, axis=1)
    res = spectral_radius(ring)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(res.left_vector, 1 / 3)


def test_zero_matrix():
    assert spectral_radius(np.zeros((3, 3))).value == 0.0


def test_input_checks():
    with pytest.raises(ValueError):
        spectral_radius(-np.eye(2))
    with pytest.raises(ValueError):
        spectral_radius(np.ones((2, 3)))
    with pytest.raises(ValueError):
        spectral_abscissa_metzler([[0.0, -1.0], [1.0, 0.0]])


def test_convergence_failure_reported():
    m = np.array([[1.0, 2.0, 0.1], [0.3, 0.5, 2.0], [1.5, 0.2, 0.7]])
    with pytest.raises(SpectralConvergenceError) as exc:
        spectral_radius(m, max_iter=1)
    assert exc.value.iterations == 1


def test_zero_susceptibles_regularized(pinned):
    st_ = SystemState.from_sxo([0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
    res = reproduction_spectrum(st_, pinned)
    assert res.regularized
    assert 0.0 < res.value <= 1e-12
    g = growth_spectrum(st_, pinned)
    assert g.regularized and g.value == pytest.approx(-0.07, abs=1e-12)


def test_partial_zero_susceptible():
    sc = two_node()
    st_ = SystemState.from_sxo([0.0, 0.8], [0.1, 0.1], [0.0, 0.0])
    res = reproduction_spectrum(st_, sc)
    assert res.regularized
    assert (res.left_vector > 0).all()


def test_warm_start_gives_same_answer(pinned):
    a = reproduction_spectrum(pinned.initial, pinned)
    b = reproduction_spectrum(pinned.initial, pinned, start=np.array([0.9, 0.1]))
    assert a.value == pytest.approx(b.value, rel=1e-12)


def _matrix(draw, metzler):
    n = draw(st.integers(1, 3))
    vals = draw(st.lists(st.floats(0.05, 3.0), min_size=n * n, max_size=n * n))
    m = np.array(vals).reshape(n, n)
    if metzler:
        diag = draw(st.lists(st.floats(-3.0, 3.0), min_size=n, max_size=n))
        np.fill_diagonal(m, diag)
    return m


@given(st.data())
def test_radius_matches_closed_form(data):
    m = _matrix(data.draw, metzler=False)
    res = spectral_radius(m)
    assert res.value == pytest.approx(max_modulus(eigen_closed_form(m)), abs=1e-9)
    assert np.abs(m.T @ res.left_vector - res.value * res.left_vector).max() <= 1e-10 * max(1, res.value)


@given(st.data())
def test_abscissa_matches_closed_form(data):
    m = _matrix(data.draw, metzler=True)
    res = spectral_abscissa_metzler(m)
    assert res.value == pytest.approx(dominant_real(eigen_closed_form(m)), abs=1e-9)
    assert (res.left_vector > 0).all()
