import numpy as np
import pytest

from conftest import two_node
from oracle import reference_step
from sirop.integrator import IntegrationError, integrate, step
from sirop.model import SystemState


def test_step_matches_high_precision_reference(pinned):
    ref = reference_step(pinned.initial, pinned, 0.01)
    out = step(pinned.initial, pinned, 0.01)
    for k in "sxro":
        np.testing.assert_allclose(getattr(out, k), getattr(ref.state_out, k), atol=1e-10, rtol=0)
    assert "mpmath" in ref.precision_note


def test_step_matches_reference_away_from_symmetry():
    sc = two_node(s=0.5, x=0.3, o=0.7)
    st = SystemState(0.0, [0.5, 0.4], [0.3, 0.1], [0.2, 0.5], [0.7, 0.1])
    ref = reference_step(st, sc, 0.01)
    out = step(st, sc, 0.01)
    for k in "sxro":
        np.testing.assert_allclose(getattr(out, k), getattr(ref.state_out, k), atol=1e-10, rtol=0)


def test_disease_free_stays_disease_free():
    sc = two_node(s=0.7, x=0.0, o=0.2)
    out = step(sc.initial, sc, 0.01)
    np.testing.assert_array_equal(out.x, 0.0)
    ref = reference_step(sc.initial, sc, 0.01)
    np.testing.assert_array_equal(ref.state_out.x, 0.0)


def test_full_belief_equilibrium_is_fixed():
    sc = two_node(s=0.0, x=0.0, o=1.0)
    out = step(sc.initial, sc, 0.1)
    np.testing.assert_allclose(out.o, 1.0, atol=1e-15)
    np.testing.assert_allclose(out.r, 1.0, atol=1e-15)
    ref = reference_step(sc.initial, sc, 0.1).state_out
    np.testing.assert_allclose(ref.o, 1.0, atol=1e-15)


def test_integrate_grid(pinned):
    sc = pinned.with_integration(dt=0.01, t_end=5.0, record_stride=10)
    traj = integrate(sc)
    assert len(traj) == 51
    np.testing.assert_allclose(traj.times, np.arange(51) * 0.1, atol=1e-12)
    np.testing.assert_array_equal(traj.s[0], sc.initial.s)
    np.testing.assert_allclose(traj.s + traj.x + traj.r, 1.0, atol=1e-12)
    assert traj.sample_spacing == pytest.approx(0.1)


def test_integrate_agrees_with_repeated_steps(pinned):
    sc = pinned.with_integration(dt=0.02, t_end=1.0, record_stride=50)
    st = sc.initial
    for _ in range(50):
        st = step(st, sc, 0.02)
    np.testing.assert_allclose(integrate(sc).final().x, st.x, rtol=0, atol=1e-15)


def test_oversized_step_raises():
    sc = two_node(beta=60.0, s=0.5, x=0.5).with_integration(dt=0.5, t_end=10.0)
    with pytest.raises(IntegrationError) as exc:
        integrate(sc)
    assert exc.value.t is not None and "clamp_tolerance" in str(exc.value)


def test_early_stop_truncates(pinned):
    sc = pinned.with_integration(t_end=800.0, early_stop=True, x_floor=1e-6)
    traj = integrate(sc)
    assert len(traj) < sc.integration.n_records
    assert traj.final().x.max() < 1e-6


def test_interpolate_midpoint(pinned):
    traj = integrate(pinned.with_integration(t_end=2.0))
    mid = traj.interpolate(3, 0.5)
    assert mid.t == pytest.approx(0.5 * (traj.times[3] + traj.times[4]))
    np.testing.assert_allclose(mid.x, 0.5 * (traj.x[3] + traj.x[4]))
    mid.validate()


def test_nonpositive_dt(pinned):
    with pytest.raises(ValueError):
        step(pinned.initial, pinned, 0.0)


def test_python_fallback_matches_compiled_kernel():
    from sirop import _kernel
    from sirop.integrator import _operators

    if not hasattr(_kernel.run, "py_func"):
        pytest.skip("numba not installed; the kernel already runs as Python")
    sc = two_node(s=0.6, x=0.3, o=0.4)
    st = sc.initial
    outs = []
    rhs = _kernel.rhs
    for use_python in (False, True):
        y = np.concatenate([st.s, st.x, st.o])
        r = np.array(st.r)
        rec = np.zeros((11, 8))
        rec[0] = np.concatenate([st.s, st.x, st.r, st.o])
        fn = _kernel.run.py_func if use_python else _kernel.run
        if use_python:
            _kernel.rhs = rhs.py_func
        try:
            fn(y, r, *_operators(sc), 0.01, 100, 10, 1e-9, False, 0.0, rec)
        finally:
            _kernel.rhs = rhs
        outs.append(rec)
    np.testing.assert_allclose(outs[0], outs[1], rtol=0, atol=1e-15)
