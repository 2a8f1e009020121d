import numpy as np
import pytest

from conftest import two_node
from sirop.model import (
    IntegrationSettings,
    StateError,
    SystemState,
    derivative,
    effective_recovery,
    effective_transmission,
)


def test_pinned_derivative(pinned):
    d = derivative(pinned.initial, pinned)
    np.testing.assert_allclose(d.ds, [-0.00495, -0.00495], rtol=1e-12)
    np.testing.assert_allclose(d.dx, [0.00425, 0.00425], rtol=1e-12)
    np.testing.assert_allclose(d.dr, [0.0007, 0.0007], rtol=1e-12)
    np.testing.assert_allclose(d.do, [0.01, 0.01], rtol=1e-12)


def test_effective_transmission_entry(pinned):
    b = effective_transmission(np.array([0.5, 0.0]), pinned.transmission)
    assert b[0, 1] == pytest.approx(0.35)
    assert b[1, 0] == pytest.approx(0.5)
    assert b[0, 0] == 0.0 and b[1, 1] == 0.0


def test_effective_recovery(pinned):
    g = effective_recovery(np.array([0.5, 1.0]), pinned.recovery)
    np.testing.assert_allclose(np.diag(g), [0.085, 0.1])


def test_effective_rates_at_extremes(pinned):
    tm = pinned.transmission
    np.testing.assert_allclose(effective_transmission(np.zeros(2), tm), tm.entries)
    np.testing.assert_allclose(effective_transmission(np.ones(2), tm), tm.floor_matrix)


def test_opinion_shape_checked(pinned):
    with pytest.raises(ValueError):
        effective_transmission(np.zeros(3), pinned.transmission)


def test_state_validation():
    SystemState.from_sxo([0.5, 0.5], [0.5, 0.2], [0, 1]).validate()
    with pytest.raises(StateError):
        SystemState.from_sxo([0.9, 0.5], [0.2, 0.2], [0, 1]).validate()
    with pytest.raises(StateError):
        SystemState(0.0, [0.5, 0.5], [0.1, 0.1], [0.1, 0.1], [0, 0]).validate()
    with pytest.raises(StateError):
        SystemState.from_sxo([0.5, 0.5], [0.1, 0.1], [0, 1.5]).validate()
    with pytest.raises(StateError):
        SystemState(0.0, [0.5], [0.1, 0.1], [0.4, 0.4], [0, 0])


def test_state_is_read_only():
    st = SystemState.from_sxo([0.5, 0.5], [0.1, 0.1], [0, 0])
    with pytest.raises(ValueError):
        st.s[0] = 1.0
    assert st.replace(t=2.0).t == 2.0


@pytest.mark.parametrize(
    "kw", [dict(dt=0), dict(t_end=-1), dict(dt=2.0, t_end=1.0), dict(record_stride=0), dict(clamp_tolerance=0)]
)
def test_settings_rejected(kw):
    with pytest.raises(ValueError):
        IntegrationSettings(**kw)


def test_record_count():
    cfg = IntegrationSettings(dt=0.01, t_end=200, record_stride=10)
    assert cfg.n_steps == 20000
    assert cfg.n_records == 2001


def test_scenario_dimension_mismatch(pinned):
    from sirop.graph import GraphError

    with pytest.raises(GraphError):
        pinned.with_initial(SystemState.from_sxo([1, 1, 1.0], [0, 0, 0.0], [0, 0, 0.0]))


def test_with_integration(pinned):
    sc = pinned.with_integration(dt=0.05)
    assert sc.integration.dt == 0.05 and sc.integration.t_end == pinned.integration.t_end


def test_totals_conserved():
    sc = two_node(s=0.6, x=0.3, o=0.4)
    d = derivative(sc.initial, sc)
    np.testing.assert_allclose(d.ds + d.dx + d.dr, 0.0, atol=1e-15)


def test_scenario_rejects_invalid_initial_state():
    with pytest.raises(StateError):
        two_node(s=0.99, x=0.05)
