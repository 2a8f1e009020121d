import numpy as np
import pytest
from hypothesis import settings

from sirop import (
    IntegrationSettings,
    Scenario,
    SystemState,
    build_opinion_network,
    build_recovery,
    build_transmission,
)

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def two_node(beta=0.5, beta_min=0.2, gamma=0.1, gamma_min=0.07, s=0.99, x=0.01, o=0.0, **integration):
    """Symmetric two-community instance used as the pinned regression case."""
    tm = build_transmission(2, [(0, 1, beta), (1, 0, beta)], beta_min)
    rr = build_recovery([gamma, gamma], gamma_min)
    on = build_opinion_network(2, [(0, 1, 1.0), (1, 0, 1.0)])
    st = SystemState.from_sxo(np.full(2, s), np.full(2, x), np.full(2, o))
    return Scenario(tm, rr, on, st, IntegrationSettings(**integration))


@pytest.fixture
def pinned():
    return two_node()


# criterion number -> detail string, filled by test_acceptance.py
ACCEPTANCE_DETAILS: dict = {}


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when not in ("call", "setup"):
                continue
            if outcome == "passed" and rep.when != "call":
                continue
            num = int(nodeid.split("test_criterion_")[1].split("_")[0])
            rows.append((num, "PASS" if outcome == "passed" else "FAIL"))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict in sorted(set(rows)):
        detail = ACCEPTANCE_DETAILS.get(num, "")
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {detail}")
