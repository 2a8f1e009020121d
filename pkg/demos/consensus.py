"""
Opinions agree when infection is universal
==========================================

On the complete digraph, with random initial infection and belief, almost
everyone is eventually infected. The final opinions solve
(L + I) o_e = 1 - s_e, so s_e near 0 forces o_e near 1.
"""

import numpy as np

from sirop import generate, integrate, preset
from sirop.analysis import equilibrium_report

for name in ("fig3_consensus", "fig3_ones"):
    sc = generate(preset(name))
    traj = integrate(sc)
    rep = equilibrium_report(traj, sc)
    print(
        f"{name:15s} max s_e={rep.s_e.max():.2e}  |o_e - 1|_inf={np.abs(rep.o_e - 1).max():.2e}  "
        f"opinion spread={rep.opinion_spread:.2e}"
    )

###############################################################################
# Identical communities with identical starts agree exactly.

from sirop import IntegrationSettings, Scenario, SystemState
from sirop import build_opinion_network, build_recovery, build_transmission

n = 5
edges = [(i, j, 0.3) for i in range(n) for j in range(n) if i != j]
sc = Scenario(
    build_transmission(n, edges, 0.1),
    build_recovery(np.full(n, 0.2), 0.1),
    build_opinion_network(n, [(i, j, 1.0) for i, j, _ in edges]),
    SystemState.from_sxo(np.full(n, 0.9), np.full(n, 0.1), np.full(n, 0.5)),
    IntegrationSettings(t_end=300),
)
rep = equilibrium_report(integrate(sc), sc)
print(f"symmetric: consensus={rep.consensus}, value={rep.consensus_value:.6f}, 1 - s_e = {1 - rep.s_e[0]:.6f}")
