"""
Threshold bounds and the decay certificate
==========================================

R_min uses full belief, R_max zero belief. If R_max(0) < 1 the epidemic
dies out without a peak, and p^T x decays at least as fast as
exp(sigma_max t).
"""

import numpy as np

from sirop import IntegrationSettings, Scenario, SystemState, integrate
from sirop import build_opinion_network, build_recovery, build_transmission
from sirop.analysis import classify_outbreak, decay_certificate, detect_peaks


def two_communities(beta, gamma, beta_min, gamma_min):
    tm = build_transmission(2, [(0, 1, beta), (1, 0, beta)], beta_min)
    rr = build_recovery([gamma, gamma], gamma_min)
    on = build_opinion_network(2, [(0, 1, 1.0), (1, 0, 1.0)])
    st = SystemState.from_sxo([0.95, 0.95], [0.05, 0.05], [0.0, 0.0])
    return Scenario(tm, rr, on, st, IntegrationSettings(t_end=100))


for beta, gamma, bmin, gmin in [(0.21, 0.5, 0.2, 0.3), (0.9, 0.3, 0.05, 0.2), (0.5, 0.1, 0.2, 0.07)]:
    sc = two_communities(beta, gamma, bmin, gmin)
    c = classify_outbreak(sc)
    print(f"beta={beta} gamma={gamma}: R in [{c.r_min_0:.3f}, {c.r_max_0:.3f}] -> {c.classification.value}")

sc = two_communities(0.21, 0.5, 0.2, 0.3)
traj = integrate(sc)
print("peaks:", detect_peaks(traj, sc).peaks)
cert = decay_certificate(traj, sc, 0.0)
print(f"sigma_max = {cert.sigma_max:.4f}, bound holds: {cert.holds}, worst relative excess {cert.max_violation:.1e}")
w = traj.x @ cert.p_max
print(f"p^T x: {w[0]:.4f} -> {w[-1]:.2e}; bound at t_end {w[0] * np.exp(cert.sigma_max * traj.times[-1]):.2e}")
