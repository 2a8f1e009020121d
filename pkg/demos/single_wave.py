"""
A single epidemic wave
======================

Ten communities on a ring with ten random shortcuts, everyone initially
1% infected and nobody yet convinced the disease is serious (o = 0).
The reproduction number starts far above one, so a peak is guaranteed.
"""

import numpy as np

from sirop import generate, integrate, preset
from sirop.analysis import classify_outbreak, derive, detect_peaks, growth_certificate

sc = generate(preset("fig2"))
print(classify_outbreak(sc))

traj = integrate(sc)
d = derive(traj, sc)

###############################################################################
# The peak is where R_o crosses one from above. The left eigenvector of the
# growth matrix at that instant gives the weighted infection level that
# actually peaks there.

rep = detect_peaks(traj, sc)
pk = rep.peaks[0]
print(f"peak at t = {pk.t_p:.3f}, R_o there = {pk.r_at_peak:.4f}")

w = traj.x @ pk.p_vector
k = int(np.argmax(w))
print(f"weighted infection p^T x is largest at sample t = {traj.times[k]:.2f} (value {w[k]:.4f})")

###############################################################################
# A few rows of the reproduction-number trace and its belief-driven bounds.

for t in (0, 2, 5, 7, 10, 20, 50):
    i = int(round(t / traj.sample_spacing))
    print(f"t={t:5.1f}  R_min={d.r_min[i]:8.4f}  R_o={d.r_o[i]:8.4f}  R_max={d.r_max[i]:8.4f}")

###############################################################################
# Before the peak, p_min(0)^T x grows strictly.

print(growth_certificate(traj, sc, rep))
