"""
Rebound after early caution
===========================

Start with heavy infection (30-60%) and full belief (o = 1). Early caution
keeps R_o below one, but as opinions relax R_o climbs back above one and a
genuine peak follows. The first crossing is upward and is not a peak.
"""

import numpy as np

from sirop import generate, integrate, preset
from sirop.analysis import classify_outbreak, derive, detect_peaks

sc = generate(preset("fig4_rebound"))
cls = classify_outbreak(sc)
print(f"{cls.classification.value}: R_min(0)={cls.r_min_0:.3f}, R_max(0)={cls.r_max_0:.3f}")

traj = integrate(sc)
r = derive(traj, sc).r_o
rep = detect_peaks(traj, sc)

for c in rep.rejected_crossings:
    print(f"rejected crossing at t={c.t:.3f} ({c.reason.value})")
for p in rep.peaks:
    print(f"accepted peak at t={p.t_p:.3f}")

j = int(np.argmax(r))
print(f"R_o rises from {r[0]:.3f} to a maximum of {r[j]:.3f} at t={traj.times[j]:.1f}, ends at {r[-1]:.3f}")

# the average opinion first drops and then recovers as infection spreads
o_bar = traj.o.mean(axis=1)
print(f"mean opinion: start {o_bar[0]:.2f}, min {o_bar.min():.2f}, end {o_bar[-1]:.2f}")
