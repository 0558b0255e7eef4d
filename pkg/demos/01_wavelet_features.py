"""How a task signal turns into a point on the clustering grid.

Run: python3 demos/01_wavelet_features.py
"""

import numpy as np

from waanso.model import GeneratorConfig, generate_workload, latent_group
from waanso.wavecluster import raw_features, task_features, task_pyramids
from waanso.wavelet import coeff_distribution, dwt, idwt, rwe, wavelet_entropy

# A ramp has most of its energy in the smooth part.
ramp = np.array([1.0, 2.0, 3.0, 4.0])
p = dwt(ramp, "haar", levels=1)
print("approx", p.top, "detail", p.details[0])
print("energy kept:", p.total_energy(), "==", np.sum(ramp**2))
print("reconstructed:", idwt(p, "haar"))

# db4 on a longer, noisy signal; still lossless
rng = np.random.default_rng(0)
x = np.sin(np.linspace(0, 6 * np.pi, 64)) + 0.1 * rng.standard_normal(64)
q = dwt(x, "db4", levels=3)
print("db4 round-trip error:", np.abs(idwt(q, "db4") - x).max())

# Relative energies are a probability distribution, so entropy and KL work.
d_smooth = coeff_distribution(q)
d_noise = coeff_distribution(dwt(rng.standard_normal(64), "db4", levels=3))
print("entropy (approx, detail):", wavelet_entropy(d_smooth))
print("rwe(smooth | noise):", rwe(d_smooth, d_noise))
print("rwe(noise | smooth):", rwe(d_noise, d_smooth))

# Each task's point is (approx share, detail share) of its signal energy.
w = generate_workload(1, 8, seed=3, params=GeneratorConfig(groups=4))
pyr = task_pyramids(w)
raw = raw_features(pyr)
for pt in task_features(w, pyramids=pyr):
    a, t = pt.key
    print(f"task {t} group {latent_group(t, 4)}  raw=({raw[pt.key][0]:.3f}, {raw[pt.key][1]:.3f})"
          f"  scaled=({pt.coords[0]:.3f}, {pt.coords[1]:.3f})")
