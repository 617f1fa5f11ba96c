"""
Photon statistics of the two sources
====================================

A weak coherent pulse has Poissonian photon number; an SPDC pair source is
thermal. Heralding on exactly one click of a time-multiplexed detector
reshapes the thermal distribution towards single photons.
"""

import numpy as np

from rbsp import HeraldingDetector, HSPSSource, heralded_pnd, poisson_pmf_array, thermal_pmf_array, tmd_response

mu = 0.6
n = np.arange(6)

# Raw distributions: the thermal tail is heavier than the Poisson one
poisson = poisson_pmf_array(mu, 5)
thermal = thermal_pmf_array(mu, 5)

# The four-mode detector (two couplers) clicks once for one photon with
# probability eta, and sometimes for two or more photons that share a mode
det = HeraldingDetector(stages=2, efficiency=0.85, dark_rate=1e-8)
print("P(1 click | m photons):", np.round([tmd_response(1, m, det) for m in range(1, 6)], 4))

heralded = np.array([heralded_pnd(HSPSSource(mu, det), k) for k in n])

print(f"\n{'n':>2} {'poisson':>10} {'thermal':>10} {'heralded':>10}")
for row in zip(n, poisson, thermal, heralded):
    print(f"{row[0]:>2} {row[1]:10.5f} {row[2]:10.5f} {row[3]:10.5f}")

# Among pulses that reach the server, the heralded source has a far larger
# single-photon share than the coherent pulse at the same mean
print(f"\nsingle-photon share of non-empty pulses: WCP {poisson[1] / poisson[1:].sum():.3f}, "
      f"heralded {heralded[1] / heralded[1:].sum():.3f}")
