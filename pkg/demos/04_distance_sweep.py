"""
Efficiency versus distance
==========================

With decoy states S/N falls only linearly with the transmittance, instead
of the T**4 of the protocol without decoys. Far enough out the signal is
buried under dark counts; those rows are flagged rather than dropped.
The heralding gate suppresses the server's dark counts, which is why the
heralded source reaches much further.
"""

import numpy as np

from rbsp import ChannelParams, DecoyProtocol, HeraldingDetector, HSPSSource, WCPSource
from rbsp import n_for_epsilon, plateau_onset, sweep_distance, transmittance

link = ChannelParams()
protocol = DecoyProtocol()
lengths = np.arange(50.0, 1001.0, 50.0)

curves = {
    "WCP": WCPSource(0.6),
    "HSPS 0.85/1e-8": HSPSSource(0.6, HeraldingDetector(2, 0.85, 1e-8)),
    "HSPS 1.00/1e-12": HSPSSource(0.6, HeraldingDetector(2, 1.0, 1e-12)),
}
rows = {name: sweep_distance(src, link, protocol, lengths, workers=4) for name, src in curves.items()}

print(f"{'L':>6} " + " ".join(f"{name:>18}" for name in curves))
for i, L in enumerate(lengths):
    cells = []
    for name in curves:
        r = rows[name][i]
        cells.append(f"{r.efficiency:12.3e}{' (dk)' if r.plateau_flag else '     '}")
    print(f"{L:6.0f} " + " ".join(f"{c:>18}" for c in cells))

for name in curves:
    print(f"{name}: usable up to ~{plateau_onset(rows[name]):g} km")

# Pulses needed for one qubit at 100 km, with and without decoys
T = transmittance(link.at_length(100.0))
decoy = rows["WCP"][1].plan.pulse_count
print(f"\n100 km: {decoy:.3e} pulses with decoys vs {n_for_epsilon(1e-3, T):.3e} without")
