"""
Per-UE throughput with growing clusters
========================================

On the default layout (one macro, five micros, 40 UEs), compare the
empirical throughput distribution for one, two and three serving APs.
"""

import numpy as np

from cfrem.scenario import PAClass, default_scenario, generate_pattern
from cfrem.simulator import run_drop, throughput_cdf

sc = default_scenario()
pat = generate_pattern(1, 40, sc.area)

print(f"{'AP':>3} {'p10':>8} {'median':>8} {'p90':>8}   Mbit/s")
for no_ap in (1, 2, 3):
    r = run_drop(sc, pat, no_ap, PAClass.PERFECT, seed=0)
    thr = np.array([t for t, _ in throughput_cdf(r)]) / 1e6
    p10, p50, p90 = np.percentile(thr, [10, 50, 90])
    print(f"{no_ap:3d} {p10:8.2f} {p50:8.2f} {p90:8.2f}   (EE {r.ee / 1e6:.2f} Mbit/J)")
