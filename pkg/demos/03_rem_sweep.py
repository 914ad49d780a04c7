"""
Filling a Radio Environment Map by exhaustive sweep
====================================================

On the three-AP layout, two UE patterns favour different cluster sizes
once the PA is ideal: a tight group at the cell edge profits from three
cooperating APs, while UEs sitting next to their own AP do not. With
class-A amplifiers every extra active AP costs a constant bias power, so
one AP per UE wins in both cases.
"""

import numpy as np

from cfrem.rem import REMStore, best_action, pattern_key, update_entry
from cfrem.scenario import PAClass, UELocationPattern, bundled_scenario
from cfrem.simulator import run_drop

sc = bundled_scenario("three_ap")
xy = np.array([ap.position[:2] for ap in sc.aps])
c = xy.mean(axis=0)

# Edge group: 8 UEs on a 0.6 m circle, shifted 3 m toward AP 0
u = (xy[0] - c) / np.linalg.norm(xy[0] - c)
t = np.linspace(0, 2 * np.pi, 8, endpoint=False)
edge = UELocationPattern(np.column_stack([c[0] + 3 * u[0] + 0.6 * np.cos(t),
                                          c[1] + 3 * u[1] + 0.6 * np.sin(t)]))
# One UE 5 m in front of each AP
d = (c - xy) / np.linalg.norm(c - xy, axis=1, keepdims=True)
near = UELocationPattern(xy + 5 * d)

for model in (PAClass.PERFECT, PAClass.CLASS_A):
    store = REMStore.for_scenario(sc)
    for name, pat in (("edge", edge), ("near", near)):
        key = pattern_key(pat)
        for seed in range(20):
            for no_ap in (1, 2, 3):
                update_entry(store, key, no_ap, run_drop(sc, pat, no_ap, model, seed))
        ee = {a: s.mean_ee / 1e6 for a, s in sorted(store.entries[key].stats.items())}
        row = "  ".join(f"{a} AP {v:8.2f}" for a, v in ee.items())
        print(f"{model.value:8s} {name:5s} Mbit/J: {row}  -> best {best_action(store, key)}")
