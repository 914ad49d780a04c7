"""
Epsilon-greedy learning of the cluster size
============================================

Instead of sweeping, the agent picks a cluster size per episode, observes
one fading drop and folds it into the REM. Exploration decays as
1/visits, after an initial pass over every action.
"""

import numpy as np

from cfrem.rem import REMStore, best_action, pattern_key, select_action, update_entry
from cfrem.scenario import PAClass, bundled_scenario, generate_pattern
from cfrem.simulator import run_drop

sc = bundled_scenario("three_ap")
patterns = [generate_pattern(s, 6, sc.area) for s in (1, 2)]
keys = [pattern_key(p) for p in patterns]
store = REMStore.for_scenario(sc)
rng = np.random.default_rng(0)

picks = {k: [] for k in keys}
for ep in range(300):
    i = ep % len(patterns)
    entry = store.entries.get(keys[i])
    visits = sum(s.count for s in entry.stats.values()) if entry else 0
    a = select_action(store, keys[i], 1.0 / max(visits, 1), [1, 2, 3], rng)
    update_entry(store, keys[i], a, run_drop(sc, patterns[i], a, PAClass.PERFECT, seed=ep))
    picks[keys[i]].append(a)

for k in keys:
    stats = store.entries[k].stats
    counts = {a: s.count for a, s in sorted(stats.items())}
    print(f"pattern {str(k)[:40]}...  visits {counts}  greedy -> {best_action(store, k)}")
    print("   last 20 picks:", picks[k][-20:])
