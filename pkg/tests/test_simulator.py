import dataclasses
import math

import numpy as np
import pytest

from cfrem.channel import draw_channel
from cfrem.pa import PAOperatingPoint
from cfrem.precoding import ClusterAssignment, form_clusters, spectral_efficiency, zf_precoder
from cfrem.scenario import PAClass, UELocationPattern, generate_pattern
from cfrem.simulator import (DropResult, ap_energy_per_slot, energy_efficiency, run_drop, schedule,
                             throughput_cdf)

from conftest import centroid_cluster, single_ap_scenario


def assignment(serving):
    return ClusterAssignment(np.asarray(serving, dtype=bool), 1)


def test_schedule_fits_one_slot():
    sc = single_ap_scenario(m=8)
    s = schedule(assignment([[1, 1, 1, 1]]), sc)
    assert s.slots == (((0, 1, 2, 3),),)


def test_schedule_chunks_by_antennas():
    sc = single_ap_scenario(m=2)
    s = schedule(assignment([[1, 1, 1, 1]]), sc)
    assert s.n_slots == 2
    assert [len(slot[0]) for slot in s.slots] == [2, 2]
    assert sorted(k for slot in s.slots for k in slot[0]) == [0, 1, 2, 3]


def test_schedule_idle_ap_has_empty_sets(scenario):
    serving = np.zeros((6, 3), dtype=bool)
    serving[0] = True
    s = schedule(assignment(serving), scenario)
    assert s.n_slots == 1
    assert s.slots[0][1:] == ((),) * 5


def test_schedule_round_robin_balance(scenario):
    serving = np.zeros((6, 40), dtype=bool)
    serving[0] = True          # macro: 40 UEs, 16 per slot -> 3 slots
    serving[1, :20] = True     # micro: 20 UEs, 16 per slot -> 2 chunks
    s = schedule(assignment(serving), scenario)
    assert s.n_slots == 3
    for a in (0, 1):
        counts = np.zeros(40, dtype=int)
        for slot in s.slots:
            assert len(slot[a]) <= min(scenario.aps[a].num_antennas, scenario.k_max)
            counts[list(slot[a])] += 1
        served = counts[serving[a]]
        assert served.min() >= 1 and served.max() - served.min() <= 1


def test_energy_efficiency_examples():
    assert energy_efficiency(1e9, 100.0) == 1e7
    assert energy_efficiency(0.0, 50.0) == 0.0
    with pytest.raises(ValueError):
        energy_efficiency(1e6, 0.0)


def test_run_drop_deterministic(scenario):
    pat = generate_pattern(1, 40, scenario.area)
    a = run_drop(scenario, pat, 2, PAClass.CLASS_B, seed=4)
    b = run_drop(scenario, pat, 2, PAClass.CLASS_B, seed=4)
    assert a == b
    assert a.to_record() == b.to_record()
    assert a.total_bits == pytest.approx(sum(a.per_ue_bits), rel=1e-12)
    assert a.total_energy_j == pytest.approx(sum(a.per_ap_energy_j), rel=1e-12)
    assert a.ee == a.total_bits / a.total_energy_j


def test_perfect_vs_class_a_gap(scenario):
    pat = generate_pattern(1, 40, scenario.area)
    ratio = run_drop(scenario, pat, 1, "Perfect", 0).ee / run_drop(scenario, pat, 1, "ClassA", 0).ee
    assert 5 <= ratio <= 25


def test_class_a_energy_independent_of_ue_count(scenario):
    small = generate_pattern(1, 5, scenario.area)
    large = generate_pattern(2, 12, scenario.area)
    a = run_drop(scenario, small, 6, PAClass.CLASS_A, 0)
    b = run_drop(scenario, large, 6, PAClass.CLASS_A, 0)
    assert a.n_slots == b.n_slots == 1
    assert a.total_energy_j == b.total_energy_j


def test_idle_ap_draws_circuit_power_only(scenario):
    for model in PAClass:
        e = ap_energy_per_slot(scenario, 1, False, model)
        assert e == pytest.approx(scenario.circuit_power_w * scenario.slot_duration_s)
    always_on = dataclasses.replace(scenario, idle_pa_draw=True)
    assert ap_energy_per_slot(always_on, 1, False, PAClass.CLASS_A) == \
        ap_energy_per_slot(always_on, 1, True, PAClass.CLASS_A)


def test_energy_additive_over_slots():
    sc = single_ap_scenario(m=2)
    pat = UELocationPattern([(200.0, 200.0), (300.0, 210.0), (220.0, 290.0), (280.0, 300.0)])
    r = run_drop(sc, pat, 1, PAClass.CLASS_B, 0)
    assert r.n_slots == 2
    one = ap_energy_per_slot(sc, 0, True, PAClass.CLASS_B)
    assert r.total_energy_j == pytest.approx(2 * one, rel=1e-12)
    assert r.duration_s == 2 * sc.slot_duration_s


@pytest.mark.parametrize("no_ap", [1, 3])
def test_energy_ordering_across_pa_classes(scenario, no_ap):
    pat = generate_pattern(5, 40, scenario.area)
    e = {m: run_drop(scenario, pat, no_ap, m, 2) for m in PAClass}
    assert e[PAClass.CLASS_A].total_energy_j >= e[PAClass.CLASS_B].total_energy_j \
        >= e[PAClass.PERFECT].total_energy_j
    assert e[PAClass.CLASS_A].total_bits == e[PAClass.PERFECT].total_bits


def test_ee_invariant_under_ue_relabeling(scenario):
    pat = generate_pattern(8, 40, scenario.area)
    perm = np.random.default_rng(0).permutation(40)
    shuffled = UELocationPattern(pat.positions[perm])
    a = run_drop(scenario, pat, 2, PAClass.PERFECT, 3)
    b = run_drop(scenario, shuffled, 2, PAClass.PERFECT, 3)
    assert b.ee == pytest.approx(a.ee, rel=1e-12)
    np.testing.assert_allclose(np.asarray(b.per_ue_bits), np.asarray(a.per_ue_bits)[perm], rtol=1e-12)


def linear_reference(scenario, pattern, no_ap, seed):
    """Straight-line linear-PA pipeline with explicit loops."""
    ch = draw_channel(scenario, pattern, seed)
    p_max = np.array([ap.p_max_w for ap in scenario.aps])
    ca = form_clusters(ch.beta, p_max, no_ap, [ap.id for ap in scenario.aps])
    sched = schedule(ca, scenario, pattern)
    ops = [PAOperatingPoint(ap.p_sat_per_antenna_w, ap.ibo_db) for ap in scenario.aps]
    p_in = [ap.p_max_w / op.gamma ** 2 for ap, op in zip(scenario.aps, ops)]
    bits = np.zeros(len(pattern))
    energy = np.zeros(scenario.n_ap)
    for slot in sched.slots:
        weights = {a: zf_precoder(ch.h[a][list(ues)]) for a, ues in enumerate(slot) if ues}
        for a, ap in enumerate(scenario.aps):
            pa_w = ap.num_antennas * ops[a].p_in_w if slot[a] else 0.0
            energy[a] += (pa_w + scenario.circuit_power_w) * scenario.slot_duration_s
        for k in sorted({k for ues in slot for k in ues}):
            num, den = 0j, 0.0
            for a, W in weights.items():
                p = p_in[a] / len(slot[a])
                g = ch.h[a][k] @ W
                for col, j in enumerate(slot[a]):
                    if j == k:
                        num += math.sqrt(p) * g[col]
                    else:
                        den += p * abs(g[col]) ** 2
            se = spectral_efficiency(abs(num) ** 2 / (den + scenario.noise_w),
                                     scenario.impl_loss, scenario.se_max)
            bits[k] += se * (scenario.bandwidth_hz * scenario.slot_duration_s)
    return bits, float(energy.sum())


@pytest.mark.parametrize("no_ap", [1, 2, 4])
def test_linear_pa_matches_reference_pipeline(scenario, no_ap):
    pat = generate_pattern(11, 40, scenario.area)
    r = run_drop(scenario, pat, no_ap, PAClass.PERFECT, 6, linear_pa=True)
    bits, energy = linear_reference(scenario, pat, no_ap, 6)
    np.testing.assert_array_equal(r.per_ue_bits, bits)
    assert r.total_energy_j == energy


def test_throughput_cdf_examples():
    one = DropResult((5.0,), (1.0,), 5.0, 1.0, 5.0, 1, None, 0, 1, 1.0)
    assert throughput_cdf(one) == [(5.0, 1.0)]
    four = DropResult((3.0, 1.0, 4.0, 2.0), (1.0,), 10.0, 1.0, 10.0, 1, None, 0, 1, 1.0)
    pts = throughput_cdf(four)
    assert [p[1] for p in pts] == [0.25, 0.5, 0.75, 1.0]
    assert [p[0] for p in pts] == [1.0, 2.0, 3.0, 4.0]
    assert 2.0 <= np.median([p[0] for p in pts]) <= 3.0
    with pytest.raises(ValueError):
        throughput_cdf(DropResult((), (1.0,), 0.0, 1.0, 0.0, 1, None, 0, 1, 1.0))


def test_cell_edge_cluster_gains_from_three_aps(three_ap):
    pat = centroid_cluster(three_ap)
    r1 = run_drop(three_ap, pat, 1, PAClass.PERFECT, 0)
    r3 = run_drop(three_ap, pat, 3, PAClass.PERFECT, 0)
    t1, t3 = r1.per_ue_throughput_bps, r3.per_ue_throughput_bps
    assert np.all(t3 >= t1)
    assert np.median(t3 / t1) > 1


def test_drop_record_roundtrip(scenario):
    r = run_drop(scenario, generate_pattern(1, 7, scenario.area), 2, None, 9)
    assert DropResult.from_record(r.to_record()) == r
    with pytest.raises(ValueError):
        DropResult.from_record("1,2,3")


def test_pattern_outside_area_rejected(scenario):
    with pytest.raises(ValueError, match="outside"):
        run_drop(scenario, UELocationPattern([(-5.0, 10.0)]), 1)
