"""One simulated drop: channel, clusters, round-robin schedule, bits and energy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, draw_channel
from .pa import PAOperatingPoint, bussgang_gain, distortion_power, pa_consumption
from .precoding import (ClusterAssignment, build_precoders, form_clusters, sinr,
                        spectral_efficiency)
from .scenario import PAClass, Scenario, UELocationPattern

__all__ = [
    "Schedule", "DropResult", "schedule", "run_drop", "energy_efficiency",
    "throughput_cdf", "ap_energy_per_slot",
]


@dataclass(frozen=True)
class Schedule:
    """``slots[t][a]`` is the tuple of UE indices AP index ``a`` serves in slot t."""

    slots: tuple

    @property
    def n_slots(self) -> int:
        return len(self.slots)


def schedule(assignment: ClusterAssignment, scenario: Scenario,
             pattern: UELocationPattern | None = None) -> Schedule:
    """Round-robin time slots, each AP serving at most ``min(M_a, k_max)`` UEs per slot.

    An AP cycles through its chunks until the AP with the most chunks is done,
    so every UE gets the same number of slots per serving AP, give or take one.
    UEs are chunked in position order when ``pattern`` is given, else by index.
    """
    chunks = []
    for a, ap in enumerate(scenario.aps):
        ues = assignment.served_by(a)
        if pattern is not None and len(ues):
            pos = pattern.positions[ues]
            ues = ues[np.lexsort((ues, pos[:, 1], pos[:, 0]))]
        cap = min(ap.num_antennas, scenario.k_max)
        n_chunks = math.ceil(len(ues) / cap)
        chunks.append([tuple(int(k) for k in c) for c in np.array_split(ues, n_chunks)]
                      if n_chunks else [])
    n_slots = max([len(c) for c in chunks] + [1])
    slots = tuple(
        tuple(c[t % len(c)] if c else () for c in chunks)
        for t in range(n_slots)
    )
    return Schedule(slots)


@dataclass(frozen=True)
class DropResult:
    per_ue_bits: tuple
    per_ap_energy_j: tuple
    total_bits: float
    total_energy_j: float
    ee: float
    no_ap: int
    pa_model: PAClass | None
    seed: int
    n_slots: int
    duration_s: float

    RECORD_FIELDS = ("seed", "pa_model", "no_ap", "n_slots", "duration_s", "total_bits",
                     "total_energy_j", "ee", "per_ue_bits", "per_ap_energy_j")

    @property
    def per_ue_throughput_bps(self) -> np.ndarray:
        return np.asarray(self.per_ue_bits) / self.duration_s

    def to_record(self) -> str:
        """Comma-separated record in ``RECORD_FIELDS`` order; list fields are ``;``-joined."""
        model = self.pa_model.value if self.pa_model is not None else "hardware"
        vals = [str(self.seed), model, str(self.no_ap), str(self.n_slots),
                repr(self.duration_s), repr(self.total_bits), repr(self.total_energy_j),
                repr(self.ee), ";".join(repr(b) for b in self.per_ue_bits),
                ";".join(repr(e) for e in self.per_ap_energy_j)]
        return ",".join(vals)

    @classmethod
    def from_record(cls, line: str) -> "DropResult":
        parts = line.strip().split(",")
        if len(parts) != len(cls.RECORD_FIELDS):
            raise ValueError(f"expected {len(cls.RECORD_FIELDS)} fields, got {len(parts)}")
        return cls(
            per_ue_bits=tuple(float(v) for v in parts[8].split(";")),
            per_ap_energy_j=tuple(float(v) for v in parts[9].split(";")),
            total_bits=float(parts[5]),
            total_energy_j=float(parts[6]),
            ee=float(parts[7]),
            no_ap=int(parts[2]),
            pa_model=None if parts[1] == "hardware" else PAClass.parse(parts[1]),
            seed=int(parts[0]),
            n_slots=int(parts[3]),
            duration_s=float(parts[4]),
        )


def energy_efficiency(total_bits: float, total_energy_j: float) -> float:
    if not total_energy_j > 0:
        raise ValueError(f"total energy must be > 0, got {total_energy_j}")
    if total_bits < 0:
        raise ValueError("total bits must be >= 0")
    return total_bits / total_energy_j


def ap_energy_per_slot(scenario: Scenario, a: int, active: bool,
                       pa_model: PAClass | None = None, linear_pa: bool = False) -> float:
    """Joules drawn by AP index ``a`` over one slot."""
    ap = scenario.aps[a]
    model = ap.pa_class if pa_model is None else PAClass.parse(pa_model)
    op = PAOperatingPoint(ap.p_sat_per_antenna_w, ap.ibo_db)
    if active:
        p_out = op.p_in_w if linear_pa else op.p_out_w
        pa_w = ap.num_antennas * pa_consumption(model, op, p_out, scenario.eta_class_a,
                                                scenario.eta_class_b_max)
    elif scenario.idle_pa_draw and model is PAClass.CLASS_A:
        pa_w = ap.num_antennas * pa_consumption(model, op, 0.0, scenario.eta_class_a)
    else:
        pa_w = 0.0
    return (pa_w + scenario.circuit_power_w) * scenario.slot_duration_s


def run_drop(scenario: Scenario, pattern: UELocationPattern, no_ap: int,
             pa_model: PAClass | str | None = None, seed: int = 0,
             linear_pa: bool = False, channel: ChannelRealization | None = None) -> DropResult:
    """Simulate one drop and account bits and energy.

    ``pa_model=None`` uses each AP's configured PA class. ``linear_pa`` replaces
    the soft limiter by an ideal linear amplifier (unit gain, no distortion).
    A pre-drawn ``channel`` may be supplied instead of drawing one from ``seed``.
    """
    pattern.check_inside(scenario.area)
    model = None if pa_model is None else PAClass.parse(pa_model)
    if channel is None:
        channel = draw_channel(scenario, pattern, seed)
    elif channel.beta.shape != (scenario.n_ap, len(pattern)):
        raise ValueError("channel realization does not match scenario and pattern")

    p_max = np.array([ap.p_max_w for ap in scenario.aps])
    assignment = form_clusters(channel.beta, p_max, no_ap, [ap.id for ap in scenario.aps])
    sched = schedule(assignment, scenario, pattern)

    gammas = [PAOperatingPoint(ap.p_sat_per_antenna_w, ap.ibo_db).gamma for ap in scenario.aps]
    p_in = p_max / np.square(gammas)
    if linear_pa:
        alpha = np.ones(scenario.n_ap)
        dist = np.zeros(scenario.n_ap)
    else:
        alpha = np.array([bussgang_gain(g) for g in gammas])
        dist = np.array([distortion_power(p, g) for p, g in zip(p_in, gammas)])

    e_active = [ap_energy_per_slot(scenario, a, True, model, linear_pa) for a in range(scenario.n_ap)]
    e_idle = [ap_energy_per_slot(scenario, a, False, model, linear_pa) for a in range(scenario.n_ap)]

    noise_w = scenario.noise_w
    bits_per_se = scenario.bandwidth_hz * scenario.slot_duration_s
    per_ue_bits = np.zeros(len(pattern))
    per_ap_energy = np.zeros(scenario.n_ap)
    for slot in sched.slots:
        served = {a: ues for a, ues in enumerate(slot) if ues}
        precoders = build_precoders(served, channel, p_in)
        for a in range(scenario.n_ap):
            per_ap_energy[a] += e_active[a] if a in served else e_idle[a]
        for k in sorted({k for ues in served.values() for k in ues}):
            s = sinr(k, precoders, channel, alpha, dist, noise_w)
            per_ue_bits[k] += spectral_efficiency(s, scenario.impl_loss, scenario.se_max) * bits_per_se

    total_bits = float(per_ue_bits.sum())
    total_energy = float(per_ap_energy.sum())
    return DropResult(
        per_ue_bits=tuple(float(b) for b in per_ue_bits),
        per_ap_energy_j=tuple(float(e) for e in per_ap_energy),
        total_bits=total_bits,
        total_energy_j=total_energy,
        ee=energy_efficiency(total_bits, total_energy),
        no_ap=no_ap,
        pa_model=model,
        seed=seed,
        n_slots=sched.n_slots,
        duration_s=sched.n_slots * scenario.slot_duration_s,
    )


def throughput_cdf(result: DropResult) -> list[tuple[float, float]]:
    """Empirical CDF of per-UE average throughput: sorted (bits/s, k/n) points."""
    if not result.per_ue_bits:
        raise ValueError("drop result has no UEs")
    thr = np.sort(result.per_ue_throughput_bps)
    n = len(thr)
    return [(float(t), (i + 1) / n) for i, t in enumerate(thr)]
