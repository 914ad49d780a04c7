"""Parametric AP-UE channels: log-distance path loss, log-normal shadowing, Rayleigh fading.

Every (AP, UE) pair draws from its own random stream, derived from the
realization seed, the AP id and the UE position. Adding an AP, or reordering
the UE list, leaves the draws of all other pairs untouched.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import APConfig, PathLossParams, Scenario, UELocationPattern

__all__ = [
    "ChannelRealization", "path_loss_db", "large_scale_gain", "distance_3d",
    "draw_channel", "dump_channel", "load_channel",
]


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Large-scale gains ``beta[a, k]`` and fading vectors ``h[a][k, :]`` (length M_a).

    ``h`` already includes ``sqrt(beta)``. Received signal at UE k from AP a
    is ``h[a][k] @ x`` (plain product, no conjugate).
    """

    beta: np.ndarray
    h: tuple
    ap_ids: tuple
    seed: int

    @property
    def n_ap(self) -> int:
        return self.beta.shape[0]

    @property
    def n_ue(self) -> int:
        return self.beta.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        return (self.seed == other.seed and self.ap_ids == other.ap_ids
                and np.array_equal(self.beta, other.beta)
                and len(self.h) == len(other.h)
                and all(np.array_equal(a, b) for a, b in zip(self.h, other.h)))


def path_loss_db(distance_3d: float, params: PathLossParams = PathLossParams()) -> float:
    if not distance_3d > 0:
        raise ValueError(f"distance must be > 0, got {distance_3d}")
    return params.intercept_db + params.slope_db * math.log10(distance_3d)


def distance_3d(ap: APConfig, ue_pos, ue_height_m: float = 1.5) -> float:
    dx = ap.position[0] - ue_pos[0]
    dy = ap.position[1] - ue_pos[1]
    dz = ap.position[2] - ue_height_m
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def large_scale_gain(ap: APConfig, ue_pos, shadow_sample: float = 0.0,
                     params: PathLossParams = PathLossParams(),
                     ue_height_m: float = 1.5) -> float:
    pl = path_loss_db(distance_3d(ap, ue_pos, ue_height_m), params)
    return 10.0 ** (-(pl + shadow_sample) / 10.0)


def _pair_keys(pattern: UELocationPattern) -> list[tuple[int, int, int]]:
    # position bits + occurrence index among identical positions
    bits = pattern.positions.astype(np.float64).view(np.uint64)
    seen: Counter = Counter()
    keys = []
    for xb, yb in bits:
        cell = (int(xb), int(yb))
        keys.append(cell + (seen[cell],))
        seen[cell] += 1
    return keys


def _pair_rng(seed: int, ap_id: int, ue_key) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(ap_id,) + tuple(ue_key))
    return np.random.Generator(np.random.PCG64(ss))


def draw_channel(scenario: Scenario, pattern: UELocationPattern, seed: int) -> ChannelRealization:
    n_ue = len(pattern)
    sigma = scenario.pathloss.shadowing_db
    keys = _pair_keys(pattern)
    beta = np.empty((scenario.n_ap, n_ue))
    hs = []
    for a, ap in enumerate(scenario.aps):
        m = ap.num_antennas
        h_a = np.empty((n_ue, m), dtype=complex)
        for k in range(n_ue):
            rng = _pair_rng(seed, ap.id, keys[k])
            shadow = rng.normal(0.0, sigma) if sigma > 0 else 0.0
            beta[a, k] = large_scale_gain(ap, pattern.positions[k], shadow,
                                          scenario.pathloss, scenario.ue_height_m)
            g = rng.standard_normal(2 * m).view(complex) / math.sqrt(2.0)
            h_a[k] = math.sqrt(beta[a, k]) * g
        h_a.setflags(write=False)
        hs.append(h_a)
    beta.setflags(write=False)
    return ChannelRealization(beta, tuple(hs), tuple(ap.id for ap in scenario.aps), seed)


def dump_channel(channel: ChannelRealization, path) -> None:
    """Textual dump, one line per (AP, UE): ``ap_id ue beta re0 im0 re1 im1 ...``."""
    lines = [f"# cfrem-channel seed={channel.seed} n_ap={channel.n_ap} n_ue={channel.n_ue}"]
    for a, ap_id in enumerate(channel.ap_ids):
        for k in range(channel.n_ue):
            coeffs = channel.h[a][k]
            inter = np.column_stack([coeffs.real, coeffs.imag]).ravel()
            lines.append(" ".join([str(ap_id), str(k), repr(float(channel.beta[a, k]))]
                                  + [repr(float(v)) for v in inter]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_channel(path) -> ChannelRealization:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("# cfrem-channel"):
        raise ValueError(f"{path}:1: missing '# cfrem-channel' header")
    meta = dict(tok.split("=") for tok in text[0].split()[2:])
    seed, n_ap, n_ue = int(meta["seed"]), int(meta["n_ap"]), int(meta["n_ue"])
    ap_ids: list[int] = []
    rows: dict[int, list] = {}
    beta = np.empty((n_ap, n_ue))
    for lineno, line in enumerate(text[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            ap_id, k = int(parts[0]), int(parts[1])
            vals = [float(v) for v in parts[2:]]
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{lineno}: malformed channel record") from None
        if len(vals) < 3 or len(vals) % 2 != 1:
            raise ValueError(f"{path}:{lineno}: expected beta plus re/im pairs")
        if ap_id not in rows:
            ap_ids.append(ap_id)
            rows[ap_id] = [None] * n_ue
        a = ap_ids.index(ap_id)
        beta[a, k] = vals[0]
        rows[ap_id][k] = np.asarray(vals[1:]).view(complex)
    if len(ap_ids) != n_ap or any(r is None for ap in ap_ids for r in rows[ap]):
        raise ValueError(f"{path}: incomplete channel dump")
    hs = []
    for ap_id in ap_ids:
        h_a = np.vstack(rows[ap_id])
        h_a.setflags(write=False)
        hs.append(h_a)
    beta.setflags(write=False)
    return ChannelRealization(beta, tuple(hs), tuple(ap_ids), seed)
