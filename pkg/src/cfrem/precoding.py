"""Serving clusters, per-AP zero-forcing precoding and downlink SINR."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization

__all__ = [
    "ClusterAssignment", "APPrecoder", "PrecoderSet", "ClusterOversubscribed",
    "SingularChannelError", "form_clusters", "zf_precoder", "build_precoders",
    "sinr", "spectral_efficiency",
]

SINGULAR_TOL = 1e-12


class ClusterOversubscribed(ValueError):
    pass


class SingularChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """``serving[a, k]`` is True when AP (index) a belongs to the cluster of UE k."""

    serving: np.ndarray
    no_ap: int

    def cluster(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.serving[:, k])

    def served_by(self, a: int) -> np.ndarray:
        return np.flatnonzero(self.serving[a])


def form_clusters(beta, ap_powers, no_ap: int, ap_ids=None) -> ClusterAssignment:
    """Serve each UE by the ``no_ap`` APs with the largest received power ``beta * power``.

    Ties go to the lower AP id (AP index when ``ap_ids`` is omitted).
    """
    if no_ap < 1:
        raise ValueError("no_ap must be >= 1")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise ValueError("large-scale gains must be strictly positive")
    n_ap, n_ue = beta.shape
    score = beta * np.asarray(ap_powers, dtype=float)[:, None]
    ids = np.arange(n_ap) if ap_ids is None else np.asarray(ap_ids)
    n_sel = min(no_ap, n_ap)
    serving = np.zeros((n_ap, n_ue), dtype=bool)
    for k in range(n_ue):
        order = np.lexsort((ids, -score[:, k]))
        serving[order[:n_sel], k] = True
    serving.setflags(write=False)
    return ClusterAssignment(serving, no_ap)


def zf_precoder(h_rows, m: int | None = None) -> np.ndarray:
    """Unit-norm zero-forcing directions for the K users whose channels are ``h_rows``.

    Returns an (M, K) matrix W with ``h_rows @ W`` diagonal and real positive.
    """
    H = np.atleast_2d(np.asarray(h_rows, dtype=complex))
    k, m_h = H.shape
    m = m_h if m is None else m
    if m_h != m:
        raise ValueError(f"channel vectors have length {m_h}, expected {m}")
    if k > m:
        raise ClusterOversubscribed(f"cluster oversubscribed: {k} users on {m} antennas")
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] <= SINGULAR_TOL * s[0]:
        raise SingularChannelError("singular channel: served channel matrix is rank deficient")
    Hh = H.conj().T
    W = Hh @ np.linalg.inv(H @ Hh)
    return W / np.linalg.norm(W, axis=0)


@dataclass(frozen=True, eq=False)
class APPrecoder:
    ues: np.ndarray        # served UE indices, one per column of weights
    weights: np.ndarray    # (M, K) unit-norm columns
    powers: np.ndarray     # (K,) watts


@dataclass(eq=False)
class PrecoderSet:
    """Per-AP precoders for one slot, keyed by AP index."""

    per_ap: dict = field(default_factory=dict)

    def serving_aps(self, k: int) -> list[int]:
        return [a for a, pc in self.per_ap.items() if k in pc.ues]


def build_precoders(served: dict, channel: ChannelRealization, p_in_w) -> PrecoderSet:
    """ZF precoders with equal power split: ``served`` maps AP index to UE indices."""
    per_ap = {}
    for a, ues in served.items():
        ues = np.asarray(sorted(ues) if isinstance(ues, (set, frozenset)) else ues, dtype=int)
        if len(ues) == 0:
            continue
        h_a = channel.h[a]
        W = zf_precoder(h_a[ues], h_a.shape[1])
        powers = np.full(len(ues), p_in_w[a] / len(ues))
        per_ap[a] = APPrecoder(ues, W, powers)
    return PrecoderSet(per_ap)


def sinr(k: int, precoders: PrecoderSet, channel: ChannelRealization,
         alpha, distortion, noise_w: float) -> float:
    """Downlink SINR of UE ``k`` in one slot.

    Serving APs add coherently; streams to other UEs and the PA distortion of
    every transmitting AP (``distortion[a] * beta[a, k]``) count as interference.
    APs absent from ``precoders`` are silent.
    """
    if not 0 <= k < channel.n_ue:
        raise ValueError(f"UE index {k} out of range for {channel.n_ue} UEs")
    amp = 0.0 + 0.0j
    interference = 0.0
    dist = 0.0
    for a, pc in precoders.per_ap.items():
        if pc.weights.shape[0] != channel.h[a].shape[1]:
            raise ValueError(f"AP {a}: precoder length does not match antenna count")
        g = channel.h[a][k] @ pc.weights
        for col, j in enumerate(pc.ues):
            if j == k:
                amp += alpha[a] * math.sqrt(pc.powers[col]) * g[col]
            else:
                interference += alpha[a] ** 2 * pc.powers[col] * abs(g[col]) ** 2
        dist += distortion[a] * channel.beta[a, k]
    return abs(amp) ** 2 / (interference + dist + noise_w)


def spectral_efficiency(sinr: float, impl_loss: float = 0.75, se_max: float = 7.8) -> float:
    """Truncated-Shannon MCS mapping in bits/s/Hz."""
    if sinr < 0:
        raise ValueError(f"SINR must be >= 0, got {sinr}")
    return min(impl_loss * math.log2(1.0 + sinr), se_max)
