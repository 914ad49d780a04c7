"""
Zero-forcing precoding at a single AP
======================================

Draw a channel for a handful of UEs around one AP, build the normalized
ZF precoder and look at the effective channel: a diagonal matrix up to
rounding error.
"""

import numpy as np

from cfrem.channel import draw_channel
from cfrem.precoding import build_precoders, sinr, spectral_efficiency, zf_precoder
from cfrem.scenario import APConfig, PathLossParams, Scenario, UELocationPattern

sc = Scenario(aps=(APConfig(0, (250.0, 250.0, 10.0), 8, 30.0),),
              pathloss=PathLossParams(30.5, 36.7, 0.0))
ues = UELocationPattern([(220.0, 240.0), (270.0, 300.0), (300.0, 230.0), (240.0, 190.0)])
ch = draw_channel(sc, ues, seed=3)

W = zf_precoder(ch.h[0])
G = np.abs(ch.h[0] @ W)
np.set_printoptions(precision=3, suppress=False)
print("|H W| normalized by its diagonal:")
print(G / np.diag(G)[:, None])

pcs = build_precoders({0: [0, 1, 2, 3]}, ch, [sc.aps[0].p_max_w])
for k in range(len(ues)):
    s = sinr(k, pcs, ch, [1.0], [0.0], sc.noise_w)
    print(f"UE {k}: SINR {10 * np.log10(s):5.1f} dB, SE {spectral_efficiency(s):.2f} bit/s/Hz")
