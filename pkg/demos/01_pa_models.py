"""
Soft-limiter PA: Bussgang gain, distortion and power draw
==========================================================

A complex Gaussian drive is clipped at the saturation amplitude. The
closed forms below are compared with a sample estimate, then turned into
per-antenna power consumption for the three PA classes.
"""

import numpy as np

from cfrem.pa import (PAOperatingPoint, avg_output_power, bussgang_gain, distortion_power,
                      gamma_from_ibo, pa_consumption, soft_limiter)
from cfrem.scenario import PAClass

rng = np.random.default_rng(0)
x = (rng.standard_normal(10 ** 6) + 1j * rng.standard_normal(10 ** 6)) / np.sqrt(2)

# Clipping gets milder as the back-off grows
print(f"{'IBO dB':>6} {'gamma':>7} {'alpha':>8} {'alpha MC':>8} {'p_out':>7} {'dist':>9}")
for ibo in (0.0, 3.0, 6.0, 9.0):
    g = gamma_from_ibo(ibo)
    y = soft_limiter(x, g)
    alpha_mc = np.mean((np.conj(x) * y).real)
    print(f"{ibo:6.1f} {g:7.4f} {bussgang_gain(g):8.5f} {alpha_mc:8.5f} "
          f"{avg_output_power(1.0, g):7.4f} {distortion_power(1.0, g):9.2e}")

# Power draw of one micro-AP antenna (30 dBm over 32 antennas) at 6 dB IBO
op = PAOperatingPoint(1.0 / 32, 6.0)
print(f"\np_sat = {op.p_sat_w * 1e3:.2f} mW, drive = {op.p_in_w * 1e3:.2f} mW")
for frac in (0.05, 0.25, 1.0):
    p_out = frac * op.p_out_w
    draws = {m.value: pa_consumption(m, op, p_out) * 1e3 for m in PAClass}
    print(f"output {p_out * 1e3:6.3f} mW -> " + ", ".join(f"{k} {v:6.2f} mW" for k, v in draws.items()))
