"""Soft-limiter power amplifier and its power-consumption models.

The nonlinearity is handled through its Bussgang decomposition for a
circularly-symmetric Gaussian drive: output = alpha * input + distortion,
with distortion uncorrelated with the input. ``gamma`` is the clipping
ratio, i.e. saturation amplitude over RMS input amplitude, so that
``gamma**2 = 10**(ibo_db / 10)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .scenario import PAClass

__all__ = [
    "PAOperatingPoint", "soft_limiter", "bussgang_gain", "avg_output_power",
    "distortion_power", "pa_consumption", "gamma_from_ibo",
]

SQRT_PI_2 = math.sqrt(math.pi) / 2.0


def gamma_from_ibo(ibo_db: float) -> float:
    return math.sqrt(10.0 ** (ibo_db / 10.0))


@dataclass(frozen=True)
class PAOperatingPoint:
    p_sat_w: float
    ibo_db: float

    def __post_init__(self):
        if not self.p_sat_w > 0:
            raise ValueError("p_sat_w must be > 0")

    @property
    def gamma(self) -> float:
        return gamma_from_ibo(self.ibo_db)

    @property
    def p_in_w(self) -> float:
        return self.p_sat_w / self.gamma ** 2

    @property
    def p_out_w(self) -> float:
        return avg_output_power(self.p_in_w, self.gamma)


def soft_limiter(sample, a_sat: float):
    """Clip the magnitude of ``sample`` at ``a_sat``, keeping the phase."""
    x = np.asarray(sample, dtype=complex)
    r = np.abs(x)
    over = r > a_sat
    scale = np.ones_like(r)
    np.divide(a_sat, r, out=scale, where=over)
    y = x * scale
    return y if y.ndim else complex(y)


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise ValueError(f"clipping ratio gamma must be > 0, got {gamma}")


def bussgang_gain(gamma: float) -> float:
    """Linear gain of a soft limiter with unit-power complex Gaussian input."""
    _check_gamma(gamma)
    if math.isinf(gamma):
        return 1.0
    return -math.expm1(-gamma * gamma) + SQRT_PI_2 * gamma * float(erfc(gamma))


def avg_output_power(p_in_w: float, gamma: float) -> float:
    _check_gamma(gamma)
    if p_in_w < 0:
        raise ValueError("p_in_w must be >= 0")
    return p_in_w * -math.expm1(-gamma * gamma)


def distortion_power(p_in_w: float, gamma: float) -> float:
    alpha = bussgang_gain(gamma)
    return max(avg_output_power(p_in_w, gamma) - alpha * alpha * p_in_w, 0.0)


def pa_consumption(model: PAClass, op: PAOperatingPoint, p_out_w: float | None = None,
                   eta_a: float = 0.5, eta_b_max: float = math.pi / 4) -> float:
    """DC power drawn by one PA.

    ``p_out_w`` defaults to the Gaussian-drive output power at ``op``.
    Class A draws ``p_sat / eta_a`` whatever the drive; class B follows the
    ideal square-root law ``sqrt(p_out * p_sat) / eta_b_max``; a perfect PA
    draws exactly what it radiates.
    """
    if p_out_w is None:
        p_out_w = op.p_out_w
    model = PAClass.parse(model)
    if model is PAClass.CLASS_A:
        return op.p_sat_w / eta_a
    if model is PAClass.CLASS_B:
        return math.sqrt(p_out_w * op.p_sat_w) / eta_b_max
    return p_out_w
