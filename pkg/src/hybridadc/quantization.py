"""Additive quantization noise model (AQNM) for per-chain ADC resolutions.

A ``b``-bit ADC is modelled as ``Q(x) = delta * x + eps`` where

    delta(b) = sqrt(1 - k(b)),   k(b) = (pi * sqrt(3) / 2) * 2**(-2b)

and ``eps`` has variance ``delta**2 * (1 - delta**2)``. Bits may be
fractional inside the optimizer; integers appear only via `round_bits`.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DomainError

#: pi * sqrt(3) / 2, the constant of the AQNM distortion law.
AQNM_CONST = np.pi * np.sqrt(3.0) / 2.0

#: Smallest resolution for which delta(b) is real.
MIN_REAL_BITS = 0.5 * np.log2(AQNM_CONST)


@dataclass(frozen=True)
class QuantizationBounds:
    """Integer resolution range ``[b_min, b_max]`` shared by every ADC."""

    b_min: int = 1
    b_max: int = 8

    def __post_init__(self):
        if int(self.b_min) != self.b_min or int(self.b_max) != self.b_max:
            raise ConfigurationError("bit bounds must be integers")
        if not 1 <= self.b_min <= self.b_max:
            raise ConfigurationError(
                f"need 1 <= b_min <= b_max, got b_min={self.b_min}, b_max={self.b_max}"
            )

    @property
    def delta_range(self):
        """Box ``[delta(b_min), delta(b_max)]`` for the distortion diagonal."""
        return float(delta_of_bits(self.b_min)), float(delta_of_bits(self.b_max))

    @property
    def levels(self):
        return np.arange(self.b_min, self.b_max + 1)


def delta_of_bits(b):
    """Multiplicative distortion for resolution `b` (scalar or array)."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise DomainError("bit resolution must be non-negative")
    arg = 1.0 - AQNM_CONST * np.exp2(-2.0 * b)
    if np.any(arg < 0):
        raise DomainError(f"delta(b) is undefined for b < {MIN_REAL_BITS:.4f}")
    out = np.sqrt(arg)
    return out.item() if out.ndim == 0 else out


def bits_of_delta(d):
    """Inverse of `delta_of_bits`: ``0.5 * log2(k0 / (1 - d**2))``."""
    d = np.asarray(d, dtype=float)
    if np.any((d <= 0) | (d >= 1)):
        raise DomainError("distortion must lie in the open interval (0, 1)")
    # (1 - d)(1 + d) keeps full relative accuracy as d -> 1
    out = 0.5 * np.log2(AQNM_CONST / ((1.0 - d) * (1.0 + d)))
    return out.item() if out.ndim == 0 else out


def round_bits(delta, bounds=QuantizationBounds()):
    """Nearest-integer resolution for each distortion entry, clamped to `bounds`.

    Ties round half away from zero. Entries at or beyond the (0, 1) edges
    clamp to the corresponding bound instead of raising.
    """
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    lo_edge = d <= 0.0
    hi_edge = d >= 1.0
    safe = np.clip(d, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    cont = np.asarray(bits_of_delta(safe), dtype=float)
    rounded = np.floor(cont + 0.5)
    rounded[lo_edge] = bounds.b_min
    rounded[hi_edge] = bounds.b_max
    return np.clip(rounded, bounds.b_min, bounds.b_max).astype(int)


def quant_noise_var(bits):
    """Per-chain AQNM noise variance ``(1 - k) k`` with ``k = k0 * 2**(-2b)``."""
    k = AQNM_CONST * np.exp2(-2.0 * np.asarray(bits, dtype=float))
    return (1.0 - k) * k


def quant_noise_cov(bits):
    """Diagonal quantization-noise covariance ``C_eps`` for a bit vector."""
    return np.diag(np.atleast_1d(quant_noise_var(bits))).astype(float)
