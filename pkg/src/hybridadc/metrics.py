"""Rate, power and energy-efficiency evaluation of a combiner design."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DegenerateDesignError, InvalidInputError
from .numerics import logdet2_hpd
from .quantization import AQNM_CONST

#: Value reported for the MSE of an exact factorization (log of zero).
MSE_FLOOR_DB = -300.0


@dataclass(frozen=True)
class PowerModel:
    """Receiver power constants in Watts.

    `p_adc` is the power per ADC resolution unit (multiplies ``2**b``),
    `p_cp` the circuit floor, `p_r` the per-antenna RF front-end cost and
    `p_ps` the cost of one phase shifter.
    """

    p_adc: float = 0.1
    p_cp: float = 10.0
    p_r: float = 0.1
    p_ps: float = 0.01

    def __post_init__(self):
        for name in ("p_adc", "p_cp", "p_r", "p_ps"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Evaluation:
    rate: float
    power: float
    ee: float
    se: float
    mse_db: float
    mean_bits: float = float("nan")
    mse_db_continuous: float = float("nan")


def _diag(delta):
    delta = np.asarray(delta)
    return np.diag(delta) if delta.ndim == 1 else delta


def combined_noise_cov(w_rf, delta, w_bb, c_eps, sigma_n2):
    """Covariance of thermal plus quantization noise after combining.

    ``R = s2 * W_BB^H D^H W_RF^H W_RF D W_BB + W_BB^H C_eps W_BB``
    """
    if sigma_n2 <= 0:
        raise InvalidInputError("noise variance must be positive")
    delta = _diag(delta)
    w = w_rf @ delta @ w_bb
    r = sigma_n2 * (w.conj().T @ w) + w_bb.conj().T @ _diag(c_eps) @ w_bb
    return 0.5 * (r + r.conj().T)


def rate(h, f, w_rf, delta, w_bb, c_eps, sigma_n2, n_s):
    """Achievable rate in bits/s (B = 1 Hz) of the hybrid receive chain.

    Evaluates ``log2|I + R^{-1} G / n_s|`` in the whitened Hermitian form
    ``log2|I + L^{-1} G L^{-H} / n_s|`` with ``R = L L^H``.

    Raises
    ------
    DegenerateDesignError
        If the combined noise covariance is not positive definite.
    """
    r_eta = combined_noise_cov(w_rf, delta, w_bb, c_eps, sigma_n2)
    try:
        chol = scipy.linalg.cholesky(r_eta, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DegenerateDesignError("combined noise covariance is singular") from exc
    m = scipy.linalg.solve_triangular(chol, (w_rf @ _diag(delta) @ w_bb).conj().T @ h @ f, lower=True)
    g = np.eye(r_eta.shape[0]) + (m @ m.conj().T) / n_s
    return max(logdet2_hpd(0.5 * (g + g.conj().T)), 0.0)


def adc_power(bits, p_adc):
    """Total ADC power ``p_adc * sum 2**b``."""
    return float(p_adc * np.sum(np.exp2(np.asarray(bits, dtype=float))))


def adc_power_from_delta(delta, p_adc):
    """ADC power written in terms of the distortion diagonal."""
    d = np.asarray(delta, dtype=float)
    return float(p_adc * np.sum(np.sqrt(AQNM_CONST / (1.0 - d * d))))


def power(bits, n_r, l_r, pm, include_phase_shifters=True):
    """Total receiver power in Watts."""
    bits = np.atleast_1d(bits)
    if bits.size != l_r:
        raise InvalidInputError(f"expected {l_r} ADC resolutions, got {bits.size}")
    total = adc_power(bits, pm.p_adc) + n_r * pm.p_r + pm.p_cp
    if include_phase_shifters:
        total += n_r * l_r * pm.p_ps
    return float(total)


def energy_efficiency(rate, power):
    if power <= 0:
        raise InvalidInputError("power must be positive")
    return rate / power


def combiner_mse(w_opt, w_rf, delta, w_bb):
    """Squared Frobenius distance to the optimal combiner, in dB."""
    err = np.linalg.norm(w_opt - w_rf @ _diag(delta) @ w_bb) ** 2
    if err <= 0:
        return MSE_FLOOR_DB
    return max(10.0 * np.log10(err), MSE_FLOOR_DB)


def make_evaluation(rate_value, power_value, mse_db, bandwidth=1.0, **extra):
    return Evaluation(
        rate=rate_value,
        power=power_value,
        ee=energy_efficiency(rate_value, power_value),
        se=rate_value / bandwidth,
        mse_db=mse_db,
        **extra,
    )
