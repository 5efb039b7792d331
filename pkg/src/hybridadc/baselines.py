"""Reference receivers compared against the ADMM design.

* fully digital combining (one 8-bit ADC pair per antenna, waterfilling)
* hybrid combining with every ADC frozen at the same resolution
* brute-force search over per-ADC resolutions
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import admm
from .channel import optimal_combiner, optimal_precoder
from .exceptions import ConfigurationError
from .metrics import (
    MSE_FLOOR_DB,
    PowerModel,
    combiner_mse,
    make_evaluation,
    power,
    rate,
)
from .quantization import QuantizationBounds, delta_of_bits, quant_noise_cov

#: Largest number of resolution vectors brute force will enumerate.
DEFAULT_BF_BUDGET = 100_000


@dataclass(frozen=True)
class BaselineResult:
    label: str
    combiner: object
    eval: object


def waterfilling(gains, budget=1.0):
    """Capacity-achieving power split ``p_k = max(0, mu - 1/g_k)``.

    Parameters
    ----------
    gains : array_like
        Per-mode signal-to-noise gains ``lambda_k**2 / sigma_n2``.
    budget : float
        Total power.

    Returns
    -------
    p : ndarray
        Allocation in the input order, summing to `budget`.
    """
    g = np.asarray(gains, dtype=float)
    if budget <= 0:
        raise ValueError("budget must be positive")
    p = np.zeros_like(g)
    active = np.flatnonzero(g > 0)
    if active.size == 0:
        return p
    order = active[np.argsort(-g[active])]
    inv = 1.0 / g[order]
    # water level with the k strongest modes active
    levels = (budget + np.cumsum(inv)) / np.arange(1, order.size + 1)
    k = int(np.flatnonzero(levels > inv)[-1]) + 1
    mu = levels[k - 1]
    p[order[:k]] = mu - inv[:k]
    # exact budget after floating-point accumulation
    p[order[:k]] += (budget - p.sum()) / k
    return p


def _quantized_eval(c, comb, n_s, sigma_n2, pm, w_opt, include_phase_shifters=True):
    """Evaluate a hybrid design with the ADCs at their integer resolutions."""
    f = optimal_precoder(c, n_s)
    d_q = comb.delta_quantized
    r = rate(c.h, f, comb.w_rf, np.diag(d_q), comb.w_bb, quant_noise_cov(comb.bits), sigma_n2, n_s)
    p = power(comb.bits, c.h.shape[0], comb.n_rf, pm, include_phase_shifters)
    return make_evaluation(
        r,
        p,
        combiner_mse(w_opt, comb.w_rf, np.diag(d_q), comb.w_bb),
        mean_bits=float(np.mean(comb.bits)),
        mse_db_continuous=combiner_mse(w_opt, comb.w_rf, np.diag(comb.delta), comb.w_bb),
    )


def evaluate_hybrid(c, comb, n_s, sigma_n2, pm=PowerModel()):
    return _quantized_eval(c, comb, n_s, sigma_n2, pm, optimal_combiner(c, n_s))


def admm_design(c, n_s, n_rf, sigma_n2, cfg=admm.AdmmConfig(), pm=PowerModel(), rng=None):
    """Proposed design: ADMM with the distortion diagonal optimized."""
    w_opt = optimal_combiner(c, n_s)
    comb, trace = admm.run(w_opt, cfg, pm, rng, n_rf=n_rf)
    return BaselineResult("admm", comb, _quantized_eval(c, comb, n_s, sigma_n2, pm, w_opt)), trace


def full_digital_baseline(c, n_s, sigma_n2, pm=PowerModel(), bits=8):
    """SVD combining with waterfilling over the strongest `n_s` modes."""
    n_r = c.h.shape[0]
    lam = c.s[:n_s]
    p = waterfilling(lam**2 / sigma_n2)
    r = float(np.sum(np.log2(1.0 + p * lam**2 / sigma_n2)))
    bit_vec = np.full(n_r, bits)
    pw = power(bit_vec, n_r, n_r, pm, include_phase_shifters=False)
    ev = make_evaluation(r, pw, MSE_FLOOR_DB, mean_bits=float(bits), mse_db_continuous=MSE_FLOOR_DB)
    return BaselineResult("digital", {"w": optimal_combiner(c, n_s), "power_split": p}, ev)


def fixed_bit_hybrid(c, n_s, n_rf, b_fixed, sigma_n2, cfg=admm.AdmmConfig(), pm=PowerModel(), rng=None):
    """Hybrid design with every ADC frozen at `b_fixed` bits."""
    b = cfg.bounds
    if not 1 <= b_fixed <= max(b.b_max, 8):
        raise ConfigurationError(f"b_fixed={b_fixed} outside the supported range")
    w_opt = optimal_combiner(c, n_s)
    frozen = np.full(n_rf, delta_of_bits(b_fixed))
    comb, _ = admm.run(w_opt, cfg, pm, rng, n_rf=n_rf, frozen_delta=frozen)
    comb = admm.HybridCombiner(comb.w_rf, comb.delta, comb.w_bb, np.full(n_rf, int(b_fixed)))
    return BaselineResult(f"hybrid{b_fixed}", comb, _quantized_eval(c, comb, n_s, sigma_n2, pm, w_opt))


def enumerate_bits(n_rf, bounds, uniform_only=False):
    levels = bounds.levels
    if uniform_only:
        return [np.full(n_rf, b) for b in levels]
    return [np.array(v) for v in itertools.product(levels, repeat=n_rf)]


def brute_force(
    c,
    n_s,
    l_r_max,
    sigma_n2,
    bounds=QuantizationBounds(),
    cfg=admm.AdmmConfig(n_max=20),
    pm=PowerModel(),
    rng=None,
    search_rf=False,
    uniform_only=False,
    budget=DEFAULT_BF_BUDGET,
    reuse_design=True,
):
    """Exhaustive search over ADC resolution vectors (and optionally RF chains).

    Each candidate is designed with the frozen-distortion ADMM. Frozen runs
    start from a baseband matrix scaled by the inverse distortion, which
    makes the designed product independent of the candidate. When
    ``n_rf == n_s`` the factors are then unique up to that scaling, so by
    default one design is rescaled for every candidate. With extra RF chains
    the analog step is rank deficient and the split between the factors is
    not scale-equivariant in floating point, so those counts always run the
    solver per candidate (as does ``reuse_design=False``).

    Returns
    -------
    BaselineResult
        Best-EE candidate. ``combiner`` is its HybridCombiner.
    """
    rf_counts = range(n_s, l_r_max + 1) if search_rf else [l_r_max]
    levels = bounds.b_max - bounds.b_min + 1
    total = sum(levels if uniform_only else levels**k for k in rf_counts)
    if total > budget:
        raise ConfigurationError(f"brute force needs {total} candidates, budget is {budget}")
    rng = np.random.default_rng(rng)
    seed = int(rng.integers(2**63))
    w_opt = optimal_combiner(c, n_s)
    f = optimal_precoder(c, n_s)
    n_r = c.h.shape[0]
    best = None
    for n_rf in rf_counts:
        if not n_s <= n_rf <= n_r:
            raise ConfigurationError(f"n_rf={n_rf} violates n_s <= n_rf <= n_r")
        ref = None
        for bits in enumerate_bits(n_rf, bounds, uniform_only):
            d = np.atleast_1d(delta_of_bits(bits))
            if reuse_design and n_rf == n_s:
                if ref is None:
                    ref, _ = admm.run(w_opt, cfg, pm, np.random.default_rng(seed), n_rf, frozen_delta=d)
                w_bb = ref.w_bb * (ref.delta / d)[:, None]
                comb = admm.HybridCombiner(ref.w_rf, d, w_bb, bits)
            else:
                comb, _ = admm.run(w_opt, cfg, pm, np.random.default_rng(seed), n_rf, frozen_delta=d)
                comb = admm.HybridCombiner(comb.w_rf, comb.delta, comb.w_bb, bits)
            r = rate(c.h, f, comb.w_rf, np.diag(d), comb.w_bb, quant_noise_cov(bits), sigma_n2, n_s)
            ee = r / power(bits, n_r, n_rf, pm)
            if best is None or ee > best[0]:
                best = (ee, comb)
    comb = best[1]
    return BaselineResult("bf", comb, _quantized_eval(c, comb, n_s, sigma_n2, pm, w_opt))
