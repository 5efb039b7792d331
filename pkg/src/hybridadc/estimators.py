"""Scikit-learn style wrappers around the combiner designs.

Every estimator is fitted on a channel (a matrix or a ChannelRealization):

>>> est = ADMMCombiner(gamma=0.01, random_state=0).fit(H)   # doctest: +SKIP
>>> r = est.transform(Y)          # (n_samples, n_rx) -> (n_samples, n_streams)
>>> est.score(H)                  # energy efficiency in bits/Joule

Hyper-parameters follow the usual ``get_params``/``set_params`` protocol,
and fitted attributes carry a trailing underscore.
"""

import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import admm, baselines
from .metrics import PowerModel
from .quantization import QuantizationBounds
from .validation import check_channel, check_received, check_scalar


class _CombinerMixin:
    """Shared transform/score logic; subclasses implement ``fit``."""

    def _power_model(self):
        return self.power_model if self.power_model is not None else PowerModel()

    @property
    def _sigma_n2(self):
        return 10.0 ** (-self.snr_db / 10.0)

    def _set_fitted(self, c, result, trace=None):
        self.channel_ = c
        self.evaluation_ = result.eval
        self.n_features_in_ = c.h.shape[0]
        comb = result.combiner
        if isinstance(comb, admm.HybridCombiner):
            self.combiner_ = comb
            self.w_rf_ = comb.w_rf
            self.delta_ = comb.delta
            self.w_bb_ = comb.w_bb
            self.bits_ = comb.bits
            self.combiner_matrix_ = comb.w_rf @ (comb.delta_quantized[:, None] * comb.w_bb)
        else:
            self.combiner_ = comb
            self.combiner_matrix_ = comb["w"]
            self.bits_ = np.full(c.h.shape[0], self.n_bits)
        if trace is not None:
            self.trace_ = trace
        return self

    def transform(self, Y):
        """Combine received snapshots: row-wise ``W^H y``."""
        check_is_fitted(self, "combiner_matrix_")
        Y = check_received(Y, self.n_features_in_)
        return Y @ self.combiner_matrix_.conj()

    def evaluate(self, H=None):
        """Rate, power and efficiency of the fitted design on channel `H`.

        Without `H`, the evaluation recorded at fit time is returned.
        """
        check_is_fitted(self, "combiner_matrix_")
        if H is None:
            return self.evaluation_
        c = check_channel(H)
        if isinstance(self.combiner_, admm.HybridCombiner):
            return baselines.evaluate_hybrid(c, self.combiner_, self.n_streams, self._sigma_n2, self._power_model())
        return baselines.full_digital_baseline(c, self.n_streams, self._sigma_n2, self._power_model(), self.n_bits).eval

    def score(self, H, y=None):
        """Energy efficiency (bits/Joule) on channel `H`."""
        return self.evaluate(H).ee


class ADMMCombiner(_CombinerMixin, BaseEstimator):
    """Joint bit allocation and hybrid combining by ADMM matrix factorization.

    Parameters
    ----------
    n_streams : int
    n_rf : int
        Number of RF chains (ADCs).
    gamma : float
        Weight of receiver power against the factorization error.
    alpha : float
        Augmented-Lagrangian penalty.
    n_max : int
        Number of ADMM iterations.
    b_min, b_max : int
        ADC resolution range.
    snr_db : float
        ``10 log10(1 / noise variance)`` used for evaluation.
    power_model : PowerModel, optional
    random_state : int, Generator or None

    Attributes
    ----------
    w_rf_, delta_, w_bb_ : ndarray
        Analog combiner, continuous distortion diagonal, baseband combiner.
    bits_ : ndarray of int
        Selected resolution per ADC.
    trace_ : list of TraceRecord
    evaluation_ : Evaluation
    """

    def __init__(self, n_streams=4, n_rf=4, gamma=0.01, alpha=1.0, n_max=40, b_min=1, b_max=8,
                 snr_db=20.0, power_model=None, random_state=None):
        self.n_streams = n_streams
        self.n_rf = n_rf
        self.gamma = gamma
        self.alpha = alpha
        self.n_max = n_max
        self.b_min = b_min
        self.b_max = b_max
        self.snr_db = snr_db
        self.power_model = power_model
        self.random_state = random_state

    def _admm_config(self, n_max=None):
        check_scalar(self.gamma, "gamma", min_val=0)
        check_scalar(self.alpha, "alpha", min_val=0, include_min=False)
        return admm.AdmmConfig(
            alpha=self.alpha, gamma=self.gamma, n_max=self.n_max if n_max is None else n_max,
            bounds=QuantizationBounds(self.b_min, self.b_max),
        )

    def fit(self, H, y=None):
        c = check_channel(H)
        check_scalar(self.n_streams, "n_streams", numbers.Integral, 1)
        result, trace = baselines.admm_design(
            c, self.n_streams, self.n_rf, self._sigma_n2, self._admm_config(), self._power_model(),
            np.random.default_rng(self.random_state),
        )
        return self._set_fitted(c, result, trace)


class FixedBitCombiner(_CombinerMixin, BaseEstimator):
    """Hybrid combiner with every ADC at `n_bits` (distortion update disabled)."""

    def __init__(self, n_bits=1, n_streams=4, n_rf=4, alpha=1.0, n_max=40, snr_db=20.0,
                 power_model=None, random_state=None):
        self.n_bits = n_bits
        self.n_streams = n_streams
        self.n_rf = n_rf
        self.alpha = alpha
        self.n_max = n_max
        self.snr_db = snr_db
        self.power_model = power_model
        self.random_state = random_state

    def fit(self, H, y=None):
        c = check_channel(H)
        check_scalar(self.n_bits, "n_bits", numbers.Integral, 1, 8)
        cfg = admm.AdmmConfig(alpha=self.alpha, gamma=0.0, n_max=self.n_max)
        result = baselines.fixed_bit_hybrid(
            c, self.n_streams, self.n_rf, self.n_bits, self._sigma_n2, cfg, self._power_model(),
            np.random.default_rng(self.random_state),
        )
        return self._set_fitted(c, result)


class BruteForceCombiner(_CombinerMixin, BaseEstimator):
    """Exhaustive search over per-ADC resolutions for the best efficiency."""

    def __init__(self, n_streams=4, n_rf=4, alpha=1.0, n_max=20, b_min=1, b_max=8, search_rf=False,
                 uniform_only=False, snr_db=20.0, power_model=None, random_state=None):
        self.n_streams = n_streams
        self.n_rf = n_rf
        self.alpha = alpha
        self.n_max = n_max
        self.b_min = b_min
        self.b_max = b_max
        self.search_rf = search_rf
        self.uniform_only = uniform_only
        self.snr_db = snr_db
        self.power_model = power_model
        self.random_state = random_state

    def fit(self, H, y=None):
        c = check_channel(H)
        bounds = QuantizationBounds(self.b_min, self.b_max)
        cfg = admm.AdmmConfig(alpha=self.alpha, gamma=0.0, n_max=self.n_max, bounds=bounds)
        result = baselines.brute_force(
            c, self.n_streams, self.n_rf, self._sigma_n2, bounds, cfg, self._power_model(),
            np.random.default_rng(self.random_state), search_rf=self.search_rf,
            uniform_only=self.uniform_only,
        )
        return self._set_fitted(c, result)


class DigitalCombiner(_CombinerMixin, BaseEstimator):
    """Fully digital SVD combiner: one `n_bits` ADC pair per antenna."""

    def __init__(self, n_streams=4, n_bits=8, snr_db=20.0, power_model=None):
        self.n_streams = n_streams
        self.n_bits = n_bits
        self.snr_db = snr_db
        self.power_model = power_model

    def fit(self, H, y=None):
        c = check_channel(H)
        result = baselines.full_digital_baseline(c, self.n_streams, self._sigma_n2, self._power_model(), self.n_bits)
        return self._set_fitted(c, result)

