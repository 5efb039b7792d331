"""ADMM factorization of the optimal combiner into ``W_RF diag(d) W_BB``.

The solver minimizes

    1/2 ||W_opt - Z||^2 + gamma * P(d)
    s.t. Z = W_RF diag(d) W_BB, |W_RF[k, l]| = 1, d in [delta(b_min), delta(b_max)]

by cycling closed-form updates of ``Z``, ``W_RF`` (least squares followed by
a unit-modulus projection) and ``W_BB``, a box-constrained convex update of
the distortion diagonal ``d``, and a dual ascent step on the multiplier.
The loop always runs the full iteration budget; there is no early exit.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, InvalidInputError
from .metrics import PowerModel, adc_power_from_delta, combiner_mse
from .numerics import solve_hpd
from .quantization import AQNM_CONST, QuantizationBounds, delta_of_bits, round_bits

_RIDGE = 1e-10
_MAX_COND = 1e12
_ARMIJO = 1e-4


class SolverError(RuntimeError):
    """An ADMM step failed; `trace` holds the records collected so far."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class AdmmConfig:
    alpha: float = 1.0
    gamma: float = 0.01
    n_max: int = 40
    delta_step_tol: float = 1e-6
    delta_step_max_iter: int = 500
    bounds: QuantizationBounds = QuantizationBounds()

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidInputError("alpha must be positive")
        if self.gamma < 0:
            raise InvalidInputError("gamma must be non-negative")
        if self.n_max < 1:
            raise InvalidInputError("n_max must be >= 1")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    mse_db: float
    primal_residual: float
    lagrangian: float
    delta_converged: bool = True


@dataclass
class AdmmState:
    """Iterates of the solver. `delta` stores only the diagonal."""

    z: np.ndarray
    w_rf: np.ndarray
    delta: np.ndarray
    w_bb: np.ndarray
    lam: np.ndarray
    iter: int = 0
    trace: list = field(default_factory=list)

    @property
    def product(self):
        return self.w_rf @ (self.delta[:, None] * self.w_bb)

    def copy(self):
        return AdmmState(
            self.z.copy(), self.w_rf.copy(), self.delta.copy(), self.w_bb.copy(),
            self.lam.copy(), self.iter, list(self.trace),
        )


@dataclass(frozen=True)
class HybridCombiner:
    """Analog combiner, ADC distortion diagonal, baseband combiner and bits.

    `delta` is the continuous diagonal returned by the solver; `bits` are
    its rounded integer resolutions and `delta_quantized` the distortion
    those integers actually realize.
    """

    w_rf: np.ndarray
    delta: np.ndarray
    w_bb: np.ndarray
    bits: np.ndarray

    @property
    def delta_quantized(self):
        return np.atleast_1d(delta_of_bits(self.bits))

    @property
    def matrix(self):
        return self.w_rf @ (self.delta[:, None] * self.w_bb)

    @property
    def n_rf(self):
        return self.w_rf.shape[1]


def _crandn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def initialize(rng, n_r, n_rf, n_s, bounds=QuantizationBounds(), frozen_delta=None):
    """Random starting point with a zero multiplier.

    With `frozen_delta`, the diagonal is fixed and the baseband start is
    ``G / d`` for Gaussian ``G``, so the trajectory of the product
    ``diag(d) W_BB`` does not depend on the frozen values.
    """
    lo, hi = bounds.delta_range
    z = _crandn(rng, (n_r, n_s))
    w_rf = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, (n_r, n_rf)))
    delta = rng.uniform(lo, hi, n_rf)
    w_bb = _crandn(rng, (n_rf, n_s))
    if frozen_delta is not None:
        delta = np.array(frozen_delta, dtype=float)
        if delta.shape != (n_rf,):
            raise InvalidInputError(f"frozen_delta must have {n_rf} entries")
        w_bb = w_bb / delta[:, None]
    return AdmmState(z, w_rf, delta, w_bb, np.zeros((n_r, n_s), dtype=complex))


def z_step(state, w_opt, alpha):
    """Exact minimizer of the auxiliary-variable subproblem."""
    return (w_opt - state.lam + alpha * state.product) / (1.0 + alpha)


def project_unit_modulus(a):
    """Entrywise phase projection; zero entries stay zero."""
    a = np.asarray(a, dtype=complex)
    mag = np.abs(a)
    out = np.zeros_like(a)
    nz = mag > 0
    out[nz] = a[nz] / mag[nz]
    return out


def _solve_with_ridge(a, b):
    # rank-deficient whenever n_rf > n_s for the analog update
    if np.linalg.cond(a) < _MAX_COND:
        try:
            return solve_hpd(a, b)
        except DomainError:
            pass
    n = a.shape[0]
    ridge = _RIDGE * max(np.trace(a).real / n, np.finfo(float).tiny)
    return solve_hpd(a + ridge * np.eye(n), b)


def wrf_unconstrained(state, alpha):
    """Least-squares analog combiner before the phase projection.

    Returns ``B (D W_BB)^H C^{-1}`` with ``B = Lambda + alpha Z`` and
    ``C = alpha (D W_BB)(D W_BB)^H``.
    """
    b = state.lam + alpha * state.z
    dw = state.delta[:, None] * state.w_bb
    c = alpha * (dw @ dw.conj().T)
    return _solve_with_ridge(c, dw @ b.conj().T).conj().T


def wrf_step(state, alpha):
    return project_unit_modulus(wrf_unconstrained(state, alpha))


def delta_design_matrix(w_rf, w_bb):
    """Linear map from the distortion diagonal to ``vec(W_RF diag(d) W_BB)``.

    Column ``i`` is ``vec(w_rf[:, i] w_bb[i, :])`` (column-major vec), i.e.
    the diagonal columns of ``W_BB^T kron W_RF``.
    """
    n_r, n_rf = w_rf.shape
    n_s = w_bb.shape[1]
    # outer[k, s, i] = w_rf[k, i] * w_bb[i, s]; column-major vec runs k fastest
    outer = w_rf[:, None, :] * w_bb.T[None, :, :]
    return outer.transpose(1, 0, 2).reshape(n_r * n_s, n_rf)


def _adc_cost(d):
    return np.sqrt(AQNM_CONST / (1.0 - d * d))


def delta_objective(d, a, y, gamma, alpha, p_adc):
    """``alpha ||y - A d||^2 + gamma * p_adc * sum sqrt(k0 / (1 - d^2))``."""
    r = y - a @ d
    return alpha * float(np.vdot(r, r).real) + gamma * p_adc * float(np.sum(_adc_cost(d)))


def solve_delta_box(a, y, d0, gamma, alpha, p_adc, lo, hi, tol=1e-6, max_iter=500):
    """Projected gradient descent with Armijo backtracking on the box.

    The first line search starts at step 1.0, later ones at twice the last
    accepted step (capped at 1.0); steps shrink by half until sufficient
    decrease holds.

    Returns
    -------
    d : ndarray
        Feasible iterate; never worse than the clipped start.
    converged : bool
        Whether the projected-gradient norm fell below `tol`.
    """
    q = 2.0 * alpha * (a.conj().T @ a).real
    c = 2.0 * alpha * (a.conj().T @ y).real
    const = alpha * float(np.vdot(y, y).real)
    w = gamma * p_adc

    def f(d):
        return 0.5 * (d @ (q @ d)) - c @ d + const + w * np.sqrt(AQNM_CONST / (1.0 - d * d)).sum()

    def grad(d):
        one_minus = 1.0 - d * d
        return q @ d - c + w * np.sqrt(AQNM_CONST / one_minus) * d / one_minus

    def proj_gap(d, g):
        return np.linalg.norm(d - np.minimum(np.maximum(d - g, lo), hi))

    d = np.minimum(np.maximum(np.asarray(d0, dtype=float), lo), hi)
    fd = f(d)
    step = 0.5
    for _ in range(max_iter):
        g = grad(d)
        if proj_gap(d, g) < tol:
            return d, True
        t = min(1.0, 2.0 * step)
        while True:
            d_new = np.minimum(np.maximum(d - t * g, lo), hi)
            f_new = f(d_new)
            if f_new <= fd + _ARMIJO * (g @ (d_new - d)):
                break
            t *= 0.5
            if t < 1e-20:
                # no representable decrease left
                return d, False
        d, fd, step = d_new, f_new, t
    return d, bool(proj_gap(d, grad(d)) < tol)


def delta_step(state, gamma, alpha, pm, bounds, tol=1e-6, max_iter=500):
    """Distortion update from the current ``Z``, ``Lambda``, ``W_RF``, ``W_BB``.

    Returns ``(d, converged)``.
    """
    lo, hi = bounds.delta_range
    a = delta_design_matrix(state.w_rf, state.w_bb)
    y = (state.z + state.lam / alpha).ravel(order="F")
    return solve_delta_box(a, y, state.delta, gamma, alpha, pm.p_adc, lo, hi, tol, max_iter)


def wbb_step(state, alpha):
    """Least-squares baseband combiner ``D^{-1} (W_RF diag(d))^H B``."""
    b = state.lam + alpha * state.z
    m = state.w_rf * state.delta[None, :]
    return _solve_with_ridge(alpha * (m.conj().T @ m), m.conj().T @ b)


def dual_update(state, alpha):
    return state.lam + alpha * (state.z - state.product)


def lagrangian(state, w_opt, alpha, gamma, pm):
    """Augmented Lagrangian at a feasible state (indicator terms vanish)."""
    n_r, n_rf = state.w_rf.shape
    p_total = adc_power_from_delta(state.delta, pm.p_adc) + n_r * pm.p_r + n_r * n_rf * pm.p_ps + pm.p_cp
    fit = 0.5 * np.linalg.norm(w_opt - state.z) ** 2
    pen = 0.5 * alpha * np.linalg.norm(state.z + state.lam / alpha - state.product) ** 2
    return float(fit + pen + gamma * p_total)


def iterate(state, w_opt, cfg, pm, freeze_delta=False):
    """One full sweep of updates; mutates and returns `state`."""
    alpha = cfg.alpha
    state.z = z_step(state, w_opt, alpha)
    state.w_rf = wrf_step(state, alpha)
    converged = True
    if not freeze_delta:
        state.delta, converged = delta_step(
            state, cfg.gamma, alpha, pm, cfg.bounds, cfg.delta_step_tol, cfg.delta_step_max_iter
        )
    state.w_bb = wbb_step(state, alpha)
    state.lam = dual_update(state, alpha)
    state.iter += 1
    state.trace.append(
        TraceRecord(
            iteration=state.iter,
            mse_db=combiner_mse(w_opt, state.w_rf, np.diag(state.delta), state.w_bb),
            primal_residual=float(np.linalg.norm(state.z - state.product)),
            lagrangian=lagrangian(state, w_opt, alpha, cfg.gamma, pm),
            delta_converged=converged,
        )
    )
    return state


def run(w_opt, cfg=AdmmConfig(), pm=PowerModel(), rng=None, n_rf=None, frozen_delta=None, callback=None):
    """Run the solver for exactly ``cfg.n_max`` iterations.

    Parameters
    ----------
    w_opt : ndarray, shape (n_r, n_s)
        Target (fully digital) combiner.
    n_rf : int, optional
        Number of RF chains; defaults to ``n_s``.
    frozen_delta : array_like, optional
        Fix the distortion diagonal and skip its update (fixed-resolution
        designs).
    callback : callable, optional
        Called as ``callback(state)`` after every iteration.

    Returns
    -------
    combiner : HybridCombiner
    trace : list of TraceRecord
    """
    w_opt = np.asarray(w_opt, dtype=complex)
    if w_opt.ndim != 2:
        raise InvalidInputError("w_opt must be a matrix")
    n_r, n_s = w_opt.shape
    n_rf = n_s if n_rf is None else int(n_rf)
    if not n_s <= n_rf <= n_r:
        raise InvalidInputError(f"need n_s <= n_rf <= n_r, got {n_s}, {n_rf}, {n_r}")
    rng = np.random.default_rng(rng)
    state = initialize(rng, n_r, n_rf, n_s, cfg.bounds, frozen_delta)
    freeze = frozen_delta is not None
    for _ in range(cfg.n_max):
        try:
            iterate(state, w_opt, cfg, pm, freeze_delta=freeze)
        except (DomainError, np.linalg.LinAlgError) as exc:
            raise SolverError(f"ADMM step failed at iteration {state.iter + 1}: {exc}", state.trace) from exc
        if callback is not None:
            callback(state)
    bits = round_bits(state.delta, cfg.bounds)
    return HybridCombiner(state.w_rf, state.delta, state.w_bb, bits), state.trace
