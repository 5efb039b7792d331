"""Narrowband clustered mmWave channel on uniform linear arrays."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .numerics import svd

DEFAULT_ANGLE_SPREAD = np.deg2rad(10.0) / np.sqrt(2.0)


@dataclass(frozen=True)
class ChannelParams:
    """Geometry and cluster statistics of the clustered channel.

    `angle_spread` is the Laplacian scale ``b`` (radians) of the per-ray
    azimuths around each cluster mean; the default gives a 10 degree
    standard deviation. `cluster_power` is either a scalar shared by all
    clusters or one value per cluster.
    """

    n_tx: int = 32
    n_rx: int = 16
    n_clusters: int = 2
    n_rays: int = 4
    cluster_power: float | tuple = 1.0
    angle_spread: float = DEFAULT_ANGLE_SPREAD
    element_spacing: float = 0.5

    def __post_init__(self):
        for name in ("n_tx", "n_rx", "n_clusters", "n_rays"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be >= 1")
        if np.any(np.asarray(self.cluster_power) <= 0):
            raise InvalidInputError("cluster_power must be positive")
        if np.ndim(self.cluster_power) and len(self.cluster_power) != self.n_clusters:
            raise InvalidInputError("cluster_power needs one entry per cluster")
        if self.angle_spread < 0:
            raise InvalidInputError("angle_spread must be non-negative")
        if self.element_spacing <= 0:
            raise InvalidInputError("element_spacing must be positive")

    @property
    def n_paths(self):
        return self.n_clusters * self.n_rays

    def powers(self):
        return np.broadcast_to(np.asarray(self.cluster_power, dtype=float), (self.n_clusters,))


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw with its path parameters and cached SVD.

    `gains`, `aod` and `aoa` have shape ``(n_clusters, n_rays)``; `v` holds
    right singular vectors as columns.
    """

    params: ChannelParams
    h: np.ndarray
    gains: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray
    u: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, h, params=None):
        """Wrap an arbitrary channel matrix (no path parameters)."""
        h = np.asarray(h, dtype=complex)
        if params is None:
            params = ChannelParams(n_tx=h.shape[1], n_rx=h.shape[0], n_clusters=1, n_rays=1)
        u, s, v = svd(h)
        empty = np.zeros((0, 0))
        return cls(params, h, empty.astype(complex), empty, empty, u, s, v)


def array_response_ula(n, phi, spacing=0.5):
    """Unit-norm ULA steering vector, entry k = exp(j 2 pi d k sin(phi)) / sqrt(n)."""
    if n < 1:
        raise InvalidInputError("antenna count must be >= 1")
    k = np.arange(n)
    return np.exp(2j * np.pi * spacing * k * np.sin(phi)) / np.sqrt(n)


def assemble_channel(params, gains, aod, aoa):
    """Sum of scaled rank-one path contributions."""
    gains = np.ravel(gains)
    a_t = np.stack([array_response_ula(params.n_tx, p, params.element_spacing) for p in np.ravel(aod)], axis=1)
    a_r = np.stack([array_response_ula(params.n_rx, p, params.element_spacing) for p in np.ravel(aoa)], axis=1)
    scale = np.sqrt(params.n_tx * params.n_rx / params.n_paths)
    return scale * (a_r * gains) @ a_t.conj().T


def sample_channel(params, rng):
    """Draw a channel realization.

    Cluster mean angles are uniform on ``[0, 2 pi)``, independently for
    departure and arrival; per-ray angles add Laplacian offsets; gains are
    circularly-symmetric complex Gaussian with the cluster power as variance.
    """
    shape = (params.n_clusters, params.n_rays)
    var = params.powers()[:, None]
    gains = np.sqrt(var / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    mean_aod = rng.uniform(0.0, 2.0 * np.pi, params.n_clusters)
    mean_aoa = rng.uniform(0.0, 2.0 * np.pi, params.n_clusters)
    aod = mean_aod[:, None] + rng.laplace(0.0, params.angle_spread, shape)
    aoa = mean_aoa[:, None] + rng.laplace(0.0, params.angle_spread, shape)
    h = assemble_channel(params, gains, aod, aoa)
    u, s, v = svd(h)
    return ChannelRealization(params, h, gains, aod, aoa, u, s, v)


def _check_streams(c, n_s):
    if not 1 <= n_s <= min(c.h.shape):
        raise InvalidInputError(f"n_s={n_s} must lie in [1, {min(c.h.shape)}]")


def optimal_combiner(c, n_s):
    """First `n_s` left singular vectors of the channel."""
    _check_streams(c, n_s)
    return c.u[:, :n_s].copy()


def optimal_precoder(c, n_s):
    """First `n_s` right singular vectors scaled by ``1/sqrt(n_s)``."""
    _check_streams(c, n_s)
    return c.v[:, :n_s] / np.sqrt(n_s)
