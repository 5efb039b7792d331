"""Monte-Carlo experiment driver: paired trials, parameter sweeps, CSV output."""

import csv
import dataclasses
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import admm, baselines
from .channel import ChannelParams, sample_channel
from .exceptions import ConfigurationError
from .metrics import PowerModel
from .quantization import QuantizationBounds

log = logging.getLogger(__name__)

SCHEMES = ("admm", "hybrid1", "hybrid8", "digital", "bf")
SWEEP_VARS = ("snr_db", "n_rx", "n_tx", "gamma")
GAMMA_GRID = (0.001, 0.00215, 0.00464, 0.01, 0.0215, 0.0464, 0.1)
EE_AGGREGATIONS = ("mean-ratio", "ratio-mean")

CSV_COLUMNS = (
    "scheme", "sweep_var", "sweep_value", "trials",
    "rate_mean", "rate_se", "power_mean", "power_se",
    "ee_mean", "ee_se", "se_mean", "se_se", "mse_db_mean", "bits_mean",
)

# independent random streams within one trial; shared across schemes
_STREAM = {"channel": 0, "admm": 1, "hybrid1": 2, "hybrid8": 3, "bf": 4}


@dataclass(frozen=True)
class ExperimentConfig:
    n_tx: int = 32
    n_rx: int = 16
    l_r: int = 4
    n_s: int = 4
    n_cl: int = 2
    n_ray: int = 4
    snr_db: float = 20.0
    gamma: float = 0.01
    alpha: float = 1.0
    n_max: int = 40
    bounds: QuantizationBounds = QuantizationBounds()
    pm: PowerModel = PowerModel()
    trials: int = 200
    seed: int = 0
    schemes: tuple = SCHEMES
    gamma_search: bool = False
    ee_agg: str = "mean-ratio"
    bf_n_max: int = 20
    bf_search_rf: bool = False
    bf_uniform_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        self.validate()

    def validate(self):
        for name in ("n_tx", "n_rx", "l_r", "n_s", "n_cl", "n_ray", "n_max", "bf_n_max"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if not self.n_s <= self.l_r <= self.n_rx:
            raise ConfigurationError(
                f"need n_s <= l_r <= n_rx, got n_s={self.n_s}, l_r={self.l_r}, n_rx={self.n_rx}"
            )
        if self.n_s > self.n_tx:
            raise ConfigurationError("n_s cannot exceed n_tx")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.alpha <= 0 or self.gamma < 0:
            raise ConfigurationError("need alpha > 0 and gamma >= 0")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown or not self.schemes:
            raise ConfigurationError(f"unknown or empty schemes: {sorted(unknown)}; choose from {SCHEMES}")
        if self.ee_agg not in EE_AGGREGATIONS:
            raise ConfigurationError(f"ee_agg must be one of {EE_AGGREGATIONS}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if "bf" in self.schemes:
            levels = self.bounds.b_max - self.bounds.b_min + 1
            rf = range(self.n_s, self.l_r + 1) if self.bf_search_rf else [self.l_r]
            total = sum(levels if self.bf_uniform_only else levels**k for k in rf)
            if total > baselines.DEFAULT_BF_BUDGET:
                raise ConfigurationError(f"brute force needs {total} candidates per trial")

    @property
    def sigma_n2(self):
        return 10.0 ** (-self.snr_db / 10.0)

    def channel_params(self):
        return ChannelParams(n_tx=self.n_tx, n_rx=self.n_rx, n_clusters=self.n_cl, n_rays=self.n_ray)

    def admm_config(self, gamma=None, n_max=None):
        return admm.AdmmConfig(
            alpha=self.alpha,
            gamma=self.gamma if gamma is None else gamma,
            n_max=self.n_max if n_max is None else n_max,
            bounds=self.bounds,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple

    def __post_init__(self):
        if self.variable not in SWEEP_VARS:
            raise ConfigurationError(f"sweep variable must be one of {SWEEP_VARS}")
        if len(self.values) == 0:
            raise ConfigurationError("sweep needs at least one value")
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class SchemeStats:
    trials: int
    rate_mean: float
    rate_se: float
    power_mean: float
    power_se: float
    ee_mean: float
    ee_se: float
    se_mean: float
    se_se: float
    mse_db_mean: float
    bits_mean: float


@dataclass
class ExperimentResult:
    """Per-trial evaluations (in trial order) and their aggregates."""

    config: ExperimentConfig
    evaluations: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    gammas: list = field(default_factory=list)


def trial_rng(seed, trial, stream):
    """Generator for one (trial, stream) pair, stable across runs and schemes."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, stream)))


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def aggregate(evals, ee_agg="mean-ratio"):
    rate_m, rate_s = _mean_se([e.rate for e in evals])
    pow_m, pow_s = _mean_se([e.power for e in evals])
    se_m, se_s = _mean_se([e.se for e in evals])
    if ee_agg == "mean-ratio":
        ee_m, ee_s = _mean_se([e.ee for e in evals])
    else:
        ee_m = rate_m / pow_m
        # first-order propagation through the ratio of means
        n = len(evals)
        if n > 1:
            cov = np.cov([e.rate for e in evals], [e.power for e in evals])[0, 1] / n
            var = (rate_s**2 / pow_m**2) + (rate_m**2 * pow_s**2 / pow_m**4) - 2 * rate_m * cov / pow_m**3
            ee_s = math.sqrt(max(var, 0.0))
        else:
            ee_s = 0.0
    return SchemeStats(
        trials=len(evals),
        rate_mean=rate_m, rate_se=rate_s,
        power_mean=pow_m, power_se=pow_s,
        ee_mean=ee_m, ee_se=ee_s,
        se_mean=se_m, se_se=se_s,
        mse_db_mean=float(np.mean([e.mse_db for e in evals])),
        bits_mean=float(np.mean([e.mean_bits for e in evals])),
    )


def _run_admm(cfg, c, rng_seed_trial):
    gammas = GAMMA_GRID if cfg.gamma_search else (cfg.gamma,)
    best = None
    for g in gammas:
        res, _ = baselines.admm_design(
            c, cfg.n_s, cfg.l_r, cfg.sigma_n2, cfg.admm_config(gamma=g), cfg.pm,
            trial_rng(cfg.seed, rng_seed_trial, _STREAM["admm"]),
        )
        if best is None or res.eval.ee > best[1].eval.ee:
            best = (g, res)
    return best


def run_trial(cfg, trial):
    """Draw one channel and evaluate every enabled scheme on it.

    Returns ``(evaluations_by_scheme, selected_gamma_or_None)``.
    """
    c = sample_channel(cfg.channel_params(), trial_rng(cfg.seed, trial, _STREAM["channel"]))
    out = {}
    gamma = None
    for scheme in cfg.schemes:
        if scheme == "admm":
            gamma, res = _run_admm(cfg, c, trial)
        elif scheme in ("hybrid1", "hybrid8"):
            res = baselines.fixed_bit_hybrid(
                c, cfg.n_s, cfg.l_r, int(scheme[-1]), cfg.sigma_n2, cfg.admm_config(), cfg.pm,
                trial_rng(cfg.seed, trial, _STREAM[scheme]),
            )
        elif scheme == "digital":
            res = baselines.full_digital_baseline(c, cfg.n_s, cfg.sigma_n2, cfg.pm)
        else:
            res = baselines.brute_force(
                c, cfg.n_s, cfg.l_r, cfg.sigma_n2, cfg.bounds, cfg.admm_config(n_max=cfg.bf_n_max),
                cfg.pm, trial_rng(cfg.seed, trial, _STREAM["bf"]),
                search_rf=cfg.bf_search_rf, uniform_only=cfg.bf_uniform_only,
            )
        out[scheme] = res.eval
    return out, gamma


def _run_trial_star(args):
    return run_trial(*args)


def run_trials(cfg, jobs=1):
    """Run ``cfg.trials`` paired trials and aggregate per scheme.

    Trials may execute in a process pool; results are reduced in trial
    order, so the output does not depend on `jobs`.
    """
    cfg.validate()
    work = [(cfg, t) for t in range(cfg.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial_star, work, chunksize=max(1, cfg.trials // (4 * jobs))))
    else:
        results = [run_trial(*w) for w in work]
    result = ExperimentResult(cfg)
    for scheme in cfg.schemes:
        result.evaluations[scheme] = [r[0][scheme] for r in results]
        result.stats[scheme] = aggregate(result.evaluations[scheme], cfg.ee_agg)
    result.gammas = [r[1] for r in results]
    log.info("finished %d trials for schemes %s", cfg.trials, ",".join(cfg.schemes))
    return result


def _rows(result, sweep_var="", sweep_value=""):
    rows = []
    for scheme in result.config.schemes:
        s = result.stats[scheme]
        rows.append({
            "scheme": scheme, "sweep_var": sweep_var, "sweep_value": sweep_value, "trials": s.trials,
            "rate_mean": s.rate_mean, "rate_se": s.rate_se,
            "power_mean": s.power_mean, "power_se": s.power_se,
            "ee_mean": s.ee_mean, "ee_se": s.ee_se,
            "se_mean": s.se_mean, "se_se": s.se_se,
            "mse_db_mean": s.mse_db_mean, "bits_mean": s.bits_mean,
        })
    return rows


def table(result):
    """Rows for a single (non-sweep) experiment."""
    return _rows(result)


def sweep(base, spec, jobs=1):
    """One `run_trials` per sweep value; rows keep the value order."""
    rows = []
    for value in spec.values:
        if spec.variable in ("n_rx", "n_tx"):
            value = int(value)
        cfg = base.replace(**{spec.variable: value})
        rows.extend(_rows(run_trials(cfg, jobs), spec.variable, value))
    return rows


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(rows, destination):
    """Write `rows` to `destination` (a path or a text stream)."""
    text = format_csv(rows)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {destination}: {exc}") from exc
