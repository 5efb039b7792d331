"""Command-line entry point for Monte-Carlo experiments.

Settings are resolved as built-in defaults < ``--config`` file < flags <
``SEED`` environment variable (seed only). Exit status is 0 on success,
2 for an invalid configuration and 3 for a runtime failure.
"""

import argparse
import logging
import os
import sys

from .exceptions import ConfigurationError, InvalidInputError
from .harness import EE_AGGREGATIONS, ExperimentConfig, SweepSpec, emit_csv, run_trials, sweep, table
from .metrics import PowerModel
from .quantization import QuantizationBounds

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

# flag name -> (ExperimentConfig field, parser)
_FIELDS = {
    "ntx": ("n_tx", int),
    "nrx": ("n_rx", int),
    "lr": ("l_r", int),
    "ns": ("n_s", int),
    "ncl": ("n_cl", int),
    "nray": ("n_ray", int),
    "snr-db": ("snr_db", float),
    "gamma": ("gamma", float),
    "alpha": ("alpha", float),
    "nmax": ("n_max", int),
    "bmin": ("b_min", int),
    "bmax": ("b_max", int),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "schemes": ("schemes", lambda s: tuple(x.strip() for x in s.split(",") if x.strip())),
    "gamma-search": ("gamma_search", None),
    "ee-agg": ("ee_agg", str),
    "bf-nmax": ("bf_n_max", int),
    "sweep": ("sweep", str),
    "sweep-values": ("sweep_values", lambda s: tuple(float(x) for x in s.split(",") if x.strip())),
    "out": ("out", str),
    "jobs": ("jobs", int),
}


_HELP = {
    "ntx": "transmit antennas (default 32)",
    "nrx": "receive antennas (default 16)",
    "lr": "RF chains (default 4)",
    "ns": "data streams (default 4)",
    "ncl": "channel clusters (default 2)",
    "nray": "rays per cluster (default 4)",
    "snr-db": "SNR in dB, i.e. 1/noise variance (default 20)",
    "gamma": "rate/power trade-off weight (default 0.01)",
    "alpha": "ADMM penalty (default 1)",
    "nmax": "ADMM iterations (default 40)",
    "bmin": "lowest ADC resolution in bits (default 1)",
    "bmax": "highest ADC resolution in bits (default 8)",
    "trials": "Monte-Carlo trials (default 200)",
    "seed": "master seed (default 0); SEED in the environment overrides it",
    "schemes": "comma list from admm,hybrid1,hybrid8,digital,bf (default all)",
    "gamma-search": "pick gamma per trial from a log grid on [0.001, 0.1] by EE",
    "ee-agg": "mean of per-trial EE (default) or ratio of mean rate to mean power",
    "bf-nmax": "ADMM iterations per brute-force candidate (default 20)",
    "sweep": "sweep one of snr_db, n_rx, n_tx, gamma",
    "sweep-values": "comma list of values for --sweep",
    "out": "CSV output path (default stdout)",
    "jobs": "worker processes for trials (default 1)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="hybridadc", description="Energy-efficient ADC bit allocation and hybrid combining experiments.")
    p.add_argument("--config", help="flat key=value file; flags override it")
    for flag, (_, conv) in _FIELDS.items():
        if conv is None:
            p.add_argument(f"--{flag}", action="store_true", default=argparse.SUPPRESS, help=_HELP[flag])
        elif flag == "ee-agg":
            p.add_argument(f"--{flag}", choices=EE_AGGREGATIONS, default=argparse.SUPPRESS, help=_HELP[flag])
        else:
            p.add_argument(f"--{flag}", type=str, default=argparse.SUPPRESS, help=_HELP[flag])
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


def _convert(flag, raw):
    conv = _FIELDS[flag][1]
    try:
        return _parse_bool(raw) if conv is None else conv(raw)
    except ValueError as exc:
        raise ConfigurationError(f"bad value for --{flag}: {raw!r}") from exc


def read_config_file(path):
    """Parse ``key=value`` lines; keys are flag names (dashes or underscores)."""
    settings = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = key.lstrip("-").replace("_", "-")
        if flag not in _FIELDS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        settings[flag] = _convert(flag, value)
    return settings


def resolve_settings(argv=None, environ=None):
    """Merge defaults, config file, flags and environment into a dict."""
    environ = os.environ if environ is None else environ
    args = vars(build_parser().parse_args(argv))
    settings = {}
    if args.get("config"):
        settings.update(read_config_file(args["config"]))
    for flag in _FIELDS:
        key = flag.replace("-", "_")
        if key in args:
            value = args[key]
            settings[flag] = value if isinstance(value, bool) else _convert(flag, value)
    if environ.get("SEED"):
        settings["seed"] = _convert("seed", environ["SEED"])
    settings["verbose"] = args.get("verbose", False)
    return settings


def build_config(settings):
    fields = {}
    bmin, bmax = settings.get("bmin", 1), settings.get("bmax", 8)
    for flag, value in settings.items():
        if flag in ("bmin", "bmax", "sweep", "sweep-values", "out", "jobs", "verbose"):
            continue
        fields[_FIELDS[flag][0]] = value
    return ExperimentConfig(bounds=QuantizationBounds(bmin, bmax), pm=PowerModel(), **fields)


def main(argv=None):
    try:
        settings = resolve_settings(argv)
        logging.basicConfig(level=logging.INFO if settings["verbose"] else logging.WARNING)
        cfg = build_config(settings)
        spec = None
        if "sweep" in settings:
            spec = SweepSpec(settings["sweep"].replace("-", "_"), settings.get("sweep-values", ()))
        elif "sweep-values" in settings:
            raise ConfigurationError("--sweep-values requires --sweep")
    except (ConfigurationError, InvalidInputError) as exc:
        print(f"hybridadc: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        jobs = settings.get("jobs", 1)
        rows = sweep(cfg, spec, jobs) if spec else table(run_trials(cfg, jobs))
        out = settings.get("out")
        emit_csv(rows, out if out else sys.stdout)
    except Exception as exc:  # noqa: BLE001 - any failure maps to the runtime exit code
        print(f"hybridadc: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
