"""Energy-efficient ADC bit allocation and hybrid combining for mmWave MIMO receivers."""

from .admm import AdmmConfig, HybridCombiner
from .channel import ChannelParams, ChannelRealization, sample_channel
from .estimators import ADMMCombiner, BruteForceCombiner, DigitalCombiner, FixedBitCombiner
from .exceptions import ConfigurationError, DegenerateDesignError, DomainError, InvalidInputError
from .harness import ExperimentConfig, SweepSpec, run_trials, sweep
from .metrics import Evaluation, PowerModel
from .quantization import QuantizationBounds

__all__ = [
    "ADMMCombiner",
    "AdmmConfig",
    "BruteForceCombiner",
    "ChannelParams",
    "ChannelRealization",
    "ConfigurationError",
    "DegenerateDesignError",
    "DigitalCombiner",
    "DomainError",
    "Evaluation",
    "ExperimentConfig",
    "FixedBitCombiner",
    "HybridCombiner",
    "InvalidInputError",
    "PowerModel",
    "QuantizationBounds",
    "SweepSpec",
    "run_trials",
    "sample_channel",
    "sweep",
]

__version__ = "0.1.0"
