"""Time-of-Arrival location verification: simulation, LRT and neural-network verifiers."""

from .channel import ChannelParams, Dataset, LabeledSample, generate_dataset
from .errors import DimensionError, EmptyInputError, InvalidParameterError, TrainingDivergedError
from .lrt import LrtDetector, decide, evaluate_lrt, log_likelihood_ratio
from .metrics import MetricsReport, analytic_lrt_error, compute_metrics, roc_sweep
from .nn import MlpModel, TrainConfig, classify, forward, incremental_training_run, train
from .scenario import Location, Scenario, preset

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "Dataset", "LabeledSample", "generate_dataset",
    "DimensionError", "EmptyInputError", "InvalidParameterError", "TrainingDivergedError",
    "LrtDetector", "decide", "evaluate_lrt", "log_likelihood_ratio",
    "MetricsReport", "analytic_lrt_error", "compute_metrics", "roc_sweep",
    "MlpModel", "TrainConfig", "classify", "forward", "incremental_training_run", "train",
    "Location", "Scenario", "preset",
]
