"""Dataset generation, cross-validated training, sweeps and the command line."""
from .analysis import coupling_importance, indicator_weights, locality_probe, near_far
from .config import ExperimentConfig, load_config
from .data import ExperimentData, gen_dataset, load_dataset, write_dataset
from .experiment import MetricsRecord, run_experiment, split_indices
from .training import cross_validate, train_observable

__all__ = [
    "ExperimentConfig", "ExperimentData", "MetricsRecord", "coupling_importance", "cross_validate",
    "gen_dataset", "indicator_weights", "load_config", "load_dataset", "locality_probe", "near_far",
    "run_experiment", "split_indices", "train_observable", "write_dataset",
]
