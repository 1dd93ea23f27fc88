from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .main import main
from .plotting import emit_plotdata

__all__ = ["main", "run_experiment", "ExperimentConfig", "EXPERIMENTS", "emit_plotdata"]
