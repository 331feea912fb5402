"""Named experiments, configuration and self-auditing reports."""

from roughhj.lab.config import DEFAULTS, NAMES, ExperimentSpec, load_config
from roughhj.lab.experiments import EXPERIMENTS, run_experiment, run_many
from roughhj.lab.report import Report, Verdict, decide, emit_report, recheck

__all__ = [
    "DEFAULTS",
    "NAMES",
    "ExperimentSpec",
    "load_config",
    "EXPERIMENTS",
    "run_experiment",
    "run_many",
    "Report",
    "Verdict",
    "decide",
    "emit_report",
    "recheck",
]
