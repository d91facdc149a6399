"""
Experiment orchestration: training runs, evaluation, statistics and result files.
"""

from src.harness.seeding import STREAMS, RunStreams
from src.harness.stats import bootstrap_ci, summarize
from src.harness.runner import EpisodeResult, EpisodeRunner
from src.harness.persistence import LoadedRun, build_learner, build_model, load_run, save_run
from src.harness.evaluation import DEFAULT_P_GRID, evaluate, final_evaluations, is_monotone, sweep_levels, sweep_p
from src.harness.outputs import emit_outputs, write_summary, write_sweep, write_training_curve
from src.harness.training import TrainingRun, train, train_seeds
from src.harness.diagnostics import GRADCHECK_TOLERANCE, gradient_suite, predict_dump
