"""
Command-line entry point of the hybrid-execution workbench
"""
import functools
import json
from pathlib import Path
from typing import Callable, Dict, List, Optional

import typer
from dotenv import load_dotenv

from src.harness.diagnostics import GRADCHECK_TOLERANCE, gradient_suite, predict_dump
from src.harness.evaluation import evaluate, sweep_levels, sweep_p
from src.harness.outputs import emit_outputs, write_sweep
from src.harness.persistence import load_run
from src.harness.training import train_seeds
from src.envs.trajectory import TrajectoryRecorder
from src.models.config import load_config
from src.utils.errors import ConfigError, WorkbenchError
from src.utils.logger import logger

# Load environment variables from .env file
load_dotenv()

app = typer.Typer(
    name="hmarl",
    help="Train and evaluate multi-agent controllers under hybrid execution.",
    no_args_is_help=True,
    add_completion=False,
)


def _guard(command: Callable) -> Callable:
    """
    Map failures to exit codes: 2 with the error's JSON line for expected
    failures, 1 with the same line shape for anything else.
    """
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except WorkbenchError as e:
            logger.logger.error(e.message)
            typer.echo(e.to_json(), err=True)
            raise typer.Exit(code=2)
        except (typer.Exit, typer.Abort):
            raise
        except Exception as e:
            logger.logger.exception("Unexpected failure")
            line = {"error": "internal_error", "message": str(e), "details": {"type": type(e).__name__}}
            typer.echo(json.dumps(line, sort_keys=True), err=True)
            raise typer.Exit(code=1)
    return wrapper


def _parse_overrides(pairs: List[str]) -> Dict[str, str]:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override '{pair}' is not key=value", {"override": pair})
        overrides[key.strip()] = value.strip()
    return overrides


@app.command("train")
@_guard
def train_command(
    config: Optional[Path] = typer.Option(None, "--config", help="Flat key=value config file"),
    seed: Optional[List[int]] = typer.Option(None, "--seed", help="Seed; repeat for several runs"),
    workers: int = typer.Option(1, "--workers", min=1, help="Parallel runs"),
    overrides: Optional[List[str]] = typer.Option(None, "--set", help="Override, e.g. controllers.learning_rate=0.001"),
):
    """Train one run per seed and write their run directories."""
    values = _parse_overrides(overrides or [])
    if seed:
        values["seeds"] = ",".join(str(s) for s in seed)
    experiment = load_config(config, values)
    run_dirs = train_seeds(experiment, workers=workers)
    for run_dir in run_dirs:
        typer.echo(str(run_dir))


@app.command("eval")
@_guard
def eval_command(
    ckpt: Path = typer.Option(..., "--ckpt", help="Run directory"),
    comm: str = typer.Option("default", "--comm", help="fixed:<p>, default, asymmetric or dynamic:<k>"),
    rollouts: int = typer.Option(100, "--rollouts", min=1),
    seed: Optional[int] = typer.Option(None, "--seed", help="Evaluation seed; defaults to the run seed"),
    dump_trajectory: Optional[Path] = typer.Option(None, "--dump-trajectory", help="JSON-lines trajectory file"),
):
    """Greedy evaluation of a trained run under one communication setting."""
    run = load_run(ckpt)
    recorder = TrajectoryRecorder() if dump_trajectory else None
    report = evaluate(run, comm, rollouts, seed=seed, recorder=recorder)
    if recorder is not None:
        recorder.write(dump_trajectory)
    typer.echo(json.dumps(report.model_dump(mode="json", exclude={"returns"}), sort_keys=True))


@app.command("sweep")
@_guard
def sweep_command(
    ckpt: Path = typer.Option(..., "--ckpt", help="Run directory"),
    rollouts: int = typer.Option(100, "--rollouts", min=1),
):
    """Evaluate at p = 0.0, 0.1, .., 1.0 and write sweep_p.csv and sweep_p.svg."""
    run = load_run(ckpt)
    reports = sweep_p(run, n=rollouts)
    for path in write_sweep(ckpt, reports, sweep_levels(reports)):
        typer.echo(str(path))


@app.command("gradcheck")
@_guard
def gradcheck_command(seed: int = typer.Option(0, "--seed")):
    """Finite-difference check of every differentiable block."""
    errors = gradient_suite(seed)
    for name, err in errors.items():
        status = "ok" if err < GRADCHECK_TOLERANCE else "FAIL"
        typer.echo(f"{name:<14} {err:.3e} {status}")
    failed = {name: err for name, err in errors.items() if not err < GRADCHECK_TOLERANCE}
    if failed:
        line = {"error": "gradcheck_failed", "message": "Gradient check above tolerance", "details": failed}
        typer.echo(json.dumps(line, sort_keys=True), err=True)
        raise typer.Exit(code=1)


@app.command("predict-dump")
@_guard
def predict_dump_command(
    ckpt: Path = typer.Option(..., "--ckpt", help="Run directory of a maro or maro_drop run"),
    horizon: int = typer.Option(4, "--horizon", min=1),
    p: float = typer.Option(0.0, "--p", min=0.0, max=1.0, help="Communication level after t = 0"),
    out: Optional[Path] = typer.Option(None, "--out", help="Defaults to <ckpt>/predictions.csv"),
):
    """Write multi-step model predictions against actual observations."""
    run = load_run(ckpt)
    typer.echo(str(predict_dump(run, out or ckpt / "predictions.csv", horizon=horizon, p=p)))


@app.command("plot")
@_guard
def plot_command(run: Path = typer.Option(..., "--run", help="Run directory or directory of runs")):
    """Regenerate CSV tables and SVG charts from stored metrics."""
    for path in emit_outputs(run):
        typer.echo(str(path))


def main():
    """Run the command-line application"""
    app()


if __name__ == "__main__":
    main()
