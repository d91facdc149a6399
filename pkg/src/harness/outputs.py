"""
Result files of runs and run collections: CSV tables and SVG line charts.
"""
import io
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from src.harness.stats import bootstrap_ci  # noqa: E402
from src.models.domain import EvalReport, RunMetrics  # noqa: E402
from src.utils.errors import CheckpointError, InsufficientDataError  # noqa: E402
from src.utils.io import read_json, write_bytes, write_json, write_text  # noqa: E402

METRICS_FILE = "metrics.json"
SWEEP_FILE = "sweep.json"
FINAL_EVAL_FILE = "final_eval.json"

CURVE_COLUMNS = ["step", "return", "ci_lo", "ci_hi"]
SWEEP_COLUMNS = ["p", "mean", "ci_lo", "ci_hi"]
SUMMARY_COLUMNS = ["strategy", "scenario", "algorithm", "n_runs", "n_rollouts", "mean", "ci_lo", "ci_hi"]

# Fixed ids and no timestamp keep SVG output byte-stable
SVG_STYLE = {"svg.hashsalt": "hmarl-workbench", "svg.fonttype": "none"}


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    return write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def _write_line_chart(
    path: Path,
    x: Sequence[float],
    y: Sequence[float],
    lo: Sequence[float],
    hi: Sequence[float],
    xlabel: str,
    ylabel: str,
    title: str,
) -> Path:
    with plt.rc_context(SVG_STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(x, y, marker="o", linewidth=1.5)
        ax.fill_between(x, lo, hi, alpha=0.25)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        buffer = io.BytesIO()
        fig.savefig(buffer, format="svg", bbox_inches="tight", metadata={"Date": None})
        plt.close(fig)
    return write_bytes(path, buffer.getvalue())


def training_curve_frame(metrics: RunMetrics) -> pd.DataFrame:
    return pd.DataFrame(
        [[p.env_steps, p.eval_return, p.ci_lo, p.ci_hi] for p in metrics.points],
        columns=CURVE_COLUMNS,
    )


def write_training_curve(run_dir: Union[str, Path], metrics: RunMetrics) -> List[Path]:
    """
    training_curve.csv and training_curve.svg of one run.

    @param run_dir - Run directory
    @param metrics - Curve points
    """
    if not metrics.points:
        raise InsufficientDataError("Training curve has no points", {"run": str(run_dir)})
    run_dir = Path(run_dir)
    frame = training_curve_frame(metrics)
    return [
        write_csv(run_dir / "training_curve.csv", frame),
        _write_line_chart(
            run_dir / "training_curve.svg",
            frame["step"], frame["return"], frame["ci_lo"], frame["ci_hi"],
            "environment steps", "evaluation return", run_dir.name,
        ),
    ]


def sweep_frame(reports: Sequence[EvalReport], levels: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame(
        [[p, r.mean, r.ci_lo, r.ci_hi] for p, r in zip(levels, reports)],
        columns=SWEEP_COLUMNS,
    )


def write_sweep(run_dir: Union[str, Path], reports: Sequence[EvalReport], levels: Sequence[float]) -> List[Path]:
    """
    sweep.json, sweep_p.csv and sweep_p.svg of one run.

    @param run_dir - Run directory
    @param reports - One report per level
    @param levels - Communication level of each report
    """
    if not reports:
        raise InsufficientDataError("Sweep has no points", {"run": str(run_dir)})
    run_dir = Path(run_dir)
    write_json(run_dir / SWEEP_FILE, [r.model_dump(mode="json") for r in reports])
    frame = sweep_frame(reports, levels)
    return [
        write_csv(run_dir / "sweep_p.csv", frame),
        _write_line_chart(
            run_dir / "sweep_p.svg",
            frame["p"], frame["mean"], frame["ci_lo"], frame["ci_hi"],
            "communication level p", "mean return", run_dir.name,
        ),
    ]


def _primary_report(reports: Dict[str, EvalReport]) -> EvalReport:
    """The first stored setting: fixed:1 for oracle runs, the first final scheme otherwise."""
    return next(iter(reports.values()))


def write_final_eval(run_dir: Union[str, Path], reports: Dict[str, EvalReport]) -> Path:
    """final_eval.json, keeping the evaluation order of the settings."""
    payload = {"order": list(reports), "reports": {k: r.model_dump(mode="json") for k, r in reports.items()}}
    return write_json(Path(run_dir) / FINAL_EVAL_FILE, payload)


def read_final_eval(run_dir: Union[str, Path]) -> Dict[str, EvalReport]:
    payload = read_json(Path(run_dir) / FINAL_EVAL_FILE)
    return {k: EvalReport.model_validate(payload["reports"][k]) for k in payload["order"]}


def summary_frame(
    run_dirs: Sequence[Path],
    resamples: int = 10_000,
    rng: Optional[np.random.Generator] = None,
) -> pd.DataFrame:
    """
    One row per (strategy, scenario, algorithm), pooling the primary final
    evaluation of every run and bootstrapping the pooled returns.
    """
    pooled: Dict[tuple, Dict[str, list]] = {}
    for run_dir in sorted(run_dirs):
        state = read_json(run_dir / "run.json")
        key = (state["strategy"], state["scenario_spec"]["scenario_id"], state["algorithm"])
        report = _primary_report(read_final_eval(run_dir))
        entry = pooled.setdefault(key, {"runs": [], "returns": []})
        entry["runs"].append(run_dir.name)
        entry["returns"].extend(report.returns)
    rows = []
    for (strategy, scenario, algorithm), entry in sorted(pooled.items()):
        returns = entry["returns"]
        lo, hi = bootstrap_ci(returns, resamples=resamples, rng=rng or np.random.default_rng(0))
        rows.append([
            strategy, scenario, algorithm, len(entry["runs"]), len(returns),
            float(np.mean(returns)), lo, hi,
        ])
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def write_summary(root: Union[str, Path], run_dirs: Sequence[Path], resamples: int = 10_000) -> List[Path]:
    """summary.csv and summary.svg of a directory of runs."""
    root = Path(root)
    frame = summary_frame(run_dirs, resamples=resamples)
    labels = list(frame["strategy"])
    positions = list(range(len(labels)))
    with plt.rc_context(SVG_STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        yerr = np.vstack([frame["mean"] - frame["ci_lo"], frame["ci_hi"] - frame["mean"]])
        ax.errorbar(positions, frame["mean"], yerr=yerr, marker="o", linestyle="-", capsize=4)
        ax.set_xticks(positions)
        ax.set_xticklabels(labels)
        ax.set_xlabel("strategy")
        ax.set_ylabel("mean return")
        ax.set_title(root.name or "summary")
        ax.grid(True, alpha=0.3)
        buffer = io.BytesIO()
        fig.savefig(buffer, format="svg", bbox_inches="tight", metadata={"Date": None})
        plt.close(fig)
    return [write_csv(root / "summary.csv", frame), write_bytes(root / "summary.svg", buffer.getvalue())]


def find_runs(root: Union[str, Path]) -> List[Path]:
    """Run directories holding a final evaluation: root itself and its direct children."""
    root = Path(root)
    candidates = [root] + sorted(p for p in root.iterdir() if p.is_dir())
    return [p for p in candidates if (p / FINAL_EVAL_FILE).is_file() and (p / "run.json").is_file()]


def emit_outputs(path: Union[str, Path], resamples: int = 10_000) -> List[Path]:
    """
    Regenerate every table and chart available under a run or a directory of runs.

    @param path - Run directory or parent of run directories
    @return Written files
    """
    path = Path(path)
    if not path.is_dir():
        raise CheckpointError(f"Directory not found: {path}", {"path": str(path)})
    written: List[Path] = []
    for run_dir in [path] + sorted(p for p in path.iterdir() if p.is_dir()):
        if (run_dir / METRICS_FILE).is_file():
            metrics = RunMetrics.model_validate(read_json(run_dir / METRICS_FILE))
            written += write_training_curve(run_dir, metrics)
        if (run_dir / SWEEP_FILE).is_file():
            reports = [EvalReport.model_validate(r) for r in read_json(run_dir / SWEEP_FILE)]
            levels = [float(r.setting.partition(":")[2]) for r in reports]
            written += write_sweep(run_dir, reports, levels)
    runs = find_runs(path)
    if runs:
        written += write_summary(path, runs, resamples=resamples)
    if not written:
        raise InsufficientDataError(f"No metrics found under {path}", {"path": str(path)})
    return written
