"""Command-line front end: parameter sweeps, figure reproduction, CSV
emission, and rendered plots.

Exit codes: 0 all checks pass, 1 tolerance failures, 2 usage/config error.
Sweep points are dispatched to a process pool when MMWSEC_WORKERS > 1;
rows are always written in grid order and are byte-identical for a fixed
seed regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from . import report
from .report import AXES, FIGURES, METRICS, Row, evaluate_curve, evaluate_point
from .scenario import ScenarioError, ScenarioParams, load_scenario, microwave_preset, preset


class UsageError(ScenarioError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """One sweep definition: which axis varies, over which grid, which
    metrics to evaluate, and how."""

    axis: str
    grid: Tuple[float, ...]
    metrics: Tuple[str, ...]
    trials: int = 100000
    seed: int = 0
    mode: str = "both"

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise UsageError(f"unknown axis {self.axis!r}; expected one of {AXES}")
        if len(self.grid) == 0:
            raise UsageError("sweep grid must be nonempty")
        diffs = np.diff(np.asarray(self.grid, dtype=float))
        if len(self.grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise UsageError("sweep grid must be strictly monotone")
        if not self.metrics:
            raise UsageError("sweep needs at least one metric")
        for name in self.metrics:
            if name not in METRICS:
                raise UsageError(
                    f"unknown metric {name!r}; expected one of {sorted(METRICS)}"
                )
        if self.mode not in ("analytical", "simulation", "both"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.mode in ("simulation", "both") and self.trials < 1000:
            raise UsageError("simulation sweeps need at least 1000 trials")
        if self.trials < 1:
            raise UsageError("trials must be positive")


def sweep_spec_from_dict(data: dict) -> SweepSpec:
    allowed = {"axis", "grid", "metrics", "trials", "seed", "mode"}
    unknown = set(data) - allowed
    if unknown:
        raise UsageError(f"unknown sweep key(s) {sorted(unknown)}")
    try:
        return SweepSpec(
            axis=data["axis"],
            grid=tuple(float(v) for v in data["grid"]),
            metrics=tuple(data["metrics"]),
            trials=int(data.get("trials", 100000)),
            seed=int(data.get("seed", 0)),
            mode=data.get("mode", "both"),
        )
    except KeyError as exc:
        raise UsageError(f"sweep spec missing field {exc.args[0]!r}") from exc


def _worker_count() -> int:
    raw = os.environ.get("MMWSEC_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _curve_rows(args) -> list:
    base, axis, grid, metric, trials, seed, mode, tolerance = args
    return evaluate_curve(base, axis, tuple(grid), metric, trials, seed, mode, tolerance)


def run_sweep(
    scenario: ScenarioParams,
    sweep: SweepSpec,
    out_dir: Path,
    tolerance: float = 0.01,
    plot: bool = True,
) -> dict:
    """Evaluate every requested metric over the grid, write sweep.csv (and
    a rendered sweep.png), and return a summary dict."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (scenario, sweep.axis, sweep.grid, metric, sweep.trials, sweep.seed, sweep.mode, tolerance)
        for metric in sweep.metrics
    ]
    workers = _worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_metric = list(pool.map(_curve_rows, jobs))
    else:
        per_metric = [_curve_rows(job) for job in jobs]

    # interleave rows in grid order (axis outer, metric inner)
    rows: list = []
    for i in range(len(sweep.grid)):
        for metric_rows in per_metric:
            rows.append(metric_rows[i])
    csv_path = out_dir / "sweep.csv"
    report.write_rows(csv_path, rows)

    if plot:
        curves = []
        for metric, metric_rows in zip(sweep.metrics, per_metric):
            curves.append(
                (
                    metric,
                    [r.axis_value for r in metric_rows],
                    [r.analytical for r in metric_rows],
                    [r.empirical for r in metric_rows],
                    [r.ci95 for r in metric_rows],
                )
            )
        report.render_figure(
            out_dir / "sweep.png",
            f"sweep over {sweep.axis}",
            sweep.axis,
            curves,
        )

    checked = [r for r in rows if r.status in ("pass", "fail")]
    failures = [r for r in rows if r.status == "fail"]
    return {
        "csv": str(csv_path),
        "rows": rows,
        "checked": len(checked),
        "failures": len(failures),
    }


def reproduce_figure(
    name: str,
    trials: int = 100000,
    seed: int = 0,
    out_dir: Path = Path("out"),
    mode: str = "both",
    tolerance: float = 0.01,
    plot: bool = True,
) -> dict:
    """Reproduce one figure scenario: CSV of every curve, a summary of the
    bound-direction/tolerance checks (plus the argmax of the power split
    for the split-sweep figures), and a rendered PNG."""
    if name not in FIGURES:
        raise UsageError(f"unknown figure {name!r}; expected one of {sorted(FIGURES)}")
    figd = FIGURES[name]
    fig_dir = Path(out_dir) / name
    fig_dir.mkdir(parents=True, exist_ok=True)

    jobs = []
    for curve in figd.curves:
        base = report.figure_base_params(name, curve)
        jobs.append((base, figd.axis, figd.grid, curve.metric, trials, seed, mode, tolerance))
    workers = _worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_curve = list(pool.map(_curve_rows, jobs))
    else:
        per_curve = [_curve_rows(job) for job in jobs]

    rows = []
    for curve, curve_rows in zip(figd.curves, per_curve):
        for row in curve_rows:
            rows.append(
                Row(
                    axis_name=row.axis_name,
                    axis_value=row.axis_value,
                    metric=f"{row.metric}[{curve.label}]",
                    analytical=row.analytical,
                    empirical=row.empirical,
                    ci95=row.ci95,
                    status=row.status,
                )
            )
    csv_path = fig_dir / "curves.csv"
    report.write_rows(csv_path, rows)

    lines = [f"figure {name}: {figd.title}", f"axis: {figd.axis}", ""]
    failures = 0
    checked = 0
    argmax_report = {}
    for curve, curve_rows in zip(figd.curves, per_curve):
        for row in curve_rows:
            if row.status == "fail":
                failures += 1
            if row.status in ("pass", "fail"):
                checked += 1
        if figd.report_argmax:
            for source in ("analytical", "empirical"):
                values = [getattr(r, source) for r in curve_rows]
                if all(v is None for v in values):
                    continue
                arr = np.array([np.nan if v is None else v for v in values])
                idx = int(np.nanargmax(arr))
                argmax_report[f"{curve.label} ({source})"] = figd.grid[idx]
                lines.append(
                    f"argmax phi* of {curve.label} ({source}): {figd.grid[idx]:.4f}"
                )
    if name == "fig9" and mode in ("simulation", "both"):
        mm = [r.empirical for r in per_curve[0]]
        mw = [r.empirical for r in per_curve[1]]
        dominates = all(
            a is not None and b is not None and a >= b for a, b in zip(mm, mw)
        )
        lines.append(f"mmWave dominates microwave at every grid point: {dominates}")
        if not dominates:
            failures += 1
        checked += 1
    lines.append("")
    lines.append(f"checked rows: {checked}, failures: {failures}")
    (fig_dir / "summary.txt").write_text("\n".join(lines) + "\n")

    if plot:
        curves = []
        for curve, curve_rows in zip(figd.curves, per_curve):
            curves.append(
                (
                    curve.label,
                    [r.axis_value for r in curve_rows],
                    [r.analytical for r in curve_rows],
                    [r.empirical for r in curve_rows],
                    [r.ci95 for r in curve_rows],
                )
            )
        report.render_figure(
            fig_dir / f"{name}.png", figd.title, figd.axis, curves, figd.log_y
        )

    return {
        "dir": str(fig_dir),
        "csv": str(csv_path),
        "rows": rows,
        "checked": checked,
        "failures": failures,
        "argmax": argmax_report,
    }


# ---------------------------------------------------------------------------
# argparse front end
# ---------------------------------------------------------------------------


def _parse_grid(grid: Optional[str], grid_values: Optional[str]) -> Tuple[float, ...]:
    if (grid is None) == (grid_values is None):
        raise UsageError("provide exactly one of --grid lo:hi:n or --grid-values v1,v2,...")
    if grid is not None:
        parts = grid.split(":")
        if len(parts) != 3:
            raise UsageError(f"--grid must be lo:hi:n, got {grid!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise UsageError("--grid needs n >= 1")
        return tuple(np.linspace(lo, hi, n).tolist())
    return tuple(float(v) for v in grid_values.split(",") if v.strip())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwsec",
        description="Secrecy-metric laboratory: closed forms vs stochastic-geometry simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="sweep one parameter axis")
    sweep.add_argument("--scenario", help="scenario config file (JSON)")
    sweep.add_argument("--preset", dest="preset_name", help="figure preset instead of a file")
    sweep.add_argument("--axis", required=True, help=f"one of {', '.join(AXES)}")
    sweep.add_argument("--grid", help="lo:hi:n linear grid")
    sweep.add_argument("--grid-values", help="comma-separated grid values")
    sweep.add_argument("--metrics", required=True, help="comma-separated metric names")
    sweep.add_argument("--trials", type=int, default=100000)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--mode", choices=("analytical", "simulation", "both"), default="both")
    sweep.add_argument("--out-dir", default="out")
    sweep.add_argument("--tolerance", type=float, default=0.01)
    sweep.add_argument("--no-plot", action="store_true")

    figure = sub.add_parser("figure", help="reproduce a figure scenario")
    figure.add_argument("name", help=f"one of {', '.join(sorted(FIGURES))}")
    figure.add_argument("--trials", type=int, default=100000)
    figure.add_argument("--seed", type=int, default=0)
    figure.add_argument("--mode", choices=("analytical", "simulation", "both"), default="both")
    figure.add_argument("--out-dir", default="out")
    figure.add_argument("--tolerance", type=float, default=0.01)
    figure.add_argument("--no-plot", action="store_true")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "sweep":
            if (args.scenario is None) == (args.preset_name is None):
                raise UsageError("provide exactly one of --scenario or --preset")
            scenario = (
                load_scenario(args.scenario)
                if args.scenario
                else preset(args.preset_name)
            )
            spec = SweepSpec(
                axis=args.axis,
                grid=_parse_grid(args.grid, args.grid_values),
                metrics=tuple(v.strip() for v in args.metrics.split(",") if v.strip()),
                trials=args.trials,
                seed=args.seed,
                mode=args.mode,
            )
            summary = run_sweep(
                scenario, spec, Path(args.out_dir), args.tolerance, plot=not args.no_plot
            )
            print(f"wrote {summary['csv']}")
            print(f"checked {summary['checked']} rows, {summary['failures']} failures")
            return 1 if summary["failures"] else 0
        if args.command == "figure":
            summary = reproduce_figure(
                args.name,
                trials=args.trials,
                seed=args.seed,
                out_dir=Path(args.out_dir),
                mode=args.mode,
                tolerance=args.tolerance,
                plot=not args.no_plot,
            )
            print(f"wrote {summary['csv']}")
            for key, value in summary.get("argmax", {}).items():
                print(f"argmax phi* {key}: {value:.4f}")
            print(f"checked {summary['checked']} rows, {summary['failures']} failures")
            return 1 if summary["failures"] else 0
        raise UsageError(f"unknown command {args.command!r}")
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
