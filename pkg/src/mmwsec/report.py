"""Metric registry, CSV schema, and figure rendering for the sweep and
figure-reproduction front ends.

CSV rows follow a fixed column order; floats are written in scientific
notation with nine significant digits so reruns diff cleanly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from . import analysis_an, analysis_noise, montecarlo
from .montecarlo import EmpiricalMetrics
from .scenario import (
    AnPattern,
    MicrowaveParams,
    ScenarioError,
    ScenarioParams,
    db_to_linear,
    microwave_preset,
    preset,
)

CSV_COLUMNS = (
    "axis_name",
    "axis_value",
    "metric",
    "analytical",
    "empirical",
    "ci95",
    "abs_diff",
    "status",
)

AXES = ("lambda_e", "lambda_b", "t_c_db", "t_e_db", "phi", "theta_b")


def format_float(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.8e}"


def apply_axis(params: ScenarioParams, axis: str, value: float) -> ScenarioParams:
    if axis == "lambda_e":
        return params.replace(eve_intensity=value)
    if axis == "lambda_b":
        return params.replace(bs_intensity=value)
    if axis == "t_c_db":
        return params.replace(t_c=db_to_linear(value))
    if axis == "t_e_db":
        return params.replace(t_e=db_to_linear(value))
    if axis == "phi":
        an = params.an
        return params.replace(
            antenna=AnPattern(an.info_gain, an.an_gain, an.beamwidth_deg, value)
        )
    if axis == "theta_b":
        antenna = params.antenna
        if isinstance(antenna, AnPattern):
            new = AnPattern(antenna.info_gain, antenna.an_gain, value, antenna.power_split)
        else:
            new = type(antenna)(antenna.main_gain, antenna.side_gain, value)
        return params.replace(antenna=new)
    raise ScenarioError(f"unknown sweep axis {axis!r}; expected one of {AXES}")


# ---------------------------------------------------------------------------
# Metric registry
# ---------------------------------------------------------------------------

# how the analytical value relates to the empirical estimate:
#   match        |a - e| <= max(tol, 3 sigma)
#   upper_bound  a >= e - 3 sigma and a - e <= max(2 tol, 3 sigma)
#   lower_bound  a <= e + 3 sigma and e - a <= max(2 tol, 3 sigma)
_KINDS = ("match", "upper_bound", "lower_bound")


@dataclass(frozen=True)
class MetricSpec:
    name: str
    family: str  # noise | an | microwave
    kind: str = "match"
    density: bool = False  # compare per-transmitter (value / lambda_B)
    analytical: Optional[Callable[[ScenarioParams], float]] = None
    counts_key: Optional[str] = None


def _np_noise(params: ScenarioParams) -> float:
    return analysis_noise.perfect_link_density(params)[0]


METRICS: Dict[str, MetricSpec] = {
    "tau_n": MetricSpec(
        "tau_n", "noise", "match",
        analytical=analysis_noise.secure_connectivity_noncolluding, counts_key="tau_n",
    ),
    "tau_c_exact": MetricSpec(
        "tau_c_exact", "noise", "match",
        analytical=analysis_noise.secure_connectivity_colluding_exact, counts_key="tau_c",
    ),
    "tau_c_bound": MetricSpec(
        "tau_c_bound", "noise", "upper_bound",
        analytical=analysis_noise.secure_connectivity_colluding_bound, counts_key="tau_c",
    ),
    "p_con": MetricSpec(
        "p_con", "noise", "match",
        analytical=analysis_noise.connection_probability, counts_key="p_con",
    ),
    "p_sec_n": MetricSpec(
        "p_sec_n", "noise", "match",
        analytical=analysis_noise.secrecy_probability_noncolluding, counts_key="p_sec_n",
    ),
    "p_sec_c": MetricSpec(
        "p_sec_c", "noise", "match",
        analytical=analysis_noise.secrecy_probability_colluding, counts_key="p_sec_c",
    ),
    "n_p": MetricSpec("n_p", "noise", "match", density=True, analytical=_np_noise),
    "an_p_con": MetricSpec(
        "an_p_con", "an", "upper_bound",
        analytical=analysis_an.an_connection_probability, counts_key="p_con",
    ),
    "an_p_sec": MetricSpec(
        "an_p_sec", "an", "lower_bound",
        analytical=analysis_an.an_secrecy_probability, counts_key="p_sec",
    ),
    "an_n_p": MetricSpec(
        "an_n_p", "an", "match", density=True,
        analytical=analysis_an.an_perfect_link_density,
    ),
    # simulation-only baseline; no analytical route exists
    "microwave_n_p": MetricSpec("microwave_n_p", "microwave", "match", density=True),
}


@dataclass(frozen=True)
class Row:
    axis_name: str
    axis_value: float
    metric: str
    analytical: Optional[float]
    empirical: Optional[float]
    ci95: Optional[float]
    status: str

    @property
    def abs_diff(self) -> Optional[float]:
        if self.analytical is None or self.empirical is None:
            return None
        return abs(self.analytical - self.empirical)

    def as_csv(self) -> Tuple[str, ...]:
        return (
            self.axis_name,
            format_float(self.axis_value),
            self.metric,
            format_float(self.analytical),
            format_float(self.empirical),
            format_float(self.ci95),
            format_float(self.abs_diff),
            self.status,
        )


def _status(
    spec: MetricSpec,
    analytical: Optional[float],
    empirical: Optional[float],
    sigma: float,
    tolerance: float,
    scale: float,
) -> str:
    """Pass/fail verdict; ``scale`` normalizes density metrics to a
    per-transmitter probability before applying the tolerance."""
    if analytical is None or empirical is None:
        return "n/a"
    a, e, s = analytical / scale, empirical / scale, sigma / scale
    if spec.kind == "match":
        return "pass" if abs(a - e) <= max(tolerance, 3.0 * s) else "fail"
    if spec.kind == "upper_bound":
        ok = a >= e - 3.0 * s and a - e <= max(2.0 * tolerance, 3.0 * s)
        return "pass" if ok else "fail"
    ok = a <= e + 3.0 * s and e - a <= max(2.0 * tolerance, 3.0 * s)
    return "pass" if ok else "fail"


def _empirical_noise(
    params: ScenarioParams, names: Sequence[str], trials: int, seed: int
) -> Dict[str, Tuple[float, float]]:
    """(estimate, sigma) for the requested noise-family metrics from one
    shared simulation pass."""
    counts = montecarlo.noise_limited_counts(params, trials, seed)
    out = {}
    for name in names:
        spec = METRICS[name]
        if name == "n_p":
            key = "p_sec_c" if params.eavesdropper_mode == "colluding" else "p_sec_n"
            p_con = counts["p_con"] / trials
            p_sec = counts[key] / trials
            est = params.bs_intensity * p_con * p_sec
            sigma = params.bs_intensity * _product_sigma(p_con, p_sec, trials)
        else:
            est = counts[spec.counts_key] / trials
            sigma = math.sqrt(max(est * (1.0 - est), 0.0) / trials)
        out[name] = (est, sigma)
    return out


def _product_sigma(p1: float, p2: float, trials: int) -> float:
    s1 = math.sqrt(max(p1 * (1.0 - p1), 0.0) / trials)
    s2 = math.sqrt(max(p2 * (1.0 - p2), 0.0) / trials)
    return p2 * s1 + p1 * s2 + s1 * s2


def _empirical_an(
    params: ScenarioParams, names: Sequence[str], trials: int, seed: int
) -> Dict[str, Tuple[float, float]]:
    an = params.an
    stats = montecarlo.an_sufficient_stats(params, trials, seed, phi_max=an.power_split)
    counts = montecarlo.an_counts_from_stats(stats, an.power_split, params.t_c, params.t_e)
    out = {}
    p_con = counts["p_con"] / trials
    p_sec = counts["p_sec"] / trials
    for name in names:
        if name == "an_p_con":
            out[name] = (p_con, math.sqrt(max(p_con * (1 - p_con), 0.0) / trials))
        elif name == "an_p_sec":
            out[name] = (p_sec, math.sqrt(max(p_sec * (1 - p_sec), 0.0) / trials))
        elif name == "an_n_p":
            out[name] = (
                params.bs_intensity * p_con * p_sec,
                params.bs_intensity * _product_sigma(p_con, p_sec, trials),
            )
        else:
            raise ValueError(f"not an AN metric: {name}")
    return out


def evaluate_point(
    params: ScenarioParams,
    axis: str,
    axis_value: float,
    metrics: Sequence[str],
    trials: int,
    seed: int,
    mode: str,
    tolerance: float,
    microwave: Optional[MicrowaveParams] = None,
) -> list:
    """All requested metric rows at one grid point; simulation passes are
    shared within each metric family."""
    rows = []
    analytical: Dict[str, Optional[float]] = {}
    empirical: Dict[str, Tuple[float, float]] = {}
    by_family: Dict[str, list] = {}
    for name in metrics:
        spec = METRICS[name]
        by_family.setdefault(spec.family, []).append(name)
        if mode in ("analytical", "both") and spec.analytical is not None:
            analytical[name] = spec.analytical(params)
        else:
            analytical[name] = None
    if mode in ("simulation", "both"):
        for family, names in by_family.items():
            if family == "noise":
                empirical.update(_empirical_noise(params, names, trials, seed))
            elif family == "an":
                empirical.update(_empirical_an(params, names, trials, seed))
            elif family == "microwave":
                mw = microwave if microwave is not None else microwave_preset()
                mw = MicrowaveParams(
                    bs_intensity=mw.bs_intensity,
                    eve_intensity=params.eve_intensity if axis == "lambda_e" else mw.eve_intensity,
                    pathloss_exponent=mw.pathloss_exponent,
                    n_antennas=mw.n_antennas,
                    beamwidth_deg=mw.beamwidth_deg,
                    power_split=mw.power_split,
                    t_c=mw.t_c,
                    t_e=mw.t_e,
                )
                est = montecarlo.estimate_microwave_baseline(mw, trials, seed)
                for name in names:
                    empirical[name] = (est.estimate, est.ci_halfwidth / 1.96)
    for name in metrics:
        spec = METRICS[name]
        a = analytical.get(name)
        e_pair = empirical.get(name)
        e, sigma = (e_pair if e_pair is not None else (None, 0.0))
        scale = params.bs_intensity if spec.density and params.bs_intensity > 0 else 1.0
        if spec.family == "microwave" and spec.density:
            mw_intensity = (microwave or microwave_preset()).bs_intensity
            scale = mw_intensity if mw_intensity > 0 else 1.0
        rows.append(
            Row(
                axis_name=axis,
                axis_value=axis_value,
                metric=name,
                analytical=a,
                empirical=e,
                ci95=(1.96 * sigma if e is not None else None),
                status=_status(spec, a, e, sigma, tolerance, scale),
            )
        )
    return rows


def evaluate_curve(
    base: ScenarioParams,
    axis: str,
    grid: Sequence[float],
    metric: str,
    trials: int,
    seed: int,
    mode: str,
    tolerance: float,
    microwave: Optional[MicrowaveParams] = None,
) -> list:
    """Rows of one metric along one axis.

    Threshold and power-split axes do not change any sampling distribution,
    so the whole grid is evaluated from a single simulation pass (which
    also gives common random numbers across the grid).
    """
    spec = METRICS[metric]
    sim = mode in ("simulation", "both")
    rows: list = []

    shared_noise = sim and spec.family == "noise" and axis in ("t_c_db", "t_e_db")
    shared_an = sim and spec.family == "an" and axis in ("t_c_db", "t_e_db", "phi")
    noise_stats = an_stats = None
    if shared_noise:
        noise_stats = montecarlo.noise_limited_stats(base, trials, seed)
    if shared_an:
        phi_max = max(grid) if axis == "phi" else base.an.power_split
        t_e_min = db_to_linear(min(grid)) if axis == "t_e_db" else base.t_e
        an_stats = montecarlo.an_sufficient_stats(
            base, trials, seed, phi_max=phi_max, t_e_min=t_e_min
        )

    for value in grid:
        params = apply_axis(base, axis, value)
        a = None
        if mode in ("analytical", "both") and spec.analytical is not None:
            a = spec.analytical(params)
        e = sigma = None
        if sim:
            if shared_noise:
                counts = montecarlo.noise_counts_from_stats(
                    noise_stats, params.t_c, params.t_e
                )
                e, sigma = _from_counts(params, spec, counts, trials)
            elif shared_an:
                counts = montecarlo.an_counts_from_stats(
                    an_stats, params.an.power_split, params.t_c, params.t_e
                )
                e, sigma = _from_an_counts(params, spec, counts, trials)
            elif spec.family == "noise":
                e, sigma = _empirical_noise(params, [metric], trials, seed)[metric]
            elif spec.family == "an":
                e, sigma = _empirical_an(params, [metric], trials, seed)[metric]
            else:
                mw = microwave if microwave is not None else microwave_preset()
                if axis == "lambda_e":
                    mw = MicrowaveParams(
                        bs_intensity=mw.bs_intensity,
                        eve_intensity=value,
                        pathloss_exponent=mw.pathloss_exponent,
                        n_antennas=mw.n_antennas,
                        beamwidth_deg=mw.beamwidth_deg,
                        power_split=mw.power_split,
                        t_c=mw.t_c,
                        t_e=mw.t_e,
                    )
                est = montecarlo.estimate_microwave_baseline(mw, trials, seed)
                e, sigma = est.estimate, est.ci_halfwidth / 1.96
        scale = 1.0
        if spec.density:
            if spec.family == "microwave":
                scale = (microwave or microwave_preset()).bs_intensity or 1.0
            else:
                scale = params.bs_intensity or 1.0
        rows.append(
            Row(
                axis_name=axis,
                axis_value=value,
                metric=metric,
                analytical=a,
                empirical=e,
                ci95=(1.96 * sigma if e is not None else None),
                status=_status(spec, a, e, sigma or 0.0, tolerance, scale),
            )
        )
    return rows


def _from_counts(params, spec, counts, trials):
    if spec.name == "n_p":
        key = "p_sec_c" if params.eavesdropper_mode == "colluding" else "p_sec_n"
        p_con = counts["p_con"] / trials
        p_sec = counts[key] / trials
        return (
            params.bs_intensity * p_con * p_sec,
            params.bs_intensity * _product_sigma(p_con, p_sec, trials),
        )
    est = counts[spec.counts_key] / trials
    return est, math.sqrt(max(est * (1.0 - est), 0.0) / trials)


def _from_an_counts(params, spec, counts, trials):
    p_con = counts["p_con"] / trials
    p_sec = counts["p_sec"] / trials
    if spec.name == "an_p_con":
        return p_con, math.sqrt(max(p_con * (1 - p_con), 0.0) / trials)
    if spec.name == "an_p_sec":
        return p_sec, math.sqrt(max(p_sec * (1 - p_sec), 0.0) / trials)
    return (
        params.bs_intensity * p_con * p_sec,
        params.bs_intensity * _product_sigma(p_con, p_sec, trials),
    )


def write_rows(path: Path, rows: Sequence[Row]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.as_csv())


# ---------------------------------------------------------------------------
# Figure catalogue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurveDef:
    label: str
    metric: str
    overrides: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class FigureDef:
    name: str
    title: str
    axis: str
    grid: Tuple[float, ...]
    curves: Tuple[CurveDef, ...]
    log_y: bool = False
    report_argmax: bool = False


def _lin(a: float, b: float, n: int) -> Tuple[float, ...]:
    return tuple(np.linspace(a, b, n).tolist())


FIGURES: Dict[str, FigureDef] = {
    "fig1": FigureDef(
        "fig1",
        "Secure connectivity, non-colluding eavesdroppers",
        "lambda_e",
        _lin(1e-5, 4e-4, 8),
        (CurveDef("lambda_B=5e-4", "tau_n"),),
    ),
    "fig2": FigureDef(
        "fig2",
        "Secure connectivity, colluding eavesdroppers",
        "lambda_e",
        _lin(1e-5, 4e-4, 5),
        (
            CurveDef("lambda_B=5e-4", "tau_c_bound", {"bs_intensity": 5e-4}),
            CurveDef("lambda_B=2e-4", "tau_c_bound", {"bs_intensity": 2e-4}),
            CurveDef("lambda_B=6e-5", "tau_c_bound", {"bs_intensity": 6e-5}),
        ),
    ),
    "fig3": FigureDef(
        "fig3",
        "Secrecy probability, colluding eavesdroppers",
        "t_e_db",
        _lin(-10.0, 25.0, 6),
        (CurveDef("lambda_E=1e-4", "p_sec_c"),),
    ),
    "fig4": FigureDef(
        "fig4",
        "Connection probability with artificial noise",
        "t_c_db",
        _lin(-10.0, 20.0, 7),
        (
            CurveDef("lambda_B=1e-4", "an_p_con", {"bs_intensity": 1e-4}),
            CurveDef("lambda_B=1e-3", "an_p_con", {"bs_intensity": 1e-3}),
        ),
    ),
    "fig5": FigureDef(
        "fig5",
        "Secrecy probability with artificial noise",
        "t_e_db",
        _lin(-10.0, 20.0, 7),
        (
            CurveDef("lambda_E=1e-4", "an_p_sec", {"eve_intensity": 1e-4}),
            CurveDef("lambda_E=2e-4", "an_p_sec", {"eve_intensity": 2e-4}),
        ),
    ),
    "fig6": FigureDef(
        "fig6",
        "Perfect-link density, noise-limited",
        "lambda_e",
        _lin(1e-5, 4e-4, 8),
        (
            CurveDef("non-colluding", "n_p", {"eavesdropper_mode": "non_colluding"}),
            CurveDef("colluding", "n_p", {"eavesdropper_mode": "colluding"}),
        ),
    ),
    "fig7": FigureDef(
        "fig7",
        "Perfect-link density vs power split",
        "phi",
        _lin(0.0, 1.0, 50),
        (
            CurveDef("lambda_E=5e-4", "an_n_p", {"eve_intensity": 5e-4}),
            CurveDef("lambda_E=1e-3", "an_n_p", {"eve_intensity": 1e-3}),
            CurveDef("lambda_E=2e-3", "an_n_p", {"eve_intensity": 2e-3}),
        ),
        report_argmax=True,
    ),
    "fig8": FigureDef(
        "fig8",
        "Perfect-link density vs power split across beamwidths",
        "phi",
        _lin(0.0, 1.0, 50),
        (
            CurveDef("theta_b=9", "an_n_p", {"beamwidth_deg": 9.0}),
            CurveDef("theta_b=30", "an_n_p", {"beamwidth_deg": 30.0}),
            CurveDef("theta_b=60", "an_n_p", {"beamwidth_deg": 60.0}),
        ),
        report_argmax=True,
    ),
    "fig9": FigureDef(
        "fig9",
        "mmWave vs microwave perfect-link density",
        "lambda_e",
        _lin(5e-5, 4e-4, 5),
        (
            CurveDef("mmWave", "an_n_p"),
            CurveDef("microwave", "microwave_n_p"),
        ),
    ),
}


def figure_base_params(name: str, curve: CurveDef) -> ScenarioParams:
    params = preset(name)
    overrides = dict(curve.overrides)
    if "beamwidth_deg" in overrides:
        bw = float(overrides.pop("beamwidth_deg"))
        an = params.an
        params = params.replace(antenna=AnPattern(an.info_gain, an.an_gain, bw, an.power_split))
    if overrides:
        params = params.replace(**overrides)
    return params


def render_figure(
    path: Path,
    title: str,
    axis: str,
    curves: Sequence[Tuple[str, Sequence[float], Sequence[Optional[float]], Sequence[Optional[float]], Sequence[Optional[float]]]],
    log_y: bool = False,
) -> None:
    """Render analytical lines and empirical errorbar markers to a PNG.

    ``curves``: (label, grid, analytical, empirical, ci95) per curve.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (label, grid, analytical, empirical, ci95) in enumerate(curves):
        color = colors[i % len(colors)]
        xs = np.asarray(grid, dtype=float)
        a = np.array([np.nan if v is None else v for v in analytical], dtype=float)
        e = np.array([np.nan if v is None else v for v in empirical], dtype=float)
        c = np.array([np.nan if v is None else v for v in ci95], dtype=float)
        if np.isfinite(a).any():
            ax.plot(xs, a, "-", color=color, label=f"{label} (analytical)")
        if np.isfinite(e).any():
            ax.errorbar(
                xs, e, yerr=np.where(np.isfinite(c), c, 0.0),
                fmt="o", ms=4, color=color, linestyle="none",
                label=f"{label} (simulation)",
            )
    ax.set_xlabel(axis)
    ax.set_title(title)
    if log_y:
        ax.set_yscale("log")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
