"""Stochastic-geometry Monte Carlo engine.

Samples the transmitter and eavesdropper point processes directly and
estimates every secrecy metric empirically, as the independent
cross-validation route for the closed forms.

Determinism: all randomness derives from a master seed through
counter-based substreams keyed by (seed, stream name, batch index), with a
batch partition that is a pure function of the scenario, so identical
(seed, params, trials) reproduce bit-identical estimates regardless of
execution order, and trials can be dispatched batch-wise to workers.

The typical user sits at the origin.  Eavesdropper fields are sampled in a
window centered on the serving transmitter, which is exact for every
eavesdropper-side functional because the two processes are independent and
jointly stationary.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .scenario import AnPattern, MicrowaveParams, ScenarioParams

NOISE_METRICS = ("tau_n", "tau_c", "p_con", "p_sec_n", "p_sec_c")
AN_METRICS = ("p_con", "p_sec", "n_p")

_TARGET_POINTS_PER_BATCH = 400_000.0


@dataclass(frozen=True)
class EmpiricalMetrics:
    """Empirical probability estimate with a 95% Wilson interval."""

    estimate: float
    ci_halfwidth: float
    trials: int
    seed: int
    void_fraction: float = 0.0


def wilson_halfwidth(successes: float, trials: int, z: float = 1.959963984540054) -> float:
    if trials <= 0:
        return 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    return (
        z
        * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
        / denom
    )


def _metrics_from_counts(successes: float, trials: int, seed: int, void: int) -> EmpiricalMetrics:
    return EmpiricalMetrics(
        estimate=successes / trials,
        ci_halfwidth=wilson_halfwidth(successes, trials),
        trials=trials,
        seed=seed,
        void_fraction=void / trials,
    )


# ---------------------------------------------------------------------------
# Substreams and batching
# ---------------------------------------------------------------------------


def _stream_rng(seed: int, stream: str, batch_index: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    stream_id = zlib.crc32(stream.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=(int(seed), stream_id, int(batch_index)))
    return np.random.Generator(np.random.Philox(ss))


def _batch_plan(trials: int, mean_points_per_trial: float) -> Iterable[Tuple[int, int]]:
    """Deterministic (batch_index, batch_trials) partition sized so each
    batch handles roughly a constant number of sampled points."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    batch = int(_TARGET_POINTS_PER_BATCH / max(mean_points_per_trial, 1.0))
    batch = max(16, min(8192, batch))
    start = 0
    index = 0
    while start < trials:
        size = min(batch, trials - start)
        yield index, size
        start += size
        index += 1


def _ranges(counts: np.ndarray) -> np.ndarray:
    """[0..c0-1, 0..c1-1, ...] for ragged indexing."""
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    starts = np.zeros(len(counts), dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])
    return np.arange(total, dtype=np.int64) - np.repeat(starts, counts)


@dataclass
class _Segments:
    """Trial-contiguous flat layout: counts per trial and point->trial ids."""

    counts: np.ndarray
    offsets: np.ndarray
    ids: np.ndarray

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "_Segments":
        counts = counts.astype(np.int64)
        offsets = np.zeros(len(counts), dtype=np.int64)
        np.cumsum(counts[:-1], out=offsets[1:])
        ids = np.repeat(np.arange(len(counts), dtype=np.int64), counts)
        return cls(counts=counts, offsets=offsets, ids=ids)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def reduce(self, ufunc, values: np.ndarray, empty: float) -> np.ndarray:
        """Per-trial reduction of point values (empty trials -> ``empty``)."""
        out = np.full(len(self.counts), empty, dtype=float)
        nonempty = self.counts > 0
        if values.size and nonempty.any():
            out[nonempty] = ufunc.reduceat(values, self.offsets[nonempty])
        return out

    def argmax(self, values: np.ndarray) -> np.ndarray:
        """Per-trial index (into the flat arrays) of the maximal value;
        -1 for empty trials."""
        best = self.reduce(np.maximum, values, -np.inf)
        out = np.full(len(self.counts), -1, dtype=np.int64)
        if values.size == 0:
            return out
        is_best = values == best[self.ids]
        idx = np.where(is_best, np.arange(values.size, dtype=np.int64), np.iinfo(np.int64).max)
        nonempty = self.counts > 0
        if nonempty.any():
            first = np.minimum.reduceat(idx, self.offsets[nonempty])
            out[nonempty] = first
        return out


# ---------------------------------------------------------------------------
# Window rule and field sampling
# ---------------------------------------------------------------------------


def default_window_radius(params: ScenarioParams) -> float:
    """max(5 D, radius at which the boresight NLOS path loss drops 30 dB
    below the noise floor); adequacy is asserted by tests, not assumed."""
    if isinstance(params.antenna, AnPattern):
        gain = params.antenna.info_gain
    else:
        gain = params.antenna.main_gain
    target = params.noise * 1e-3
    r_noise = (
        params.tx_power * gain * params.pathloss.c_nlos / target
    ) ** (1.0 / params.pathloss.alpha_nlos)
    return max(5.0 * params.blockage.los_radius_m, r_noise)


def microwave_window_radius(params: MicrowaveParams) -> float:
    """The baseline network has no noise floor; interference beyond the
    window is completed analytically by its mean (the variance of the far
    field decays like R^(2 - 2 alpha)), so a moderate window suffices."""
    return 800.0


def _microwave_far_field_mean(params: MicrowaveParams, window: float, gain: float, role_prob: float) -> float:
    """Mean aggregate of gain * r^-alpha * Exp(1) marks beyond the window."""
    a = params.pathloss_exponent
    return (
        2.0
        * math.pi
        * params.bs_intensity
        * role_prob
        * gain
        * window ** (2.0 - a)
        / (a - 2.0)
    )


def _sample_radii(rng: np.random.Generator, total: int, window: float) -> np.ndarray:
    return window * np.sqrt(rng.random(total))


def _sample_los(
    rng: np.random.Generator, radii: np.ndarray, params: ScenarioParams
) -> np.ndarray:
    draws = rng.random(radii.size)
    return (radii <= params.blockage.los_radius_m) & (
        draws < params.blockage.los_fraction
    )


def _pathloss(params: ScenarioParams, radii: np.ndarray, los: np.ndarray) -> np.ndarray:
    pl = params.pathloss
    with np.errstate(divide="ignore"):
        return np.where(
            los,
            pl.c_los * radii ** (-pl.alpha_los),
            pl.c_nlos * radii ** (-pl.alpha_nlos),
        )


def _fading(
    rng: np.random.Generator, los: np.ndarray, params: ScenarioParams
) -> np.ndarray:
    shapes = np.where(
        los, float(params.fading.nakagami_los), float(params.fading.nakagami_nlos)
    )
    return rng.gamma(shapes, 1.0)


@dataclass
class NetworkRealization:
    """One sampled world: transmitter and eavesdropper points with LOS
    marks, sectored-gain draws, fading draws, and the serving selection."""

    window_radius: float
    bs_xy: np.ndarray
    bs_los: np.ndarray
    bs_fading: np.ndarray
    serving_index: int
    eve_xy: np.ndarray
    eve_los: np.ndarray
    eve_gain: np.ndarray
    eve_fading: np.ndarray

    @property
    def void(self) -> bool:
        """No transmitter fell inside the window; flagged for the caller
        rather than silently resampled."""
        return self.serving_index < 0

    @property
    def bs_count(self) -> int:
        return len(self.bs_xy)

    @property
    def eve_count(self) -> int:
        return len(self.eve_xy)


def sample_realization(
    params: ScenarioParams,
    window_radius: Optional[float] = None,
    seed: int = 0,
    index: int = 0,
) -> NetworkRealization:
    """Sample one network world; ``index`` selects the substream so
    successive realizations are independent and order-free."""
    window = window_radius if window_radius is not None else default_window_radius(params)
    rng = _stream_rng(seed, "realization", index)

    n_bs = int(rng.poisson(params.bs_intensity * math.pi * window * window))
    bs_r = _sample_radii(rng, n_bs, window)
    bs_theta = rng.uniform(0.0, 2.0 * math.pi, n_bs)
    bs_xy = np.column_stack([bs_r * np.cos(bs_theta), bs_r * np.sin(bs_theta)])
    bs_los = _sample_los(rng, bs_r, params)
    bs_fading = _fading(rng, bs_los, params)
    if n_bs:
        serving = int(np.argmax(_pathloss(params, bs_r, bs_los)))
    else:
        serving = -1

    n_eve = int(rng.poisson(params.eve_intensity * math.pi * window * window))
    eve_r = _sample_radii(rng, n_eve, window)
    eve_theta = rng.uniform(0.0, 2.0 * math.pi, n_eve)
    eve_xy = np.column_stack([eve_r * np.cos(eve_theta), eve_r * np.sin(eve_theta)])
    # marks of the links from the serving transmitter: recompute distances
    if serving >= 0 and n_eve:
        link = np.linalg.norm(eve_xy - bs_xy[serving], axis=1)
    else:
        link = eve_r
    eve_los = _sample_los(rng, link, params)
    eve_fading = _fading(rng, eve_los, params)
    if isinstance(params.antenna, AnPattern):
        gains = np.where(
            rng.random(n_eve) < params.antenna.info_sector_prob,
            params.antenna.info_gain,
            0.0,
        )
    else:
        gains = np.where(
            rng.random(n_eve) < params.antenna.main_lobe_prob,
            params.antenna.main_gain,
            params.antenna.side_gain,
        )
    return NetworkRealization(
        window_radius=window,
        bs_xy=bs_xy,
        bs_los=bs_los,
        bs_fading=bs_fading,
        serving_index=serving,
        eve_xy=eve_xy,
        eve_los=eve_los,
        eve_gain=gains,
        eve_fading=eve_fading,
    )


def sample_link_statistics(
    params: ScenarioParams,
    draws: int,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> Dict[str, np.ndarray]:
    """Nearest-LOS, nearest-NLOS, and serving distances over many sampled
    worlds (radial coordinates only; the laws are isotropic)."""
    window = window_radius if window_radius is not None else default_window_radius(params)
    area = math.pi * window * window
    nearest_los = []
    nearest_nlos = []
    serving_r = []
    serving_los = []
    for batch_index, size in _batch_plan(draws, params.bs_intensity * area):
        rng = _stream_rng(seed, "linkstats", batch_index)
        seg = _Segments.from_counts(rng.poisson(params.bs_intensity * area, size))
        radii = _sample_radii(rng, seg.total, window)
        los = _sample_los(rng, radii, params)
        loss = _pathloss(params, radii, los)
        nearest_los.append(seg.reduce(np.minimum, np.where(los, radii, np.inf), np.inf))
        nearest_nlos.append(seg.reduce(np.minimum, np.where(los, np.inf, radii), np.inf))
        best = seg.argmax(loss)
        ok = best >= 0
        r = np.full(size, np.inf)
        r[ok] = radii[best[ok]]
        state = np.zeros(size, dtype=bool)
        state[ok] = los[best[ok]]
        serving_r.append(r)
        serving_los.append(state)
    return {
        "nearest_los": np.concatenate(nearest_los),
        "nearest_nlos": np.concatenate(nearest_nlos),
        "serving_r": np.concatenate(serving_r),
        "serving_los": np.concatenate(serving_los),
    }


# ---------------------------------------------------------------------------
# Noise-limited estimators
# ---------------------------------------------------------------------------


@dataclass
class NoiseSufficientStats:
    """Per-trial reductions sufficient for every noise-limited metric at
    any thresholds: ``legit`` = M_s L* h of the serving link, ``strongest``
    and ``combined`` the max / sum of gain*loss*fading over eavesdroppers."""

    trials: int
    seed: int
    window_radius: float
    tx_power: float
    noise: float
    void: np.ndarray
    legit: np.ndarray
    strongest: np.ndarray
    combined: np.ndarray

    @property
    def void_count(self) -> int:
        return int(self.void.sum())


def noise_limited_stats(
    params: ScenarioParams,
    trials: int,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> NoiseSufficientStats:
    """One simulation pass of the noise-limited network.

    Per trial: the serving link is the smallest-path-loss transmitter; each
    eavesdropper draws its sectored gain independently, its fading by the
    LOS state of its link from the serving transmitter.
    """
    antenna = params.plain
    window = window_radius if window_radius is not None else default_window_radius(params)
    area = math.pi * window * window
    void_parts = []
    legit_parts = []
    strongest_parts = []
    combined_parts = []
    mean_pts = (params.bs_intensity + params.eve_intensity) * area
    for batch_index, size in _batch_plan(trials, mean_pts):
        rng = _stream_rng(seed, "noise", batch_index)
        seg_b = _Segments.from_counts(rng.poisson(params.bs_intensity * area, size))
        radii = _sample_radii(rng, seg_b.total, window)
        los = _sample_los(rng, radii, params)
        loss = _pathloss(params, radii, los)
        best = seg_b.argmax(loss)
        ok = best >= 0
        serving_loss = np.zeros(size)
        serving_shape = np.ones(size)
        serving_loss[ok] = loss[best[ok]]
        serving_shape[ok] = np.where(
            los[best[ok]], params.fading.nakagami_los, params.fading.nakagami_nlos
        )
        h = rng.gamma(serving_shape, 1.0)
        legit = antenna.main_gain * serving_loss * h

        seg_e = _Segments.from_counts(rng.poisson(params.eve_intensity * area, size))
        e_radii = _sample_radii(rng, seg_e.total, window)
        e_los = _sample_los(rng, e_radii, params)
        e_loss = _pathloss(params, e_radii, e_los)
        e_gain = np.where(
            rng.random(seg_e.total) < antenna.main_lobe_prob,
            antenna.main_gain,
            antenna.side_gain,
        )
        g = _fading(rng, e_los, params)
        received = e_gain * e_loss * g
        void_parts.append(~ok)
        legit_parts.append(legit)
        strongest_parts.append(seg_e.reduce(np.maximum, received, 0.0))
        combined_parts.append(seg_e.reduce(np.add, received, 0.0))
    return NoiseSufficientStats(
        trials=trials,
        seed=seed,
        window_radius=window,
        tx_power=params.tx_power,
        noise=params.noise,
        void=np.concatenate(void_parts),
        legit=np.concatenate(legit_parts),
        strongest=np.concatenate(strongest_parts),
        combined=np.concatenate(combined_parts),
    )


def noise_counts_from_stats(
    stats: NoiseSufficientStats, t_c: float, t_e: float
) -> Dict[str, float]:
    """Event counts at (T_c, T_e) from one pass.  Void trials count as
    connectivity/connection failures and as secrecy successes."""
    ok = ~stats.void
    void = stats.void
    snr_scale = stats.tx_power / stats.noise
    return {
        "tau_n": float(np.count_nonzero(ok & (stats.legit >= stats.strongest))),
        "tau_c": float(np.count_nonzero(ok & (stats.legit >= stats.combined))),
        "p_con": float(np.count_nonzero(ok & (snr_scale * stats.legit >= t_c))),
        "p_sec_n": float(np.count_nonzero(void | (snr_scale * stats.strongest <= t_e))),
        "p_sec_c": float(np.count_nonzero(void | (snr_scale * stats.combined <= t_e))),
        "void": float(stats.void_count),
    }


def noise_limited_counts(
    params: ScenarioParams,
    trials: int,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> Dict[str, float]:
    """Success counts of all noise-limited events over shared realizations."""
    stats = noise_limited_stats(params, trials, seed, window_radius)
    return noise_counts_from_stats(stats, params.t_c, params.t_e)


def estimate_noise_limited(
    params: ScenarioParams,
    trials: int,
    metric: str,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> EmpiricalMetrics:
    if metric not in NOISE_METRICS:
        raise ValueError(f"unknown noise-limited metric {metric!r}; expected one of {NOISE_METRICS}")
    counts = noise_limited_counts(params, trials, seed, window_radius)
    return _metrics_from_counts(counts[metric], trials, seed, int(counts["void"]))


# ---------------------------------------------------------------------------
# Artificial-noise estimators
# ---------------------------------------------------------------------------


def _wrap_angle(delta: np.ndarray) -> np.ndarray:
    return (delta + math.pi) % (2.0 * math.pi) - math.pi


@dataclass
class AnSufficientStats:
    """Per-trial reductions of a sampled interference-limited world that
    are sufficient to evaluate the AN metrics on any (phi, T_c, T_e) grid
    within the filtering envelope (phi <= phi_max, T_e >= t_e_min).

    SINR_user(phi) = phi*a / (phi*b_info + (1-phi)*c_an + noise);
    per candidate eavesdropper: SINR(phi) = phi*s / ((1-phi)*w + noise).
    """

    trials: int
    seed: int
    window_radius: float
    noise: float
    t_c_is_free: bool
    phi_max: float
    t_e_min: float
    void: np.ndarray
    a: np.ndarray
    b_info: np.ndarray
    c_an: np.ndarray
    eve_trial: np.ndarray
    eve_s: np.ndarray
    eve_w: np.ndarray

    @property
    def void_count(self) -> int:
        return int(self.void.sum())


def _an_pairwise_interference(
    rng: np.random.Generator,
    eve_xy: np.ndarray,
    eve_trial: np.ndarray,
    bs_xy: np.ndarray,
    bs_boresight: np.ndarray,
    seg_b: _Segments,
    params: ScenarioParams,
    an_gain: float,
) -> np.ndarray:
    """Jamming power sum at each candidate eavesdropper from transmitters
    whose jamming sector covers it (per-pair LOS marks and fading)."""
    beam_rad = math.radians(params.an.beamwidth_deg)
    nb_per_eve = seg_b.counts[eve_trial]
    pair_eve = np.repeat(np.arange(len(eve_xy), dtype=np.int64), nb_per_eve)
    pair_bs = np.repeat(seg_b.offsets[eve_trial], nb_per_eve) + _ranges(nb_per_eve)
    if pair_eve.size == 0:
        return np.zeros(len(eve_xy))
    delta = eve_xy[pair_eve] - bs_xy[pair_bs]
    dist = np.hypot(delta[:, 0], delta[:, 1])
    angle = np.arctan2(delta[:, 1], delta[:, 0])
    jams = np.abs(_wrap_angle(angle - bs_boresight[pair_bs])) > beam_rad
    link_los = _sample_los(rng, dist, params)
    loss = _pathloss(params, dist, link_los)
    g = _fading(rng, link_los, params)
    contrib = np.where(jams, an_gain * params.tx_power * loss * g, 0.0)
    return np.bincount(pair_eve, weights=contrib, minlength=len(eve_xy))


def an_sufficient_stats(
    params: ScenarioParams,
    trials: int,
    seed: int = 0,
    window_radius: Optional[float] = None,
    phi_max: float = 1.0,
    t_e_min: Optional[float] = None,
) -> AnSufficientStats:
    """One simulation pass of the AN network.

    Each transmitter gets an independent uniform boresight; sector
    memberships of the user and of every eavesdropper are tested
    geometrically against it.  All eavesdroppers of one trial share one
    jamming field.  Eavesdroppers that could not violate the wiretap
    threshold even interference-free (at phi_max / t_e_min) are dropped
    before the pairwise jamming sums.
    """
    an = params.an
    window = window_radius if window_radius is not None else default_window_radius(params)
    area = math.pi * window * window
    t_e_min = params.t_e if t_e_min is None else t_e_min
    beam_rad = math.radians(an.beamwidth_deg)

    void_parts = []
    a_parts = []
    b_parts = []
    c_parts = []
    eve_trial_parts = []
    eve_s_parts = []
    eve_w_parts = []
    base = 0
    mean_pts = (params.bs_intensity * 2 + params.eve_intensity) * area
    for batch_index, size in _batch_plan(trials, mean_pts):
        rng = _stream_rng(seed, "an", batch_index)
        seg_b = _Segments.from_counts(rng.poisson(params.bs_intensity * area, size))
        b_r = _sample_radii(rng, seg_b.total, window)
        b_theta = rng.uniform(0.0, 2.0 * math.pi, seg_b.total)
        bs_xy = np.column_stack([b_r * np.cos(b_theta), b_r * np.sin(b_theta)])
        b_los = _sample_los(rng, b_r, params)
        b_loss = _pathloss(params, b_r, b_los)
        b_h = _fading(rng, b_los, params)
        boresight = rng.uniform(-math.pi, math.pi, seg_b.total)

        best = seg_b.argmax(b_loss)
        ok = best >= 0
        serving_xy = np.zeros((size, 2))
        serving_xy[ok] = bs_xy[best[ok]]
        # the serving beam points at the user: boresight towards the origin
        user_dir = np.arctan2(-serving_xy[:, 1], -serving_xy[:, 0])
        if ok.any():
            boresight[best[ok]] = user_dir[ok]

        a = np.zeros(size)
        a[ok] = params.tx_power * an.info_gain * b_loss[best[ok]] * b_h[best[ok]]

        # user-side interference, split by the user's membership in each
        # interferer's information sector
        to_user = np.arctan2(-bs_xy[:, 1], -bs_xy[:, 0])
        in_info = np.abs(_wrap_angle(to_user - boresight)) <= beam_rad
        contrib = params.tx_power * b_loss * b_h
        not_serving = np.ones(seg_b.total, dtype=bool)
        if ok.any():
            not_serving[best[ok]] = False
        b_info = seg_b.reduce(
            np.add, np.where(in_info & not_serving, an.info_gain * contrib, 0.0), 0.0
        )
        c_an = seg_b.reduce(
            np.add, np.where(~in_info & not_serving, an.an_gain * contrib, 0.0), 0.0
        )

        # eavesdroppers in a window around the serving transmitter
        seg_e = _Segments.from_counts(rng.poisson(params.eve_intensity * area, size))
        e_r = _sample_radii(rng, seg_e.total, window)
        e_theta = rng.uniform(0.0, 2.0 * math.pi, seg_e.total)
        offsets = np.column_stack([e_r * np.cos(e_theta), e_r * np.sin(e_theta)])
        eve_xy = serving_xy[seg_e.ids] + offsets
        e_los = _sample_los(rng, e_r, params)
        e_loss = _pathloss(params, e_r, e_los)
        e_g = _fading(rng, e_los, params)
        in_sector = (
            np.abs(_wrap_angle(e_theta - user_dir[seg_e.ids])) <= beam_rad
        ) & (best >= 0)[seg_e.ids]
        s = params.tx_power * an.info_gain * e_loss * e_g
        # interference-free screening: the strongest possible SINR of a
        # candidate is phi_max * s / noise
        dangerous = in_sector & (phi_max * s > t_e_min * params.noise)
        d_idx = np.flatnonzero(dangerous)
        d_xy = eve_xy[d_idx]
        d_trial = seg_e.ids[d_idx]
        w = _an_pairwise_interference(
            rng, d_xy, d_trial, bs_xy, boresight, seg_b, params, an.an_gain
        )

        void_parts.append(~ok)
        a_parts.append(a)
        b_parts.append(b_info)
        c_parts.append(c_an)
        eve_trial_parts.append(d_trial + base)
        eve_s_parts.append(s[d_idx])
        eve_w_parts.append(w)
        base += size

    return AnSufficientStats(
        trials=trials,
        seed=seed,
        window_radius=window,
        noise=params.noise,
        t_c_is_free=True,
        phi_max=phi_max,
        t_e_min=t_e_min,
        void=np.concatenate(void_parts),
        a=np.concatenate(a_parts),
        b_info=np.concatenate(b_parts),
        c_an=np.concatenate(c_parts),
        eve_trial=np.concatenate(eve_trial_parts),
        eve_s=np.concatenate(eve_s_parts),
        eve_w=np.concatenate(eve_w_parts),
    )


def an_counts_from_stats(
    stats: AnSufficientStats, phi: float, t_c: float, t_e: float
) -> Dict[str, float]:
    """Event counts at one (phi, T_c, T_e) from a sufficient-statistics pass."""
    if phi > stats.phi_max + 1e-12:
        raise ValueError(f"phi={phi} outside the screened envelope (max {stats.phi_max})")
    if t_e < stats.t_e_min - 1e-12:
        raise ValueError(f"t_e={t_e} below the screened envelope (min {stats.t_e_min})")
    ok = ~stats.void
    sinr_u = phi * stats.a / (phi * stats.b_info + (1.0 - phi) * stats.c_an + stats.noise)
    p_con = float(np.count_nonzero(ok & (sinr_u >= t_c)))
    violation = phi * stats.eve_s > t_e * ((1.0 - phi) * stats.eve_w + stats.noise)
    per_trial = np.zeros(stats.trials, dtype=bool)
    per_trial[stats.eve_trial[violation]] = True
    p_sec = float(np.count_nonzero(~per_trial))
    return {"p_con": p_con, "p_sec": p_sec, "void": float(stats.void_count)}


def estimate_an(
    params: ScenarioParams,
    trials: int,
    metric: str,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> EmpiricalMetrics:
    """Empirical AN metric; n_p combines the two probability estimates."""
    if metric not in AN_METRICS:
        raise ValueError(f"unknown AN metric {metric!r}; expected one of {AN_METRICS}")
    an = params.an
    stats = an_sufficient_stats(
        params, trials, seed, window_radius, phi_max=an.power_split
    )
    counts = an_counts_from_stats(stats, an.power_split, params.t_c, params.t_e)
    if metric in ("p_con", "p_sec"):
        return _metrics_from_counts(counts[metric], trials, seed, stats.void_count)
    p_con = _metrics_from_counts(counts["p_con"], trials, seed, stats.void_count)
    p_sec = _metrics_from_counts(counts["p_sec"], trials, seed, stats.void_count)
    n_p = params.bs_intensity * p_con.estimate * p_sec.estimate
    halfwidth = params.bs_intensity * (
        p_con.estimate * p_sec.ci_halfwidth
        + p_sec.estimate * p_con.ci_halfwidth
        + p_con.ci_halfwidth * p_sec.ci_halfwidth
    )
    return EmpiricalMetrics(
        estimate=n_p,
        ci_halfwidth=halfwidth,
        trials=trials,
        seed=seed,
        void_fraction=stats.void_count / trials,
    )


# ---------------------------------------------------------------------------
# Microwave baseline (single slope, Rayleigh, interference-limited)
# ---------------------------------------------------------------------------


def microwave_counts(
    params: MicrowaveParams,
    trials: int,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> Dict[str, float]:
    """Event counts for the baseline network: no blockage, single path-loss
    slope, Rayleigh fading, noise ignored."""
    window = window_radius if window_radius is not None else microwave_window_radius(params)
    area = math.pi * window * window
    phi = params.power_split
    beam_rad = math.radians(params.beamwidth_deg)
    exp_ = params.pathloss_exponent
    counts = {"p_con": 0.0, "p_sec": 0.0, "void": 0.0}
    mean_pts = (params.bs_intensity * 2 + params.eve_intensity) * area
    for batch_index, size in _batch_plan(trials, mean_pts):
        rng = _stream_rng(seed, "microwave", batch_index)
        seg_b = _Segments.from_counts(rng.poisson(params.bs_intensity * area, size))
        b_r = _sample_radii(rng, seg_b.total, window)
        b_theta = rng.uniform(0.0, 2.0 * math.pi, seg_b.total)
        bs_xy = np.column_stack([b_r * np.cos(b_theta), b_r * np.sin(b_theta)])
        with np.errstate(divide="ignore"):
            b_loss = b_r ** (-exp_)
        b_h = rng.exponential(1.0, seg_b.total)
        boresight = rng.uniform(-math.pi, math.pi, seg_b.total)

        best = seg_b.argmax(b_loss)
        ok = best >= 0
        counts["void"] += float(np.count_nonzero(~ok))
        serving_xy = np.zeros((size, 2))
        serving_xy[ok] = bs_xy[best[ok]]
        user_dir = np.arctan2(-serving_xy[:, 1], -serving_xy[:, 0])
        if ok.any():
            boresight[best[ok]] = user_dir[ok]

        a = np.zeros(size)
        a[ok] = params.info_gain * b_loss[best[ok]] * b_h[best[ok]]
        to_user = np.arctan2(-bs_xy[:, 1], -bs_xy[:, 0])
        in_info = np.abs(_wrap_angle(to_user - boresight)) <= beam_rad
        not_serving = np.ones(seg_b.total, dtype=bool)
        if ok.any():
            not_serving[best[ok]] = False
        contrib = b_loss * b_h
        b_info = seg_b.reduce(
            np.add, np.where(in_info & not_serving, params.info_gain * contrib, 0.0), 0.0
        ) + _microwave_far_field_mean(params, window, params.info_gain, params.info_sector_prob)
        c_an = seg_b.reduce(
            np.add, np.where(~in_info & not_serving, params.an_gain * contrib, 0.0), 0.0
        ) + _microwave_far_field_mean(params, window, params.an_gain, params.an_sector_prob)
        denom = phi * b_info + (1.0 - phi) * c_an
        with np.errstate(invalid="ignore", divide="ignore"):
            sinr_u = np.where(denom > 0, phi * a / denom, np.inf)
        counts["p_con"] += float(np.count_nonzero(ok & (sinr_u >= params.t_c)))

        seg_e = _Segments.from_counts(rng.poisson(params.eve_intensity * area, size))
        e_r = _sample_radii(rng, seg_e.total, window)
        e_theta = rng.uniform(0.0, 2.0 * math.pi, seg_e.total)
        offsets = np.column_stack([e_r * np.cos(e_theta), e_r * np.sin(e_theta)])
        eve_xy = serving_xy[seg_e.ids] + offsets
        with np.errstate(divide="ignore"):
            e_loss = e_r ** (-exp_)
        e_g = rng.exponential(1.0, seg_e.total)
        in_sector = (np.abs(_wrap_angle(e_theta - user_dir[seg_e.ids])) <= beam_rad) & (
            (best >= 0)[seg_e.ids]
        )
        s = params.info_gain * e_loss * e_g
        d_idx = np.flatnonzero(in_sector)
        d_trial = seg_e.ids[d_idx]
        # jamming sums at all in-sector eavesdroppers (no noise floor to
        # screen against)
        nb_per_eve = seg_b.counts[d_trial]
        pair_eve = np.repeat(np.arange(len(d_idx), dtype=np.int64), nb_per_eve)
        pair_bs = np.repeat(seg_b.offsets[d_trial], nb_per_eve) + _ranges(nb_per_eve)
        if pair_eve.size:
            delta = eve_xy[d_idx][pair_eve] - bs_xy[pair_bs]
            dist = np.hypot(delta[:, 0], delta[:, 1])
            angle = np.arctan2(delta[:, 1], delta[:, 0])
            jams = np.abs(_wrap_angle(angle - boresight[pair_bs])) > beam_rad
            with np.errstate(divide="ignore"):
                pair_loss = dist ** (-exp_)
            pair_g = rng.exponential(1.0, pair_eve.size)
            w = np.bincount(
                pair_eve,
                weights=np.where(jams, params.an_gain * pair_loss * pair_g, 0.0),
                minlength=len(d_idx),
            )
        else:
            w = np.zeros(len(d_idx))
        w = w + _microwave_far_field_mean(
            params, window, params.an_gain, params.an_sector_prob
        )
        violation = phi * s[d_idx] > params.t_e * (1.0 - phi) * w
        per_trial = np.zeros(size, dtype=bool)
        per_trial[d_trial[violation]] = True
        counts["p_sec"] += float(np.count_nonzero(~per_trial))
    return counts


def estimate_microwave_baseline(
    params: MicrowaveParams,
    trials: int,
    seed: int = 0,
    window_radius: Optional[float] = None,
) -> EmpiricalMetrics:
    """Perfect-link density estimate of the microwave baseline."""
    counts = microwave_counts(params, trials, seed, window_radius)
    p_con = counts["p_con"] / trials
    p_sec = counts["p_sec"] / trials
    hw_con = wilson_halfwidth(counts["p_con"], trials)
    hw_sec = wilson_halfwidth(counts["p_sec"], trials)
    return EmpiricalMetrics(
        estimate=params.bs_intensity * p_con * p_sec,
        ci_halfwidth=params.bs_intensity
        * (p_con * hw_sec + p_sec * hw_con + hw_con * hw_sec),
        trials=trials,
        seed=seed,
        void_fraction=counts["void"] / trials,
    )
