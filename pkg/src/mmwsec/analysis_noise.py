"""Closed-form secrecy metrics of the noise-limited network.

Covers the association law of the dual-slope LOS/NLOS model, the mapped
one-dimensional eavesdropper process (path loss process with fading, PLPF),
secure connectivity for non-colluding and colluding eavesdroppers, the
connection/secrecy probabilities, and the perfect-link density.

Conventions shared with the simulator: link power gains are gamma(N_j, 1)
with N_j the Nakagami shape of the link's LOS state; the eavesdropper seen
gain is the two-level sectored pattern with main-lobe probability
beamwidth/180.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

from .numerics import (
    DEFAULT_SETTINGS,
    QuadratureSettings,
    gauss_2f1,
    integrate,
    laplace_derivative,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
    exponent_derivatives_from_intensity,
    NumericsError,
)
from .scenario import BlockageModel, FadingParams, PathLossModel, ScenarioParams

TWO_PI = 2.0 * math.pi

# Settings for the nested integrals of the analytical metrics; slightly
# looser than the defaults because every metric is a probability compared
# at absolute tolerances far above 1e-9.
_METRIC_SETTINGS = QuadratureSettings(rel_tol=1e-9, abs_tol=1e-12, max_subdivisions=200)
_OUTER_SETTINGS = QuadratureSettings(rel_tol=1e-7, abs_tol=1e-12, max_subdivisions=200)


@functools.lru_cache(maxsize=64)
def _gauss_laguerre(order: int, alpha: float):
    """Nodes/weights for integral_0^inf w^alpha e^-w f(w) dw."""
    import scipy.special

    nodes, weights = scipy.special.roots_genlaguerre(order, alpha)
    return tuple(nodes.tolist()), tuple(weights.tolist())


def gamma_tail_kappa(shape: int, convention: str = "factorial") -> float:
    """Coefficient of the exponential lower bound (1 - e^(-kappa*y))^N for
    the CDF of a gamma(N, 1) variable.

    The 'factorial' convention kappa = (N!)^(-1/N) is exact to leading
    order near zero and keeps the bound one-sided; the 'shape' convention
    kappa = N^(-1/N) is retained as a comparison candidate only.
    """
    if convention == "factorial":
        return math.factorial(shape) ** (-1.0 / shape)
    if convention == "shape":
        return float(shape) ** (-1.0 / shape)
    raise ValueError(f"unknown gamma tail convention {convention!r}")


# ---------------------------------------------------------------------------
# Geometry of the smallest-path-loss association
# ---------------------------------------------------------------------------


def nlos_exclusion_radius(pathloss: PathLossModel, r_los: float) -> float:
    """Distance beyond which a NLOS point has a larger path loss than a LOS
    point at r_los."""
    return (pathloss.c_nlos / pathloss.c_los) ** (1.0 / pathloss.alpha_nlos) * r_los ** (
        pathloss.alpha_los / pathloss.alpha_nlos
    )


def los_exclusion_radius(pathloss: PathLossModel, r_nlos: float) -> float:
    """Distance beyond which a LOS point has a larger path loss than a NLOS
    point at r_nlos."""
    return (pathloss.c_los / pathloss.c_nlos) ** (1.0 / pathloss.alpha_los) * r_nlos ** (
        pathloss.alpha_nlos / pathloss.alpha_los
    )


# ---------------------------------------------------------------------------
# Nearest-point and serving-distance distributions
# ---------------------------------------------------------------------------


def nearest_los_pdf(params: ScenarioParams, r: float) -> float:
    """Density of the nearest LOS distance, conditioned on at least one LOS
    point inside the ball.  Zero outside [0, D] by definition."""
    c = params.blockage.los_fraction
    d = params.blockage.los_radius_m
    lam = params.bs_intensity
    if r < 0.0 or r > d or c * lam == 0.0:
        return 0.0
    rate = math.pi * c * lam
    return TWO_PI * c * lam * r * math.exp(-rate * r * r) / (1.0 - math.exp(-rate * d * d))


def nearest_nlos_pdf(params: ScenarioParams, r: float) -> float:
    """Density of the nearest NLOS distance; two branches split at the ball
    radius because the NLOS intensity jumps from (1-C) lambda to lambda."""
    c = params.blockage.los_fraction
    d = params.blockage.los_radius_m
    lam = params.bs_intensity
    if r < 0.0 or lam == 0.0:
        return 0.0
    if r <= d:
        rate = math.pi * (1.0 - c) * lam
        return TWO_PI * (1.0 - c) * lam * r * math.exp(-rate * r * r)
    return (
        TWO_PI
        * lam
        * r
        * math.exp(-math.pi * lam * (r * r - d * d))
        * math.exp(-math.pi * (1.0 - c) * lam * d * d)
    )


@functools.lru_cache(maxsize=256)
def association_probabilities(params: ScenarioParams) -> Tuple[float, float]:
    """(A_L, A_N): probabilities that the serving point of the smallest
    path loss is LOS respectively NLOS."""
    c = params.blockage.los_fraction
    d = params.blockage.los_radius_m
    lam = params.bs_intensity
    pl = params.pathloss
    if lam == 0.0:
        return 0.0, 1.0
    ball_void = math.exp(-math.pi * c * lam * d * d)
    mu = nlos_exclusion_radius(pl, d)
    ratio = (pl.c_los / pl.c_nlos) ** (2.0 / pl.alpha_los)
    exp_ratio = 2.0 * pl.alpha_nlos / pl.alpha_los

    def integrand(x: float) -> float:
        los_beats = math.exp(-math.pi * c * lam * ratio * x**exp_ratio) - ball_void
        return los_beats * TWO_PI * (1.0 - c) * lam * x * math.exp(
            -math.pi * (1.0 - c) * lam * x * x
        )

    a_nlos = integrate(integrand, 0.0, mu, _METRIC_SETTINGS) + ball_void
    a_nlos = min(max(a_nlos, 0.0), 1.0)
    return 1.0 - a_nlos, a_nlos


def serving_distance_pdf(params: ScenarioParams, los: bool, r: float) -> float:
    """Density of the serving distance conditioned on the serving point's
    LOS state under smallest-path-loss association."""
    c = params.blockage.los_fraction
    d = params.blockage.los_radius_m
    lam = params.bs_intensity
    pl = params.pathloss
    a_los, a_nlos = association_probabilities(params)
    if r < 0.0 or lam == 0.0:
        return 0.0
    if los:
        if r > d or a_los == 0.0:
            return 0.0
        excl = nlos_exclusion_radius(pl, r)
        nlos_void = math.exp(-(1.0 - c) * lam * math.pi * excl * excl)
        return (
            nlos_void
            * TWO_PI
            * c
            * lam
            * r
            * math.exp(-c * lam * math.pi * r * r)
            / a_los
        )
    if a_nlos == 0.0:
        return 0.0
    # term 1: no LOS point offers a smaller path loss because the ball is
    # empty of LOS points up to the relevant radius
    if r <= d:
        term1 = (
            TWO_PI
            * lam
            * r
            * math.exp(-math.pi * lam * r * r)
            * (1.0 - c)
            * math.exp(math.pi * c * lam * (r * r - d * d))
        )
    else:
        term1 = TWO_PI * lam * r * math.exp(-math.pi * lam * r * r)
    # term 2: the nearest LOS point exists but loses on path loss
    term2 = 0.0
    if r <= nlos_exclusion_radius(pl, d):
        ratio = (pl.c_los / pl.c_nlos) ** (2.0 / pl.alpha_los)
        exp_ratio = 2.0 * pl.alpha_nlos / pl.alpha_los
        term2 = (
            TWO_PI
            * (1.0 - c)
            * lam
            * r
            * math.exp(-(1.0 - c) * lam * math.pi * r * r)
            * (
                math.exp(-c * lam * math.pi * ratio * r**exp_ratio)
                - math.exp(-c * lam * math.pi * d * d)
            )
        )
    return (term1 + term2) / a_nlos


@dataclass(frozen=True)
class AssociationLaw:
    """Bundle of the association probabilities and distance densities."""

    a_los: float
    a_nlos: float
    f_dl: Callable[[float], float]
    f_dn: Callable[[float], float]
    f_rl: Callable[[float], float]
    f_rn: Callable[[float], float]


def association_law(params: ScenarioParams) -> AssociationLaw:
    a_los, a_nlos = association_probabilities(params)
    return AssociationLaw(
        a_los=a_los,
        a_nlos=a_nlos,
        f_dl=lambda r: nearest_los_pdf(params, r),
        f_dn=lambda r: nearest_nlos_pdf(params, r),
        f_rl=lambda r: serving_distance_pdf(params, True, r),
        f_rn=lambda r: serving_distance_pdf(params, False, r),
    )


# ---------------------------------------------------------------------------
# Mapped point process of inverse received powers (PLPF)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlpfIntensity:
    """Intensity measure Lambda(0, t) of the one-dimensional process of
    inverse gain*fading*pathloss marks around a transmitter.

    ``gain_levels`` holds (gain, probability) pairs of the discrete antenna
    gain seen by the mapped points; the in-ball components carry the LOS
    split, the out-of-ball component is NLOS only.
    """

    point_intensity: float
    gain_levels: Tuple[Tuple[float, float], ...]
    blockage: BlockageModel
    pathloss: PathLossModel
    fading: FadingParams

    def component_in(self, los: bool, gain: float, prob: float, t: float) -> float:
        """In-ball component for one gain level and one LOS state."""
        if t <= 0.0:
            return 0.0
        a = self.pathloss.exponent(los)
        c = self.pathloss.intercept(los)
        shape = self.fading.shape(los)
        d = self.blockage.los_radius_m
        arg = d**a / (gain * c * t)
        if arg < 1e-12:
            # saturation regime: gamma(s, arg) ~ arg^s / s keeps the product
            # with the diverging scale factor finite
            total = 0.0
            for m in range(shape):
                total += d ** (a * m + 2.0) * (gain * c * t) ** (-m) / (
                    a * (m + 2.0 / a) * math.factorial(m)
                )
            return prob * total
        scale = (gain * c * t) ** (2.0 / a) / a
        total = 0.0
        for m in range(shape):
            total += lower_incomplete_gamma(m + 2.0 / a, arg) / math.factorial(m)
        return prob * scale * total

    def component_out(self, gain: float, prob: float, t: float) -> float:
        """Outside-ball component (always NLOS) for one gain level."""
        if t <= 0.0:
            return 0.0
        a = self.pathloss.alpha_nlos
        c = self.pathloss.c_nlos
        shape = self.fading.nakagami_nlos
        d = self.blockage.los_radius_m
        scale = (gain * c * t) ** (2.0 / a) / a
        arg = d**a / (gain * c * t)
        total = 0.0
        for m in range(shape):
            total += upper_incomplete_gamma(m + 2.0 / a, arg) / math.factorial(m)
        return prob * scale * total

    def __call__(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        c = self.blockage.los_fraction
        total = 0.0
        for gain, prob in self.gain_levels:
            total += c * self.component_in(True, gain, prob, t)
            total += (1.0 - c) * self.component_in(False, gain, prob, t)
            total += self.component_out(gain, prob, t)
        return TWO_PI * self.point_intensity * total

    # ---- Laplace transform of the aggregate of inverse marks -------------

    def laplace_exponent(self, s: float) -> float:
        """Exponent xi(s) with exp(xi(s)) = E[exp(-s * sum of 1/marks)],
        evaluated through the hypergeometric closed form.

        Requires alpha_nlos > 2 so the aggregate from the unbounded NLOS
        exterior is finite.
        """
        if s < 0.0:
            raise NumericsError(f"laplace exponent requires s >= 0, got {s}")
        if s == 0.0:
            return 0.0
        if not self.pathloss.alpha_nlos > 2.0:
            raise NumericsError(
                "aggregate transform needs alpha_nlos > 2, got "
                f"{self.pathloss.alpha_nlos}"
            )
        c_frac = self.blockage.los_fraction
        d = self.blockage.los_radius_m
        total = 0.0
        # in-ball terms, both LOS states, lower-incomplete kernel
        for los in (True, False):
            q = c_frac if los else 1.0 - c_frac
            if q == 0.0:
                continue
            a = self.pathloss.exponent(los)
            c = self.pathloss.intercept(los)
            shape = self.fading.shape(los)
            for gain, prob in self.gain_levels:
                a_d = d**a / (gain * c)
                rho = a_d / (s + a_d)
                if rho >= 1.0:  # s negligible against a_d: term ~ s -> 0
                    continue
                base = gain * c * d ** (2.0 - a) / a
                for m in range(shape):
                    total += (
                        q
                        * prob
                        * base
                        * rho ** (m + 1)
                        / (m + 2.0 / a)
                        * gauss_2f1(1.0, m + 1.0, m + 2.0 / a + 1.0, rho)
                    )
        # outside-ball terms, NLOS only, upper-incomplete kernel
        a = self.pathloss.alpha_nlos
        c = self.pathloss.c_nlos
        shape = self.fading.nakagami_nlos
        for gain, prob in self.gain_levels:
            a_d = d**a / (gain * c)
            rho = a_d / (s + a_d)
            w_s = s / (s + a_d)
            if rho >= 1.0 or w_s == 0.0:
                continue
            base = gain * c * d ** (2.0 - a) / a
            for m in range(shape):
                total += (
                    prob
                    * base
                    * rho ** (m + 1)
                    / (1.0 - 2.0 / a)
                    * gauss_2f1(1.0, m + 1.0, 2.0 - 2.0 / a, w_s)
                )
        return -s * TWO_PI * self.point_intensity * total

    def laplace_exponent_derivatives(
        self, settings: QuadratureSettings = _METRIC_SETTINGS
    ) -> Callable[[int, float], float]:
        """Derivative evaluator of the Laplace exponent: order 0 from the
        closed form, higher orders by differentiating under the tail
        integral of the intensity measure."""
        via_integral = exponent_derivatives_from_intensity(self, settings)

        def derivs(order: int, s: float) -> float:
            if order == 0:
                return self.laplace_exponent(s)
            return via_integral(order, s)

        return derivs


@functools.lru_cache(maxsize=256)
def eavesdropper_plpf(params: ScenarioParams) -> PlpfIntensity:
    """Mapped process of the eavesdropper field around the serving BS."""
    antenna = params.plain
    return PlpfIntensity(
        point_intensity=params.eve_intensity,
        gain_levels=(
            (antenna.main_gain, antenna.main_lobe_prob),
            (antenna.side_gain, antenna.side_lobe_prob),
        ),
        blockage=params.blockage,
        pathloss=params.pathloss,
        fading=params.fading,
    )


def plpf_intensity(params: ScenarioParams, t: float) -> float:
    """Mean number of eavesdropper marks with inverse received power <= t."""
    if t < 0.0:
        raise NumericsError(f"plpf_intensity requires t >= 0, got {t}")
    return eavesdropper_plpf(params)(t)


def colluding_laplace(params: ScenarioParams, s: float) -> float:
    """Laplace transform at s of the aggregate eavesdropper-side
    gain*fading*pathloss sum."""
    return math.exp(eavesdropper_plpf(params).laplace_exponent(s))


# ---------------------------------------------------------------------------
# Secure connectivity
# ---------------------------------------------------------------------------


def _branch_integral(
    params: ScenarioParams,
    los: bool,
    inner: Callable[[float, bool], float],
) -> float:
    """Weighted outer integral A_j * integral f_rj(r) inner(r, los) dr over
    the branch support."""
    a_los, a_nlos = association_probabilities(params)
    weight = a_los if los else a_nlos
    if weight <= 0.0:
        return 0.0
    hi = params.blockage.los_radius_m if los else math.inf

    def outer(r: float) -> float:
        f = serving_distance_pdf(params, los, r)
        if f == 0.0:
            return 0.0
        return f * inner(r, los)

    return weight * integrate(outer, 0.0, hi, _OUTER_SETTINGS)


def secure_connectivity_noncolluding(params: ScenarioParams) -> float:
    """Probability that the intended link beats the strongest single
    eavesdropper: void probability of the mapped process below the inverse
    of the legitimate received power, averaged over serving distance and
    fading."""
    if params.eve_intensity == 0.0:
        return 1.0
    plpf = eavesdropper_plpf(params)
    m_s = params.plain.main_gain

    def inner(r: float, los: bool) -> float:
        a = params.pathloss.exponent(los)
        c = params.pathloss.intercept(los)
        shape = params.fading.shape(los)
        norm = math.gamma(shape)
        r_a = r**a
        # expectation over the gamma(shape, 1) serving fading on the
        # matching Gauss-Laguerre rule; the integrand is smooth in w
        nodes, weights = _gauss_laguerre(64, float(shape - 1))
        total = 0.0
        for w, wt in zip(nodes, weights):
            total += wt * math.exp(-plpf(r_a / (m_s * w * c)))
        return total / norm

    total = _branch_integral(params, True, inner) + _branch_integral(params, False, inner)
    return min(max(total, 0.0), 1.0)


def secure_connectivity_colluding_exact(params: ScenarioParams) -> float:
    """Secure connectivity against the combined eavesdropper aggregate,
    through derivatives of the aggregate's Laplace transform."""
    if params.eve_intensity == 0.0:
        return 1.0
    plpf = eavesdropper_plpf(params)
    # memoized so the derivative orders at one s share their quadratures
    xi_derivs = functools.lru_cache(maxsize=4096)(plpf.laplace_exponent_derivatives())
    m_s = params.plain.main_gain

    def inner(r: float, los: bool) -> float:
        a = params.pathloss.exponent(los)
        c = params.pathloss.intercept(los)
        shape = params.fading.shape(los)
        s = r**a / (m_s * c)
        total = 0.0
        for m in range(shape):
            total += (
                s**m
                / math.factorial(m)
                * (-1.0) ** m
                * laplace_derivative(xi_derivs, m, s)
            )
        return total

    total = _branch_integral(params, True, inner) + _branch_integral(params, False, inner)
    return min(max(total, 0.0), 1.0)


def secure_connectivity_colluding_bound(
    params: ScenarioParams, convention: str = "factorial"
) -> float:
    """Upper bound of the colluding secure connectivity from the
    exponential lower bound of the gamma fading CDF."""
    if params.eve_intensity == 0.0:
        return 1.0
    plpf = eavesdropper_plpf(params)
    m_s = params.plain.main_gain

    def inner(r: float, los: bool) -> float:
        a = params.pathloss.exponent(los)
        c = params.pathloss.intercept(los)
        shape = params.fading.shape(los)
        kappa = gamma_tail_kappa(shape, convention)
        s = r**a / (m_s * c)
        total = 0.0
        for n in range(1, shape + 1):
            total += (
                math.comb(shape, n)
                * (-1.0) ** (n + 1)
                * math.exp(plpf.laplace_exponent(kappa * n * s))
            )
        return total

    total = _branch_integral(params, True, inner) + _branch_integral(params, False, inner)
    return min(max(total, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Connection and secrecy probabilities, perfect-link density
# ---------------------------------------------------------------------------


def connection_probability(params: ScenarioParams) -> float:
    """Probability that the legitimate SNR clears the connection threshold
    (noise-limited, plain beamforming)."""
    m_s = params.plain.main_gain
    n0 = params.noise

    def inner(r: float, los: bool) -> float:
        a = params.pathloss.exponent(los)
        c = params.pathloss.intercept(los)
        shape = params.fading.shape(los)
        y = n0 * params.t_c * r**a / (params.tx_power * m_s * c)
        return upper_incomplete_gamma(shape, y) / math.gamma(shape)

    total = _branch_integral(params, True, inner) + _branch_integral(params, False, inner)
    return min(max(total, 0.0), 1.0)


def secrecy_probability_noncolluding(params: ScenarioParams) -> float:
    """Probability that every individual eavesdropper SNR stays below the
    wiretap threshold: void probability of the mapped process below
    tx_power / (noise * threshold).

    The mapped-process argument keeps the transmit power because the
    eavesdropper SNR scales with it.
    """
    if params.eve_intensity == 0.0:
        return 1.0
    t_star = params.tx_power / (params.t_e * params.noise)
    return math.exp(-plpf_intensity(params, t_star))


def secrecy_probability_colluding(
    params: ScenarioParams, terms: int = 5, convention: str = "scaled-factorial"
) -> float:
    """Approximate probability that the combined eavesdropper SNR stays
    below the wiretap threshold.

    The hard unit comparison is smoothed by a mean-one gamma variable with
    ``terms`` degrees of freedom, whose CDF bound yields an alternating
    binomial sum over the aggregate's Laplace transform.  The mean-one
    smoothing variable calls for the scaled coefficient N * (N!)^(-1/N);
    'factorial' is retained as a comparison candidate.
    """
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    if params.eve_intensity == 0.0:
        return 1.0
    if convention == "scaled-factorial":
        a = terms * math.factorial(terms) ** (-1.0 / terms)
    elif convention == "factorial":
        a = math.factorial(terms) ** (-1.0 / terms)
    else:
        raise ValueError(f"unknown smoothing convention {convention!r}")
    plpf = eavesdropper_plpf(params)
    scale = params.tx_power / (params.noise * params.t_e)
    total = 0.0
    for n in range(1, terms + 1):
        total += (
            math.comb(terms, n)
            * (-1.0) ** (n + 1)
            * math.exp(plpf.laplace_exponent(a * n * scale))
        )
    return min(max(total, 0.0), 1.0)


def secrecy_rate_bits(params: ScenarioParams) -> float:
    """Confidential rate implied by the two thresholds:
    log2(1+T_c) - log2(1+T_e)."""
    return math.log2((1.0 + params.t_c) / (1.0 + params.t_e))


def perfect_link_density(params: ScenarioParams, terms: int = 5) -> Tuple[float, float]:
    """(N_p, omega): density of links that are simultaneously connected and
    secret, and the secrecy throughput area density N_p * R_s."""
    p_con = connection_probability(params)
    if params.eavesdropper_mode == "colluding":
        p_sec = secrecy_probability_colluding(params, terms)
    else:
        p_sec = secrecy_probability_noncolluding(params)
    n_p = params.bs_intensity * p_con * p_sec
    return n_p, n_p * secrecy_rate_bits(params)
