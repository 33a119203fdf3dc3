"""Closed-form metrics of the interference-limited network with an
artificial-noise power split.

Each transmitter concentrates a fraction phi of its power on the
information beam (gain M_s inside the sector) and jams with the remainder
(gain M_a outside the sector); sidelobes of both signals are treated as
zero.  Interferers seen by any receiver split into an information-beam
process and a jamming process with the sector probabilities, while
eavesdroppers cancel all information-beam interference, so their SINR sees
jamming plus noise only.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

from .numerics import NumericsError, QuadratureSettings, integrate
from .scenario import ScenarioParams
from .analysis_noise import (
    PlpfIntensity,
    association_probabilities,
    gamma_tail_kappa,
    los_exclusion_radius,
    nlos_exclusion_radius,
    serving_distance_pdf,
)

TWO_PI = 2.0 * math.pi

_METRIC_SETTINGS = QuadratureSettings(rel_tol=1e-8, abs_tol=1e-12, max_subdivisions=200)


def _require_supercritical_nlos(params: ScenarioParams) -> None:
    if not params.pathloss.alpha_nlos > 2.0:
        raise NumericsError(
            "interference-limited analysis needs alpha_nlos > 2, got "
            f"{params.pathloss.alpha_nlos}"
        )


def interferer_success_tail(
    u: float, k: float, c_j: float, alpha_j: float, shape_j: int
) -> float:
    """Per-interferer factor 1 - (1 + k * c_j * u^-alpha_j)^-N_j entering the
    generating-functional exponent (gamma-fading Laplace transform)."""
    return 1.0 - (1.0 + k * c_j * u ** (-alpha_j)) ** (-shape_j)


def sector_thinning_void(
    params: ScenarioParams,
    z: float,
    v: float,
    y: float,
    k: float,
    los_interferer: bool,
    role_prob: float,
) -> float:
    """Expected generating functional over one annular interferer region:
    exp(-2 pi z lambda_B role_prob * integral_v^y tail(u) u du)."""
    if z == 0.0 or role_prob == 0.0 or k == 0.0 or v >= y:
        return 1.0
    c_j = params.pathloss.intercept(los_interferer)
    alpha_j = params.pathloss.exponent(los_interferer)
    shape_j = params.fading.shape(los_interferer)
    prefactor = TWO_PI * z * params.bs_intensity * role_prob
    # only the exponent's absolute accuracy matters
    settings = QuadratureSettings(
        rel_tol=1e-6,
        abs_tol=max(1e-13, 1e-10 / prefactor),
        max_subdivisions=150,
    )

    def integrand(u: float) -> float:
        return interferer_success_tail(u, k, c_j, alpha_j, shape_j) * u

    if math.isinf(y):
        # split off the far field where the tail factor linearizes; the
        # remainder is a convergent power series integrated in closed form
        u_big = max(2.0 * v, (k * c_j * 1e4) ** (1.0 / alpha_j))
        value = integrate(integrand, v, u_big, settings)
        for i in range(1, 4):
            value += (
                (-1.0) ** (i + 1)
                * math.comb(shape_j + i - 1, i)
                * (k * c_j) ** i
                * u_big ** (2.0 - i * alpha_j)
                / (i * alpha_j - 2.0)
            )
    else:
        value = integrate(integrand, v, y, settings)
    return math.exp(-prefactor * value)


@functools.lru_cache(maxsize=256)
def an_interference_plpf(params: ScenarioParams) -> PlpfIntensity:
    """Mapped process of inverse jamming gain*fading*pathloss marks of the
    jamming-beam transmitters around any fixed receiver."""
    an = params.an
    return PlpfIntensity(
        point_intensity=params.bs_intensity,
        gain_levels=((an.an_gain, an.an_sector_prob),),
        blockage=params.blockage,
        pathloss=params.pathloss,
        fading=params.fading,
    )


def an_psi(params: ScenarioParams, s: float) -> float:
    """Laplace exponent of the normalized jamming aggregate
    sum M_a * g * L over jamming-beam transmitters; nonpositive."""
    return an_interference_plpf(params).laplace_exponent(s)


@dataclass(frozen=True)
class AnInterferenceKernel:
    """Evaluator bundle for the interference-limited closed forms."""

    psi: Callable[[float], float]
    delta: Callable[..., float]
    tail: Callable[..., float]


def an_interference_kernel(params: ScenarioParams) -> AnInterferenceKernel:
    return AnInterferenceKernel(
        psi=lambda s: an_psi(params, s),
        delta=lambda z, v, y, k, los_interferer, role_prob: sector_thinning_void(
            params, z, v, y, k, los_interferer, role_prob
        ),
        tail=interferer_success_tail,
    )


def _interference_regions(params: ScenarioParams, serving_los: bool, r: float):
    """Annular interferer regions (thinning z, bounds [v, y], interferer LOS
    state) consistent with the smallest-path-loss exclusion around a serving
    point at distance r."""
    c = params.blockage.los_fraction
    d = params.blockage.los_radius_m
    pl = params.pathloss
    if serving_los:
        excl_n = nlos_exclusion_radius(pl, r)
        return (
            (c, r, d, True),
            (1.0 - c, min(excl_n, d), d, False),
            (1.0, max(excl_n, d), math.inf, False),
        )
    excl_l = los_exclusion_radius(pl, r)
    return (
        (c, min(excl_l, d), d, True),
        (1.0 - c, min(r, d), d, False),
        (1.0, max(r, d), math.inf, False),
    )


def an_connection_probability(params: ScenarioParams) -> float:
    """Upper bound on Pr(SINR of the intended link >= T_c) with the
    information/jamming interference of all other transmitters."""
    an = params.an
    phi = an.power_split
    if phi == 0.0:
        return 0.0
    _require_supercritical_nlos(params)
    n0 = params.noise
    p_t = params.tx_power
    roles = (
        (an.info_gain, phi, an.info_sector_prob),
        (an.an_gain, 1.0 - phi, an.an_sector_prob),
    )
    a_probs = association_probabilities(params)

    def branch(serving_los: bool) -> float:
        weight = a_probs[0] if serving_los else a_probs[1]
        if weight <= 0.0:
            return 0.0
        alpha_b = params.pathloss.exponent(serving_los)
        c_b = params.pathloss.intercept(serving_los)
        shape_b = params.fading.shape(serving_los)
        kappa = gamma_tail_kappa(shape_b)
        hi = params.blockage.los_radius_m if serving_los else math.inf

        def outer(r: float) -> float:
            f = serving_distance_pdf(params, serving_los, r)
            if f == 0.0:
                return 0.0
            regions = _interference_regions(params, serving_los, r)
            r_a = r**alpha_b
            total = 0.0
            for n in range(1, shape_b + 1):
                theta = params.t_c * n * kappa / (phi * p_t * an.info_gain * c_b)
                term = math.comb(shape_b, n) * (-1.0) ** (n + 1) * math.exp(
                    -theta * r_a * n0
                )
                for gain, split, role_prob in roles:
                    k = theta * r_a * gain * split * p_t
                    for z, v, y, los_i in regions:
                        term *= sector_thinning_void(
                            params, z, v, y, k, los_i, role_prob
                        )
                total += term
            return f * total

        return weight * integrate(outer, 0.0, hi, _METRIC_SETTINGS)

    value = branch(True) + branch(False)
    return min(max(value, 0.0), 1.0)


def an_secrecy_probability(params: ScenarioParams) -> float:
    """Lower bound on Pr(every eavesdropper SINR <= T_e) under a shared
    jamming field; eavesdroppers outside the information sector receive no
    confidential signal and only those inside (sector probability thinning)
    contribute."""
    an = params.an
    phi = an.power_split
    if params.eve_intensity == 0.0 or phi == 0.0:
        return 1.0
    _require_supercritical_nlos(params)
    n0 = params.noise
    p_t = params.tx_power
    c = params.blockage.los_fraction
    d = params.blockage.los_radius_m
    plpf = an_interference_plpf(params)

    def omega(r: float, los: bool) -> float:
        alpha_j = params.pathloss.exponent(los)
        c_j = params.pathloss.intercept(los)
        shape_j = params.fading.shape(los)
        kappa = gamma_tail_kappa(shape_j)
        r_a = r**alpha_j
        total = 0.0
        for n in range(1, shape_j + 1):
            x = n * kappa * params.t_e * r_a / (phi * an.info_gain * c_j)
            total += (
                math.comb(shape_j, n)
                * (-1.0) ** (n + 1)
                * math.exp(-x * n0 / p_t)
                * math.exp(plpf.laplace_exponent((1.0 - phi) * x))
            )
        return total

    exponent = 0.0
    if c > 0.0:
        exponent += (
            TWO_PI
            * c
            * params.eve_intensity
            * an.info_sector_prob
            * integrate(lambda r: omega(r, True) * r, 0.0, d, _METRIC_SETTINGS)
        )
    if c < 1.0:
        exponent += (
            TWO_PI
            * (1.0 - c)
            * params.eve_intensity
            * an.info_sector_prob
            * integrate(lambda r: omega(r, False) * r, 0.0, d, _METRIC_SETTINGS)
        )
    exponent += (
        TWO_PI
        * params.eve_intensity
        * an.info_sector_prob
        * integrate(lambda r: omega(r, False) * r, d, math.inf, _METRIC_SETTINGS)
    )
    return min(max(math.exp(-exponent), 0.0), 1.0)


def an_perfect_link_density(params: ScenarioParams) -> float:
    """Density of simultaneously connected and secret links under the
    artificial-noise split."""
    if params.an.power_split == 0.0:
        return 0.0
    return (
        params.bs_intensity
        * an_connection_probability(params)
        * an_secrecy_probability(params)
    )
