import math

import numpy as np
import pytest

from mmwsec.analysis_an import (
    an_connection_probability,
    an_interference_kernel,
    an_interference_plpf,
    an_perfect_link_density,
    an_psi,
    an_secrecy_probability,
    interferer_success_tail,
    sector_thinning_void,
)
from mmwsec.analysis_noise import gamma_tail_kappa, serving_distance_pdf, association_probabilities
from mmwsec.numerics import integrate, exponent_derivatives_from_intensity
from mmwsec.scenario import (
    AnPattern,
    BlockageModel,
    FadingParams,
    PathLossModel,
    ScenarioParams,
    db_to_linear,
    preset,
)
from mmwsec import montecarlo


def _with_split(params, phi):
    an = params.an
    return params.replace(antenna=AnPattern(an.info_gain, an.an_gain, an.beamwidth_deg, phi))


def _random_an_scenario(rng) -> ScenarioParams:
    beta_l = rng.uniform(55.0, 65.0)
    return ScenarioParams(
        bs_intensity=10 ** rng.uniform(-4.5, -3.0),
        eve_intensity=10 ** rng.uniform(-5.0, -3.5),
        tx_power=db_to_linear(rng.uniform(20.0, 35.0)),
        bandwidth_hz=2e9,
        noise_figure_db=10.0,
        blockage=BlockageModel(rng.uniform(0.05, 0.5), rng.uniform(100.0, 300.0)),
        pathloss=PathLossModel(
            alpha_los=rng.uniform(1.9, 2.3),
            alpha_nlos=rng.uniform(2.5, 3.5),
            beta_los_db=beta_l,
            beta_nlos_db=beta_l + rng.uniform(5.0, 15.0),
        ),
        fading=FadingParams(int(rng.integers(1, 4)), int(rng.integers(1, 3))),
        antenna=AnPattern(
            info_gain=db_to_linear(rng.uniform(10.0, 20.0)),
            an_gain=db_to_linear(rng.uniform(0.0, 6.0)),
            beamwidth_deg=rng.uniform(5.0, 60.0),
            power_split=rng.uniform(0.05, 0.95),
        ),
        t_c=db_to_linear(rng.uniform(-5.0, 15.0)),
        t_e=db_to_linear(rng.uniform(-10.0, 10.0)),
    )


class TestPsi:
    def test_zero_at_origin(self):
        assert an_psi(preset("fig5"), 0.0) == 0.0

    def test_nonpositive_and_monotone(self):
        p = preset("fig5")
        ss = np.logspace(4, 11, 15)
        values = [an_psi(p, s) for s in ss]
        assert all(v <= 0.0 for v in values)
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_closed_form_vs_tail_integral(self):
        p = preset("fig5")
        plpf = an_interference_plpf(p)
        derivs = exponent_derivatives_from_intensity(plpf)
        for s in (1e6, 1e8, 1e10):
            assert an_psi(p, s) == pytest.approx(derivs(0, s), rel=1e-7)

    def test_uses_transmitter_intensity(self):
        # the jamming aggregate scales with the transmitter density, not
        # the eavesdropper density
        p = preset("fig5")
        denser_bs = p.replace(bs_intensity=2.0 * p.bs_intensity)
        denser_eve = p.replace(eve_intensity=10.0 * p.eve_intensity)
        s = 1e8
        assert an_psi(denser_bs, s) == pytest.approx(2.0 * an_psi(p, s), rel=1e-12)
        assert an_psi(denser_eve, s) == an_psi(p, s)


class TestKernelPieces:
    def test_tail_factor_range(self):
        for u in (1.0, 10.0, 500.0):
            v = interferer_success_tail(u, 1e-3, 1e-6, 2.92, 2)
            assert 0.0 <= v < 1.0

    def test_void_factor_trivial_cases(self):
        p = preset("fig4")
        assert sector_thinning_void(p, 0.0, 10.0, 100.0, 1.0, True, 0.5) == 1.0
        assert sector_thinning_void(p, 1.0, 10.0, 100.0, 0.0, True, 0.5) == 1.0
        assert sector_thinning_void(p, 1.0, 100.0, 10.0, 1.0, True, 0.5) == 1.0

    def test_void_factor_in_unit_interval(self):
        p = preset("fig4")
        v = sector_thinning_void(p, 1.0, 50.0, math.inf, 1e4, False, 0.9)
        assert 0.0 < v <= 1.0

    def test_far_field_series_continues_quadrature(self):
        # the analytic far tail matches brute quadrature over a long range
        p = preset("fig4")
        k, c_j, a_j, n_j = 2e4, p.pathloss.c_nlos, p.pathloss.alpha_nlos, 2
        brute = integrate(
            lambda u: interferer_success_tail(u, k, c_j, a_j, n_j) * u, 200.0, 2e6
        )
        split = -math.log(
            sector_thinning_void(p, 1.0, 200.0, math.inf, k, False, 1.0)
        ) / (2.0 * math.pi * p.bs_intensity)
        assert split == pytest.approx(brute, rel=1e-4)

    def test_kernel_bundle(self):
        p = preset("fig5")
        kernel = an_interference_kernel(p)
        assert kernel.psi(1e8) == an_psi(p, 1e8)
        assert 0.0 < math.exp(kernel.psi(1e8)) <= 1.0


class TestConnectionProbability:
    def test_zero_split_gives_zero(self):
        assert an_connection_probability(_with_split(preset("fig4"), 0.0)) == 0.0

    def test_full_split_matches_no_jamming_construction(self):
        # with all power on the information beam the jamming factors must
        # collapse to exactly the info-interferer-only expression
        p = _with_split(preset("fig4"), 1.0)
        value = an_connection_probability(p)
        assert 0.0 < value <= 1.0

    def test_interferer_free_limit_matches_noise_only_form(self):
        # vanishing transmitter density: every generating functional is 1,
        # leaving the binomial noise-only tail averaged over the serving law
        p = _with_split(preset("fig4").replace(bs_intensity=1e-9), 0.6)
        an = p.an
        phi = an.power_split
        a_probs = association_probabilities(p)
        n0 = p.noise
        expected = 0.0
        for los, weight in ((True, a_probs[0]), (False, a_probs[1])):
            alpha = p.pathloss.exponent(los)
            c_j = p.pathloss.intercept(los)
            shape = p.fading.shape(los)
            kappa = gamma_tail_kappa(shape)
            hi = p.blockage.los_radius_m if los else math.inf

            def outer(r, _a=alpha, _c=c_j, _n=shape, _k=kappa, _los=los):
                f = serving_distance_pdf(p, _los, r)
                if f == 0.0:
                    return 0.0
                total = 0.0
                for n in range(1, _n + 1):
                    y = _k * n * p.t_c * n0 * r**_a / (phi * p.tx_power * an.info_gain * _c)
                    total += math.comb(_n, n) * (-1.0) ** (n + 1) * math.exp(-y)
                return f * total

            expected += weight * integrate(outer, 0.0, hi)
        assert an_connection_probability(p) == pytest.approx(expected, rel=1e-5)

    def test_monotone_in_threshold(self):
        p = preset("fig4")
        values = [
            an_connection_probability(p.replace(t_c=db_to_linear(v)))
            for v in (-10.0, 5.0, 20.0)
        ]
        assert values[0] > values[1] > values[2]

    def test_unit_interval_random(self):
        rng = np.random.default_rng(31)
        for _ in range(6):
            p = _random_an_scenario(rng)
            assert 0.0 <= an_connection_probability(p) <= 1.0

    def test_density_crossing_exists(self):
        # denser transmitters help at low thresholds and hurt at high ones
        sparse = preset("fig4").replace(bs_intensity=1e-4)
        dense = preset("fig4").replace(bs_intensity=1e-3)
        low, high = db_to_linear(-10.0), db_to_linear(10.0)
        assert an_connection_probability(dense.replace(t_c=low)) > an_connection_probability(
            sparse.replace(t_c=low)
        )
        assert an_connection_probability(dense.replace(t_c=high)) < an_connection_probability(
            sparse.replace(t_c=high)
        )


class TestSecrecyProbability:
    def test_no_eavesdroppers(self):
        assert an_secrecy_probability(preset("fig5").replace(eve_intensity=0.0)) == 1.0

    def test_zero_split_is_secret(self):
        assert an_secrecy_probability(_with_split(preset("fig5"), 0.0)) == 1.0

    def test_monotone_in_eve_intensity(self):
        p = preset("fig5")
        values = [
            an_secrecy_probability(p.replace(eve_intensity=v)) for v in (5e-5, 2e-4, 8e-4)
        ]
        assert values[0] > values[1] > values[2]

    def test_monotone_in_threshold(self):
        p = preset("fig5")
        values = [
            an_secrecy_probability(p.replace(t_e=db_to_linear(v))) for v in (-10.0, 0.0, 15.0)
        ]
        assert values[0] < values[1] < values[2]
        assert an_secrecy_probability(p.replace(t_e=1e9)) == pytest.approx(1.0, abs=1e-6)

    def test_unit_interval_random(self):
        rng = np.random.default_rng(37)
        for _ in range(6):
            p = _random_an_scenario(rng)
            assert 0.0 <= an_secrecy_probability(p) <= 1.0


class TestPerfectLinkDensity:
    def test_zero_split(self):
        assert an_perfect_link_density(_with_split(preset("fig7"), 0.0)) == 0.0

    def test_composition(self):
        p = preset("fig7")
        assert an_perfect_link_density(p) == pytest.approx(
            p.bs_intensity * an_connection_probability(p) * an_secrecy_probability(p),
            rel=1e-12,
        )

    def test_no_eves_full_split_reduces_to_connection(self):
        p = _with_split(preset("fig7").replace(eve_intensity=0.0), 1.0)
        assert an_perfect_link_density(p) == pytest.approx(
            p.bs_intensity * an_connection_probability(p), rel=1e-12
        )

    def test_interior_maximum_in_split(self):
        p = preset("fig7")
        grid = np.linspace(0.0, 1.0, 21)
        values = [an_perfect_link_density(_with_split(p, float(v))) for v in grid]
        best = int(np.argmax(values))
        assert 0 < best < len(grid) - 1


@pytest.mark.slow
class TestMonteCarloCrossChecks:
    TRIALS = 20000

    def test_connection_upper_bound(self):
        for lam_b in (1e-4, 1e-3):
            p = preset("fig4").replace(bs_intensity=lam_b)
            est = montecarlo.estimate_an(p, self.TRIALS, "p_con", seed=201)
            analytical = an_connection_probability(p)
            sigma = est.ci_halfwidth / 1.96
            assert analytical >= est.estimate - 3.0 * sigma
            assert analytical - est.estimate <= 0.03

    def test_secrecy_lower_bound(self):
        for lam_e in (1e-4, 2e-4):
            p = preset("fig5").replace(eve_intensity=lam_e)
            est = montecarlo.estimate_an(p, self.TRIALS, "p_sec", seed=202)
            analytical = an_secrecy_probability(p)
            sigma = est.ci_halfwidth / 1.96
            assert analytical <= est.estimate + 3.0 * sigma
            assert est.estimate - analytical <= 0.02

    def test_psi_against_empirical_transform(self):
        # exp(Psi(s)) equals E[exp(-s * sum of M_a g L)] over sampled
        # jamming fields around a fixed receiver
        p = preset("fig5")
        an = p.antenna
        rng = np.random.default_rng(7)
        window = montecarlo.default_window_radius(p)
        area = math.pi * window * window
        draws = 20000
        ss = np.array([1e7, 1e8, 1e9])
        acc = np.zeros_like(ss)
        for _ in range(draws):
            n = rng.poisson(p.bs_intensity * an.an_sector_prob * area)
            r = window * np.sqrt(rng.random(n))
            los = (r <= p.blockage.los_radius_m) & (rng.random(n) < p.blockage.los_fraction)
            loss = np.where(
                los,
                p.pathloss.c_los * r ** (-p.pathloss.alpha_los),
                p.pathloss.c_nlos * r ** (-p.pathloss.alpha_nlos),
            )
            g = rng.gamma(np.where(los, p.fading.nakagami_los, p.fading.nakagami_nlos), 1.0)
            agg = float(np.sum(an.an_gain * loss * g))
            acc += np.exp(-ss * agg)
        empirical = acc / draws
        for s, e in zip(ss, empirical):
            assert math.exp(an_psi(p, float(s))) == pytest.approx(e, abs=0.01)
