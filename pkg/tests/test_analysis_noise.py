import math

import numpy as np
import pytest

import mmwsec
from mmwsec.numerics import QuadratureSettings, integrate
from mmwsec.analysis_noise import (
    association_law,
    association_probabilities,
    colluding_laplace,
    connection_probability,
    eavesdropper_plpf,
    gamma_tail_kappa,
    nearest_los_pdf,
    nearest_nlos_pdf,
    nlos_exclusion_radius,
    perfect_link_density,
    plpf_intensity,
    secrecy_probability_colluding,
    secrecy_probability_noncolluding,
    secrecy_rate_bits,
    secure_connectivity_colluding_bound,
    secure_connectivity_colluding_exact,
    secure_connectivity_noncolluding,
    serving_distance_pdf,
)
from mmwsec.numerics import laplace_derivative
from mmwsec.scenario import (
    AntennaPattern,
    BlockageModel,
    FadingParams,
    PathLossModel,
    ScenarioParams,
    db_to_linear,
    preset,
)
from mmwsec import montecarlo

TIGHT = QuadratureSettings(rel_tol=1e-11, abs_tol=1e-14, max_subdivisions=250)


def _random_scenario(rng) -> ScenarioParams:
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
        antenna=AntennaPattern(
            main_gain=db_to_linear(rng.uniform(10.0, 20.0)),
            side_gain=db_to_linear(rng.uniform(-5.0, 0.0)),
            beamwidth_deg=rng.uniform(5.0, 45.0),
        ),
        t_c=db_to_linear(rng.uniform(-5.0, 15.0)),
        t_e=db_to_linear(rng.uniform(-10.0, 10.0)),
    )


class TestAssociationLaw:
    def test_density_normalizations(self):
        p = preset("fig1")
        d = p.blockage.los_radius_m
        assert integrate(lambda r: nearest_los_pdf(p, r), 0.0, d, TIGHT) == pytest.approx(1.0, abs=1e-9)
        assert integrate(lambda r: nearest_nlos_pdf(p, r), 0.0, math.inf, TIGHT) == pytest.approx(1.0, abs=1e-9)
        assert integrate(lambda r: serving_distance_pdf(p, True, r), 0.0, d, TIGHT) == pytest.approx(1.0, abs=1e-6)
        assert integrate(lambda r: serving_distance_pdf(p, False, r), 0.0, math.inf, TIGHT) == pytest.approx(1.0, abs=1e-6)

    def test_association_sums_to_one_random(self):
        # A_L from the serving-LOS void-probability route, A_N from its own
        # integral: two independent derivations must be complementary
        rng = np.random.default_rng(11)
        for _ in range(100):
            p = _random_scenario(rng)
            a_los, a_nlos = association_probabilities(p)
            c = p.blockage.los_fraction
            lam = p.bs_intensity
            d = p.blockage.los_radius_m

            def raw_serving_los(r):
                excl = nlos_exclusion_radius(p.pathloss, r)
                return (
                    math.exp(-(1.0 - c) * lam * math.pi * excl * excl)
                    * 2.0 * math.pi * c * lam * r
                    * math.exp(-c * lam * math.pi * r * r)
                )

            a_los_independent = integrate(raw_serving_los, 0.0, d, TIGHT)
            assert a_los_independent + a_nlos == pytest.approx(1.0, abs=1e-9)
            assert a_los == pytest.approx(a_los_independent, abs=1e-9)

    def test_nearest_los_reduces_to_unconditional_law(self):
        # all-LOS, huge ball: plain nearest-neighbor density
        p = preset("fig1").replace(blockage=BlockageModel(1.0, 1e4))
        lam = p.bs_intensity
        for r in (10.0, 50.0, 120.0):
            expected = 2.0 * math.pi * lam * r * math.exp(-math.pi * lam * r * r)
            assert nearest_los_pdf(p, r) == pytest.approx(expected, rel=1e-12)

    def test_nearest_los_outside_support(self):
        p = preset("fig1")
        assert nearest_los_pdf(p, -1.0) == 0.0
        assert nearest_los_pdf(p, p.blockage.los_radius_m + 1.0) == 0.0

    def test_nearest_nlos_branch_values_at_ball_edge(self):
        # the two branch formulas evaluated by hand at the ball radius
        p = preset("fig1")
        c, lam, d = p.blockage.los_fraction, p.bs_intensity, p.blockage.los_radius_m
        inner = 2 * math.pi * (1 - c) * lam * d * math.exp(-math.pi * (1 - c) * lam * d * d)
        outer = 2 * math.pi * lam * d * math.exp(-math.pi * (1 - c) * lam * d * d)
        assert nearest_nlos_pdf(p, d) == pytest.approx(inner, rel=1e-12)
        assert nearest_nlos_pdf(p, d * (1.0 + 1e-12)) == pytest.approx(outer, rel=1e-9)

    def test_association_limits(self):
        p = preset("fig1")
        # no transmitters: the LOS ball is empty almost surely
        assert association_probabilities(p.replace(bs_intensity=0.0)) == (0.0, 1.0)
        # all-LOS giant ball: NLOS never wins
        all_los = p.replace(blockage=BlockageModel(1.0, 5e3))
        assert association_probabilities(all_los)[1] == pytest.approx(0.0, abs=1e-12)
        # no LOS anywhere: the LOS branch weight vanishes
        no_los = p.replace(blockage=BlockageModel(0.0, 200.0))
        assert association_probabilities(no_los) == (0.0, 1.0)
        assert secure_connectivity_noncolluding(no_los.replace(eve_intensity=1e-5)) > 0.0

    def test_serving_nlos_second_term_indicator(self):
        # beyond the equal-path-loss radius the LOS-competition term is gone:
        # the density equals the bare first term
        p = preset("fig1")
        c, lam = p.blockage.los_fraction, p.bs_intensity
        d = p.blockage.los_radius_m
        bound = nlos_exclusion_radius(p.pathloss, d)
        r = bound * 1.01
        _, a_nlos = association_probabilities(p)
        expected = (
            2 * math.pi * lam * r * math.exp(-math.pi * lam * r * r)
            * (1 - c) * math.exp(math.pi * c * lam * (r * r - d * d))
        ) / a_nlos
        assert serving_distance_pdf(p, False, r) == pytest.approx(expected, rel=1e-12)

    def test_association_law_bundle(self):
        p = preset("fig1")
        law = association_law(p)
        assert law.a_los + law.a_nlos == pytest.approx(1.0, abs=1e-12)
        assert law.f_rl(50.0) == serving_distance_pdf(p, True, 50.0)
        assert law.f_dn(250.0) == nearest_nlos_pdf(p, 250.0)


class TestPlpfIntensity:
    def test_zero_at_origin(self):
        p = preset("fig1")
        assert plpf_intensity(p, 0.0) == 0.0

    def test_linear_in_eavesdropper_intensity(self):
        p = preset("fig1")
        t = 1e7
        doubled = p.replace(eve_intensity=2.0 * p.eve_intensity)
        assert plpf_intensity(doubled, t) == pytest.approx(2.0 * plpf_intensity(p, t), rel=1e-12)

    def test_nondecreasing(self):
        p = preset("fig1")
        ts = np.logspace(4, 12, 30)
        values = [plpf_intensity(p, t) for t in ts]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_components_against_quadrature(self):
        # one in-ball component vs direct quadrature of the defining
        # tail-probability integral
        import scipy.special as sp

        p = preset("fig1")
        plpf = eavesdropper_plpf(p)
        t = 5e7
        gain = p.plain.main_gain
        a = p.pathloss.alpha_los
        c = p.pathloss.c_los
        shape = p.fading.nakagami_los
        d = p.blockage.los_radius_m

        def integrand(r):
            return sp.gammaincc(shape, r**a / (gain * c * t)) * r

        direct = p.plain.main_lobe_prob * integrate(integrand, 0.0, d, TIGHT)
        assert plpf.component_in(True, gain, p.plain.main_lobe_prob, t) == pytest.approx(direct, rel=1e-9)

    def test_saturation_guard_matches_series(self):
        # the tiny-argument branch continues the generic evaluation
        p = preset("fig1")
        plpf = eavesdropper_plpf(p)
        gain = p.plain.main_gain
        c = p.pathloss.c_los
        d = p.blockage.los_radius_m
        t_edge = d**p.pathloss.alpha_los / (gain * c * 1e-12)
        below = plpf.component_in(True, gain, 0.05, t_edge * 0.99)
        above = plpf.component_in(True, gain, 0.05, t_edge * 1.01)
        assert above == pytest.approx(below, rel=1e-6)


class TestColludingLaplace:
    def test_at_zero(self):
        assert colluding_laplace(preset("fig2"), 0.0) == 1.0

    def test_monotone_nonincreasing(self):
        p = preset("fig2")
        ss = np.logspace(4, 12, 20)
        values = [colluding_laplace(p, s) for s in ss]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))

    def test_closed_form_vs_tail_integral(self):
        # hypergeometric closed form against direct differentiation under
        # the integral of the mapped-process tail
        p = preset("fig2")
        plpf = eavesdropper_plpf(p)
        derivs = plpf.laplace_exponent_derivatives()
        for s in (1e5, 1e7, 1e9, 1e11):
            closed = plpf.laplace_exponent(s)
            direct = derivs(0, s)  # falls back to closed form at order 0
            from mmwsec.numerics import exponent_derivatives_from_intensity

            integral = exponent_derivatives_from_intensity(plpf)(0, s)
            assert closed == pytest.approx(integral, rel=1e-7)

    def test_complete_monotonicity_pattern(self):
        # transform of a nonnegative aggregate: derivatives alternate sign
        p = preset("fig2")
        plpf = eavesdropper_plpf(p)
        derivs = plpf.laplace_exponent_derivatives()
        for s in (1e6, 1e8, 1e10):
            l0 = laplace_derivative(derivs, 0, s)
            l1 = laplace_derivative(derivs, 1, s)
            l2 = laplace_derivative(derivs, 2, s)
            assert l0 > 0.0
            assert l1 < 0.0
            assert l2 > 0.0

    def test_first_derivative_against_richardson_fd(self):
        # central finite difference with one Richardson refinement
        p = preset("fig2")
        plpf = eavesdropper_plpf(p)
        derivs = plpf.laplace_exponent_derivatives()
        s = 1e6
        value = laplace_derivative(derivs, 1, s)

        def fd(h):
            return (colluding_laplace(p, s + h) - colluding_laplace(p, s - h)) / (2.0 * h)

        coarse, fine = fd(s * 1e-4), fd(s * 5e-5)
        richardson = (4.0 * fine - coarse) / 3.0
        assert value == pytest.approx(richardson, rel=1e-6)


class TestGammaTailKappa:
    def test_conventions(self):
        assert gamma_tail_kappa(3, "factorial") == pytest.approx(6 ** (-1.0 / 3.0), rel=1e-12)
        assert gamma_tail_kappa(3, "shape") == pytest.approx(3 ** (-1.0 / 3.0), rel=1e-12)
        assert gamma_tail_kappa(2, "factorial") == gamma_tail_kappa(2, "shape")

    def test_factorial_is_cdf_lower_bound(self):
        import scipy.special as sp

        for shape in (2, 3, 5):
            kappa = gamma_tail_kappa(shape, "factorial")
            ys = np.linspace(0.05, 6.0 * shape, 200)
            cdf = sp.gammainc(shape, ys)
            bound = (1.0 - np.exp(-kappa * ys)) ** shape
            assert np.all(bound <= cdf + 1e-12)


class TestMetricStructure:
    def test_no_eavesdroppers_limits(self):
        p = preset("fig1").replace(eve_intensity=0.0)
        assert secure_connectivity_noncolluding(p) == 1.0
        assert secure_connectivity_colluding_exact(p) == 1.0
        assert secure_connectivity_colluding_bound(p) == 1.0
        assert secrecy_probability_noncolluding(p) == 1.0
        assert secrecy_probability_colluding(p) == 1.0

    def test_tau_n_monotone_in_eve_intensity(self):
        p = preset("fig1")
        values = [
            secure_connectivity_noncolluding(p.replace(eve_intensity=v))
            for v in (5e-5, 2e-4, 8e-4)
        ]
        assert values[0] > values[1] > values[2]

    def test_p_con_monotone_in_threshold(self):
        p = preset("fig6")
        values = [
            connection_probability(p.replace(t_c=db_to_linear(v))) for v in (-10.0, 5.0, 20.0)
        ]
        assert values[0] > values[1] > values[2]

    def test_p_con_threshold_limits(self):
        p = preset("fig6")
        assert connection_probability(p.replace(t_c=1e-9)) == pytest.approx(1.0, abs=1e-6)
        assert connection_probability(p.replace(t_c=1e12)) == pytest.approx(0.0, abs=1e-6)

    def test_p_sec_monotone_in_threshold(self):
        p = preset("fig6")
        values = [
            secrecy_probability_noncolluding(p.replace(t_e=db_to_linear(v)))
            for v in (-10.0, 5.0, 20.0)
        ]
        assert values[0] < values[1] < values[2]
        assert secrecy_probability_noncolluding(p.replace(t_e=1e9)) == pytest.approx(1.0, abs=1e-6)

    def test_colluding_weaker_than_noncolluding(self):
        p = preset("fig2").replace(eve_intensity=1e-4)
        assert secure_connectivity_colluding_exact(p) <= secure_connectivity_noncolluding(p)

    def test_bound_above_exact(self):
        for lam_e in (5e-5, 2e-4):
            p = preset("fig2").replace(eve_intensity=lam_e)
            exact = secure_connectivity_colluding_exact(p)
            bound = secure_connectivity_colluding_bound(p)
            assert bound >= exact - 1e-9
            assert bound - exact < 0.02

    def test_values_in_unit_interval_random(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            p = _random_scenario(rng)
            for value in (
                secure_connectivity_noncolluding(p),
                secure_connectivity_colluding_bound(p),
                connection_probability(p),
                secrecy_probability_noncolluding(p),
                secrecy_probability_colluding(p),
            ):
                assert 0.0 <= value <= 1.0

    def test_perfect_link_density_composition(self):
        p = preset("fig6")
        n_p, omega = perfect_link_density(p)
        assert n_p == pytest.approx(
            p.bs_intensity
            * connection_probability(p)
            * secrecy_probability_noncolluding(p),
            rel=1e-12,
        )
        assert omega == pytest.approx(n_p * secrecy_rate_bits(p), rel=1e-12)
        # direct product identity: lambda_B=2e-4, p_con=0.8, p_sec=0.7
        assert 2e-4 * 0.8 * 0.7 == pytest.approx(1.12e-4, rel=1e-12)

    def test_perfect_link_density_colluding_route(self):
        p = preset("fig6").replace(eavesdropper_mode="colluding")
        n_p, _ = perfect_link_density(p)
        assert n_p == pytest.approx(
            p.bs_intensity * connection_probability(p) * secrecy_probability_colluding(p),
            rel=1e-12,
        )

    def test_secrecy_colluding_terms_validation(self):
        with pytest.raises(ValueError):
            secrecy_probability_colluding(preset("fig3"), terms=0)


@pytest.mark.slow
class TestMonteCarloCrossChecks:
    TRIALS = 20000

    def test_tau_n(self):
        p = preset("fig1")
        analytical = secure_connectivity_noncolluding(p)
        est = montecarlo.estimate_noise_limited(p, self.TRIALS, "tau_n", seed=101)
        assert abs(analytical - est.estimate) <= max(0.01, 3.0 * est.ci_halfwidth / 1.96)

    def test_p_con_and_p_sec(self):
        p = preset("fig6")
        counts = montecarlo.noise_limited_counts(p, self.TRIALS, seed=102)
        assert abs(connection_probability(p) - counts["p_con"] / self.TRIALS) <= 0.01
        assert abs(
            secrecy_probability_noncolluding(p) - counts["p_sec_n"] / self.TRIALS
        ) <= 0.01

    def test_laplace_transform_against_empirical_mean(self):
        # E[exp(-s I)] over sampled aggregates vs the closed form
        p = preset("fig2").replace(eve_intensity=2e-4)
        stats = montecarlo.noise_limited_stats(p, self.TRIALS, seed=103)
        for s in (1e7, 1e8, 1e9):
            empirical = float(np.mean(np.exp(-s * stats.combined)))
            assert colluding_laplace(p, s) == pytest.approx(empirical, abs=0.01)

    def test_colluding_exact_and_bound(self):
        p = preset("fig2").replace(eve_intensity=2e-4)
        est = montecarlo.estimate_noise_limited(p, self.TRIALS, "tau_c", seed=104)
        exact = secure_connectivity_colluding_exact(p)
        bound = secure_connectivity_colluding_bound(p)
        assert abs(exact - est.estimate) <= 0.015
        assert bound >= est.estimate - 3.0 * est.ci_halfwidth / 1.96

    def test_secrecy_colluding_approximation(self):
        p = preset("fig3")
        est = montecarlo.estimate_noise_limited(p, self.TRIALS, "p_sec_c", seed=105)
        assert abs(secrecy_probability_colluding(p, 5) - est.estimate) <= 0.012
