import math

import pytest

from cdpacct import (
    ALPHA_GRID,
    ExpMechSpec,
    GaussianMech,
    MultiGaussianMech,
    approx_randomized_response,
    calibrate_sigma_for_dp,
    calibrate_sigma_for_rho,
    exponential_mechanism,
    gaussian_renyi,
    gaussian_rho,
    normal_upper_tail,
    randomized_response,
    renyi_divergence,
    thresholded_gaussian,
    zcdp_to_dp_refined,
)
from cdpacct.accountant import ZcdpParams
from cdpacct.mechanisms import BOT, TOP

FINITE_ALPHAS = [a for a in ALPHA_GRID if not math.isinf(a)]


class TestGaussian:
    def test_unit_mechanism_rho(self):
        assert gaussian_rho(GaussianMech(1.0, 1.0)) == 0.5

    def test_renyi_is_linear_in_order(self):
        mech = GaussianMech(2.0, 1.5)
        rho = gaussian_rho(mech)
        for a in FINITE_ALPHAS:
            assert gaussian_renyi(mech.sensitivity, mech.sigma, a) == rho * a

    def test_infinite_order_diverges(self):
        assert gaussian_renyi(1.0, 1.0, math.inf) == math.inf
        assert gaussian_renyi(0.0, 1.0, math.inf) == 0.0

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            GaussianMech(1.0, 0.0)
        with pytest.raises(ValueError):
            GaussianMech(-1.0, 1.0)

    def test_multivariate_reduces_to_scalar(self):
        multi = MultiGaussianMech(3.0, 2.0, 7)
        scalar = multi.as_scalar()
        assert scalar.sensitivity == 3.0
        assert scalar.sigma == 2.0
        assert gaussian_rho(scalar) == pytest.approx(9.0 / 8.0)


class TestCalibration:
    def test_sigma_for_rho_unit_case(self):
        assert calibrate_sigma_for_rho(1.0, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_sigma_for_rho_scales_with_sensitivity(self):
        a = calibrate_sigma_for_rho(1.0, 0.3)
        b = calibrate_sigma_for_rho(2.0, 0.3)
        assert b == pytest.approx(2.0 * a, rel=1e-15)

    def test_sigma_for_dp_meets_target(self):
        for eps, delta in ((0.5, 1e-6), (1.0, 1e-5), (2.0, 1e-8)):
            sigma = calibrate_sigma_for_dp(1.0, eps, delta)
            rho = gaussian_rho(GaussianMech(1.0, sigma))
            achieved = zcdp_to_dp_refined(ZcdpParams(0.0, rho), eps)
            assert achieved <= delta * (1.0 + 1e-6)

    def test_sigma_for_dp_beats_simple_bound(self):
        # The simple conversion needs rho with eps = rho + sqrt(4 rho L),
        # L = ln(1/delta); solving gives rho = (sqrt(L+eps) - sqrt(L))^2.
        eps, delta = 1.0, 1e-6
        L = math.log(1.0 / delta)
        rho_simple = (math.sqrt(L + eps) - math.sqrt(L)) ** 2
        sigma_simple = 1.0 / math.sqrt(2.0 * rho_simple)
        sigma = calibrate_sigma_for_dp(1.0, eps, delta)
        assert sigma < sigma_simple

    def test_sigma_for_dp_scale_invariance(self):
        base = calibrate_sigma_for_dp(1.0, 0.7, 1e-6)
        assert calibrate_sigma_for_dp(3.0, 0.7, 1e-6) == 3.0 * base

    def test_sigma_for_dp_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            calibrate_sigma_for_dp(1.0, 0.0, 1e-6)
        with pytest.raises(ValueError):
            calibrate_sigma_for_dp(1.0, 1.0, 0.0)


class TestRandomizedResponse:
    def test_keep_probability_at_ln3(self):
        plus, minus = randomized_response(math.log(3.0))
        assert plus.prob_of(1) == pytest.approx(0.75, abs=1e-15)
        assert minus.prob_of(-1) == pytest.approx(0.75, abs=1e-15)

    def test_max_divergence_equals_eps(self):
        for eps in (0.1, 0.5, 1.0, 2.0):
            plus, minus = randomized_response(eps)
            assert renyi_divergence(plus, minus, math.inf) == pytest.approx(eps, abs=1e-10)

    def test_divergence_below_quadratic_curve(self):
        for eps in (0.1, 0.5, 1.0, 2.0):
            plus, minus = randomized_response(eps)
            for a in FINITE_ALPHAS:
                assert renyi_divergence(plus, minus, a) <= 0.5 * eps * eps * a + 1e-9

    def test_rejects_nonpositive_eps(self):
        with pytest.raises(ValueError):
            randomized_response(0.0)


class TestApproxRandomizedResponse:
    def test_conditioned_on_bot_is_randomized_response(self):
        eps, delta = 0.9, 0.2
        b0, b1 = approx_randomized_response(eps, delta)
        keep = math.exp(eps) / (1.0 + math.exp(eps))
        bot_mass = sum(
            pr for y, pr in zip(b0.outcomes, b0.probs) if y[1] == BOT
        )
        assert bot_mass == pytest.approx(1.0 - delta, abs=1e-12)
        assert b0.prob_of((0, BOT)) / bot_mass == pytest.approx(keep, abs=1e-12)
        assert b1.prob_of((1, BOT)) / bot_mass == pytest.approx(keep, abs=1e-12)

    def test_top_events_are_disjoint(self):
        b0, b1 = approx_randomized_response(1.0, 0.1)
        assert b0.prob_of((1, TOP)) == 0.0
        assert b1.prob_of((0, TOP)) == 0.0
        assert b0.prob_of((0, TOP)) == pytest.approx(0.1)

    def test_zero_delta_reduces_to_pure(self):
        b0, b1 = approx_randomized_response(1.0, 0.0)
        assert renyi_divergence(b0, b1, math.inf) == pytest.approx(1.0, abs=1e-10)


class TestExponentialMechanism:
    def test_two_candidate_softmax(self):
        out = exponential_mechanism(ExpMechSpec((0.0, 1.0), 1.0, 2.0))
        assert out.probs[0] == pytest.approx(0.7310585786300049, abs=1e-15)
        assert out.probs[1] == pytest.approx(0.2689414213699951, abs=1e-15)

    def test_shift_invariance(self):
        base = exponential_mechanism(ExpMechSpec((0.3, 1.1, 2.0), 2.0, 1.5))
        shifted = exponential_mechanism(ExpMechSpec((10.3, 11.1, 12.0), 2.0, 1.5))
        for a, b in zip(base.probs, shifted.probs):
            assert a == pytest.approx(b, abs=1e-12)

    def test_ties_stay_distinct(self):
        out = exponential_mechanism(ExpMechSpec((1.0, 1.0, 1.0), 1.0, 1.0))
        assert len(out.outcomes) == 3
        for pr in out.probs:
            assert pr == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_lower_loss_gets_higher_mass(self):
        out = exponential_mechanism(ExpMechSpec((0.0, 5.0), 1.0, 1.0))
        assert out.probs[0] > out.probs[1]

    def test_rejects_empty_and_infinite(self):
        with pytest.raises(ValueError):
            ExpMechSpec((), 1.0, 1.0)
        with pytest.raises(ValueError):
            ExpMechSpec((math.inf,), 1.0, 1.0)


class TestThresholdedGaussian:
    def test_normal_upper_tail_values(self):
        assert normal_upper_tail(0.0) == pytest.approx(0.5, abs=1e-16)
        assert normal_upper_tail(1.0) == pytest.approx(0.15865525393145707, abs=1e-16)
        assert normal_upper_tail(2.0, sigma=2.0) == pytest.approx(
            0.15865525393145707, abs=1e-16
        )

    def test_threshold_three_sigma_one(self):
        plus, minus = thresholded_gaussian(1.0, 3.0)
        p = plus.prob_of(1)
        q = minus.prob_of(1)
        assert p == pytest.approx(0.02275013194817922, abs=1e-16)
        assert q == pytest.approx(3.1671241833119965e-05, abs=1e-19)
        # The likelihood ratio at the top outcome exceeds e^6, so the pair
        # is nowhere near eps-DP for moderate eps.
        assert p / q > math.exp(6.0)

    def test_symmetry_of_shifted_pair(self):
        plus, minus = thresholded_gaussian(1.0, 3.0)
        assert plus.prob_of(1) == minus.prob_of(-1)
        assert plus.prob_of(-1) == minus.prob_of(1)
        assert plus.prob_of(0) == minus.prob_of(0)

    def test_rejects_small_threshold(self):
        with pytest.raises(ValueError):
            thresholded_gaussian(1.0, 1.0)
