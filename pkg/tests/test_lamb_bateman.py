import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadamard_ml.errors import DomainError
from hadamard_ml.functions import AlphaExp, LogPower, Power
from hadamard_ml.lamb_bateman import (
    LambProblem,
    exact_beta,
    lamb_lhs,
    lamb_lhs_power,
    solution_spec,
    solve_given_f,
    verify_power_solution,
)

# Gamma(1.75)^(4/3) at 40 digits
BETA_075 = 0.8935662254176594878102547363090086971326


class TestExactBeta:
    def test_gaussian_case(self):
        assert exact_beta(0.5) == pytest.approx(math.pi / 4, rel=1e-15)

    def test_unit(self):
        assert exact_beta(1.0) == 1.0

    def test_mu_two(self):
        assert exact_beta(2.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)

    def test_mu_three_quarters(self):
        assert exact_beta(0.75) == pytest.approx(BETA_075, rel=1e-15)

    @pytest.mark.parametrize("mu", [0.0, -1.0, math.inf])
    def test_domain(self, mu):
        with pytest.raises(DomainError):
            exact_beta(mu)


class TestLhs:
    @pytest.mark.parametrize("beta", [0.3, math.pi / 4, 2.0])
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_gaussian_kernel(self, beta, x):
        val = lamb_lhs(Power(beta), x, 0.5).value
        assert val == pytest.approx(x**beta * math.sqrt(math.pi) / 2 * beta**-0.5, rel=1e-10)

    def test_exact_at_pi_quarter(self):
        beta = math.pi / 4
        for x in (0.5, 1.0, 2.0):
            assert lamb_lhs(Power(beta), x, 0.5).value == pytest.approx(x**beta, rel=1e-12)

    def test_linear(self):
        assert lamb_lhs(Power(1.0), 3.0, 1.0).value == pytest.approx(3.0, rel=1e-14)

    @given(st.floats(0.2, 3.0), st.floats(0.3, 3.0), st.floats(0.1, 5.0))
    def test_general_mu_closed_form(self, mu, beta, x):
        val = lamb_lhs(Power(beta), x, mu).value
        assert val == pytest.approx(lamb_lhs_power(beta, mu) * x**beta, rel=1e-9)

    def test_log_power_range_is_truncated(self):
        # lhs = Gamma(mu+1) J_a^mu u, and J^mu log^c = Gamma(c+1)/Gamma(c+1+mu) log^(c+mu)
        mu, c, a, x = 0.5, 1.2, 1.0, 3.0
        expected = math.gamma(mu + 1) * math.gamma(c + 1) / math.gamma(c + 1 + mu) * math.log(x / a) ** (c + mu)
        assert lamb_lhs(LogPower(c, a), x, mu).value == pytest.approx(expected, rel=1e-10)
        assert lamb_lhs(LogPower(c, a), 0.5, mu).value == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            lamb_lhs(Power(1.0), 0.0, 0.5)
        with pytest.raises(DomainError):
            lamb_lhs(Power(1.0), 1.0, 0.0)


class TestVerify:
    def test_gaussian(self):
        rep = verify_power_solution(0.5, [0.5, 1.0, 2.0], 1e-7)
        assert rep.passed
        assert rep.beta == pytest.approx(math.pi / 4, rel=1e-15)

    def test_linear_case(self):
        rep = verify_power_solution(1.0, [3.0], 1e-12, diff_tol=1e-8)
        assert rep.passed and rep.max_integral_error <= 1e-14

    def test_three_quarters(self):
        rep = verify_power_solution(0.75, [0.8, 1.6], 1e-8)
        assert rep.passed and rep.beta == pytest.approx(BETA_075, rel=1e-15)

    @pytest.mark.parametrize("mu", [0.5, 0.75, 1.0, 2.0])
    def test_fixed_point(self, mu):
        rep = verify_power_solution(mu, [0.5, 1.0, 2.0], 1e-8, check_differential=False)
        assert rep.max_integral_error <= 1e-8

    @pytest.mark.parametrize("mu", [0.3, 0.5, 0.9])
    def test_formulations_consistent(self, mu):
        rep = verify_power_solution(mu, [0.7, 1.9], 1e-8)
        assert rep.max_differential_error <= 1e-4

    def test_wrong_exponent_fails_integral_form(self):
        u = Power(1.0)
        assert abs(lamb_lhs(u, 2.0, 0.5).value - u(2.0)) > 1e-3


class TestSolveGivenF:
    def test_gaussian_power(self):
        beta, x = 1.7, 1.3
        expected = 2 / math.sqrt(math.pi) * beta**0.5 * x**beta
        assert solve_given_f(Power(beta), 0.5, x) == pytest.approx(expected, rel=1e-14)

    def test_linear_round_trip(self):
        u = solution_spec(Power(1.0), 0.5)
        assert u(1.0) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-15)
        for x in (0.5, 1.0, 2.0):
            assert lamb_lhs(u, x, 0.5).value == pytest.approx(x, rel=1e-7)

    def test_integer_order(self):
        assert solve_given_f(Power(2.0), 1.0, 1.5) == pytest.approx(2 * 1.5**2, rel=1e-15)
        assert solve_given_f(Power(2.0), 1.0, 1.5, method="quadrature") == pytest.approx(2 * 1.5**2, rel=1e-9)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("mu", [0.5, 1.0])
    def test_round_trip(self, beta, mu):
        u = solution_spec(Power(beta), mu)
        for x in (0.5, 1.0, 2.0):
            assert lamb_lhs(u, x, mu).value == pytest.approx(x**beta, rel=1e-6)

    @pytest.mark.parametrize("f", [Power(1.5), LogPower(1.5, 1.0)])
    def test_quadrature_path_matches_rules(self, f):
        exact = solve_given_f(f, 0.5, 2.5)
        assert solve_given_f(f, 0.5, 2.5, method="quadrature") == pytest.approx(exact, rel=1e-8)

    def test_log_power_round_trip(self):
        f = LogPower(1.5, 1.0)
        u = solution_spec(f, 0.5)
        assert lamb_lhs(u, 2.5, 0.5).value == pytest.approx(f(2.5), rel=1e-10)

    def test_other_functions_need_quadrature(self):
        with pytest.raises(DomainError):
            solution_spec(AlphaExp(0.5, 1.0), 0.5)


class TestProblem:
    def test_self_consistent(self):
        prob = LambProblem(0.5)
        assert prob.self_consistent
        assert prob.solution() == Power(exact_beta(0.5))

    def test_given_f(self):
        prob = LambProblem(0.5, Power(1.0))
        assert not prob.self_consistent
        assert prob.solution() == solution_spec(Power(1.0), 0.5)

    def test_restricted_function_class(self):
        with pytest.raises(DomainError):
            LambProblem(0.5, AlphaExp(0.5, 1.0))
        with pytest.raises(DomainError):
            LambProblem(-0.5)
