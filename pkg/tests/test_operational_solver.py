import io
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from hadamard_ml.errors import DomainError, NonConvergence
from hadamard_ml.operational_solver import (
    Basis,
    CoefficientOperator,
    CoefficientVector,
    basis_values,
    laguerre_heat,
    laguerre_heat_residual,
    operator_alpha_exp,
    polynomial_vector,
    read_operator,
    read_vector,
    residual_check,
    sin_vector,
    solve_bvp,
    solve_ivp,
    write_operator,
    write_vector,
)
from hadamard_ml.special_functions import alpha_l_exponential

TRIG = Basis.TrigPair
MONO = Basis.Monomial


def heat_operator(dim=3):
    return CoefficientOperator.second_derivative(TRIG, dim)


class TestBasis:
    def test_trig_needs_odd_dim(self):
        with pytest.raises(DomainError):
            CoefficientVector(TRIG, np.zeros(4))

    def test_trig_synthesis(self):
        v = CoefficientVector(TRIG, [0.5, 1.0, 2.0, 0.0, -1.0])
        x = 0.7
        assert v(x) == pytest.approx(0.5 + math.sin(x) + 2 * math.cos(x) - math.cos(2 * x), rel=1e-15)

    def test_derivative_operators(self):
        x = 0.9
        v = CoefficientVector(TRIG, [0.0, 1.0, 0.5, -0.3, 0.2])
        d = CoefficientOperator.derivative(TRIG, 5) @ v
        expected = math.cos(x) - 0.5 * math.sin(x) - 0.6 * math.cos(2 * x) - 0.4 * math.sin(2 * x)
        assert d(x) == pytest.approx(expected, rel=1e-14)
        p = CoefficientOperator.second_derivative(MONO, 4) @ polynomial_vector([1, 2, 3, 4])
        assert p(x) == pytest.approx(6 + 24 * x, rel=1e-15)

    def test_mismatched_dimensions(self):
        with pytest.raises(DomainError):
            operator_alpha_exp(heat_operator(3), 1.0, 0.5, CoefficientVector(TRIG, np.zeros(5)))
        with pytest.raises(DomainError):
            operator_alpha_exp(heat_operator(3), 1.0, 0.5, polynomial_vector([0, 1, 0]))

    def test_operator_must_be_square_and_finite(self):
        with pytest.raises(DomainError):
            CoefficientOperator(MONO, np.zeros((2, 3)))
        with pytest.raises(DomainError):
            CoefficientOperator(MONO, [[math.nan]])

    def test_matrices_are_immutable(self):
        op = heat_operator()
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 1.0


class TestOperatorAlphaExp:
    def test_zero_operator(self):
        g = sin_vector(3)
        res = operator_alpha_exp(CoefficientOperator(TRIG, np.zeros((3, 3))), 2.0, 0.5, g)
        assert np.array_equal(res.vector.coeffs, g.coeffs) and res.order == 0

    def test_scalar_exponential(self):
        res = operator_alpha_exp(CoefficientOperator(MONO, [[-1.0]]), 1.0, 0.0, polynomial_vector([1.0]))
        assert res.vector.coeffs[0] == pytest.approx(math.exp(-1), rel=1e-14)

    def test_alpha_exponential_on_sin_coefficient(self):
        res = operator_alpha_exp(heat_operator(), 1.0, 0.5, sin_vector(3))
        assert res.vector.coeffs[1] == pytest.approx(alpha_l_exponential(0.5, -1.0).value, rel=1e-14)
        assert res.tail_est <= 1e-14

    def test_non_convergence(self):
        with pytest.raises(NonConvergence):
            operator_alpha_exp(heat_operator(9), 5.0, 0.0, CoefficientVector(TRIG, np.ones(9)), Rmax=10)

    def test_non_strict_returns_partial(self):
        res = operator_alpha_exp(heat_operator(9), 5.0, 0.0, CoefficientVector(TRIG, np.ones(9)), Rmax=10, strict=False)
        assert not res.converged and res.order == 10

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            operator_alpha_exp(heat_operator(), 1.0, -1.0, sin_vector(3))

    @given(
        hnp.arrays(np.float64, st.tuples(st.integers(1, 8)).map(lambda s: (s[0], s[0])), elements=st.floats(-2, 2)),
        st.floats(-1.5, 1.5),
    )
    def test_alpha_zero_is_matrix_exponential(self, mat, t):
        dim = mat.shape[0]
        g = np.linspace(1.0, -1.0, dim)
        res = operator_alpha_exp(CoefficientOperator(MONO, mat), t, 0.0, polynomial_vector(g))
        expected = scipy.linalg.expm(t * mat) @ g
        assert np.allclose(res.vector.coeffs, expected, rtol=1e-10, atol=1e-10 * np.max(np.abs(expected)) + 1e-14)

    @given(st.floats(0.0, 0.9), st.floats(0.5, 6.0), st.integers(0, 30))
    def test_truncation_monotonicity(self, alpha, t, extra):
        # past the point where t*||M|| / (r+1)^(alpha+1) < 1 every later term is smaller
        op = heat_operator(5)
        g = CoefficientVector(TRIG, np.ones(5))
        start = math.ceil((t * 4.0) ** (1 / (alpha + 1)))
        tails = [
            operator_alpha_exp(op, t, alpha, g, tol=1e-300, Rmax=r, strict=False).tail_est
            for r in range(start, start + extra + 2)
        ]
        assert all(b <= a for a, b in zip(tails, tails[1:]))


class TestSolveIVP:
    def test_initial_condition_exact(self):
        rep = solve_ivp(heat_operator(), sin_vector(3), 0.5, [0.0], [0.3, 1.0, 2.0])
        assert np.array_equal(rep.values[0], np.sin([0.3, 1.0, 2.0]))

    def test_heat_limit(self):
        ts, xs = [0.2, 0.5, 1.0], [0.5, 1.0, 2.0]
        rep = solve_ivp(heat_operator(), sin_vector(3), 0.0, ts, xs)
        exact = np.exp(-np.array(ts))[:, None] * np.sin(xs)[None, :]
        assert np.max(np.abs(rep.values - exact)) <= 1e-8

    def test_worked_example_closed_form(self):
        # termwise action of d^2/dx^2 on sin x gives alternating signs
        t = 0.8
        rep = solve_ivp(heat_operator(), sin_vector(3), 0.5, [t], [1.0])
        closed = math.sin(1.0) * sum((-t) ** k / math.factorial(k) ** 1.5 for k in range(40))
        assert rep.values[0, 0] == pytest.approx(closed, rel=1e-13)

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            solve_ivp(heat_operator(), sin_vector(3), 1.0, [0.1], [1.0])
        with pytest.raises(DomainError):
            solve_ivp(heat_operator(), sin_vector(3), 0.5, [-0.1], [1.0])

    def test_csv_rows(self):
        rep = solve_ivp(heat_operator(), sin_vector(3), 0.5, [0.0, 1.0], [1.0, 2.0])
        out = io.StringIO()
        rep.write_csv(out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "x,t,value,tail_est"
        assert len(lines) == 5
        assert lines[1].startswith("1,0,")

    def test_basis_independence(self):
        # a multiple of the identity is diagonal in both bases; g = 1 in each
        ts, xs = [0.3, 1.1], [0.2, 1.7]
        mono = solve_ivp(CoefficientOperator(MONO, -0.7 * np.eye(4)), polynomial_vector([1, 0, 0, 0]), 0.4, ts, xs)
        trig = solve_ivp(CoefficientOperator(TRIG, -0.7 * np.eye(3)), CoefficientVector(TRIG, [1, 0, 0]), 0.4, ts, xs)
        assert np.allclose(mono.values, trig.values, rtol=1e-10, atol=0)


class TestSolveBVP:
    def test_boundary_condition_exact(self):
        h = polynomial_vector([1.0, -2.0, 0.5])
        rep = solve_bvp(CoefficientOperator.derivative(MONO, 3), h, 0.5, [0.0], [-1.0, 0.5, 2.0])
        assert np.array_equal(rep.values[0], [h(t) for t in (-1.0, 0.5, 2.0)])

    @given(hnp.arrays(np.float64, 5, elements=st.floats(-3, 3)), st.floats(0, 2), st.floats(-2, 2))
    def test_shift_semigroup(self, coeffs, x, t):
        h = polynomial_vector(coeffs)
        rep = solve_bvp(CoefficientOperator.derivative(MONO, 5), h, 0.0, [x], [t])
        expected = np.polynomial.polynomial.polyval(t + x, coeffs)
        assert rep.values[0, 0] == pytest.approx(expected, rel=1e-12, abs=1e-12 * (1 + np.sum(np.abs(coeffs)) * 4**4))

    def test_finite_series(self):
        x, t = 0.7, 1.3
        rep = solve_bvp(CoefficientOperator.derivative(MONO, 3), polynomial_vector([0, 0, 1]), 0.5, [x], [t])
        expected = t**2 + x * 2 * t + x**2 * 2 / 2**1.5
        assert rep.values[0, 0] == pytest.approx(expected, rel=1e-15)
        assert rep.orders == [2] and rep.tail_estimates == [0.0]


class TestResidual:
    def test_worked_example(self):
        rep = solve_ivp(heat_operator(), sin_vector(3), 0.5, [0.2, 0.6, 1.0], [0.5, 1.25, 2.0])
        summary = residual_check(rep)
        assert summary.passed and summary.relative <= 1e-4
        assert rep.residual is summary

    def test_near_classical(self):
        rep = solve_ivp(heat_operator(), sin_vector(3), 1e-6, [0.3, 1.0], [0.5, 2.0])
        assert residual_check(rep).relative <= 1e-4

    def test_zero_data(self):
        rep = solve_ivp(heat_operator(), CoefficientVector(TRIG, np.zeros(3)), 0.5, [0.2, 1.0], [0.5, 2.0])
        summary = residual_check(rep)
        assert summary.relative == 0.0 and summary.passed
        assert np.all(rep.values == 0.0)

    def test_bvp_residual(self):
        rep = solve_bvp(CoefficientOperator.derivative(MONO, 4), polynomial_vector([1, 0, -1, 0.5]), 0.5, [0.5, 1.0], [0.3, 1.2])
        assert residual_check(rep).relative <= 1e-4

    def test_detects_wrong_operator(self):
        rep = solve_ivp(heat_operator(), sin_vector(3), 0.5, [0.5], [1.0])
        wrong = CoefficientOperator(TRIG, -2.0 * heat_operator().matrix)
        assert not residual_check(rep, theta=wrong).passed


class TestLaguerreHeat:
    @pytest.mark.parametrize(
        "coeffs,exact",
        [
            ([1.0], lambda x, t: 1.0),
            ([0.0, 1.0], lambda x, t: t + x),
            ([0.0, 0.0, 1.0], lambda x, t: t * t + 2 * x * t + x * x / 2),
        ],
    )
    @pytest.mark.parametrize("x,t", [(0.0, 0.4), (0.7, 1.3), (2.0, -1.5)])
    def test_closed_forms(self, coeffs, exact, x, t):
        assert laguerre_heat(polynomial_vector(coeffs), x, t) == pytest.approx(exact(x, t), rel=1e-15, abs=1e-15)

    @given(hnp.arrays(np.float64, st.integers(1, 6), elements=st.floats(-2, 2)), st.floats(0.2, 2.5), st.floats(-1.5, 1.5))
    def test_pointwise_equation(self, coeffs, x, t):
        s = polynomial_vector(coeffs)
        scale = 1.0 + float(np.sum(np.abs(coeffs))) * 10.0**coeffs.size
        assert laguerre_heat_residual(s, x, t) <= 1e-8 * scale

    def test_domain(self):
        with pytest.raises(DomainError):
            laguerre_heat(sin_vector(3), 1.0, 1.0)
        with pytest.raises(DomainError):
            laguerre_heat(polynomial_vector([1.0]), -1.0, 1.0)


class TestFiles:
    def test_round_trip(self, tmp_path):
        op = heat_operator(5)
        v = CoefficientVector(TRIG, [0.0, 1.0, 0.25, -0.5, 1e-17])
        op_path, v_path = tmp_path / "op.txt", tmp_path / "v.txt"
        with open(op_path, "w") as fh:
            write_operator(op, fh)
        with open(v_path, "w") as fh:
            write_vector(v, fh)
        assert np.array_equal(read_operator(op_path).matrix, op.matrix)
        back = read_vector(v_path)
        assert back.basis is TRIG and np.array_equal(back.coeffs, v.coeffs)

    def test_comments_and_layout(self, tmp_path):
        path = tmp_path / "op.txt"
        path.write_text("# heat operator\n3 trig\n0 0 0\n0 -1 0\n0 0 -1  # sin, cos\n")
        op = read_operator(path)
        assert np.array_equal(op.matrix, np.diag([0.0, -1.0, -1.0]))

    @pytest.mark.parametrize(
        "text", ["", "3\n", "2 monomial\n1 2 3\n", "2 legendre\n1 0\n0 1\n", "x monomial\n1\n", "2 monomial\n1 a\n0 1\n"]
    )
    def test_malformed(self, tmp_path, text):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(DomainError):
            read_operator(path)

    def test_basis_values(self):
        assert np.array_equal(basis_values(MONO, 3, 2.0), [1.0, 2.0, 4.0])
