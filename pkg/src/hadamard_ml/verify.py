"""Named numerical identity checks, shared by the CLI ``verify-all`` command and the tests.

Every check returns a :class:`Check`: the computed value, the reference
it is compared with, the error measure and the tolerance it must meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List

import numpy as np

from .errors import DomainError
from .fractional_ops import (
    DERIVATIVE_QUAD,
    FrakD,
    InvXD,
    Mixed,
    eigen_check,
    hadamard_derivative,
    hadamard_integral_fn,
    hyper_bessel_apply,
    log_power_rule,
    power_rule,
)
from .functions import ML, AlphaExp, LogPower, Power
from .lamb_bateman import lamb_lhs, verify_power_solution
from .operational_solver import (
    Basis,
    CoefficientOperator,
    laguerre_heat_residual,
    polynomial_vector,
    residual_check,
    sin_vector,
    solve_ivp,
)
from .quadrature import QuadConfig, integrate_semi_infinite
from .special_functions import (
    MLParams,
    alphaexp_laplace_transform,
    laplace_integrand_alphaexp,
    laplace_integrand_ml,
    ml_laplace_transform,
)

LAPLACE_QUAD = QuadConfig(rel_tol=1e-10, abs_tol=1e-15, max_subdivisions=200)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    reference: float
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tol

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "reference": self.reference,
            "error": self.error,
            "tol": self.tol,
            "pass": self.passed,
        }


def rel_error(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


# Laplace pairs --------------------------------------------------------------


def laplace_ml_check(alpha, nu, gamma, lam, s, tol=1e-6, qcfg: QuadConfig = LAPLACE_QUAD) -> Check:
    """Quadrature of ``int_0^inf e^{-sx} x^{gamma-1} E(lam x^nu) dx`` against the closed-form image."""
    p = MLParams(alpha, nu, gamma)
    ref = ml_laplace_transform(p, lam, s)
    val = integrate_semi_infinite(laplace_integrand_ml(p, lam, s), 0.0, qcfg).value
    name = f"laplace ml alpha={alpha:g} nu={nu:g} gamma={gamma:g} lambda={lam:g} s={s:g}"
    return Check(name, val, ref, rel_error(val, ref), tol)


def laplace_alphaexp_check(alpha, s, tol=1e-6, qcfg: QuadConfig = LAPLACE_QUAD) -> Check:
    ref = alphaexp_laplace_transform(alpha, s)
    val = integrate_semi_infinite(laplace_integrand_alphaexp(alpha, s), 0.0, qcfg).value
    return Check(f"laplace alexp alpha={alpha:g} s={s:g}", val, ref, rel_error(val, ref), tol)


# Hadamard operators ----------------------------------------------------------


def power_rule_check(alpha, beta, x, tol=1e-6) -> Check:
    """Quadrature-path ``D^alpha x**beta`` against ``beta**alpha x**beta``."""
    val = hadamard_derivative(Power(beta), alpha, 0.0, x)
    ref = power_rule(beta, alpha) * x**beta
    return Check(f"power rule alpha={alpha:g} beta={beta:g} x={x:g}", val, ref, rel_error(val, ref), tol)


def log_power_rule_check(alpha, c, a, x, tol=1e-6) -> Check:
    val = hadamard_derivative(LogPower(c, a), alpha, a, x)
    ref = log_power_rule(c, alpha) * math.log(x / a) ** (c - alpha)
    return Check(f"log-power rule alpha={alpha:g} c={c:g} a={a:g} x={x:g}", val, ref, rel_error(val, ref), tol)


def left_inverse_check(alpha, c, a, x, tol=1e-5) -> Check:
    """``D^alpha J^alpha f = f`` for ``f = log(x/a)**c``, both with terminal a."""
    f = LogPower(c, a)
    val = hadamard_derivative(hadamard_integral_fn(f, alpha, a, DERIVATIVE_QUAD), alpha, a, x)
    ref = f(x)
    return Check(f"left inverse alpha={alpha:g} c={c:g} a={a:g} x={x:g}", val, ref, abs(val - ref), tol)


def eigen_residual_check(op, f, grid, tol=1e-5) -> Check:
    rep = eigen_check(op, f, None, grid, tol)
    return Check(f"eigenfunction {op!r} on {f!r}", rep.max_rel_residual, 0.0, rep.max_rel_residual, tol)


def hyper_bessel_coefficient_check(n: int, nu: float, lam: float, n_terms: int = 40, tol=1e-13) -> Check:
    """Coefficients of the hyper-Bessel string applied to truncated ``E_{n;nu,1}(lam x^nu)``.

    The image of the truncated series is the series shifted down one index;
    each surviving coefficient must equal ``lam`` times the matching
    coefficient of the input. Coefficients are compared through their
    logarithms, ``|log|image_k| - log|lam c_k||``.
    """
    rep = ML(n, nu, 1.0, lam).power_series(n_terms)
    image = hyper_bessel_apply(rep, nu, n)
    worst = 0.0
    for k, c in enumerate(image.coeffs):
        target = lam * rep.coeffs[k]
        if target == 0.0 or c == 0.0:
            if c != target:
                worst = math.inf
            continue
        if (c > 0) != (target > 0):
            worst = math.inf
            continue
        worst = max(worst, abs(math.log(abs(c)) - math.log(abs(target))))
    return Check(f"hyper-Bessel coefficients n={n} nu={nu:g} lambda={lam:g}", worst, 0.0, worst, tol)


# operational solutions ------------------------------------------------------


def heat_limit_check(t_grid=(0.2, 0.6, 1.0), x_grid=(0.5, 1.25, 2.0), tol=1e-8) -> Check:
    """``alpha = 0`` with ``Theta = d^2/dx^2`` and ``g = sin`` against ``exp(-t) sin x``."""
    op = CoefficientOperator.second_derivative(Basis.TrigPair, 3)
    rep = solve_ivp(op, sin_vector(3), 0.0, t_grid, x_grid)
    exact = np.exp(-rep.series_grid)[:, None] * np.sin(rep.synth_grid)[None, :]
    err = float(np.max(np.abs(rep.values - exact)))
    return Check("heat limit alpha=0", err, 0.0, err, tol)


def worked_example_residual(alpha=0.5, t_grid=(0.2, 0.6, 1.0), x_grid=(0.5, 1.25, 2.0), tol=1e-4) -> Check:
    op = CoefficientOperator.second_derivative(Basis.TrigPair, 3)
    rep = solve_ivp(op, sin_vector(3), alpha, t_grid, x_grid)
    summary = residual_check(rep, tol=tol)
    return Check(f"operational residual alpha={alpha:g} g=sin", summary.relative, 0.0, summary.relative, tol)


def laguerre_heat_check(s_coeffs, points, tol=1e-8) -> Check:
    s = polynomial_vector(s_coeffs)
    worst = max(laguerre_heat_residual(s, x, t) for x, t in points)
    return Check(f"Laguerre heat s={list(s_coeffs)}", worst, 0.0, worst, tol)


# Lamb-Bateman ----------------------------------------------------------------


def lamb_fixed_point_check(mu, x_points=(0.5, 1.0, 2.0), tol=1e-8) -> Check:
    rep = verify_power_solution(mu, x_points, tol, check_differential=False)
    return Check(
        f"Lamb-Bateman fixed point mu={mu:g} beta={rep.beta:.17g}",
        rep.max_integral_error, 0.0, rep.max_integral_error, tol,
    )


def gaussian_kernel_check(x, tol=1e-8) -> Check:
    """``int_0^inf x^{pi/4} e^{-(pi/4) y^2} dy = x^{pi/4}`` through the mu = 1/2 equation."""
    beta = math.pi / 4
    val = lamb_lhs(Power(beta), x, 0.5).value
    ref = x**beta
    return Check(f"Gaussian kernel x={x:g}", val, ref, rel_error(val, ref), tol)


# suite ------------------------------------------------------------------------


def _suite() -> Iterable[Callable[[], Check]]:
    for alpha in (0.5, 1.0, 2.0):
        for nu in (0.5, 1.0):
            yield lambda a=alpha, n=nu: laplace_ml_check(a, n, 2.0, 0.3, 1.5)
    for alpha in (0.5, 1.5, 2.0):
        yield lambda a=alpha: laplace_alphaexp_check(a, 3.0)
    for alpha, beta in ((0.3, 0.5), (0.5, 1.0), (1.5, 2.0)):
        yield lambda a=alpha, b=beta: power_rule_check(a, b, 1.5)
    yield lambda: log_power_rule_check(0.5, 1.5, 1.0, 2.5)
    for alpha in (0.3, 0.9):
        yield lambda a=alpha: left_inverse_check(a, 1.5, 1.0, 2.0)
    yield lambda: eigen_residual_check(FrakD(0.5), AlphaExp(0.5, 0.7), (0.8,))
    yield lambda: eigen_residual_check(InvXD(0.6), AlphaExp(-0.4, 0.9), (0.8,))
    yield lambda: eigen_residual_check(Mixed(1, 1.3), AlphaExp(1.3, 0.7), (0.8,))
    for n in (0, 2):
        yield lambda k=n: hyper_bessel_coefficient_check(k, 0.5, 0.7)
    yield heat_limit_check
    yield lambda: worked_example_residual(t_grid=(0.2, 1.0), x_grid=(0.5, 2.0))
    yield lambda: laguerre_heat_check((0.0, 0.0, 1.0), ((0.7, 1.3), (1.5, -0.4)))
    yield lambda: gaussian_kernel_check(2.0)
    for mu in (0.5, 0.75, 1.0, 2.0):
        yield lambda m=mu: lamb_fixed_point_check(m)


def identity_suite() -> List[Check]:
    """Run the full identity suite: Laplace pairs, Hadamard rules, left inverse,
    eigenfunctions, hyper-Bessel coefficients, operational residuals and
    Lamb-Bateman fixed points. Takes a few seconds."""
    return [make() for make in _suite()]


def require_positive_grid(xs) -> None:
    if any(not x > 0 for x in xs):
        raise DomainError("grid points must be positive")
