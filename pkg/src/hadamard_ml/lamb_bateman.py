r"""The modified Lamb-Bateman integral equation

.. math::

    \int_0^\infty u\bigl(e^{-y^{1/\mu}} x\bigr)\,dy = f(x),

its exact power-law solutions and their verification.

The substitution ``y = log(x/t)**mu`` turns the left-hand side into
``Gamma(mu+1) J^mu u(x)``, so the equation is inverted by
``u = D^mu f / Gamma(mu+1)``. With ``f = u`` the power ``x**beta`` is a
solution exactly when ``beta**mu = Gamma(mu+1)``; ``mu = 1/2`` is the
Gaussian kernel ``e^{-y^2}`` with ``beta = pi/4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from .errors import DomainError
from .fractional_ops import DEFAULT_DIFF, DiffConfig, frak_d, hadamard_derivative, log_power_rule
from .functions import FunctionSpec, LogPower, Power
from .quadrature import ZERO, QuadConfig, QuadResult, integrate_finite, integrate_semi_infinite

LAMB_QUAD = QuadConfig(rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=200)
# the fractional-derivative route nests quadrature inside differencing
LAMB_DIFF_QUAD = QuadConfig(rel_tol=1e-13, abs_tol=1e-16, max_subdivisions=200)


def _check_mu(mu: float) -> None:
    if not (mu > 0 and math.isfinite(mu)):
        raise DomainError(f"kernel exponent must satisfy mu > 0, got {mu}")


@dataclass(frozen=True)
class LambProblem:
    """Kernel exponent ``mu`` and right-hand side; ``f=None`` means the self-consistent case ``f = u``."""

    mu: float
    f: Optional[FunctionSpec] = None

    def __post_init__(self):
        _check_mu(self.mu)
        if self.f is not None and not isinstance(self.f, (Power, LogPower)):
            raise DomainError("the right-hand side must be a power or log-power function")

    @property
    def self_consistent(self) -> bool:
        return self.f is None

    def solution(self) -> FunctionSpec:
        if self.f is None:
            return Power(exact_beta(self.mu))
        return solution_spec(self.f, self.mu)


def exact_beta(mu: float) -> float:
    """Exponent of the self-consistent power solution, ``Gamma(mu+1)**(1/mu)``."""
    _check_mu(mu)
    return math.exp(math.lgamma(mu + 1.0) / mu)


def lamb_lhs(
    u: Callable[[float], float], x: float, mu: float, qcfg: QuadConfig = LAMB_QUAD
) -> QuadResult:
    """``int_0^inf u(exp(-y**(1/mu)) x) dy`` by quadrature.

    A :class:`LogPower` with base ``a`` is taken to vanish below ``a``, which
    cuts the range at ``y = log(x/a)**mu``.
    """
    _check_mu(mu)
    if not x > 0:
        raise DomainError(f"lamb_lhs needs x > 0, got {x}")
    inv = 1.0 / mu

    def integrand(y):
        return u(math.exp(-(y**inv)) * x)

    if isinstance(u, LogPower):
        if x <= u.a:
            return ZERO
        return integrate_finite(integrand, 0.0, math.log(x / u.a) ** mu, qcfg)
    return integrate_semi_infinite(integrand, 0.0, qcfg)


def lamb_lhs_power(beta: float, mu: float, coef: float = 1.0) -> float:
    """Closed-form factor: ``lamb_lhs(coef x**beta)(x) = coef Gamma(mu+1)/beta**mu x**beta``."""
    _check_mu(mu)
    return coef * math.gamma(mu + 1.0) / beta**mu


def solution_spec(f: FunctionSpec, mu: float) -> FunctionSpec:
    """``D^mu f / Gamma(mu+1)`` as a function spec, for powers and log-powers."""
    _check_mu(mu)
    g = math.gamma(mu + 1.0)
    if isinstance(f, Power):
        return Power(f.beta, f.coef * f.beta**mu / g)
    if isinstance(f, LogPower):
        if not f.c > mu:
            raise DomainError(f"log-power solution needs c > mu (got c={f.c}, mu={mu})")
        return LogPower(f.c - mu, f.a, f.coef * log_power_rule(f.c, mu) / g)
    raise DomainError(f"no closed-form solution for {f!r}; use method='quadrature'")


def solve_given_f(
    f: FunctionSpec,
    mu: float,
    x: float,
    qcfg: QuadConfig = LAMB_DIFF_QUAD,
    dcfg: DiffConfig = DEFAULT_DIFF,
    *,
    method: str = "auto",
) -> float:
    """Evaluate ``u(x) = D^mu f(x) / Gamma(mu+1)``.

    ``method='auto'`` uses the exact power / log-power rules;
    ``'quadrature'`` always takes the numerical Hadamard-derivative route
    (terminal 0 for powers, the log base for log-powers).
    """
    _check_mu(mu)
    if not x > 0:
        raise DomainError(f"need x > 0, got {x}")
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    a = f.a if isinstance(f, LogPower) else 0.0
    if method == "auto":
        if isinstance(f, Power):
            return solution_spec(f, mu)(x)
        if isinstance(f, LogPower):
            if x <= a:
                return 0.0
            # log(x/a)**(c-mu) has no LogPower spec when c <= mu, so use the rule directly
            return f.coef * log_power_rule(f.c, mu) * math.log(x / a) ** (f.c - mu) / math.gamma(mu + 1.0)
    return hadamard_derivative(f, mu, a, x, qcfg, dcfg) / math.gamma(mu + 1.0)


@dataclass(frozen=True)
class PowerSolutionReport:
    mu: float
    beta: float
    x_points: Tuple[float, ...]
    integral_errors: Tuple[float, ...]
    differential_errors: Tuple[float, ...]
    tol: float
    diff_tol: float

    @property
    def max_integral_error(self) -> float:
        return max(self.integral_errors, default=0.0)

    @property
    def max_differential_error(self) -> float:
        return max(self.differential_errors, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_integral_error <= self.tol and self.max_differential_error <= self.diff_tol


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def verify_power_solution(
    mu: float,
    x_points: Sequence[float],
    tol: float = 1e-8,
    *,
    diff_tol: float = 1e-4,
    qcfg: QuadConfig = LAMB_QUAD,
    dcfg: DiffConfig = DEFAULT_DIFF,
    check_differential: bool = True,
) -> PowerSolutionReport:
    """Check ``u = x**exact_beta(mu)`` against both formulations of the equation.

    * integral form: ``lamb_lhs(u)(x) = u(x)``, relative error ``<= tol``;
    * differential form: ``frakD^mu u = Gamma(mu+1) u'``, relative error
      ``<= diff_tol`` (two nested numerical layers, hence the looser default).
    """
    beta = exact_beta(mu)
    u = Power(beta)
    xs = tuple(float(x) for x in x_points)
    integral = tuple(_rel(lamb_lhs(u, x, mu, qcfg).value, u(x)) for x in xs)
    differential: Tuple[float, ...] = ()
    if check_differential:
        g = math.gamma(mu + 1.0)
        differential = tuple(
            _rel(frak_d(u, mu, x, LAMB_DIFF_QUAD, dcfg), g * beta * x ** (beta - 1.0)) for x in xs
        )
    return PowerSolutionReport(mu, beta, xs, integral, differential, tol, diff_tol)
