r"""Hadamard-type fractional operators as executable maps.

Conventions
-----------
* ``delta = x d/dx`` is differentiated as ``d/dtheta`` in ``theta = log x``
  on a uniform stencil, with Richardson extrapolation in the step.
* :math:`J^\alpha` is the Hadamard integral with lower terminal ``a``;
  :math:`D^\alpha = \delta^n J^{n-\alpha}`, ``n = floor(alpha) + 1``.
* With ``a = 0`` the operators act as fractional powers of ``delta``, which
  annihilate constants (``D^alpha x**beta = beta**alpha x**beta`` with
  ``beta -> 0``). :func:`hadamard_derivative` therefore drops the value
  ``f(0)`` before integrating, otherwise ``J`` of a constant diverges.
* Caputo derivatives of order ``nu`` in ``(0, 1]`` act termwise on
  :class:`PowerSeriesRep` and send constants to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple, Union

from .errors import DomainError, StepTooSmall
from .functions import FunctionSpec
from .quadrature import QuadConfig, QuadResult, integrate_log_singular
from .special_functions import gamma_ratio

Func = Callable[[float], float]

#: quadrature settings used underneath finite differences, where noise is amplified
DERIVATIVE_QUAD = QuadConfig(rel_tol=1e-13, abs_tol=1e-16, max_subdivisions=200)


@dataclass(frozen=True)
class DiffConfig:
    log_step: float = 0.02
    richardson_levels: int = 2

    def __post_init__(self):
        if not self.log_step > 0:
            raise ValueError("log_step must be positive")
        if self.richardson_levels < 0:
            raise ValueError("richardson_levels must be nonnegative")


DEFAULT_DIFF = DiffConfig()


def central_derivative(phi: Func, t0: float, order: int, h: float, levels: int) -> float:
    """``order``-th derivative of phi at t0 by nested central differences + Richardson.

    The nested difference uses the ``order + 1`` points ``t0 + (order - 2j) h``;
    its error expands in even powers of h, so each Richardson level removes
    one power of ``h**2``.
    """
    if order == 0:
        return phi(t0)
    weights = [(-1) ** j * math.comb(order, j) for j in range(order + 1)]
    table = []
    for i in range(levels + 1):
        hi = h / 2**i
        est = sum(w * phi(t0 + (order - 2 * j) * hi) for j, w in enumerate(weights)) / (2 * hi) ** order
        row = [est]
        for m in range(1, i + 1):
            f4 = 4.0**m
            row.append((f4 * row[m - 1] - table[i - 1][m - 1]) / (f4 - 1.0))
        table.append(row)
    return table[-1][-1]


def delta_op(f: Func, x: float, dcfg: DiffConfig = DEFAULT_DIFF, order: int = 1) -> float:
    """``(x d/dx)**order f`` at x, computed as a theta-derivative of ``f(e**theta)``."""
    if not x > 0:
        raise DomainError(f"delta needs x > 0, got {x}")
    return central_derivative(lambda th: f(math.exp(th)), math.log(x), order, dcfg.log_step, dcfg.richardson_levels)


def hadamard_integral(
    f: Func, alpha: float, a: float, x: float, qcfg: QuadConfig = DERIVATIVE_QUAD
) -> QuadResult:
    r""":math:`J^\alpha f(x) = \frac{1}{\Gamma(\alpha)} \int_a^x (\log\frac{x}{t})^{\alpha-1} f(t) \frac{dt}{t}`.

    For ``a = 0`` the caller must supply an f that vanishes fast enough at
    the origin for the integral to exist.
    """
    if not alpha > 0:
        raise DomainError(f"Hadamard integral needs alpha > 0, got {alpha}")
    return integrate_log_singular(f, alpha, a, x, qcfg).scaled(1.0 / math.gamma(alpha))


def hadamard_integral_fn(f: Func, alpha: float, a: float, qcfg: QuadConfig = DERIVATIVE_QUAD) -> Func:
    """``x -> J^alpha f(x)`` as a callable (zero at the terminal)."""

    def g(x):
        if x <= a:
            return 0.0
        return hadamard_integral(f, alpha, a, x, qcfg).value

    return g


def _origin_value(f: Func) -> float:
    try:
        v = f(0.0)
    except (ValueError, ZeroDivisionError, OverflowError, DomainError):
        return 0.0
    return v if math.isfinite(v) else 0.0


def _is_integer(alpha: float) -> bool:
    return float(alpha).is_integer()


def hadamard_derivative(
    f: Func,
    alpha: float,
    a: float,
    x: float,
    qcfg: QuadConfig = DERIVATIVE_QUAD,
    dcfg: DiffConfig = DEFAULT_DIFF,
) -> float:
    r""":math:`D^\alpha f(x) = \delta^n J^{n-\alpha} f(x)` with ``n = floor(alpha) + 1``.

    Integer orders reduce to ``delta**alpha`` and ``alpha = 0`` to the
    identity. The stencil in ``log x`` is shrunk to stay above ``a``;
    :class:`StepTooSmall` is raised if that is impossible.
    """
    if alpha < 0:
        raise DomainError(f"order must be nonnegative, got {alpha}")
    if not x > a:
        raise DomainError(f"need x > a, got x={x}, a={a}")
    if alpha == 0:
        return f(x)
    if _is_integer(alpha):
        n = int(alpha)
        g = f
    else:
        n = math.floor(alpha) + 1
        if a == 0:
            f0 = _origin_value(f)
            base = f if f0 == 0.0 else (lambda t: f(t) - f0)
        else:
            base = f
        g = hadamard_integral_fn(base, n - alpha, a, qcfg)
    h = dcfg.log_step
    if a > 0:
        room = math.log(x / a)
        if n * h >= room:
            h = 0.5 * room / n
            if h < 1e-6:
                raise StepTooSmall(f"x={x} is too close to the terminal a={a} for the stencil")
    return central_derivative(lambda th: g(math.exp(th)), math.log(x), n, h, dcfg.richardson_levels)


def hadamard_derivative_fn(f: Func, alpha: float, a: float = 0.0, qcfg=DERIVATIVE_QUAD, dcfg=DEFAULT_DIFF) -> Func:
    return lambda x: hadamard_derivative(f, alpha, a, x, qcfg, dcfg)


def ordinary_derivative(f: Func, x: float, dcfg: DiffConfig = DEFAULT_DIFF) -> float:
    """d/dx with a step proportional to x, so the stencil stays on the positive axis."""
    h = dcfg.log_step * abs(x) if x != 0 else dcfg.log_step
    return central_derivative(f, x, 1, h, dcfg.richardson_levels)


def frak_d(
    f: Func,
    alpha: float,
    x: float,
    qcfg: QuadConfig = DERIVATIVE_QUAD,
    dcfg: DiffConfig = DEFAULT_DIFF,
) -> float:
    r"""The composite :math:`\mathfrak{D}^\alpha f = \frac{d}{dx} D^\alpha f` with terminal 0.

    For ``0 < alpha < 1`` this equals the Laguerre derivative
    ``(d/dx) x (d/dx)`` applied to ``J^{1-alpha} f``.
    """
    if not x > 0:
        raise DomainError(f"frak_d needs x > 0, got {x}")
    return ordinary_derivative(hadamard_derivative_fn(f, alpha, 0.0, qcfg, dcfg), x, dcfg)


def dilate(f: Func, lam: float) -> Func:
    """The dilation ``exp(lam x d/dx)``: returns ``x -> f(exp(lam) x)``."""
    scale = math.exp(lam)
    return lambda x: f(scale * x)


def power_rule(beta: float, alpha: float) -> float:
    """Exact factor of ``D^alpha x**beta = beta**alpha x**beta`` (terminal 0); negative alpha gives J."""
    if not beta > 0:
        raise DomainError(f"power rule needs beta > 0, got {beta}")
    return beta**alpha


def log_power_rule(c: float, alpha: float) -> float:
    """Factor of ``D^alpha log(x/a)**c = Gamma(c+1)/Gamma(c+1-alpha) log(x/a)**(c-alpha)``.

    Negative alpha gives the Hadamard integral of the same log power.
    """
    if not c > -1:
        raise DomainError(f"log-power rule needs c > -1, got {c}")
    return gamma_ratio(c + 1.0, c + 1.0 - alpha)


# --------------------------------------------------------------------------
# series carriers for the Caputo / hyper-Bessel operators


@dataclass(frozen=True)
class PowerSeriesRep:
    """Truncated series ``sum_k coeffs[k] * x**(step*k + offset)`` on ``x >= 0``."""

    step: float
    offset: float
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.step > 0:
            raise DomainError("series step must be positive")
        if len(self.coeffs) < 1:
            raise DomainError("series needs at least one coefficient")

    def __call__(self, x: float) -> float:
        return math.fsum(c * x ** (self.step * k + self.offset) for k, c in enumerate(self.coeffs) if c)

    def __len__(self):
        return len(self.coeffs)


def caputo_on_series(rep: PowerSeriesRep, nu: float) -> PowerSeriesRep:
    r"""Caputo derivative of order ``nu`` in ``(0, 1]`` applied termwise.

    ``x**(nu k) -> Gamma(nu k + 1) / Gamma(nu k + 1 - nu) x**(nu (k-1))`` for
    ``k >= 1``; the constant term is annihilated. The result has one
    coefficient fewer (a zero series if only the constant was present).
    """
    if not 0 < nu <= 1:
        raise DomainError(f"Caputo order must lie in (0, 1], got {nu}")
    if rep.offset != 0 or not math.isclose(rep.step, nu, rel_tol=0, abs_tol=1e-15):
        raise DomainError("caputo_on_series needs offset 0 and step equal to the order")
    if len(rep) == 1:
        return PowerSeriesRep(rep.step, 0.0, (0.0,))
    out = tuple(c * gamma_ratio(nu * k + 1.0, nu * k + 1.0 - nu) for k, c in enumerate(rep.coeffs) if k >= 1)
    return PowerSeriesRep(rep.step, 0.0, out)


def multiply_x_step(rep: PowerSeriesRep) -> PowerSeriesRep:
    """Multiply by ``x**step``: shift every coefficient up one index."""
    return PowerSeriesRep(rep.step, rep.offset, (0.0,) + rep.coeffs)


def hyper_bessel_apply(rep: PowerSeriesRep, nu: float, n: int) -> PowerSeriesRep:
    """Apply ``d^nu x^nu d^nu ... x^nu d^nu`` with ``n + 1`` Caputo derivatives.

    Reading right to left: a derivative, then ``n`` rounds of
    (multiply by ``x**nu``, derivative).
    """
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    out = caputo_on_series(rep, nu)
    for _ in range(int(n)):
        out = caputo_on_series(multiply_x_step(out), nu)
    return out


# --------------------------------------------------------------------------
# eigenfunction checks


@dataclass(frozen=True)
class FrakD:
    """``(d/dx) D^alpha``."""

    alpha: float


@dataclass(frozen=True)
class Mixed:
    """``(d/dx) delta**(r-1) D^(alpha+1-r)``, the r-derivative Laguerre string times a Hadamard derivative."""

    r: int
    alpha: float

    def __post_init__(self):
        n = math.floor(self.alpha + 1)
        if not 1 <= self.r <= n:
            raise DomainError(f"r must lie in 1..{n} for alpha={self.alpha}, got {self.r}")


@dataclass(frozen=True)
class InvXD:
    """``x**-1 D^order`` with ``order = alpha + 1`` in ``(0, 1)``."""

    order: float


@dataclass(frozen=True)
class HyperBessel:
    """The Caputo hyper-Bessel string with ``n + 1`` derivatives of order nu."""

    nu: float
    n: int


Operator = Union[FrakD, Mixed, InvXD, HyperBessel]


@dataclass(frozen=True)
class EigenReport:
    residuals: Tuple[float, ...]
    max_rel_residual: float
    passed: bool
    grid: Tuple[float, ...] = field(default=())


def apply_operator(
    op: Operator, f: Func, x: float, qcfg: QuadConfig = DERIVATIVE_QUAD, dcfg: DiffConfig = DEFAULT_DIFF
) -> float:
    """Numerically apply one of the real-line operators (not HyperBessel) to f at x."""
    if isinstance(op, FrakD):
        return frak_d(f, op.alpha, x, qcfg, dcfg)
    if isinstance(op, Mixed):
        inner = hadamard_derivative_fn(f, op.alpha + 1 - op.r, 0.0, qcfg, dcfg)
        for _ in range(op.r - 1):
            inner = _delta_fn(inner, dcfg)
        return ordinary_derivative(inner, x, dcfg)
    if isinstance(op, InvXD):
        return hadamard_derivative(f, op.order, 0.0, x, qcfg, dcfg) / x
    raise DomainError(f"operator {op!r} acts on series representations, not callables")


def _delta_fn(g: Func, dcfg: DiffConfig) -> Func:
    return lambda x: delta_op(g, x, dcfg)


def eigen_check(
    op: Operator,
    f: FunctionSpec,
    lam: float | None,
    grid: Sequence[float],
    tol: float,
    qcfg: QuadConfig = DERIVATIVE_QUAD,
    dcfg: DiffConfig = DEFAULT_DIFF,
    n_terms: int = 60,
) -> EigenReport:
    """Check ``Op f = lam f`` on a grid of positive points.

    ``lam`` defaults to the spec's own eigenvalue (its rate or ``lam``
    parameter). The hyper-Bessel operator is applied exactly on the truncated
    series of f, then the resulting series is evaluated on the grid.
    """
    if lam is None:
        lam = f.eigenvalue
        if lam is None:
            raise DomainError(f"no eigenvalue given and {f!r} does not carry one")
    grid = tuple(float(x) for x in grid)
    if isinstance(op, HyperBessel):
        image = hyper_bessel_apply(f.power_series(n_terms), op.nu, op.n)
        values = [image(x) for x in grid]
    else:
        values = [apply_operator(op, f, x, qcfg, dcfg) for x in grid]
    residuals = []
    for x, v in zip(grid, values):
        target = lam * f(x)
        residuals.append(abs(v - target) / abs(target) if target else abs(v))
    worst = max(residuals) if residuals else 0.0
    return EigenReport(tuple(residuals), worst, worst <= tol, grid)
