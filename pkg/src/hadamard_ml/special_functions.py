r"""The :math:`\alpha`-Mittag-Leffler family and its Laplace images.

* :func:`alpha_mittag_leffler` -- :math:`E_{\alpha;\nu,\gamma}(x) = \sum_k x^k / \Gamma^{\alpha+1}(\nu k+\gamma)`
* :func:`alpha_l_exponential` -- :math:`\mathfrak{e}_\alpha(x) = \sum_k x^k / (k!)^{\alpha+1}`
* :func:`generalized_wright` -- :math:`{}_p\psi_q`
* :func:`ml_laplace_transform`, :func:`alphaexp_laplace_transform` -- closed-form
  Laplace images obtained by termwise integration.

Terms are evaluated directly while the Gamma values fit in a double and in
log space (with separate sign bookkeeping) beyond that. Alternating series
whose cancellation factor ``sum|a_k| / |sum a_k|`` is large are re-summed
with :mod:`mpmath` at a working precision chosen from that factor.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Tuple

import mpmath

from .errors import DomainError, NonConvergence
from .series_engine import EvalResult, SeriesConfig, Status, sum_series

# Largest argument for which math.gamma stays finite.
_GAMMA_DIRECT_MAX = 171.0
# Cancellation factor above which the double-precision sum is not trusted.
CANCELLATION_LIMIT = 32.0


@dataclass(frozen=True)
class MLParams:
    """Parameters ``(alpha, nu, gamma)`` of :math:`E_{\\alpha;\\nu,\\gamma}`."""

    alpha: float
    nu: float
    gamma: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")
        if not self.nu > 0:
            raise DomainError(f"nu must be positive, got {self.nu}")
        if not math.isfinite(self.gamma):
            raise DomainError(f"gamma must be finite, got {self.gamma}")


@dataclass(frozen=True)
class WrightParams:
    """Upper pairs ``(a_j, A_j)`` and lower pairs ``(b_j, B_j)`` of the Wright function."""

    upper: Tuple[Tuple[float, float], ...]
    lower: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple((float(a), float(A)) for a, A in self.upper))
        object.__setattr__(self, "lower", tuple((float(b), float(B)) for b, B in self.lower))
        for a, A in self.upper + self.lower:
            if not A > 0:
                raise DomainError(f"Wright scale parameters must be positive, got {A}")


def is_gamma_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma_sign(x: float) -> float:
    """Sign of Gamma(x) for x away from the poles."""
    if x > 0:
        return 1.0
    return -1.0 if math.floor(x) % 2 else 1.0


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b), exact to a few ulp where both values are representable."""
    if is_gamma_pole(a):
        raise DomainError(f"Gamma has a pole at {a}")
    if is_gamma_pole(b):
        return 0.0
    if abs(a) < _GAMMA_DIRECT_MAX and abs(b) < _GAMMA_DIRECT_MAX:
        ga, gb = math.gamma(a), math.gamma(b)
        if math.isfinite(ga) and math.isfinite(gb) and ga != 0.0 and gb != 0.0:
            return ga / gb
    return gamma_sign(a) * gamma_sign(b) * math.exp(math.lgamma(a) - math.lgamma(b))


def _power_term(x: float, k: int, log_denominator: float, denominator) -> float:
    """x**k / denominator, falling back to log space when the direct route would overflow."""
    if x == 0.0 and k > 0:
        return 0.0
    if denominator is not None:
        try:
            num = x**k
        except OverflowError:
            num = math.inf
        if math.isfinite(num) and math.isfinite(denominator) and denominator > 0:
            val = num / denominator
            if val != 0.0 or num == 0.0:
                return val
    sign = -1.0 if (x < 0 and k % 2) else 1.0
    return sign * math.exp(k * math.log(abs(x)) - log_denominator)


def _ml_term_rule(alpha: float, nu: float, gamma: float, x: float):
    power = alpha + 1.0

    def term(k: int) -> float:
        arg = nu * k + gamma
        if arg <= 0:
            raise DomainError(
                f"Gamma argument nu*k + gamma = {arg} is not positive at k={k}"
            )
        direct = None
        if arg < _GAMMA_DIRECT_MAX:
            try:
                direct = math.gamma(arg) ** power
            except OverflowError:
                direct = None
        return _power_term(x, k, power * math.lgamma(arg), direct)

    return term


def _mp_resum(term_mp, cancellation: float, cfg: SeriesConfig) -> EvalResult:
    """Extended-precision resummation for strongly cancelling alternating series.

    The double-precision cancellation factor can itself be garbage, so the
    working precision is raised until it covers the factor measured in
    extended precision.
    """
    digits = math.log10(max(cancellation, 10.0))
    for _ in range(8):
        dps = 25 + int(math.ceil(digits))
        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            magnitude = mpmath.mpf(0)
            eps = mpmath.mpf(10) ** (-dps)
            tiny_run = 0
            k = 0
            prev = None
            while True:
                t = term_mp(k)
                total += t
                magnitude += abs(t)
                k += 1
                at = abs(t)
                tiny_run = tiny_run + 1 if at <= eps * magnitude else 0
                # terms must also be past their peak
                if tiny_run >= 2 and prev is not None and at <= prev:
                    break
                prev = at
                if k >= 20 * cfg.max_terms:
                    raise NonConvergence("extended-precision resummation did not converge")
            if total == 0:
                measured = float(dps + 10)
            else:
                measured = float(mpmath.log10(magnitude / abs(total)))
            if measured <= digits + 5:
                nxt = abs(term_mp(k))
                return EvalResult(float(total), float(nxt), k, Status.Converged)
            digits = measured + 5
    raise NonConvergence("extended-precision resummation could not resolve cancellation")


def alpha_mittag_leffler(p: MLParams, x: float, cfg: SeriesConfig | None = None) -> EvalResult:
    r"""Evaluate :math:`E_{\alpha;\nu,\gamma}(x) = \sum_{k\ge0} x^k / \Gamma^{\alpha+1}(\nu k + \gamma)`.

    Raises :class:`DomainError` when some retained Gamma argument
    ``nu*k + gamma`` is not positive (poles, or negative Gamma values raised
    to a fractional power).
    """
    cfg = cfg or SeriesConfig.default()
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x}")
    res = sum_series(_ml_term_rule(p.alpha, p.nu, p.gamma, x), cfg)
    if x < 0 and res.status is Status.Converged:
        absolute = sum_series(_ml_term_rule(p.alpha, p.nu, p.gamma, -x), cfg)
        cancellation = absolute.value / abs(res.value) if res.value else math.inf
        if cancellation > CANCELLATION_LIMIT:
            power = mpmath.mpf(p.alpha) + 1
            nu, g, xm = mpmath.mpf(p.nu), mpmath.mpf(p.gamma), mpmath.mpf(x)

            def term_mp(k):
                return xm**k / mpmath.gamma(nu * k + g) ** power

            return _mp_resum(term_mp, cancellation, cfg)
    return res


def alpha_l_exponential(alpha: float, x: float, cfg: SeriesConfig | None = None) -> EvalResult:
    r"""Evaluate the :math:`\alpha L`-exponential :math:`\sum_k x^k/(k!)^{\alpha+1}`.

    ``alpha = n`` (a non-negative integer) gives the L-exponential of order
    n: ``e_0 = exp`` and ``e_1`` is the 0th-order Bessel-Tricomi function.
    """
    alpha = float(alpha)
    if not alpha > -1:
        raise DomainError(f"the alphaL-exponential needs alpha > -1, got {alpha}")
    cfg = cfg or SeriesConfig.default()
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x}")
    dens, logdens = _factorial_powers(alpha + 1.0)

    def rule(xx):
        if xx == 0.0:
            return lambda k: 1.0 if k == 0 else 0.0
        lx = math.log(abs(xx))
        negative = xx < 0

        def term(k):
            if k < len(dens):
                num = xx**k
                if num != 0.0 and math.isfinite(num):
                    return num / dens[k]
            logden = logdens[k] if k < len(logdens) else (alpha + 1.0) * math.lgamma(k + 1.0)
            mag = math.exp(k * lx - logden)
            return -mag if negative and k % 2 else mag

        return term

    res = sum_series(rule(x), cfg)
    if x < 0 and res.status is Status.Converged:
        absolute = sum_series(rule(-x), cfg)
        cancellation = absolute.value / abs(res.value) if res.value else math.inf
        if cancellation > CANCELLATION_LIMIT:
            pw = mpmath.mpf(alpha) + 1

            def term_mp(k):
                return mpmath.mpf(x) ** k / mpmath.factorial(k) ** pw

            return _mp_resum(term_mp, cancellation, cfg)
    return res


@functools.lru_cache(maxsize=64)
def _factorial_powers(power: float):
    """(k!)**power while it stays in range, and its logarithm for k <= 170."""
    dens = []
    for k in range(171):
        try:
            d = float(math.factorial(k)) ** power
        except OverflowError:
            break
        if not math.isfinite(d):
            break
        dens.append(d)
    logdens = [power * math.lgamma(k + 1.0) for k in range(171)]
    return tuple(dens), tuple(logdens)


def l_exponential(n: int, x: float, cfg: SeriesConfig | None = None) -> EvalResult:
    """L-exponential of integer order n, the eigenfunction of the Laguerre operator D_nL."""
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n}")
    return alpha_l_exponential(float(n), x, cfg)


def generalized_wright(w: WrightParams, z: float, cfg: SeriesConfig | None = None) -> EvalResult:
    r"""Evaluate :math:`{}_p\psi_q` at real z.

    .. math::

        \sum_{k\ge0} \frac{\prod_j \Gamma(a_j + A_j k)}{\prod_j \Gamma(b_j + B_j k)} \frac{z^k}{k!}

    A pole in a numerator Gamma raises :class:`DomainError`; a pole in a
    denominator makes that term vanish.
    """
    cfg = cfg or SeriesConfig.default()
    z = float(z)

    def term(k):
        sign = 1.0
        log_mag = -math.lgamma(k + 1.0)
        for a, A in w.upper:
            arg = a + A * k
            if is_gamma_pole(arg):
                raise DomainError(f"numerator Gamma pole at a + A*k = {arg} (k={k})")
            sign *= gamma_sign(arg)
            log_mag += math.lgamma(arg)
        for b, B in w.lower:
            arg = b + B * k
            if is_gamma_pole(arg):
                return 0.0
            sign *= gamma_sign(arg)
            log_mag -= math.lgamma(arg)
        if k == 0:
            return sign * math.exp(log_mag)
        if z == 0.0:
            return 0.0
        if z < 0 and k % 2:
            sign = -sign
        return sign * math.exp(log_mag + k * math.log(abs(z)))

    return sum_series(term, cfg)


def ml_as_wright(n: int, nu: float, gamma: float) -> WrightParams:
    """Wright parameters representing E_{n;nu,gamma}: upper (1,1), lower (gamma,nu) n+1 times."""
    return WrightParams(upper=((1.0, 1.0),), lower=((gamma, nu),) * (int(n) + 1))


def _require(res: EvalResult, what: str) -> float:
    if res.status is not Status.Converged:
        raise NonConvergence(f"{what}: series status {res.status.value}", partial=res)
    return res.value


def ml_laplace_transform(p: MLParams, lam: float, s: float, cfg: SeriesConfig | None = None) -> float:
    r"""Closed-form Laplace image of :math:`x^{\gamma-1} E_{\alpha;\nu,\gamma}(\lambda x^\nu)`.

    Returns :math:`s^{-\gamma} E_{\alpha-1;\nu,\gamma}(\lambda / s^\nu)`. For
    ``alpha > 0`` the image series is entire. ``alpha = 0`` is the classical
    two-parameter limit: the image series becomes geometric and equals
    ``s**(nu - gamma) / (s**nu - lam)``, valid only for ``|lam| < s**nu``.
    """
    s = float(s)
    if not s > 0:
        raise DomainError(f"Laplace variable must be positive, got {s}")
    if p.alpha < 0:
        raise DomainError(f"the Laplace pair requires alpha >= 0, got {p.alpha}")
    z = lam / s**p.nu
    if p.alpha == 0:
        if not abs(z) < 1:
            raise DomainError(f"image series diverges: |lambda / s^nu| = {abs(z)} >= 1")
        return s ** (-p.gamma) / (1.0 - z)
    inner = MLParams(p.alpha - 1.0, p.nu, p.gamma)
    return s ** (-p.gamma) * _require(alpha_mittag_leffler(inner, z, cfg), "Laplace image")


def alphaexp_laplace_transform(alpha: float, s: float, cfg: SeriesConfig | None = None) -> float:
    r"""Closed-form Laplace image :math:`\frac1s \mathfrak{e}_{\alpha-1}(1/s)` of the alphaL-exponential.

    ``alpha = 0`` gives the image of exp, ``1/(s-1)``, for ``s > 1`` only.
    """
    s = float(s)
    alpha = float(alpha)
    if not s > 0:
        raise DomainError(f"Laplace variable must be positive, got {s}")
    if alpha < 0:
        raise DomainError(f"the Laplace pair requires alpha >= 0, got {alpha}")
    if alpha == 0:
        if not s > 1:
            raise DomainError(f"the image of exp needs s > 1, got {s}")
        return 1.0 / (s - 1.0)
    return _require(alpha_l_exponential(alpha - 1.0, 1.0 / s, cfg), "Laplace image") / s


def laplace_integrand_ml(p: MLParams, lam: float, s: float, cfg: SeriesConfig | None = None):
    """The integrand e^{-sx} x^{gamma-1} E(lam x^nu) of the Laplace pair, safe for huge x."""

    def f(x):
        if x <= 0:
            return 0.0
        if s * x > 745.0:
            return 0.0
        res = alpha_mittag_leffler(p, lam * x**p.nu, cfg)
        if res.status is Status.Overflow:
            return 0.0
        return math.exp(-s * x) * x ** (p.gamma - 1.0) * res.value

    return f


def laplace_integrand_alphaexp(alpha: float, s: float, cfg: SeriesConfig | None = None):
    """The integrand e^{-sx} e_alpha(x) of the alphaL-exponential Laplace pair."""

    def f(x):
        if s * x > 745.0:
            return 0.0
        return math.exp(-s * x) * alpha_l_exponential(alpha, x, cfg).value

    return f

