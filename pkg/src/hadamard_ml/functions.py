"""Test-function descriptions shared by the operators, verifiers and CLI.

Each spec is a small frozen dataclass that can be called like the function
it describes. The textual grammar accepted by :func:`parse_function_spec` is::

    power:beta | logpow:c[,a] | sin | exp[:rate] | alexp:alpha,lambda | ml:alpha,nu,gamma,lambda
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .special_functions import MLParams, alpha_l_exponential, alpha_mittag_leffler


class FunctionSpec:
    """Base class; subclasses are callables on the positive half-line."""

    #: natural eigenvalue of the spec, when it is an eigenfunction family member
    eigenvalue: Optional[float] = None

    def __call__(self, x: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def power_series(self, n_terms: int):
        """Truncated series representation, for families that have one."""
        raise DomainError(f"{self!r} has no power-series representation")


@dataclass(frozen=True)
class Power(FunctionSpec):
    """``coef * x**beta`` with ``beta > 0``."""

    beta: float
    coef: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"power exponent must satisfy beta > 0, got {self.beta}")

    def __call__(self, x):
        return self.coef * x**self.beta


@dataclass(frozen=True)
class LogPower(FunctionSpec):
    """``coef * log(x/a)**c`` on ``x >= a > 0``."""

    c: float
    a: float = 1.0
    coef: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"log-power exponent must satisfy c > 0, got {self.c}")
        if not self.a > 0:
            raise DomainError(f"log-power base must satisfy a > 0, got {self.a}")

    def __call__(self, x):
        if x < self.a:
            raise DomainError(f"log-power with base {self.a} evaluated at x={x} < a")
        if x == self.a:
            return 0.0
        return self.coef * math.log(x / self.a) ** self.c


@dataclass(frozen=True)
class Sin(FunctionSpec):
    def __call__(self, x):
        return math.sin(x)


@dataclass(frozen=True)
class Exp(FunctionSpec):
    rate: float = 1.0

    @property
    def eigenvalue(self):
        return self.rate

    def __call__(self, x):
        return math.exp(self.rate * x)

    def power_series(self, n_terms):
        from .fractional_ops import PowerSeriesRep

        return PowerSeriesRep(1.0, 0.0, tuple(self.rate**k / math.factorial(k) for k in range(n_terms)))


@dataclass(frozen=True)
class AlphaExp(FunctionSpec):
    """``e_alpha(lam * x)``."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alphaL-exponential needs alpha in (-1, inf), got {self.alpha}")

    @property
    def eigenvalue(self):
        return self.lam

    def __call__(self, x):
        return alpha_l_exponential(self.alpha, self.lam * x).value

    def power_series(self, n_terms):
        from .fractional_ops import PowerSeriesRep

        p = self.alpha + 1.0
        return PowerSeriesRep(
            1.0, 0.0, tuple(self.lam**k / float(math.factorial(k)) ** p for k in range(n_terms))
        )


@dataclass(frozen=True)
class ML(FunctionSpec):
    """``E_{alpha;nu,gamma}(lam * x**nu)``."""

    alpha: float
    nu: float
    gamma: float
    lam: float

    def __post_init__(self):
        MLParams(self.alpha, self.nu, self.gamma)

    @property
    def params(self) -> MLParams:
        return MLParams(self.alpha, self.nu, self.gamma)

    @property
    def eigenvalue(self):
        return self.lam

    def __call__(self, x):
        return alpha_mittag_leffler(self.params, self.lam * x**self.nu).value

    def power_series(self, n_terms):
        from .fractional_ops import PowerSeriesRep
        from .special_functions import gamma_ratio

        p = self.alpha + 1.0
        # 1/Gamma(nu k + gamma)^p built from the reciprocal-Gamma ratio keeps a few ulp of accuracy
        coeffs = tuple(
            self.lam**k * gamma_ratio(1.0, self.nu * k + self.gamma) ** p for k in range(n_terms)
        )
        return PowerSeriesRep(self.nu, 0.0, coeffs)


def _floats(body: str, name: str, lo: int, hi: int):
    parts = [p for p in body.split(",")] if body else []
    if not lo <= len(parts) <= hi:
        want = str(lo) if lo == hi else f"{lo}-{hi}"
        raise DomainError(f"'{name}' takes {want} parameter(s), got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise DomainError(f"'{name}' parameters must be decimal numbers, got {body!r}") from None


def parse_function_spec(text: str) -> FunctionSpec:
    """Parse ``power:2``, ``logpow:1.5,1``, ``sin``, ``exp:0.5``, ``alexp:0.5,0.9`` or ``ml:a,nu,g,lam``.

    Raises :class:`DomainError` naming the violated invariant for
    out-of-domain parameters or malformed text.
    """
    text = text.strip()
    name, _, body = text.partition(":")
    name = name.lower()
    if name == "power":
        (beta,) = _floats(body, name, 1, 1)
        return Power(beta)
    if name == "logpow":
        vals = _floats(body, name, 1, 2)
        return LogPower(*vals)
    if name == "sin":
        _floats(body, name, 0, 0)
        return Sin()
    if name == "exp":
        vals = _floats(body, name, 0, 1)
        return Exp(*vals)
    if name == "alexp":
        alpha, lam = _floats(body, name, 2, 2)
        return AlphaExp(alpha, lam)
    if name == "ml":
        alpha, nu, gamma, lam = _floats(body, name, 4, 4)
        return ML(alpha, nu, gamma, lam)
    raise DomainError(
        f"unknown function spec {text!r}; expected power, logpow, sin, exp, alexp or ml"
    )
