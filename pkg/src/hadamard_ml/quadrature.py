"""Adaptive quadrature on finite and semi-infinite intervals.

The finite rule is QUADPACK's adaptive Gauss-Kronrod bisection (through
:func:`scipy.integrate.quad`). Semi-infinite ranges go through the
exp-sinh double-exponential map ``x = a + exp(pi/2 sinh t)`` and are then
handed to the finite rule on the window of ``t`` where the transformed
integrand is not negligible. :func:`integrate_log_singular` removes the
``log(x/t)**(alpha-1)`` singularity of the Hadamard kernel by substitution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError, NonConvergence

_HALF_PI = 0.5 * math.pi
# exp(pi/2 sinh 6.5) ~ 1e180: further out the map leaves the float range in practice
_DE_T_LIMIT = 6.5
_DE_T_STEP = 0.125


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 60
    tail_cutoff_tol: float = 1e-16

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_cutoff_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")

    def tightened(self, rel_tol: float, abs_tol: Optional[float] = None) -> "QuadConfig":
        return replace(self, rel_tol=rel_tol, abs_tol=abs_tol if abs_tol is not None else self.abs_tol)


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_est: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.abs_error_est + other.abs_error_est,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )

    def scaled(self, c: float) -> "QuadResult":
        return QuadResult(c * self.value, abs(c) * self.abs_error_est, self.evaluations, self.converged)


DEFAULT_QUAD = QuadConfig()
ZERO = QuadResult(0.0, 0.0, 0, True)


def _accepts(value: float, err: float, cfg: QuadConfig) -> bool:
    return err <= max(cfg.abs_tol, cfg.rel_tol * abs(value))


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    cfg: QuadConfig = DEFAULT_QUAD,
    *,
    singular_left: bool = False,
) -> QuadResult:
    """Integrate f over [a, b].

    ``singular_left`` substitutes ``t = a + (b - a) u**2``, which turns an
    inverse square-root singularity at ``a`` into a smooth integrand.
    Raises :class:`NonConvergence` when the subdivision budget runs out
    before the tolerance is met.
    """
    if not a <= b:
        raise DomainError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return ZERO
    if singular_left:
        width = b - a

        def g(u):
            return 2.0 * width * u * f(a + width * u * u)

        return integrate_finite(g, 0.0, 1.0, cfg)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f, a, b,
            epsabs=cfg.abs_tol, epsrel=max(cfg.rel_tol, 5e-14),
            limit=cfg.max_subdivisions, full_output=1,
        )
    value, err, info = out[0], out[1], out[2]
    message = out[3] if len(out) > 3 else ""
    err = max(err, 4.0 * np.finfo(float).eps * abs(value))
    converged = _accepts(value, err, cfg)
    if not math.isfinite(value):
        raise NonConvergence(f"non-finite integral on [{a}, {b}]")
    result = QuadResult(float(value), float(err), int(info["neval"]), converged)
    if not converged and "maximum number of subdivisions" in message:
        raise NonConvergence(
            f"subdivision limit {cfg.max_subdivisions} reached on [{a}, {b}] (error est {err:.3g})",
            partial=result,
        )
    return result


def _de_window(h: Callable[[float], float], cutoff: float):
    """Range of t outside which |h(t)| stays below cutoff for two consecutive probes.

    Raises :class:`NonConvergence` when the transformed integrand is still
    above the cutoff at the edge of the usable t range, which means the
    integral does not exist (or converges too slowly to resolve).
    """

    def walk(direction):
        t = 0.0
        quiet = 0
        while abs(t) < _DE_T_LIMIT:
            t += direction * _DE_T_STEP
            v = h(t)
            if not math.isfinite(v):
                raise NonConvergence(f"integrand is not finite near t={t:.3g} of the exp-sinh map")
            quiet = quiet + 1 if abs(v) < cutoff else 0
            if quiet >= 2:
                return t
        raise NonConvergence(
            f"integrand does not decay at the {'upper' if direction > 0 else 'lower'} end (|h|={abs(v):.3g})"
        )

    return walk(-1.0), walk(1.0)


def integrate_semi_infinite(
    f: Callable[[float], float], a: float, cfg: QuadConfig = DEFAULT_QUAD
) -> QuadResult:
    """Integrate f over [a, inf) using the exp-sinh double-exponential map."""

    def h(t):
        e = _HALF_PI * math.sinh(t)
        if e > 700.0:
            # beyond the float range; integrability makes the contribution nil
            return 0.0
        r = math.exp(e)
        x = a + r
        if x == a:
            return 0.0
        return f(x) * _HALF_PI * math.cosh(t) * r

    lo, hi = _de_window(h, cfg.tail_cutoff_tol)
    res = integrate_finite(h, lo, hi, cfg)
    return QuadResult(res.value, res.abs_error_est + 2.0 * cfg.tail_cutoff_tol, res.evaluations, res.converged)


def integrate_log_singular(
    g: Callable[[float], float],
    alpha: float,
    a: float,
    x: float,
    cfg: QuadConfig = DEFAULT_QUAD,
) -> QuadResult:
    """Compute ``int_a^x log(x/t)**(alpha-1) g(t) dt/t`` (no 1/Gamma(alpha) factor).

    With ``s = log(x/t)`` this is ``int_0^L s**(alpha-1) g(x e^{-s}) ds`` for
    ``L = log(x/a)`` (infinite when ``a = 0``). For ``alpha < 1`` the unit
    cell ``[0, min(1, L)]`` is mapped by ``s = u**(1/alpha)``, under which the
    integrand becomes ``g(x exp(-u**(1/alpha))) / alpha``; the rest of the
    range has a bounded kernel.
    """
    if not alpha > 0:
        raise DomainError(f"order must be positive, got {alpha}")
    if not a >= 0:
        raise DomainError(f"lower terminal must be nonnegative, got {a}")
    if not x > a:
        raise DomainError(f"need x > a, got x={x}, a={a}")
    L = math.inf if a == 0 else math.log(x / a)

    def kernel(s):
        # quadrature nodes are interior, so s > 0 here
        return s ** (alpha - 1.0) * g(x * math.exp(-s))

    if alpha >= 1:
        if math.isinf(L):
            return integrate_semi_infinite(kernel, 0.0, cfg)
        return integrate_finite(kernel, 0.0, L, cfg)

    cell = min(1.0, L)
    inv = 1.0 / alpha

    def smooth(u):
        return g(x * math.exp(-(u**inv))) * inv

    res = integrate_finite(smooth, 0.0, cell**alpha, cfg)
    if math.isinf(L):
        res = res + integrate_semi_infinite(kernel, 1.0, cfg)
    elif L > 1.0:
        res = res + integrate_finite(kernel, 1.0, L, cfg)
    return res
