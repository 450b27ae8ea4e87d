"""Summation of convergent series with compensated accumulation.

Every special function in the package is a power series whose terms are
damped by powers of the Gamma function. :func:`sum_series` sums such a
series term by term, keeps a Neumaier-compensated (Kahan-style) running sum for the
stopping decision and returns a correctly rounded total (``math.fsum``) of
the terms it actually used.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

MAX_TERMS_ENV = "HADAMARD_ML_MAX_TERMS"


class Status(enum.Enum):
    """Outcome of a series evaluation."""

    Converged = "converged"
    MaxTermsReached = "max_terms_reached"
    Overflow = "overflow"


@dataclass(frozen=True)
class SeriesConfig:
    """Stopping parameters for :func:`sum_series`."""

    max_terms: int = 500
    rel_tol: float = 1e-14
    abs_tol: float = 1e-300

    def __post_init__(self):
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms!r}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")

    @classmethod
    def default(cls) -> "SeriesConfig":
        """Default configuration, honouring ``HADAMARD_ML_MAX_TERMS`` if set."""
        raw = os.environ.get(MAX_TERMS_ENV)
        if raw:
            return cls(max_terms=int(raw))
        return cls()

    def threshold(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class EvalResult:
    """A series value together with its truncation error estimate."""

    value: float
    abs_error_est: float
    terms_used: int
    status: Status

    @property
    def converged(self) -> bool:
        return self.status is Status.Converged

    def __float__(self) -> float:
        return float(self.value)


def _tail_estimate(b1: float, b2: float) -> float:
    """Bound on the neglected tail given its first two terms.

    Alternating tails are bounded by their first term. Same-sign tails with
    ratio q < 1 are bounded by ``|b1| / (1 - q)`` provided ratios keep
    decreasing, which holds for every Gamma-damped series used here.
    Returns ``inf`` when the tail has not started to decay.
    """
    if b1 == 0.0:
        return abs(b2)
    if b2 == 0.0 or (b1 > 0) != (b2 > 0):
        return abs(b1)
    q = abs(b2 / b1)
    if q >= 1.0:
        return math.inf
    return abs(b1) / (1.0 - q)


def _safe(term: Callable[[int], float]) -> Callable[[int], float]:
    def get(k):
        try:
            return float(term(k))
        except OverflowError:
            return math.inf

    return get


def _ratio_terms(ratio: Callable[[int], float], first_term: float) -> Callable[[int], float]:
    cache = [float(first_term)]

    def get(k):
        while len(cache) <= k:
            cache.append(cache[-1] * ratio(len(cache) - 1))
        return cache[k]

    return get


def sum_series(
    term: Callable[[int], float],
    cfg: Optional[SeriesConfig] = None,
    *,
    first_term: Optional[float] = None,
) -> EvalResult:
    """Sum ``a_0 + a_1 + ...`` until the tail is negligible.

    Parameters
    ----------
    term
        Either ``k -> a_k`` (when ``first_term`` is None) or, when
        ``first_term`` is given, the ratio rule ``k -> a_{k+1} / a_k``.
    cfg
        Stopping parameters; defaults to :meth:`SeriesConfig.default`.
    first_term
        ``a_0`` for the ratio form.

    The loop stops once two consecutive terms are below
    ``max(abs_tol, rel_tol * |S_k|)`` and the estimated tail is below the
    same threshold. ``abs_error_est`` covers truncation only; it is at least
    the magnitude of the first neglected term.
    """
    cfg = cfg or SeriesConfig.default()
    get = _safe(term if first_term is None else _ratio_terms(term, first_term))
    isfinite = math.isfinite
    rel_tol, abs_tol, max_terms = cfg.rel_tol, cfg.abs_tol, cfg.max_terms

    used = []
    # Neumaier running sum
    s = c = 0.0
    small_run = 0
    k = 0
    a = get(0)
    lookahead = None
    while True:
        if not isfinite(a):
            return EvalResult(s + c, math.inf, k, Status.Overflow)
        used.append(a)
        t = s + a
        if abs(s) >= abs(a):
            c += (s - t) + a
        else:
            c += (a - t) + s
        s = t
        partial = s + c
        if not isfinite(partial):
            return EvalResult(partial, math.inf, k + 1, Status.Overflow)
        thresh = rel_tol * abs(partial)
        if thresh < abs_tol:
            thresh = abs_tol
        small_run = small_run + 1 if abs(a) <= thresh else 0
        k += 1
        if lookahead is not None:
            a, lookahead = lookahead, None
        else:
            a = get(k)
        if k >= max_terms:
            return EvalResult(math.fsum(used), abs(a), k, Status.MaxTermsReached)
        if small_run >= 2 and abs(a) <= thresh:
            lookahead = get(k + 1)
            est = _tail_estimate(a, lookahead)
            if est <= thresh:
                return EvalResult(math.fsum(used), max(est, abs(a)), k, Status.Converged)
