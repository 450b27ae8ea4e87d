r"""Operational solutions built from weighted operator-power series.

The operators Theta_x / Xi_t are finite matrices acting on coefficient
vectors in an explicit basis, so

.. math::

    \mathfrak{e}_\alpha(t\,M)\,g = \sum_{r\ge0} \frac{t^r M^r g}{(r!)^{\alpha+1}}

is summed by repeated matrix-vector products. This gives

* the initial value problem ``frakD_t^alpha f = Theta_x f``, ``f(x, 0) = g(x)``
  (:func:`solve_ivp`),
* the boundary value problem ``frakD_x^alpha w = Xi_t w``, ``w(0, t) = h(t)``
  (:func:`solve_bvp`),
* the Laguerre-heat solution ``S = sum_k x^k/(k!)^2 d_t^k s(t)``
  (:func:`laguerre_heat`).

Basis conventions: ``monomial`` has ``phi_k(x) = x**k``; ``trig`` has
``phi_0 = 1``, ``phi_{2m-1} = sin(m x)``, ``phi_{2m} = cos(m x)`` (odd dim).
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, TextIO

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, NonConvergence
from .fractional_ops import DEFAULT_DIFF, DERIVATIVE_QUAD, DiffConfig, central_derivative, frak_d
from .quadrature import QuadConfig

MAX_BASIS_DIM = 129


class Basis(enum.Enum):
    Monomial = "monomial"
    TrigPair = "trig"

    @classmethod
    def parse(cls, text: str) -> "Basis":
        key = text.strip().lower()
        for b in cls:
            if key in (b.value, b.name.lower()):
                return b
        raise DomainError(f"unknown basis {text!r}; expected 'monomial' or 'trig'")


def _check_dim(basis: Basis, dim: int) -> None:
    if dim < 1 or dim > MAX_BASIS_DIM:
        raise DomainError(f"basis dimension must lie in 1..{MAX_BASIS_DIM}, got {dim}")
    if basis is Basis.TrigPair and dim % 2 == 0:
        raise DomainError(f"trig basis needs an odd dimension (constant + sin/cos pairs), got {dim}")


def basis_values(basis: Basis, dim: int, x: float) -> np.ndarray:
    """Values of the first dim basis functions at x."""
    if basis is Basis.Monomial:
        return x ** np.arange(dim, dtype=float)
    out = np.empty(dim)
    out[0] = 1.0
    m = np.arange(1, (dim - 1) // 2 + 1, dtype=float)
    out[1::2] = np.sin(m * x)
    out[2::2] = np.cos(m * x)
    return out


@dataclass(frozen=True)
class CoefficientVector:
    basis: Basis
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        _check_dim(self.basis, arr.size)
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def __call__(self, x: float) -> float:
        return float(basis_values(self.basis, self.dim, x) @ self.coeffs)


@dataclass(frozen=True)
class CoefficientOperator:
    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DomainError(f"operator matrix must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise DomainError("operator matrix must be finite")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        _check_dim(self.basis, mat.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, v: CoefficientVector) -> CoefficientVector:
        self._check(v)
        return CoefficientVector(self.basis, self.matrix @ v.coeffs)

    def _check(self, v: CoefficientVector) -> None:
        if v.basis is not self.basis or v.dim != self.dim:
            raise DomainError(
                f"vector ({v.basis.value}, dim {v.dim}) does not match operator ({self.basis.value}, dim {self.dim})"
            )

    # standard operators -------------------------------------------------

    @classmethod
    def derivative(cls, basis: Basis, dim: int) -> "CoefficientOperator":
        """d/dx in the given basis."""
        _check_dim(basis, dim)
        mat = np.zeros((dim, dim))
        if basis is Basis.Monomial:
            for k in range(1, dim):
                mat[k - 1, k] = k
        else:
            for m in range(1, (dim - 1) // 2 + 1):
                s, c = 2 * m - 1, 2 * m
                mat[c, s] = m  # (sin mx)' = m cos mx
                mat[s, c] = -m  # (cos mx)' = -m sin mx
        return cls(basis, mat)

    @classmethod
    def second_derivative(cls, basis: Basis, dim: int) -> "CoefficientOperator":
        d = cls.derivative(basis, dim).matrix
        return cls(basis, d @ d)


def sin_vector(dim: int = 3, mode: int = 1) -> CoefficientVector:
    """sin(mode x) in the trig basis."""
    c = np.zeros(dim)
    c[2 * mode - 1] = 1.0
    return CoefficientVector(Basis.TrigPair, c)


def polynomial_vector(coeffs: Sequence[float]) -> CoefficientVector:
    return CoefficientVector(Basis.Monomial, np.asarray(coeffs, dtype=float))


@dataclass(frozen=True)
class OperatorSeries:
    """Result of :func:`operator_alpha_exp`."""

    vector: CoefficientVector
    order: int
    tail_est: float
    converged: bool


def operator_alpha_exp(
    M: CoefficientOperator,
    t: float,
    alpha: float,
    g: CoefficientVector,
    tol: float = 1e-14,
    Rmax: int = 500,
    *,
    strict: bool = True,
) -> OperatorSeries:
    """Sum ``sum_{r<=R} t**r M**r g / (r!)**(alpha+1)``.

    R is the first order whose successor term has max-norm ``<= tol`` while
    the norm bound ``|t| ||M|| / (r+2)**(alpha+1)`` is already below one, so
    later terms cannot grow again. ``tail_est`` is the max-norm of that first
    neglected term. Reaching ``Rmax`` first raises :class:`NonConvergence`
    (or returns ``converged=False`` when ``strict`` is off).
    """
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    M._check(g)
    p = alpha + 1.0
    mat = M.matrix
    norm_m = float(np.max(np.sum(np.abs(mat), axis=1))) if mat.size else 0.0
    term = g.coeffs.copy()
    acc = term.copy()
    r = 0
    while True:
        nxt = (t / (r + 1) ** p) * (mat @ term)
        size = float(np.max(np.abs(nxt)))
        decaying = abs(t) * norm_m / (r + 2) ** p < 1.0
        if size == 0.0 or (size <= tol and decaying):
            return OperatorSeries(CoefficientVector(g.basis, acc), r, size, True)
        if r >= Rmax:
            out = OperatorSeries(CoefficientVector(g.basis, acc), r, size, False)
            if strict:
                raise NonConvergence(
                    f"operator series not converged after {Rmax} terms (next term {size:.3g})", partial=out
                )
            return out
        acc += nxt
        term = nxt
        r += 1


@dataclass
class SolveReport:
    """Solution samples of an operational solution on a tensor grid.

    ``values[i, j]`` is the solution at series-variable point ``i`` and
    synthesis-variable point ``j``; for the IVP the series variable is t,
    for the BVP it is x.
    """

    kind: str
    alpha: float
    operator: CoefficientOperator
    data: CoefficientVector
    series_grid: np.ndarray
    synth_grid: np.ndarray
    values: np.ndarray
    orders: List[int]
    tail_estimates: List[float]
    coefficients: List[CoefficientVector]
    tol: float
    residual: Optional["ResidualSummary"] = field(default=None)

    def rows(self):
        """(x, t, value, tail_est) tuples, series variable major."""
        for i, s in enumerate(self.series_grid):
            for j, y in enumerate(self.synth_grid):
                x, t = (y, s) if self.kind == "ivp" else (s, y)
                yield float(x), float(t), float(self.values[i, j]), float(self.tail_estimates[i])

    def write_csv(self, out: TextIO) -> None:
        out.write("x,t,value,tail_est\n")
        for row in self.rows():
            out.write(",".join(format(v, ".17g") for v in row) + "\n")


def _solve(kind, op, data, alpha, series_grid, synth_grid, tol, Rmax):
    if not 0 <= alpha < 1:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
    series_grid = np.asarray(series_grid, dtype=float)
    synth_grid = np.asarray(synth_grid, dtype=float)
    if np.any(series_grid < 0):
        raise DomainError(f"the {'t' if kind == 'ivp' else 'x'} grid must be nonnegative")
    synth = np.array([basis_values(op.basis, op.dim, y) for y in synth_grid]).reshape(len(synth_grid), op.dim)
    values = np.empty((len(series_grid), len(synth_grid)))
    orders, tails, coeffs = [], [], []
    for i, s in enumerate(series_grid):
        res = operator_alpha_exp(op, float(s), alpha, data, tol, Rmax)
        values[i] = synth @ res.vector.coeffs
        orders.append(res.order)
        tails.append(res.tail_est)
        coeffs.append(res.vector)
    return SolveReport(kind, alpha, op, data, series_grid, synth_grid, values, orders, tails, coeffs, tol)


def solve_ivp(
    theta: CoefficientOperator,
    g: CoefficientVector,
    alpha: float,
    t_grid: Sequence[float],
    x_grid: Sequence[float],
    tol: float = 1e-14,
    Rmax: int = 500,
) -> SolveReport:
    """Operational solution ``f(x, t) = e_alpha(t Theta_x) g(x)`` of ``frakD_t^alpha f = Theta_x f``.

    ``alpha = 0`` is accepted and gives the classical evolution ``exp(t Theta) g``.
    With ``Theta = d^2/dx^2`` and ``g = sin`` each power of ``Theta`` flips the
    sign, so the result is ``sin x * sum (-t)^r/(r!)^(alpha+1)``; use
    :func:`residual_check` to confirm a solution rather than a hand-derived series.
    """
    return _solve("ivp", theta, g, alpha, t_grid, x_grid, tol, Rmax)


def solve_bvp(
    xi: CoefficientOperator,
    h: CoefficientVector,
    alpha: float,
    x_grid: Sequence[float],
    t_grid: Sequence[float],
    tol: float = 1e-14,
    Rmax: int = 500,
) -> SolveReport:
    """Operational solution ``w(x, t) = e_alpha(x Xi_t) h(t)`` of ``frakD_x^alpha w = Xi_t w``."""
    return _solve("bvp", xi, h, alpha, x_grid, t_grid, tol, Rmax)


@dataclass(frozen=True)
class ResidualSummary:
    max_residual: float
    scale: float
    relative: float
    passed: bool
    points: int


def residual_check(
    report: SolveReport,
    alpha: Optional[float] = None,
    theta: Optional[CoefficientOperator] = None,
    qcfg: QuadConfig = DERIVATIVE_QUAD,
    dcfg: DiffConfig = DEFAULT_DIFF,
    tol: float = 1e-4,
) -> ResidualSummary:
    """Check ``frakD^alpha f = Theta f`` numerically on the report grid.

    The fractional operator acts on the series variable only, so it is
    applied to each coefficient trajectory ``s -> c_j(s)`` (via
    :func:`frak_d`) and the result is synthesised on the grid. Points with
    ``s = 0`` are skipped. The residual is ``max |frakD f - Theta f|`` divided
    by ``max |Theta f|`` over the grid.
    """
    alpha = report.alpha if alpha is None else alpha
    theta = report.operator if theta is None else theta
    op, data = report.operator, report.data

    @functools.lru_cache(maxsize=4096)
    def coeffs_at(s):
        return operator_alpha_exp(op, s, report.alpha, data, report.tol).vector.coeffs

    synth = np.array([basis_values(op.basis, op.dim, y) for y in report.synth_grid]).reshape(
        len(report.synth_grid), op.dim
    )
    worst = 0.0
    scale = 0.0
    count = 0
    # coefficients the series can ever touch: the support of g, M g, M^2 g, ...
    reach = data.coeffs != 0
    pattern = op.matrix != 0
    while True:
        grown = reach | np.any(pattern[:, reach], axis=1)
        if np.array_equal(grown, reach):
            break
        reach = grown
    active = np.flatnonzero(reach)
    for s in report.series_grid:
        s = float(s)
        if s <= 0:
            continue
        lhs = np.zeros(op.dim)
        for j in active:
            lhs[j] = frak_d(lambda u, j=j: float(coeffs_at(u)[j]), alpha, s, qcfg, dcfg)
        rhs = theta.matrix @ coeffs_at(s)
        diff = synth @ (lhs - rhs)
        worst = max(worst, float(np.max(np.abs(diff))))
        scale = max(scale, float(np.max(np.abs(synth @ rhs))))
        count += diff.size
    if scale == 0.0:
        relative = 0.0 if worst == 0.0 else math.inf
    else:
        relative = worst / scale
    summary = ResidualSummary(worst, scale, relative, relative <= tol, count)
    report.residual = summary
    return summary


def laguerre_heat(s_coeffs: CoefficientVector, x: float, t: float) -> float:
    """``S(x, t) = sum_k x**k / (k!)**2 * s^(k)(t)`` for a polynomial boundary datum s."""
    if s_coeffs.basis is not Basis.Monomial:
        raise DomainError("laguerre_heat needs the boundary datum in the monomial basis")
    if x < 0:
        raise DomainError(f"laguerre_heat needs x >= 0, got {x}")
    c = np.array(s_coeffs.coeffs)
    terms = []
    k = 0
    while c.size and np.any(c):
        terms.append(x**k / math.factorial(k) ** 2 * P.polyval(t, c))
        c = P.polyder(c)
        k += 1
    return math.fsum(terms)


def laguerre_heat_residual(
    s_coeffs: CoefficientVector, x: float, t: float, dcfg: DiffConfig = DEFAULT_DIFF
) -> float:
    """``|D_{L,x} S - d_t S|`` at (x, t) by finite differences, with ``D_L = (d/dx) x (d/dx)``."""
    h = dcfg.log_step * max(1.0, abs(x))

    def x_dS(xx):
        return xx * central_derivative(lambda y: laguerre_heat(s_coeffs, y, t), xx, 1, h / 4, dcfg.richardson_levels)

    lhs = central_derivative(x_dS, x, 1, h, dcfg.richardson_levels)
    rhs = central_derivative(lambda tt: laguerre_heat(s_coeffs, x, tt), t, 1, h, dcfg.richardson_levels)
    return abs(lhs - rhs)


# file formats --------------------------------------------------------------


def _read_numbers(lines, path):
    nums = []
    for line in lines:
        line = line.split("#", 1)[0]
        try:
            nums.extend(float(tok) for tok in line.split())
        except ValueError:
            raise DomainError(f"{path}: non-numeric entry in {line.strip()!r}") from None
    return nums


def _read_header(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DomainError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 2:
        raise DomainError(f"{path}: first line must be 'dim basis', got {lines[0]!r}")
    try:
        dim = int(head[0])
    except ValueError:
        raise DomainError(f"{path}: dimension must be an integer, got {head[0]!r}") from None
    return dim, Basis.parse(head[1]), lines[1:]


def read_operator(path) -> CoefficientOperator:
    """Read ``dim basis`` followed by dim rows of dim decimals."""
    dim, basis, rest = _read_header(path)
    nums = _read_numbers(rest, path)
    if len(nums) != dim * dim:
        raise DomainError(f"{path}: expected {dim * dim} matrix entries, got {len(nums)}")
    return CoefficientOperator(basis, np.array(nums).reshape(dim, dim))


def read_vector(path) -> CoefficientVector:
    """Read ``dim basis`` followed by dim decimals."""
    dim, basis, rest = _read_header(path)
    nums = _read_numbers(rest, path)
    if len(nums) != dim:
        raise DomainError(f"{path}: expected {dim} coefficients, got {len(nums)}")
    return CoefficientVector(basis, np.array(nums))


def write_operator(op: CoefficientOperator, out: TextIO) -> None:
    out.write(f"{op.dim} {op.basis.value}\n")
    for row in op.matrix:
        out.write(" ".join(format(float(v), ".17g") for v in row) + "\n")


def write_vector(v: CoefficientVector, out: TextIO) -> None:
    out.write(f"{v.dim} {v.basis.value}\n")
    out.write(" ".join(format(float(c), ".17g") for c in v.coeffs) + "\n")
