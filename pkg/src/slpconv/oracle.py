"""Independent reference computations.

A second-order finite-difference discretization of the marginal problem

    (D^2 - a^2)^2 W = a^2 Ra Theta,    (D^2 - a^2) Theta = -(1 - N z) W,
    W = DW = Theta = 0 at the walls,

with Richardson extrapolation over nested grids, plus an adaptive
Gauss-Legendre quadrature for smooth non-polynomial integrands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

__all__ = [
    "GridSpec",
    "OracleError",
    "QuadratureError",
    "RichardsonResult",
    "OracleResult",
    "DEFAULT_GRIDS",
    "fd_rayleigh",
    "richardson",
    "convergence_order",
    "oracle_rayleigh",
    "oracle_critical",
    "golden_section",
    "adaptive_quadrature",
]

# interior point counts; spacings 1/64, 1/128, 1/256 are exactly nested
DEFAULT_GRIDS = (63, 127, 255)


class OracleError(RuntimeError):
    pass


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``m`` interior nodes on the unit interval."""

    m: int

    def __post_init__(self):
        if self.m < 16:
            raise ValueError(f"grid needs at least 16 interior points, got {self.m}")

    @property
    def spacing(self) -> float:
        return 1.0 / (self.m + 1)

    def refined(self) -> "GridSpec":
        return GridSpec(2 * self.m + 1)


def _operators(m: int, h: float):
    e = np.ones(m)
    d2 = (np.diag(-2.0 * e) + np.diag(e[:-1], 1) + np.diag(e[:-1], -1)) / h**2
    d4 = (
        np.diag(6.0 * e)
        + np.diag(-4.0 * e[:-1], 1)
        + np.diag(-4.0 * e[:-1], -1)
        + np.diag(e[:-2], 2)
        + np.diag(e[:-2], -2)
    )
    # W = 0 on the wall, DW = 0 through the reflected ghost W_{-1} = W_1
    d4[0, 0] += 1.0
    d4[-1, -1] += 1.0
    return d2, d4 / h**4


def fd_rayleigh(N: float, a2: float, grid: GridSpec, shifted: bool = False) -> float:
    """Smallest real positive Ra of the finite-difference pencil on ``grid``.

    With ``shifted=True`` the layer is x in [0, 1] with coefficient
    ``1 + N/2 - N x``; otherwise z in [-1/2, 1/2] with ``1 - N z``.
    """
    if a2 <= 0:
        raise ValueError("a2 must be positive")
    m, h = grid.m, grid.spacing
    nodes = h * np.arange(1, m + 1)
    if shifted:
        coeff = (1.0 + N / 2.0) - N * nodes
    else:
        coeff = 1.0 - N * (nodes - 0.5)
    d2, d4 = _operators(m, h)
    eye = np.eye(m)
    biharm = d4 - 2.0 * a2 * d2 + a2**2 * eye
    lap = d2 - a2 * eye
    # Theta = -lap^{-1} C W;  biharm W = Ra * coupling W.
    # B is singular wherever 1 - N z vanishes, so invert the nonsingular side
    # and take mu = 1/Ra (shift-invert about zero).
    try:
        coupling = -a2 * np.linalg.solve(lap, coeff[:, None] * eye)
        mu = sla.eigvals(np.linalg.solve(biharm, coupling))
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise OracleError(f"eigen-solve failed on grid m={m}: {exc}") from exc
    real = mu[(np.abs(mu.imag) <= 1e-10 * np.abs(mu)) & (mu.real > 0)].real
    if real.size == 0:
        raise OracleError(f"no positive eigenvalue on grid m={m}")
    return float(1.0 / real.max())


class RichardsonResult(NamedTuple):
    value: float
    error_indicator: float
    monotone: bool


def richardson(values: Sequence[float], ratio: float = 2.0) -> RichardsonResult:
    """h^2 extrapolation of three nested-grid values (coarse to fine).

    The indicator is the spread between the extrapolants of the coarse and the
    fine pair; ``monotone`` is False when the differences change sign.
    """
    if len(values) != 3:
        raise ValueError("richardson needs exactly three values")
    r0, r1, r2 = (float(v) for v in values)
    f = ratio**2 - 1.0
    fine = r2 + (r2 - r1) / f
    coarse = r1 + (r1 - r0) / f
    d1, d2 = r1 - r0, r2 - r1
    monotone = d1 * d2 >= 0 and abs(d2) <= abs(d1)
    return RichardsonResult(fine, abs(fine - coarse), monotone)


def convergence_order(values: Sequence[float], ratio: float = 2.0) -> float:
    r0, r1, r2 = values
    return math.log(abs(r0 - r1) / abs(r1 - r2)) / math.log(ratio)


class OracleResult(NamedTuple):
    Ra: float
    values: tuple[float, ...]
    order: float
    error_indicator: float
    monotone: bool


def oracle_rayleigh(N: float, a2: float, grids: Sequence[int] = DEFAULT_GRIDS,
                    shifted: bool = False) -> OracleResult:
    """Richardson-extrapolated finite-difference Ra on three nested grids."""
    specs = [GridSpec(m) for m in grids]
    vals = tuple(fd_rayleigh(N, a2, g, shifted=shifted) for g in specs)
    ratio = specs[0].spacing / specs[1].spacing
    rich = richardson(vals, ratio=ratio)
    if vals[0] == vals[1] == vals[2]:
        order = math.inf
    else:
        order = convergence_order(vals, ratio=ratio)
    return OracleResult(rich.value, vals, order, rich.error_indicator, rich.monotone)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   rtol: float = 1e-6, max_iter: int = 200) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on [lo, hi] until the bracket's relative width is below rtol.

    Returns ``(x_min, f(x_min))``. Raises ValueError when the minimum sits at
    an end of the bracket (f monotone across it).
    """
    if not hi > lo:
        raise ValueError(f"degenerate bracket ({lo}, {hi})")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if (b - a) <= rtol * abs(0.5 * (a + b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    edge = 10 * rtol * abs(x)
    if x - lo <= edge or hi - x <= edge:
        raise ValueError(f"no interior minimum in ({lo}, {hi})")
    return x, fx


def oracle_critical(N: float, a2_bracket: tuple[float, float] = (4.0, 20.0),
                    grids: Sequence[int] = DEFAULT_GRIDS, rtol: float = 1e-6) -> tuple[float, float]:
    """Minimizer of the extrapolated finite-difference neutral curve."""
    return golden_section(lambda a2: oracle_rayleigh(N, a2, grids).Ra, *a2_bracket, rtol=rtol)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gauss(f, a, b):
    half, mid = 0.5 * (b - a), 0.5 * (a + b)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def adaptive_quadrature(f: Callable, interval: tuple[float, float], tol: float = 1e-12,
                        max_depth: int = 40) -> float:
    """Adaptive 20-point Gauss-Legendre quadrature of a vectorized ``f``.

    A panel is accepted once the panel rule and the sum over its two halves
    agree to within the panel's share of ``tol``.
    """
    a, b = map(float, interval)
    if not b > a:
        raise ValueError("interval must satisfy a < b")

    def panel(lo, hi, whole, tol_here, depth):
        mid = 0.5 * (lo + hi)
        left, right = _gauss(f, lo, mid), _gauss(f, mid, hi)
        if abs(left + right - whole) <= tol_here:
            return left + right
        if depth >= max_depth:
            raise QuadratureError(f"no convergence after {max_depth} bisections near [{lo}, {hi}]")
        return (panel(lo, mid, left, 0.5 * tol_here, depth + 1)
                + panel(mid, hi, right, 0.5 * tol_here, depth + 1))

    return panel(a, b, _gauss(f, a, b), tol, 0)
