"""Shifted-Legendre Galerkin solver for convection with uniform internal heating.

On x in [0, 1] the marginal problem reads

    (D^2 - a^2)^2 W - a^2 Ra Theta = 0
    (D^2 - a^2) Theta + (N1 - N x) W = 0,    N1 = 1 + N/2,

with W = DW = Theta = 0 at both walls. Expanding W in beta_i and Theta in
phi_i and projecting onto (beta_k, phi_k) gives

    K W - a^2 Ra M Theta = 0,    P W + L Theta = 0,

with row index k (test function) and column index i (trial function).
Eliminating Theta leaves the n x n pencil K W = Ra (-a^2 M L^{-1} P) W.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

from .inner_products import InnerProductKind as IPK, inner_product
from .oracle import golden_section

__all__ = [
    "ProblemParams",
    "GalerkinBlocks",
    "RayleighSolution",
    "NeutralCurvePoint",
    "CriticalPoint",
    "BasicStateParams",
    "NoPositiveEigenvalue",
    "SingularReduction",
    "NoInteriorMinimum",
    "DEFAULT_A2_BRACKET",
    "assemble",
    "solve_rayleigh",
    "rayleigh",
    "secular_determinant",
    "neutral_curve",
    "critical_rayleigh",
    "convergence_study",
    "reproducing_truncation",
    "basic_state_profile",
]

DEFAULT_A2_BRACKET = (4.0, 20.0)
# relative size of an imaginary part below which an eigenvalue counts as real
IMAG_TOL = 1e-8


class NoPositiveEigenvalue(RuntimeError):
    pass


class SingularReduction(RuntimeError):
    pass


class NoInteriorMinimum(ValueError):
    pass


@dataclass(frozen=True)
class ProblemParams:
    N: float
    a2: float
    n_modes: int

    def __post_init__(self):
        if not (math.isfinite(self.a2) and self.a2 > 0):
            raise ValueError(f"a2 must be a positive number, got {self.a2}")
        if not math.isfinite(self.N):
            raise ValueError("N must be finite")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be an integer >= 1, got {self.n_modes}")

    @property
    def N1(self) -> float:
        return 1.0 + self.N / 2.0


@dataclass(frozen=True)
class GalerkinBlocks:
    K: np.ndarray
    M: np.ndarray
    L: np.ndarray
    P: np.ndarray

    @property
    def n(self) -> int:
        return self.K.shape[0]


@dataclass
class RayleighSolution:
    Ra: float
    W_coeffs: np.ndarray
    Theta_coeffs: np.ndarray
    det_residual: float
    spectrum: np.ndarray
    n_complex: int = 0
    params: ProblemParams | None = field(default=None, repr=False)


class NeutralCurvePoint(NamedTuple):
    a2: float
    Ra: float
    error: str | None = None


class CriticalPoint(NamedTuple):
    a2: float
    Ra: float


@lru_cache(maxsize=None)
def _exact_matrix(kind: IPK, n: int, transpose: bool = False) -> tuple[tuple[Fraction, ...], ...]:
    # entry [k][i] = (kind)(i, k); transpose swaps the roles
    if transpose:
        return tuple(tuple(inner_product(kind, k, i) for i in range(1, n + 1)) for k in range(1, n + 1))
    return tuple(tuple(inner_product(kind, i, k) for i in range(1, n + 1)) for k in range(1, n + 1))


def _combine(terms: Sequence[tuple[Fraction, tuple]]) -> np.ndarray:
    n = len(terms[0][1])
    out = np.empty((n, n))
    for r in range(n):
        for c in range(n):
            out[r, c] = float(sum(w * mat[r][c] for w, mat in terms))
    return out


def assemble(params: ProblemParams) -> GalerkinBlocks:
    """Build K, M, L, P in exact arithmetic and round once at the end."""
    n = params.n_modes
    a2 = Fraction(params.a2)
    N = Fraction(params.N)
    N1 = 1 + N / 2
    K = _combine([
        (Fraction(1), _exact_matrix(IPK.D4_BETA_BETA, n)),
        (-2 * a2, _exact_matrix(IPK.D2_BETA_BETA, n)),
        (a2 * a2, _exact_matrix(IPK.BETA_BETA, n)),
    ])
    M = _combine([(Fraction(1), _exact_matrix(IPK.PHI_BETA, n))])
    L = _combine([
        (Fraction(1), _exact_matrix(IPK.D2_PHI_PHI, n)),
        (-a2, _exact_matrix(IPK.PHI_PHI, n)),
    ])
    # (beta_i, phi_k) is phi_beta with the roles of i and k exchanged
    P = _combine([
        (N1, _exact_matrix(IPK.PHI_BETA, n, transpose=True)),
        (-N, _exact_matrix(IPK.X_BETA_PHI, n)),
    ])
    return GalerkinBlocks(K, M, L, P)


def secular_determinant(blocks: GalerkinBlocks, params: ProblemParams, Ra: float,
                        normalized: bool = True) -> float:
    """Determinant of [[K, -a^2 Ra M], [P, L]].

    With ``normalized`` the value is divided by its Ra = 0 value det(K) det(L),
    which makes it a dimensionless product of (1 - Ra/Ra_j) over the spectrum.
    """
    a2 = params.a2
    full = np.block([[blocks.K, -a2 * Ra * blocks.M], [blocks.P, blocks.L]])
    sign, logdet = np.linalg.slogdet(full)
    if not normalized:
        return float(sign * math.exp(logdet))
    s0, log0 = np.linalg.slogdet(np.block([[blocks.K, 0 * blocks.M], [blocks.P, blocks.L]]))
    if sign == 0:
        return 0.0
    return float(sign * s0 * math.exp(logdet - log0))


def solve_rayleigh(blocks: GalerkinBlocks, params: ProblemParams) -> RayleighSolution:
    """Smallest real positive Ra of the reduced pencil, with its eigenvector."""
    a2 = params.a2
    try:
        LinvP = sla.solve(blocks.L, blocks.P, assume_a="sym")
        G = -a2 * blocks.M @ LinvP
        # K is positive definite, so mu = 1/Ra solves K^{-1} G w = mu w without
        # infinite eigenvalues
        cho = sla.cho_factor(blocks.K)
        mu, vecs = sla.eig(sla.cho_solve(cho, G))
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise SingularReduction(str(exc)) from exc
    nonzero = np.abs(mu) > 1e-14 * max(1.0, np.abs(mu).max())
    is_real = np.abs(mu.imag) <= IMAG_TOL * np.abs(mu)
    spectrum = 1.0 / mu[nonzero]
    n_complex = int(np.count_nonzero(nonzero & ~is_real))
    candidates = np.flatnonzero(nonzero & is_real & (mu.real > 0))
    if candidates.size == 0:
        raise NoPositiveEigenvalue(
            f"no real positive eigenvalue for N={params.N}, a2={params.a2}, n={params.n_modes}")
    j = candidates[np.argmax(mu.real[candidates])]
    Ra = float(1.0 / mu.real[j])
    W = np.real(vecs[:, j])
    W = W / W[np.argmax(np.abs(W))]
    Theta = -sla.solve(blocks.L, blocks.P @ W, assume_a="sym")
    return RayleighSolution(
        Ra=Ra,
        W_coeffs=W,
        Theta_coeffs=Theta,
        det_residual=secular_determinant(blocks, params, Ra),
        spectrum=np.sort_complex(spectrum),
        n_complex=n_complex,
        params=params,
    )


def rayleigh(N: float, a2: float, n: int) -> float:
    """Shortcut: smallest admissible Ra for (N, a2) at truncation n."""
    params = ProblemParams(N, a2, n)
    return solve_rayleigh(assemble(params), params).Ra


def neutral_curve(N: float, a2_grid: Sequence[float], n: int) -> list[NeutralCurvePoint]:
    """Ra(a2) on a grid; failed points carry NaN and the error message."""
    out = []
    for a2 in a2_grid:
        try:
            out.append(NeutralCurvePoint(float(a2), rayleigh(N, a2, n)))
        except (NoPositiveEigenvalue, SingularReduction, ValueError) as exc:
            out.append(NeutralCurvePoint(float(a2), math.nan, str(exc)))
    return out


def critical_rayleigh(N: float, n: int, a2_bracket: tuple[float, float] = DEFAULT_A2_BRACKET,
                      rtol: float = 1e-6) -> CriticalPoint:
    """Golden-section minimum of Ra(a2) inside ``a2_bracket``."""
    lo, hi = a2_bracket
    if not (lo > 0 and hi > lo):
        raise ValueError(f"invalid bracket {a2_bracket}")
    try:
        a2, ra = golden_section(lambda a: rayleigh(N, a, n), lo, hi, rtol=rtol)
    except ValueError as exc:
        raise NoInteriorMinimum(str(exc)) from exc
    return CriticalPoint(a2, ra)


def convergence_study(N: float, a2: float, n_list: Sequence[int]) -> list[tuple[int, float]]:
    """Ra at each truncation in ``n_list`` (ascending)."""
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list must not be empty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    return [(n, rayleigh(N, a2, n)) for n in n_list]


def reproducing_truncation(N: float, a2: float, target: float, n_max: int = 12,
                           atol: float = 0.05) -> int | None:
    """Smallest n whose Ra lies within ``atol`` of ``target``, or None."""
    for n in range(1, n_max + 1):
        if abs(rayleigh(N, a2, n) - target) <= atol:
            return n
    return None


@dataclass(frozen=True)
class BasicStateParams:
    theta_B0: float
    delta_theta_B: float
    eta: float
    k: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("layer depth h must be positive")
        if not self.k > 0:
            raise ValueError("conductivity k must be positive")


def basic_state_profile(p: BasicStateParams, z):
    """Conduction temperature theta_B(z) for z in [-h/2, h/2].

    theta_B = theta_B0 - (dtheta/h)(z + h/2) + (eta / 2k)(z^2 - (h/2)^2),
    so theta_B(-h/2) = theta_B0 and theta_B(h/2) = theta_B0 - dtheta.
    """
    z_arr = np.asarray(z, dtype=float)
    half = p.h / 2.0
    if np.any(np.abs(z_arr) > half * (1 + 1e-12)):
        raise ValueError(f"z must lie in [-{half}, {half}]")
    out = (p.theta_B0 - p.delta_theta_B / p.h * (z_arr + half)
           + p.eta / (2.0 * p.k) * (z_arr**2 - half**2))
    return out if out.ndim else float(out)
