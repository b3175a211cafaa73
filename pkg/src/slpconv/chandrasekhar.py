"""Chandrasekhar's even (C_n) and odd (S_n) clamped-clamped functions on [-1/2, 1/2].

    C_n(z) = cosh(lam z)/cosh(lam/2) - cos(lam z)/cos(lam/2),  tanh(lam/2) + tan(lam/2) = 0
    S_n(z) = sinh(mu z)/sinh(mu/2) - sin(mu z)/sin(mu/2),      coth(mu/2) - cot(mu/2) = 0

Each set is orthonormal on [-1/2, 1/2] and has a definite parity, so every
z-weighted projection within one set vanishes. That is the reason a
single-parity Galerkin projection cannot see the heating parameter N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .oracle import adaptive_quadrature

__all__ = [
    "ChandrasekharRoots",
    "RootBracketError",
    "solve_roots",
    "lambda_equation",
    "mu_equation",
    "eval_C",
    "eval_S",
    "weighted_projection",
    "degeneracy_certificate",
]

WINDOW = 0.1
ROOT_RESIDUAL = 1e-10


class RootBracketError(RuntimeError):
    pass


def lambda_equation(lam: float) -> float:
    return math.tanh(lam / 2) + math.tan(lam / 2)


def mu_equation(mu: float) -> float:
    return 1.0 / math.tanh(mu / 2) - 1.0 / math.tan(mu / 2)


@dataclass(frozen=True)
class ChandrasekharRoots:
    lam: tuple[float, ...]
    mu: tuple[float, ...]

    def __len__(self):
        return len(self.lam)


def _root_in(fn, centre: float) -> float:
    lo, hi = centre - WINDOW, centre + WINDOW
    flo, fhi = fn(lo), fn(hi)
    if flo * fhi > 0:
        raise RootBracketError(f"no sign change in ({lo:.6f}, {hi:.6f})")
    root = brentq(fn, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(fn(root)) >= ROOT_RESIDUAL:
        raise RootBracketError(f"residual {fn(root):.3e} at root {root}")
    return root


@lru_cache(maxsize=None)
def solve_roots(count: int) -> ChandrasekharRoots:
    """First ``count`` positive roots of both characteristic equations."""
    if count < 1:
        raise ValueError("count must be >= 1")
    lam = tuple(_root_in(lambda_equation, (4 * n - 1) * math.pi / 2) for n in range(1, count + 1))
    mu = tuple(_root_in(mu_equation, (4 * n + 1) * math.pi / 2) for n in range(1, count + 1))
    return ChandrasekharRoots(lam, mu)


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 0.5):
        raise ValueError("|z| must not exceed 1/2")
    return z


def _hyp_ratio(k: float, z: np.ndarray, odd: bool, deriv: int) -> np.ndarray:
    """cosh(kz)/cosh(k/2) (or sinh ratio when ``odd``) and its z-derivative.

    Written as exp(k(|z| - 1/2)) (1 +- exp(-2k|z|)) / (1 +- exp(-k)) so it
    never overflows.
    """
    az = np.abs(z)
    scale = np.exp(k * (az - 0.5))
    e = np.exp(-2.0 * k * az)
    # even part for cosh, odd part for sinh; derivative swaps them
    use_plus = odd == bool(deriv)
    num = 1.0 + e if use_plus else 1.0 - e
    den = 1.0 - math.exp(-k) if odd else 1.0 + math.exp(-k)
    val = scale * num / den
    if odd != bool(deriv):
        val = np.sign(z) * val
    return val * k**deriv


def _eval(n: int, z, deriv: int, odd: bool):
    if n < 1:
        raise ValueError("n must be >= 1")
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    z = _check_z(z)
    roots = solve_roots(n)
    k = roots.mu[n - 1] if odd else roots.lam[n - 1]
    hyp = _hyp_ratio(k, z, odd, deriv % 2) * (k**(deriv - deriv % 2))
    if odd:
        trig = [np.sin(k * z), k * np.cos(k * z), -k * k * np.sin(k * z)][deriv] / math.sin(k / 2)
    else:
        trig = [np.cos(k * z), -k * np.sin(k * z), -k * k * np.cos(k * z)][deriv] / math.cos(k / 2)
    # hyperbolic second derivative is +k^2 times the function; trig is -k^2
    out = hyp - trig
    return out if out.ndim else float(out)


def eval_C(n: int, z, deriv: int = 0):
    """Even Chandrasekhar function C_n (or its first/second derivative) at z."""
    return _eval(n, z, deriv, odd=False)


def eval_S(n: int, z, deriv: int = 0):
    """Odd Chandrasekhar function S_n (or its first/second derivative) at z."""
    return _eval(n, z, deriv, odd=True)


def weighted_projection(n: int, m: int, weight: str = "1", family: str = "C",
                        tol: float = 1e-12) -> float:
    """int_{-1/2}^{1/2} w(z) F_n(z) F_m(z) dz for F = C or S and w = 1 or z."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if weight not in ("1", "z"):
        raise ValueError("weight must be '1' or 'z'")
    fn = {"C": eval_C, "S": eval_S}[family]
    if weight == "z":
        integrand = lambda z: z * fn(n, z) * fn(m, z)
    else:
        integrand = lambda z: fn(n, z) * fn(m, z)
    # split at 0 so each panel sees a smooth branch of |z|
    return (adaptive_quadrature(integrand, (-0.5, 0.0), tol / 2)
            + adaptive_quadrature(integrand, (0.0, 0.5), tol / 2))


def degeneracy_certificate(n_max: int = 6) -> dict[str, float]:
    """Largest orthonormality defect and largest z-weighted projection for n, m <= n_max."""
    out = {}
    for family in ("C", "S"):
        ortho = 0.0
        weighted = 0.0
        for n in range(1, n_max + 1):
            for m in range(n, n_max + 1):
                delta = 1.0 if n == m else 0.0
                ortho = max(ortho, abs(weighted_projection(n, m, "1", family) - delta))
                weighted = max(weighted, abs(weighted_projection(n, m, "z", family)))
        out[f"{family}_orthonormality"] = ortho
        out[f"{family}_z_projection"] = weighted
    return out
