"""Shifted Legendre polynomials on (0, 1) and the integrated bases phi_i, beta_i.

Every function is available in two forms:

* exact monomial coefficients (``Fraction``), used for exact inner products;
* a floating evaluator built on the three-term recurrence, used on grids.

``Q_k(x) = L_k(2x - 1)``, ``phi_i = int_0^x Q_i`` and ``beta_i`` is the double
integral of ``Q_{i+1}``, so ``phi_i`` lies in H^1_0 and ``beta_i`` in H^2_0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

__all__ = [
    "BasisFunctionId",
    "poly_coefficients",
    "poly_derivative",
    "poly_eval_exact",
    "eval_Q",
    "eval_Q_derivative",
    "eval_phi",
    "eval_beta",
    "multiply_by_x",
    "derivative_relation_residual",
]

KINDS = ("Q", "phi", "beta")

Poly = tuple[Fraction, ...]


@dataclass(frozen=True)
class BasisFunctionId:
    """A basis function, optionally differentiated ``deriv`` times."""

    kind: str
    index: int
    deriv: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        lowest = 0 if self.kind == "Q" else 1
        if self.index < lowest:
            raise ValueError(f"{self.kind} index must be >= {lowest}, got {self.index}")
        if self.deriv < 0:
            raise ValueError("derivative order must be non-negative")

    def d(self, times: int = 1) -> "BasisFunctionId":
        return BasisFunctionId(self.kind, self.index, self.deriv + times)


def _check_index(i: int, lowest: int) -> None:
    if int(i) != i or i < lowest:
        raise ValueError(f"index must be an integer >= {lowest}, got {i}")


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
        raise ValueError("x must lie in [0, 1]")
    return x


# -- exact coefficients ------------------------------------------------------


def _combine(*terms: tuple[Fraction, Poly]) -> Poly:
    size = max(len(p) for _, p in terms)
    out = [Fraction(0)] * size
    for c, p in terms:
        for j, a in enumerate(p):
            out[j] += c * a
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def _Q_coeffs(k: int) -> Poly:
    # L_k(2x-1) = sum_j (-1)^(k+j) C(k,j) C(k+j,j) x^j
    return tuple(Fraction((-1) ** (k + j) * comb(k, j) * comb(k + j, j)) for j in range(k + 1))


@lru_cache(maxsize=None)
def _phi_coeffs(i: int) -> Poly:
    c = Fraction(1, 2 * (2 * i + 1))
    return _combine((c, _Q_coeffs(i + 1)), (-c, _Q_coeffs(i - 1)))


@lru_cache(maxsize=None)
def _beta_coeffs(i: int) -> Poly:
    c1 = Fraction(1, 4 * (2 * i + 3) * (2 * i + 5))
    c2 = Fraction(1, 4 * (2 * i + 1) * (2 * i + 3))
    return _combine(
        (c1, _Q_coeffs(i + 3)),
        (-c1 - c2, _Q_coeffs(i + 1)),
        (c2, _Q_coeffs(i - 1)),
    )


def poly_derivative(p: Poly) -> Poly:
    if len(p) == 1:
        return (Fraction(0),)
    return tuple(j * p[j] for j in range(1, len(p)))


@lru_cache(maxsize=None)
def poly_coefficients(fid: BasisFunctionId) -> Poly:
    """Exact ascending monomial coefficients of ``fid`` on [0, 1]."""
    base = {"Q": _Q_coeffs, "phi": _phi_coeffs, "beta": _beta_coeffs}[fid.kind](fid.index)
    for _ in range(fid.deriv):
        base = poly_derivative(base)
    return base


def poly_eval_exact(p: Poly, x) -> Fraction:
    x = Fraction(x)
    acc = Fraction(0)
    for a in reversed(p):
        acc = acc * x + a
    return acc


# -- floating evaluation -----------------------------------------------------


def _legendre_pair(k: int, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (L_k(u), L'_k(u)) by the Bonnet recurrence."""
    p_prev, p = np.ones_like(u), u.copy()
    dp_prev, dp = np.zeros_like(u), np.ones_like(u)
    if k == 0:
        return p_prev, dp_prev
    for j in range(1, k):
        p_next = ((2 * j + 1) * u * p - j * p_prev) / (j + 1)
        # L'_{j+1} = L'_{j-1} + (2j+1) L_j
        dp_next = dp_prev + (2 * j + 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def eval_Q(i: int, x):
    """Shifted Legendre polynomial ``Q_i(x) = L_i(2x - 1)`` for x in [0, 1]."""
    _check_index(i, 0)
    x = _check_unit(x)
    val, _ = _legendre_pair(int(i), 2.0 * x - 1.0)
    return val if val.ndim else float(val)


def eval_Q_derivative(i: int, x):
    """d/dx Q_i(x)."""
    _check_index(i, 0)
    x = _check_unit(x)
    _, dval = _legendre_pair(int(i), 2.0 * x - 1.0)
    dval = 2.0 * dval
    return dval if dval.ndim else float(dval)


def eval_phi(i: int, x, deriv: int = 0):
    """phi_i(x) = (Q_{i+1} - Q_{i-1}) / (2(2i+1)); ``deriv`` in {0, 1}."""
    _check_index(i, 1)
    if deriv == 1:
        return eval_Q(i, x)
    if deriv != 0:
        raise ValueError("deriv must be 0 or 1")
    return (eval_Q(i + 1, x) - eval_Q(i - 1, x)) / (2 * (2 * i + 1))


def eval_beta(i: int, x, deriv: int = 0):
    """beta_i(x) and its first two derivatives (``beta' = phi_{i+1}``, ``beta'' = Q_{i+1}``)."""
    _check_index(i, 1)
    if deriv == 2:
        return eval_Q(i + 1, x)
    if deriv == 1:
        return eval_phi(i + 1, x)
    if deriv != 0:
        raise ValueError("deriv must be 0, 1 or 2")
    upper = (eval_Q(i + 3, x) - eval_Q(i + 1, x)) / ((2 * i + 3) * (2 * i + 5))
    lower = (eval_Q(i + 1, x) - eval_Q(i - 1, x)) / ((2 * i + 1) * (2 * i + 3))
    return 0.25 * (upper - lower)


# -- recurrences ---------------------------------------------------------------


def multiply_by_x(i: int) -> list[tuple[int, Fraction]]:
    """Coefficients of ``x * Q_i`` in the Q basis as ``(index, coefficient)`` pairs."""
    _check_index(i, 0)
    terms = [(i + 1, Fraction(i + 1, 2 * (2 * i + 1))), (i, Fraction(1, 2))]
    if i > 0:
        terms.append((i - 1, Fraction(i, 2 * (2 * i + 1))))
    return terms


def derivative_relation_residual(i: int, x):
    """|2(2i+1) Q_i - Q'_{i+1} + Q'_{i-1}| at x; zero up to rounding."""
    _check_index(i, 1)
    r = 2 * (2 * i + 1) * eval_Q(i, x) - eval_Q_derivative(i + 1, x) + eval_Q_derivative(i - 1, x)
    return np.abs(r) if np.ndim(r) else abs(r)
