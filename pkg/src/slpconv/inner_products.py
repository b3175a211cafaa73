"""Exact inner products of the shifted-Legendre bases on (0, 1).

Two independent routes produce each value:

``closed_form``
    The tabulated case formulas (banded, orthogonality based).
``exact_integral``
    Term-by-term monomial integration in exact integer arithmetic.

``exact_integral`` is authoritative. ``validate_table`` compares the two and
reports every mismatch with both values; nothing is patched silently. The one
known mismatch is the ``i = k + 3`` case of ``(x beta_i, phi_k)``, whose printed
numerator ``i + 1`` should read ``i - 1`` (see ``KNOWN_ERRATA``).
"""
from __future__ import annotations

import csv
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import NamedTuple

from .slp_basis import BasisFunctionId, poly_coefficients

__all__ = [
    "InnerProductKind",
    "Discrepancy",
    "KNOWN_ERRATA",
    "closed_form",
    "exact_integral",
    "inner_product",
    "kind_operands",
    "validate_table",
    "write_table_csv",
]


class InnerProductKind(str, Enum):
    D4_BETA_BETA = "D4_beta_beta"  # (D^4 beta_i, beta_k) = (beta_i'', beta_k'')
    D2_BETA_BETA = "D2_beta_beta"  # (D^2 beta_i, beta_k) = -(beta_i', beta_k')
    PHI_PHI = "phi_phi"
    BETA_BETA = "beta_beta"
    PHI_BETA = "phi_beta"  # (phi_i, beta_k)
    D2_PHI_PHI = "D2_phi_phi"  # (D^2 phi_i, phi_k) = -(Q_i, Q_k)
    X_BETA_PHI = "x_beta_phi"  # (x beta_i, phi_k)

    @property
    def symmetric(self) -> bool:
        return self in _SYMMETRIC


_SYMMETRIC = {
    InnerProductKind.D4_BETA_BETA,
    InnerProductKind.D2_BETA_BETA,
    InnerProductKind.PHI_PHI,
    InnerProductKind.BETA_BETA,
    InnerProductKind.D2_PHI_PHI,
}

# (kind, case) -> corrected formula; the case label is the offset i - k
KNOWN_ERRATA = {
    (InnerProductKind.X_BETA_PHI, 3): "(i-1)/(16(2i-5)(2i-3)(2i-1)(2i+1)(2i+3)), printed with numerator (i+1)",
}


class Discrepancy(NamedTuple):
    kind: InnerProductKind
    i: int
    k: int
    closed_form: Fraction
    exact: Fraction


def _as_kind(kind) -> InnerProductKind:
    return kind if isinstance(kind, InnerProductKind) else InnerProductKind(kind)


def _check(i: int, k: int) -> None:
    if i < 1 or k < 1:
        raise ValueError(f"indices must be >= 1, got ({i}, {k})")


def _odd_product(i: int, *offsets: int) -> int:
    out = 1
    for o in offsets:
        out *= 2 * i + o
    return out


def _d4_beta_beta(i, k):
    return Fraction(1, 2 * i + 3) if i == k else Fraction(0)


def _d2_beta_beta(i, k):
    if i == k:
        return Fraction(-1, 2 * _odd_product(i, 1, 3, 5))
    if i == k + 2:
        return Fraction(1, 4 * _odd_product(i, -1, 1, 3))
    if k == i + 2:
        return _d2_beta_beta(k, i)
    return Fraction(0)


def _phi_phi(i, k):
    if i == k:
        return Fraction(1, 2 * _odd_product(i, -1, 1, 3))
    if i == k - 2:
        return Fraction(-1, 4 * _odd_product(i, 1, 3, 5))
    if k == i - 2:
        return _phi_phi(k, i)
    return Fraction(0)


def _beta_beta(i, k):
    if i > k:
        return _beta_beta(k, i)
    if i == k:
        return Fraction(3, 8 * _odd_product(i, -1, 1, 3, 5, 7))
    if i == k - 2:
        return Fraction(-1, 4 * _odd_product(i, 1, 3, 5, 7, 9))
    if i == k - 4:
        return Fraction(1, 16 * _odd_product(i, 3, 5, 7, 9, 11))
    return Fraction(0)


def _phi_beta(i, k):
    if i == k:
        return Fraction(-3, 8 * _odd_product(i, -1, 1, 3, 5))
    if i == k + 2:
        return Fraction(3, 8 * _odd_product(i, -3, -1, 1, 3))
    if i == k - 2:
        return Fraction(1, 8 * _odd_product(i, 1, 3, 5, 7))
    if i == k + 4:
        return Fraction(-1, 8 * _odd_product(i, -5, -3, -1, 1))
    return Fraction(0)


def _d2_phi_phi(i, k):
    return Fraction(-1, 2 * i + 1) if i == k else Fraction(0)


def _x_beta_phi(i, k, corrected=False):
    offset = i - k
    if offset == -5:
        return Fraction(-(i + 4), 16 * _odd_product(i, 3, 5, 7, 9, 11))
    if offset == -4:
        return Fraction(-1, 16 * _odd_product(i, 3, 5, 7, 9))
    if offset == -3:
        return Fraction(1, 16 * _odd_product(i, 1, 3, 5, 9))
    if offset == -2:
        return Fraction(3, 16 * _odd_product(i, 1, 3, 5, 7))
    if offset == -1:
        return Fraction(-3, 16 * _odd_product(i, -1, 1, 3, 5, 7))
    if offset == 0:
        return Fraction(-3, 16 * _odd_product(i, -1, 1, 3, 5))
    if offset == 1:
        return Fraction(-1, 16 * _odd_product(i, -3, 1, 3, 5))
    if offset == 2:
        return Fraction(1, 16 * _odd_product(i, -3, -1, 1, 3))
    if offset == 3:
        num = i - 1 if corrected else i + 1
        return Fraction(num, 16 * _odd_product(i, -5, -3, -1, 1, 3))
    return Fraction(0)


_CLOSED = {
    InnerProductKind.D4_BETA_BETA: _d4_beta_beta,
    InnerProductKind.D2_BETA_BETA: _d2_beta_beta,
    InnerProductKind.PHI_PHI: _phi_phi,
    InnerProductKind.BETA_BETA: _beta_beta,
    InnerProductKind.PHI_BETA: _phi_beta,
    InnerProductKind.D2_PHI_PHI: _d2_phi_phi,
}


def closed_form(kind, i: int, k: int, corrected: bool = False) -> Fraction:
    """Tabulated closed form of the inner product ``kind`` for indices (i, k).

    Symmetric kinds listed with one off-diagonal side only are completed by
    ``(f, g) = (g, f)``. With ``corrected=True`` the entries in
    ``KNOWN_ERRATA`` use their corrected formulas instead of the printed ones.
    """
    kind = _as_kind(kind)
    _check(i, k)
    if kind is InnerProductKind.X_BETA_PHI:
        return _x_beta_phi(i, k, corrected)
    return _CLOSED[kind](i, k)


def kind_operands(kind, i: int, k: int) -> tuple[BasisFunctionId, BasisFunctionId, str]:
    """Integrands ``(f, g, weight)`` whose integral defines ``kind`` at (i, k).

    The derivative is applied literally to the first factor (no integration
    by parts), so this route shares nothing with the closed forms.
    """
    kind = _as_kind(kind)
    _check(i, k)
    B, P = "beta", "phi"
    table = {
        InnerProductKind.D4_BETA_BETA: (BasisFunctionId(B, i, 4), BasisFunctionId(B, k), "1"),
        InnerProductKind.D2_BETA_BETA: (BasisFunctionId(B, i, 2), BasisFunctionId(B, k), "1"),
        InnerProductKind.PHI_PHI: (BasisFunctionId(P, i), BasisFunctionId(P, k), "1"),
        InnerProductKind.BETA_BETA: (BasisFunctionId(B, i), BasisFunctionId(B, k), "1"),
        InnerProductKind.PHI_BETA: (BasisFunctionId(P, i), BasisFunctionId(B, k), "1"),
        InnerProductKind.D2_PHI_PHI: (BasisFunctionId(P, i, 2), BasisFunctionId(P, k), "1"),
        InnerProductKind.X_BETA_PHI: (BasisFunctionId(B, i), BasisFunctionId(P, k), "x"),
    }
    return table[kind]


@lru_cache(maxsize=None)
def _integer_form(fid: BasisFunctionId) -> tuple[tuple[int, ...], int]:
    coeffs = poly_coefficients(fid)
    den = lcm(*(c.denominator for c in coeffs))
    return tuple(int(c * den) for c in coeffs), den


@lru_cache(maxsize=64)
def _reciprocal_table(size: int) -> tuple[int, tuple[int, ...]]:
    # common multiple S of 1..size and the integers S/s
    s = lcm(*range(1, size + 1))
    return s, tuple(s // j for j in range(1, size + 1))


def exact_integral(f: BasisFunctionId, g: BasisFunctionId, weight: str = "1") -> Fraction:
    """Exact ``int_0^1 w(x) f(x) g(x) dx`` with ``w`` = 1 or x."""
    if weight not in ("1", "x"):
        raise ValueError("weight must be '1' or 'x'")
    shift = 1 if weight == "x" else 0
    a, da = _integer_form(f)
    b, db = _integer_form(g)
    s, recip = _reciprocal_table(len(a) + len(b) + shift)
    total = 0
    for p, ap in enumerate(a):
        if ap:
            row = recip[p + shift:]
            total += ap * sum(bq * row[q] for q, bq in enumerate(b) if bq)
    return Fraction(total, s * da * db)


@lru_cache(maxsize=None)
def inner_product(kind, i: int, k: int) -> Fraction:
    """Authoritative value of ``kind`` at (i, k), from exact integration."""
    f, g, w = kind_operands(kind, i, k)
    return exact_integral(f, g, w)


def validate_table(i_max: int, corrected: bool = False) -> list[Discrepancy]:
    """Compare ``closed_form`` with ``exact_integral`` for all kinds and 1 <= i, k <= i_max.

    Returns every mismatch; an empty list means the closed forms hold exactly.
    """
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    out = []
    for kind in InnerProductKind:
        for i in range(1, i_max + 1):
            for k in range(1, i_max + 1):
                cf = closed_form(kind, i, k, corrected=corrected)
                ex = inner_product(kind, i, k)
                if cf != ex:
                    out.append(Discrepancy(kind, i, k, cf, ex))
    return out


def write_table_csv(fh, i_max: int) -> None:
    """Write the exact (validated) table as CSV: kind,i,k,numerator,denominator."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["kind", "i", "k", "numerator", "denominator"])
    for kind in InnerProductKind:
        for i in range(1, i_max + 1):
            for k in range(1, i_max + 1):
                v = inner_product(kind, i, k)
                writer.writerow([kind.value, i, k, v.numerator, v.denominator])
