"""Residues of univariate rational functions at finite points and at
infinity, plus the Residue-Theorem sum check.

Pole discovery is deliberately limited to caller-supplied candidate
locations: every denominator in scope factors into explicit linear
factors, so the check deflates the denominator at the candidates and
refuses to proceed if a nontrivial factor is left over.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rings import RatFunc, univariate_coeffs

INFINITY = "inf"


@dataclass(frozen=True)
class ResidueReport:
    pole_location: object  # Fraction or INFINITY
    order: int
    residue: Fraction


class NonSplitDenominatorError(ValueError):
    """A denominator factor has no root among the supplied candidates."""


def _coeff_lists(f: RatFunc, var: str) -> tuple[list[Fraction], list[Fraction]]:
    return univariate_coeffs(f.num, var), univariate_coeffs(f.den, var)


def _shift(coeffs: list[Fraction], z0: Fraction) -> list[Fraction]:
    """Taylor shift: ascending coefficients of p(z + z0), via Horner."""
    out: list[Fraction] = []
    for c in reversed(coeffs):
        new = [Fraction(0)] * (len(out) + 1)
        for i, v in enumerate(out):
            new[i] += v * z0
            new[i + 1] += v
        new[0] += c
        out = new
    return out if out else [Fraction(0)]


def _series_inverse(u: list[Fraction], order: int) -> list[Fraction]:
    """First `order`+1 coefficients of 1/u(z) for u(0) != 0."""
    inv = [Fraction(1) / u[0]]
    for k in range(1, order + 1):
        s = Fraction(0)
        for t in range(1, k + 1):
            if t < len(u):
                s += u[t] * inv[k - t]
        inv.append(-s / u[0])
    return inv


def residue_at(f: RatFunc, z0, var: str = "z") -> Fraction:
    """Coefficient of (z - z0)^(-1) in the local Laurent expansion."""
    z0 = Fraction(z0)
    num, den = _coeff_lists(f, var)
    if not den:
        raise ZeroDivisionError("denominator is identically zero")
    nsh = _shift(num, z0)
    dsh = _shift(den, z0)
    m = 0
    while m < len(dsh) and dsh[m] == 0:
        m += 1
    if m == len(dsh):  # pragma: no cover - nonzero den cannot vanish identically
        raise ZeroDivisionError("non-isolated singularity")
    if m == 0:
        return Fraction(0)
    u = dsh[m:]
    uinv = _series_inverse(u, m - 1)
    res = Fraction(0)
    for i in range(m):
        if i < len(nsh):
            res += nsh[i] * uinv[m - 1 - i]
    return res


def pole_order_at(f: RatFunc, z0, var: str = "z") -> int:
    """Order of the pole of f at z0 (0 at a regular point)."""
    z0 = Fraction(z0)
    num, den = _coeff_lists(f, var)
    dsh = _shift(den, z0)
    m = 0
    while m < len(dsh) and dsh[m] == 0:
        m += 1
    nsh = _shift(num, z0)
    k = 0
    while k < len(nsh) and nsh[k] == 0:
        k += 1
    if k == len(nsh):
        return 0
    return max(m - k, 0)


def residue_at_infinity(f: RatFunc, var: str = "z") -> Fraction:
    """Equals -Res_{w=0} w^-2 f(1/w)."""
    num, den = _coeff_lists(f, var)
    if not num or all(c == 0 for c in num):
        return Fraction(0)
    dn, dd = len(num) - 1, len(den) - 1
    s = dd - dn - 2
    if s >= 0:
        return Fraction(0)
    # g(w) = rev(num)/rev(den) is a unit-denominator power series at w=0
    revn = num[::-1]
    revd = den[::-1]
    order = -1 - s
    dinv = _series_inverse(revd, order)
    coeff = Fraction(0)
    for i in range(order + 1):
        if i < len(revn):
            coeff += revn[i] * dinv[order - i]
    return -coeff


def _deflate_once(a: list[Fraction], z0: Fraction):
    """Synthetic division of ascending-coeff a by (z - z0); None unless exact."""
    n = len(a) - 1
    if n < 1:
        return None
    q = [Fraction(0)] * n
    q[n - 1] = a[n]
    for i in range(n - 1, 0, -1):
        q[i - 1] = a[i] + z0 * q[i]
    if a[0] + z0 * q[0] != 0:
        return None
    return q


def _deflate(den: list[Fraction], z0: Fraction) -> tuple[list[Fraction], int]:
    """Divide den by (z - z0) as often as possible; return (quotient, multiplicity)."""
    mult = 0
    cur = list(den)
    while True:
        q = _deflate_once(cur, z0)
        if q is None:
            break
        cur = q
        mult += 1
    return cur, mult


def residue_sum_check(
    f: RatFunc, candidate_poles: Sequence, var: str = "z"
) -> tuple[bool, list[ResidueReport]]:
    """Residue Theorem on S^2: all residues (finite poles + infinity) sum to 0.

    The candidates must cover every root of the denominator; leftovers
    raise NonSplitDenominatorError.
    """
    num, den = _coeff_lists(f, var)
    reports: list[ResidueReport] = []
    total = Fraction(0)
    remaining = list(den)
    seen = set()
    for z0 in candidate_poles:
        z0 = Fraction(z0)
        if z0 in seen:
            continue
        seen.add(z0)
        remaining, mult = _deflate(remaining, z0)
        if mult == 0:
            continue
        r = residue_at(f, z0, var)
        order = pole_order_at(f, z0, var)
        if order >= 1:
            reports.append(ResidueReport(z0, order, r))
        total += r
    if len(remaining) > 1:
        raise NonSplitDenominatorError(
            "denominator has roots outside the supplied candidate poles"
        )
    rinf = residue_at_infinity(f, var)
    dn, dd = len(num) - 1, len(den) - 1
    reports.append(ResidueReport(INFINITY, max(dn - dd + 2, 0), rinf))
    total += rinf
    return total == 0, reports
