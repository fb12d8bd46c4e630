"""Truncated series: Laurent expansions in h^-1, truncated power series in
q (one or two variables, optionally also z), and x-adic expansion of
rational functions around x = 0.

A Laurent expansion stores finitely many positive powers of h and
negative powers down to h^(-depth+1); ``depth=None`` marks an exact
(untruncated) Laurent polynomial.  Series coefficients are duck-typed:
Fraction, SparsePoly and RatFunc all work.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .rings import RatFunc, SparsePoly

_ZERO = Fraction(0)


def _vzero(v) -> bool:
    if isinstance(v, Fraction):
        return v == 0
    return v.is_zero()


class LaurentExpansion:
    """Laurent series in h^-1 with finite principal part, truncated below."""

    __slots__ = ("coeffs", "depth")

    def __init__(self, coeffs: Mapping[int, object], depth: int | None):
        if depth is None:
            self.coeffs = {e: v for e, v in coeffs.items() if not _vzero(v)}
        else:
            self.coeffs = {
                e: v for e, v in coeffs.items() if e >= -depth + 1 and not _vzero(v)
            }
        self.depth = depth

    @classmethod
    def zero(cls, depth: int | None = None) -> "LaurentExpansion":
        return cls({}, depth)

    @classmethod
    def scalar(cls, c, depth: int | None = None) -> "LaurentExpansion":
        return cls({0: Fraction(c)}, depth)

    def top(self) -> int | None:
        return max(self.coeffs) if self.coeffs else None

    def coeff(self, e: int):
        if self.depth is not None and e < -self.depth + 1:
            raise ValueError(f"exponent {e} below truncation depth {self.depth}")
        return self.coeffs.get(e, _ZERO)

    def truncate(self, depth: int | None) -> "LaurentExpansion":
        if depth is None:
            if self.depth is not None:
                raise ValueError("cannot extend a truncated expansion")
            return self
        if self.depth is not None and depth > self.depth:
            raise ValueError("cannot extend a truncated expansion")
        return LaurentExpansion(self.coeffs, depth)

    def mod_negative(self, p: int) -> "LaurentExpansion":
        """Drop h^-p and higher powers of h^-1, keeping the rest exact."""
        return LaurentExpansion({e: v for e, v in self.coeffs.items() if e > -p}, None)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __neg__(self):
        return LaurentExpansion({e: -v for e, v in self.coeffs.items()}, self.depth)

    def _join_depth(self, other: "LaurentExpansion") -> int | None:
        if self.depth is None:
            return other.depth
        if other.depth is None:
            return self.depth
        return min(self.depth, other.depth)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentExpansion.scalar(other)
        out = dict(self.coeffs)
        for e, v in other.coeffs.items():
            w = out.get(e, _ZERO) + v
            if _vzero(w):
                out.pop(e, None)
            else:
                out[e] = w
        return LaurentExpansion(out, self._join_depth(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentExpansion.scalar(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SparsePoly, RatFunc)):
            return LaurentExpansion(
                {e: v * other for e, v in self.coeffs.items()}, self.depth
            )
        # error term of one factor meets the top of the other
        depth = None
        for a, b in ((self, other), (other, self)):
            if a.depth is not None:
                if b.is_zero() and b.depth is None:
                    continue
                t = b.top()
                d = a.depth - t if t is not None else a.depth
                depth = d if depth is None else min(depth, d)
        out: dict[int, object] = {}
        for e1, v1 in self.coeffs.items():
            for e2, v2 in other.coeffs.items():
                e = e1 + e2
                if depth is not None and e < -depth + 1:
                    continue
                w = out.get(e)
                out[e] = v1 * v2 if w is None else w + v1 * v2
        return LaurentExpansion(out, depth)

    __rmul__ = __mul__

    def eq_mod_common_depth(self, other: "LaurentExpansion") -> bool:
        d = self._join_depth(other)
        lo = -d + 1 if d is not None else None
        keys = set(self.coeffs) | set(other.coeffs)
        for e in keys:
            if lo is not None and e < lo:
                continue
            if not _vzero(self.coeffs.get(e, _ZERO) - other.coeffs.get(e, _ZERO)):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, LaurentExpansion):
            return NotImplemented
        return self.depth == other.depth and self.eq_mod_common_depth(other)

    def __repr__(self):
        items = ", ".join(f"h^{e}: {v!r}" for e, v in sorted(self.coeffs.items(), reverse=True))
        return f"LaurentExpansion({{{items}}}, depth={self.depth})"


def laurent_expand_hbar(f: RatFunc, depth: int, var: str = "h") -> LaurentExpansion:
    """Expand a rational function at h = infinity.

    Coefficients are RatFunc in the remaining variables (plain Fractions
    when constant).  If the denominator is a monomial in h the result is
    exact and marked with depth None.
    """
    if f.is_zero():
        return LaurentExpansion.zero(None)
    num_parts = f.num.decompose_by(var) if var in f.num.vars else {0: f.num}
    den_parts = f.den.decompose_by(var) if var in f.den.vars else {0: f.den}
    M = max(num_parts)
    N = max(den_parts)
    lead = den_parts[N]

    def out_val(v: RatFunc):
        return v.const_value() if v.is_const() else v

    if len(den_parts) == 1:
        coeffs = {
            k - N: out_val(RatFunc(p, lead)) for k, p in num_parts.items()
        }
        return LaurentExpansion(coeffs, None)
    lead_rf = RatFunc(lead)
    u = {j: RatFunc(den_parts[N - j], lead) for j in range(1, N + 1) if N - j in den_parts}
    b = {j: RatFunc(num_parts[M - j], lead) for j in range(0, M + 1) if M - j in num_parts}
    jmax = M - N + depth - 1
    if jmax < 0:
        return LaurentExpansion.zero(depth)
    v: list[RatFunc] = [RatFunc.from_scalar(1, lead.vars)]
    for j in range(1, jmax + 1):
        s = RatFunc.from_scalar(0, lead.vars)
        for t, ut in u.items():
            if t <= j:
                s = s + ut * v[j - t]
        v.append(-s)
    coeffs: dict[int, object] = {}
    for j in range(0, jmax + 1):
        s = RatFunc.from_scalar(0, lead.vars)
        for sdeg, bs in b.items():
            if sdeg <= j:
                s = s + bs * v[j - sdeg]
        if not s.is_zero():
            coeffs[M - N - j] = out_val(s)
    return LaurentExpansion(coeffs, depth)


# ---------------------------------------------------------------------------
# x-adic expansion around x = 0
# ---------------------------------------------------------------------------


def x_coefficients(f: RatFunc, max_x_degree: int, xnames=("x1", "x2")) -> dict[tuple[int, int], RatFunc]:
    """Coefficients of all x-monomials of total degree <= max_x_degree.

    Requires den(x=0) != 0 as a polynomial in the remaining variables.
    Values are RatFunc over the remaining variables with denominator a
    power of den(x=0).
    """
    num_parts = f.num.decompose_x(xnames)
    den_parts = f.den.decompose_x(xnames)
    zero = (0,) * len(xnames)
    g0 = den_parts.get(zero)
    if g0 is None or g0.is_zero():
        raise ValueError("denominator vanishes at x=0; expansion point invalid")
    M = max_x_degree
    keys = [
        (e1, e2)
        for d in range(M + 1)
        for e1 in range(d + 1)
        for e2 in [d - e1]
    ]
    # N[e] = (coefficient of x^e in 1/den) * g0^(M+1), a polynomial
    N: dict[tuple[int, int], SparsePoly] = {zero: g0**M}
    for e in keys:
        if e == zero:
            continue
        s = None
        for ep, dp in den_parts.items():
            if ep == zero or ep[0] > e[0] or ep[1] > e[1]:
                continue
            rest = (e[0] - ep[0], e[1] - ep[1])
            term = dp * N[rest]
            s = term if s is None else s + term
        if s is None:
            N[e] = SparsePoly.zero(g0.vars)
            continue
        q = (-s).divide_exact(g0)
        if q is None:  # pragma: no cover - recurrence guarantees divisibility
            raise ArithmeticError("inverse-series recurrence failed to divide")
        N[e] = q
    gM1 = g0 ** (M + 1)
    out: dict[tuple[int, int], RatFunc] = {}
    for e in keys:
        s = None
        for ep, np_ in num_parts.items():
            if ep[0] > e[0] or ep[1] > e[1]:
                continue
            rest = (e[0] - ep[0], e[1] - ep[1])
            term = np_ * N[rest]
            s = term if s is None else s + term
        if s is not None and not s.is_zero():
            out[e] = RatFunc(s, gM1)
    return out


def expand_series_in_x(
    f: RatFunc, max_x_degree: int, hbar_depth: int, xnames=("x1", "x2")
) -> dict[tuple[int, int], LaurentExpansion]:
    """x-expansion with each coefficient Laurent-expanded in h^-1."""
    return {
        e: laurent_expand_hbar(c, hbar_depth)
        for e, c in x_coefficients(f, max_x_degree, xnames).items()
    }


# ---------------------------------------------------------------------------
# truncated power series in q (and optionally z)
# ---------------------------------------------------------------------------


class QSeries:
    """Power series truncated in total q-degree (and z-degree if tracked).

    Keys are tuples: the q-exponents followed by the z-exponent when
    ``z_tracked``.  Values may be any exact ring element supporting + and *.
    """

    __slots__ = ("q_arity", "z_tracked", "trunc_q", "trunc_z", "coeffs")

    def __init__(self, q_arity: int, trunc_q: int, coeffs: Mapping[tuple, object] | None = None,
                 z_tracked: bool = False, trunc_z: int = 0):
        self.q_arity = q_arity
        self.z_tracked = z_tracked
        self.trunc_q = trunc_q
        self.trunc_z = trunc_z
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                if self._in_range(k) and not _vzero(v):
                    self.coeffs[k] = v

    def _in_range(self, key) -> bool:
        qd = sum(key[: self.q_arity])
        if qd > self.trunc_q:
            return False
        if self.z_tracked and key[self.q_arity] > self.trunc_z:
            return False
        return True

    def qdeg(self, key) -> int:
        return sum(key[: self.q_arity])

    @classmethod
    def one(cls, q_arity: int, trunc_q: int, unit=Fraction(1), z_tracked=False, trunc_z=0):
        key = (0,) * (q_arity + (1 if z_tracked else 0))
        return cls(q_arity, trunc_q, {key: unit}, z_tracked, trunc_z)

    def get(self, key, default=_ZERO):
        return self.coeffs.get(tuple(key), default)

    def terms(self):
        return sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0]))

    def map_values(self, fn: Callable) -> "QSeries":
        return QSeries(
            self.q_arity, self.trunc_q,
            {k: fn(v) for k, v in self.coeffs.items()},
            self.z_tracked, self.trunc_z,
        )

    def _like(self, coeffs, trunc_q=None, trunc_z=None) -> "QSeries":
        return QSeries(
            self.q_arity,
            self.trunc_q if trunc_q is None else trunc_q,
            coeffs,
            self.z_tracked,
            self.trunc_z if trunc_z is None else trunc_z,
        )

    def __neg__(self):
        return self._like({k: -v for k, v in self.coeffs.items()})

    def _check_compat(self, other: "QSeries"):
        if self.q_arity != other.q_arity or self.z_tracked != other.z_tracked:
            raise ValueError("incompatible series shapes")

    def __add__(self, other):
        if isinstance(other, QSeries):
            self._check_compat(other)
            out = dict(self.coeffs)
            for k, v in other.coeffs.items():
                w = out.get(k)
                nv = v if w is None else w + v
                if _vzero(nv):
                    out.pop(k, None)
                else:
                    out[k] = nv
            return self._like(
                out,
                trunc_q=min(self.trunc_q, other.trunc_q),
                trunc_z=min(self.trunc_z, other.trunc_z),
            )
        key = (0,) * (self.q_arity + (1 if self.z_tracked else 0))
        out = dict(self.coeffs)
        out[key] = out.get(key, _ZERO) + other
        return self._like(out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, QSeries):
            return self + (-other)
        return self + (-other)

    def scale(self, c) -> "QSeries":
        return self._like({k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        self._check_compat(other)
        tq = min(self.trunc_q, other.trunc_q)
        tz = min(self.trunc_z, other.trunc_z)
        out: dict[tuple, object] = {}
        for k1, v1 in self.coeffs.items():
            q1 = sum(k1[: self.q_arity])
            for k2, v2 in other.coeffs.items():
                if q1 + sum(k2[: self.q_arity]) > tq:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                if self.z_tracked and k[self.q_arity] > tz:
                    continue
                w = out.get(k)
                p = v1 * v2
                out[k] = p if w is None else w + p
        return self._like(out, trunc_q=tq, trunc_z=tz)

    __rmul__ = scale

    def inverse_unit(self) -> "QSeries":
        """Inverse of a series whose constant term is invertible."""
        key0 = (0,) * (self.q_arity + (1 if self.z_tracked else 0))
        c0 = self.coeffs.get(key0)
        if c0 is None:
            raise ZeroDivisionError("series has no constant term")
        inv0 = Fraction(1) / c0 if isinstance(c0, Fraction) else RatFunc.from_scalar(1) / c0
        keys = sorted(self.coeffs.keys() | {key0}, key=lambda k: (sum(k), k))
        # graded recursion: c0 * inv[k] = delta_{k,0} - sum_{0 < k' <= k} c[k'] inv[k-k']
        inv = {key0: inv0}
        all_keys = [
            k
            for k in _graded_keys(self.q_arity, self.trunc_q, self.z_tracked, self.trunc_z)
            if k != key0
        ]
        for k in all_keys:
            s = None
            for kp, cp in self.coeffs.items():
                if kp == key0 or any(a > b for a, b in zip(kp, k)):
                    continue
                rest = tuple(b - a for a, b in zip(kp, k))
                if rest not in inv:
                    continue
                term = cp * inv[rest]
                s = term if s is None else s + term
            if s is None:
                continue
            inv[k] = -(inv0 * s)
        return self._like(inv)

    def substitute_q_neg(self, weight: Callable[[tuple], object] | None = None) -> "QSeries":
        """Collapse (q1, q2) -> (-q, -q), optionally weighting each (d1, d2) term.

        Realizes the q_i = q * e^{i pi} substitution with the exact sign -1.
        """
        if self.q_arity != 2:
            raise ValueError("substitute_q_neg needs a two-variable series")
        out: dict[tuple, object] = {}
        for k, v in self.coeffs.items():
            d1, d2 = k[0], k[1]
            sign = -1 if (d1 + d2) % 2 else 1
            w = v if weight is None else v * weight((d1, d2))
            if _vzero(w):
                continue
            nk = (d1 + d2,) + k[2:]
            w = w * sign if sign < 0 else w
            prev = out.get(nk)
            out[nk] = w if prev is None else prev + w
        return QSeries(1, self.trunc_q, out, self.z_tracked, self.trunc_z)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        if (self.q_arity, self.z_tracked) != (other.q_arity, other.z_tracked):
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a = self.coeffs.get(k)
            b = other.coeffs.get(k)
            if a is None:
                a = _ZERO
            if b is None:
                b = _ZERO
            diff = a - b
            if not _vzero(diff):
                return False
        return True

    def __repr__(self):
        return f"QSeries(arity={self.q_arity}, trunc={self.trunc_q}, nterms={len(self.coeffs)})"


def _graded_keys(arity: int, trunc_q: int, z_tracked: bool, trunc_z: int):
    qparts = []
    if arity == 1:
        qparts = [(d,) for d in range(trunc_q + 1)]
    elif arity == 2:
        qparts = [(d1, d - d1) for d in range(trunc_q + 1) for d1 in range(d + 1)]
    else:
        raise ValueError("q arity must be 1 or 2")
    if not z_tracked:
        return qparts
    return [q + (p,) for q in qparts for p in range(trunc_z + 1)]


def graded_keys(arity: int, trunc_q: int, z_tracked: bool = False, trunc_z: int = 0):
    return _graded_keys(arity, trunc_q, z_tracked, trunc_z)
