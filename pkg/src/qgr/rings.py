"""Exact arithmetic substrate: sparse multivariate polynomials over Q and
normalized rational functions.

A polynomial is a mapping from exponent tuples to Fraction coefficients;
zero coefficients are never stored.  The monomial order is graded
lexicographic for the variable order

    x1 < x2 < h < z < a1 < a2 < ... < (auxiliary names, alphabetically)

and within equal total degree the highest-ranked variable is the most
significant.  All values are treated as immutable after construction and
every operation is pure, so callers may fan out independent computations
with no coordination.

Canonical string form (used verbatim inside all JSON payloads): integer
coefficients, monomials as ``var^exp`` joined by ``*``, terms joined by
``+``/``-`` in descending canonical order; ``^1`` and unit coefficients
are omitted; a rational function prints as ``(num)/(den)`` unless the
denominator is 1.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping

#: Exact rational scalar type used for every coefficient in the package.
BigRational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)

_FIXED_RANK = {"x1": 0, "x2": 1, "h": 2, "z": 3}
_ALPHA_NAME = re.compile(r"a([0-9]+)$")


def var_rank(name: str):
    """Sort key realizing x1 < x2 < h < z < a1 < a2 < ... < auxiliary."""
    if name in _FIXED_RANK:
        return (0, _FIXED_RANK[name], "")
    m = _ALPHA_NAME.match(name)
    if m:
        return (1, int(m.group(1)), "")
    return (2, 0, name)


def order_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_rank))


def monomial_key(exp: tuple[int, ...]):
    """Graded-lex key; larger key = larger monomial.

    Variables are stored in ascending rank order, so reversing the
    exponent tuple makes the highest-ranked variable most significant.
    """
    return (sum(exp), exp[::-1])


class SparsePoly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...], terms: Mapping[tuple[int, ...], Fraction], _clean: bool = False):
        self.vars = tuple(vars)
        if _clean:
            self.terms = dict(terms)
        else:
            self.terms = {e: Fraction(c) for e, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, vars: tuple[str, ...]) -> "SparsePoly":
        return cls(vars, {}, _clean=True)

    @classmethod
    def const(cls, vars: tuple[str, ...], c) -> "SparsePoly":
        c = Fraction(c)
        if c == 0:
            return cls(vars, {}, _clean=True)
        return cls(vars, {(0,) * len(vars): c}, _clean=True)

    @classmethod
    def variable(cls, vars: tuple[str, ...], name: str) -> "SparsePoly":
        idx = vars.index(name)
        e = [0] * len(vars)
        e[idx] = 1
        return cls(vars, {tuple(e): _ONE}, _clean=True)

    @classmethod
    def linear(cls, vars: tuple[str, ...], coeffs: Mapping[str, object], const=0) -> "SparsePoly":
        """Build c0 + sum coeffs[name] * name."""
        terms: dict[tuple[int, ...], Fraction] = {}
        c0 = Fraction(const)
        if c0 != 0:
            terms[(0,) * len(vars)] = c0
        for name, c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            e = [0] * len(vars)
            e[vars.index(name)] = 1
            terms[tuple(e)] = terms.get(tuple(e), _ZERO) + c
        return cls(vars, terms)

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return _ZERO
        [(e, c)] = self.terms.items()
        if sum(e) != 0:
            raise ValueError("not a constant polynomial")
        return c

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def used_vars(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            for i, p in enumerate(e):
                if p:
                    used.add(self.vars[i])
        return order_vars(used)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Largest (exponent, coefficient) under the canonical order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=monomial_key)
        return e, self.terms[e]

    def homogeneous_degree(self):
        """Total degree if homogeneous, else None."""
        degs = {sum(e) for e in self.terms}
        if not degs:
            return 0
        return degs.pop() if len(degs) == 1 else None

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SparsePoly.const(self.vars, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        a, b = _unify(self, other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- arithmetic ----------------------------------------------------

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.vars, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __add__(self, other) -> "SparsePoly":
        if isinstance(other, (int, Fraction)):
            other = SparsePoly.const(self.vars, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        a, b = _unify(self, other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            v = out.get(e, _ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return SparsePoly(a.vars, out, _clean=True)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, SparsePoly) else SparsePoly.const(self.vars, -Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other) -> "SparsePoly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return SparsePoly.zero(self.vars)
            return SparsePoly(self.vars, {e: v * c for e, v in self.terms.items()}, _clean=True)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        a, b = _unify(self, other)
        return _mul_terms(a.vars, a.terms, b.terms, None, ())

    __rmul__ = __mul__

    def mul_trunc(self, other: "SparsePoly", max_xdeg: int, xnames: tuple[str, ...] = ("x1", "x2")) -> "SparsePoly":
        """Product with terms of total degree in `xnames` above `max_xdeg` dropped."""
        a, b = _unify(self, other)
        xidx = tuple(i for i, v in enumerate(a.vars) if v in xnames)
        return _mul_terms(a.vars, a.terms, b.terms, max_xdeg, xidx)

    def __pow__(self, k: int) -> "SparsePoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = SparsePoly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- structure -----------------------------------------------------

    def truncate_x(self, max_xdeg: int, xnames: tuple[str, ...] = ("x1", "x2")) -> "SparsePoly":
        xidx = tuple(i for i, v in enumerate(self.vars) if v in xnames)
        out = {e: c for e, c in self.terms.items() if sum(e[i] for i in xidx) <= max_xdeg}
        return SparsePoly(self.vars, out, _clean=True)

    def coeff_of(self, name: str, k: int) -> "SparsePoly":
        """Coefficient of name**k, as a polynomial with that variable removed from use."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                out[tuple(e2)] = c
        return SparsePoly(self.vars, out, _clean=True)

    def decompose_by(self, name: str) -> dict[int, "SparsePoly"]:
        """Split as sum_k name**k * f_k; values keep the ambient variable tuple."""
        i = self.vars.index(name)
        buckets: dict[int, dict] = {}
        for e, c in self.terms.items():
            e2 = list(e)
            k = e2[i]
            e2[i] = 0
            buckets.setdefault(k, {})[tuple(e2)] = c
        return {k: SparsePoly(self.vars, t, _clean=True) for k, t in buckets.items()}

    def decompose_x(self, xnames: tuple[str, ...] = ("x1", "x2")) -> dict[tuple[int, ...], "SparsePoly"]:
        """Split by the joint exponents of `xnames`; values have those exponents zeroed."""
        xidx = tuple(self.vars.index(v) for v in xnames if v in self.vars)
        buckets: dict[tuple[int, ...], dict] = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in xidx)
            e2 = list(e)
            for i in xidx:
                e2[i] = 0
            buckets.setdefault(key, {})[tuple(e2)] = c
        return {k: SparsePoly(self.vars, t, _clean=True) for k, t in buckets.items()}

    def substitute(self, assignments: Mapping[str, object]) -> "SparsePoly":
        """Substitute variables by Fractions or polynomials."""
        values = {}
        extra_vars = set(self.vars)
        for name, val in assignments.items():
            if name not in self.vars:
                continue
            if isinstance(val, SparsePoly):
                values[name] = val
                extra_vars.update(val.vars)
            else:
                values[name] = Fraction(val)
        target_vars = order_vars(extra_vars)
        result = SparsePoly.zero(target_vars)
        # Horner would be faster; term-by-term is fine at the sizes in scope.
        pow_cache: dict[tuple[str, int], SparsePoly] = {}
        for e, c in self.terms.items():
            term = SparsePoly.const(target_vars, c)
            for i, p in enumerate(e):
                if p == 0:
                    continue
                name = self.vars[i]
                val = values.get(name)
                if val is None:
                    term = term * SparsePoly.variable(target_vars, name) ** p
                elif isinstance(val, SparsePoly):
                    key = (name, p)
                    if key not in pow_cache:
                        pow_cache[key] = val.embed(target_vars) ** p
                    term = term * pow_cache[key]
                else:
                    term = term * val**p
            result = result + term
        return result

    def eval_all(self, values: Mapping[str, object]) -> Fraction:
        """Evaluate at a full point; every used variable must be assigned."""
        vals = [Fraction(values[v]) if v in values else None for v in self.vars]
        total = _ZERO
        for e, c in self.terms.items():
            t = c
            for i, p in enumerate(e):
                if p:
                    if vals[i] is None:
                        raise ValueError(f"unassigned variable {self.vars[i]}")
                    t *= vals[i] ** p
            total += t
        return total

    def embed(self, newvars: tuple[str, ...]) -> "SparsePoly":
        if newvars == self.vars:
            return self
        pos = []
        for v in self.vars:
            if v not in newvars:
                if any(e[self.vars.index(v)] for e in self.terms):
                    raise ValueError(f"cannot drop used variable {v}")
                pos.append(None)
            else:
                pos.append(newvars.index(v))
        out = {}
        m = len(newvars)
        for e, c in self.terms.items():
            e2 = [0] * m
            for i, p in enumerate(e):
                if p:
                    e2[pos[i]] = p
            out[tuple(e2)] = out.get(tuple(e2), _ZERO) + c
        return SparsePoly(newvars, out)

    def permute_vars(self, mapping: Mapping[str, str]) -> "SparsePoly":
        """Rename variables (e.g. swap x1 and x2) within the same space."""
        names = [mapping.get(v, v) for v in self.vars]
        if order_vars(names) != self.vars:
            # general rename into a new space
            target = order_vars(names)
            out = {}
            for e, c in self.terms.items():
                e2 = [0] * len(target)
                for i, p in enumerate(e):
                    if p:
                        e2[target.index(names[i])] += p
                key = tuple(e2)
                out[key] = out.get(key, _ZERO) + c
            return SparsePoly(target, out)
        perm = [names.index(v) for v in self.vars]
        out = {tuple(e[perm[i]] for i in range(len(e))): c for e, c in self.terms.items()}
        return SparsePoly(self.vars, out, _clean=True)

    def swap_x(self) -> "SparsePoly":
        return self.permute_vars({"x1": "x2", "x2": "x1"})

    def is_symmetric_x(self) -> bool:
        return self == self.swap_x()

    def divide_exact(self, divisor: "SparsePoly"):
        """Exact polynomial division; returns the quotient or None."""
        a, d = _unify(self, divisor)
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if a.is_zero():
            return SparsePoly.zero(a.vars)
        if a.total_degree() < d.total_degree():
            return None
        if not _divides_modp(a, d):
            return None
        dl_e, dl_c = d.leading()
        rem = dict(a.terms)
        quot: dict[tuple[int, ...], Fraction] = {}
        dterms = list(d.terms.items())
        while rem:
            e = max(rem, key=monomial_key)
            c = rem[e]
            qe = tuple(ei - di for ei, di in zip(e, dl_e))
            if any(q < 0 for q in qe):
                return None
            qc = c / dl_c
            quot[qe] = quot.get(qe, _ZERO) + qc
            for de, dc in dterms:
                ke = tuple(q + di for q, di in zip(qe, de))
                v = rem.get(ke, _ZERO) - qc * dc
                if v:
                    rem[ke] = v
                else:
                    rem.pop(ke, None)
        return SparsePoly(a.vars, quot)

    # -- normalization helpers ------------------------------------------

    def content_denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1

    def integer_content(self) -> int:
        return math.gcd(*(abs(c.numerator) for c in self.terms.values())) if self.terms else 0

    # -- serialization ---------------------------------------------------

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: monomial_key(t[0]), reverse=True)
        parts = []
        for e, c in items:
            mono = "*".join(
                f"{self.vars[i]}^{p}" if p > 1 else self.vars[i] for i, p in enumerate(e) if p
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+" if c > 0 else "-") + body)
        return "".join(parts)

    def __repr__(self):
        return f"SparsePoly({self.to_string()})"


def _unify(a: SparsePoly, b: SparsePoly) -> tuple[SparsePoly, SparsePoly]:
    if a.vars == b.vars:
        return a, b
    vs = order_vars(set(a.vars) | set(b.vars))
    return a.embed(vs), b.embed(vs)


_MODP = (1 << 31) - 1  # Mersenne prime; machine-word arithmetic


def _divides_modp(a: SparsePoly, d: SparsePoly) -> bool:
    """Fast necessary test for d | a: exact division over Z mod a prime.

    False negatives are impossible unless a coefficient denominator or the
    divisor's leading coefficient vanishes mod p, in which case the test
    answers True and the exact division decides.
    """
    p = _MODP

    def reduce_terms(poly):
        out = {}
        for e, c in poly.terms.items():
            den = c.denominator % p
            if den == 0:
                return None
            v = (c.numerator % p) * pow(den, p - 2, p) % p
            out[e] = v
        return out

    ra = reduce_terms(a)
    rd = reduce_terms(d)
    if ra is None or rd is None:
        return True
    rem = {e: v for e, v in ra.items() if v}
    dterms = [(e, v) for e, v in rd.items() if v]
    if not dterms:
        return True
    dl_e = max(rd, key=monomial_key)
    dl_c = rd[dl_e]
    if dl_c == 0:
        return True
    dl_inv = pow(dl_c, p - 2, p)
    while rem:
        e = max(rem, key=monomial_key)
        qe = tuple(ei - di for ei, di in zip(e, dl_e))
        if any(q < 0 for q in qe):
            return False
        qc = rem[e] * dl_inv % p
        for de, dc in dterms:
            ke = tuple(q + di for q, di in zip(qe, de))
            v = (rem.get(ke, 0) - qc * dc) % p
            if v:
                rem[ke] = v
            else:
                rem.pop(ke, None)
    return True


def _mul_terms(vars, ta, tb, max_xdeg, xidx) -> SparsePoly:
    if not ta or not tb:
        return SparsePoly.zero(vars)
    if len(ta) > len(tb):
        ta, tb = tb, ta
    int_mode = all(c.denominator == 1 for c in ta.values()) and all(
        c.denominator == 1 for c in tb.values()
    )
    out: dict[tuple[int, ...], object] = {}
    if int_mode:
        ia = [(e, c.numerator) for e, c in ta.items()]
        ib = [(e, c.numerator) for e, c in tb.items()]
    else:
        ia = list(ta.items())
        ib = list(tb.items())
    for ea, ca in ia:
        for eb, cb in ib:
            e = tuple(p + q for p, q in zip(ea, eb))
            if max_xdeg is not None and sum(e[i] for i in xidx) > max_xdeg:
                continue
            out[e] = out.get(e, 0) + ca * cb
    clean = {e: Fraction(v) if int_mode else v for e, v in out.items() if v}
    return SparsePoly(vars, clean, _clean=True)


def prod_polys(factors, unit_vars=("h",)) -> SparsePoly:
    """Balanced product of a list of polynomials (empty product is 1)."""
    fs = list(factors)
    if not fs:
        return SparsePoly.const(tuple(unit_vars), 1)
    while len(fs) > 1:
        nxt = []
        for i in range(0, len(fs) - 1, 2):
            nxt.append(fs[i] * fs[i + 1])
        if len(fs) % 2:
            nxt.append(fs[-1])
        fs = nxt
    return fs[0]


# ---------------------------------------------------------------------------
# univariate helpers (used by RatFunc reduction and the residue module)
# ---------------------------------------------------------------------------


def univariate_coeffs(p: SparsePoly, name: str) -> list[Fraction]:
    """Ascending coefficient list of a polynomial that only uses `name`."""
    used = p.used_vars()
    if used and used != (name,):
        raise ValueError(f"polynomial is not univariate in {name}: uses {used}")
    n = p.degree_in(name) if name in p.vars else 0
    coeffs = [_ZERO] * (max(n, 0) + 1)
    if name in p.vars:
        i = p.vars.index(name)
        for e, c in p.terms.items():
            coeffs[e[i]] += c
    elif p.terms:
        coeffs[0] = p.const_value()
    return coeffs


def poly_from_coeffs(coeffs, name: str) -> SparsePoly:
    vars = (name,)
    return SparsePoly(vars, {(i,): Fraction(c) for i, c in enumerate(coeffs) if c != 0})


def _uni_mod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        q = a[-1] / lb
        shift = len(a) - 1 - db
        for i, bc in enumerate(b):
            a[shift + i] -= q * bc
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def univariate_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of ascending coefficient lists (Euclid over Q)."""
    a = [Fraction(c) for c in a]
    b = [Fraction(c) for c in b]
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    while b:
        a, b = b, _uni_mod(a, b)
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


class RatFunc:
    """Normalized quotient of two sparse polynomials.

    Invariants: den != 0; num and den have integer coefficients with joint
    integer content 1; the leading coefficient of den under the canonical
    order is positive.  Equality is decided by cross-multiplication, so it
    does not rely on gcd-reduced representatives.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: SparsePoly, den: SparsePoly | None = None):
        if den is None:
            den = SparsePoly.const(num.vars, 1)
        num, den = _unify(num, den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = SparsePoly.const(num.vars, 1)
        num, den = _normalize_pair(num, den)
        self.num = num
        self.den = den

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_scalar(cls, c, vars: tuple[str, ...] = ()) -> "RatFunc":
        c = Fraction(c)
        return cls(SparsePoly.const(vars, c))

    @classmethod
    def from_poly(cls, p: SparsePoly) -> "RatFunc":
        return cls(p)

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_const()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def used_vars(self) -> tuple[str, ...]:
        return order_vars(set(self.num.used_vars()) | set(self.den.used_vars()))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatFunc.from_scalar(other, self.num.vars)
        elif isinstance(other, SparsePoly):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RatFunc is not hashable")

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __add__(self, other):
        other = _as_ratfunc(other, self)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b = self, other
        if a.den == b.den:
            return RatFunc(a.num + b.num, a.den)
        # opportunistic common denominator when one divides the other
        q = b.den.divide_exact(a.den)
        if q is not None:
            return RatFunc(a.num * q + b.num, b.den)
        q = a.den.divide_exact(b.den)
        if q is not None:
            return RatFunc(a.num + b.num * q, a.den)
        return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_ratfunc(other, self)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_ratfunc(other, self)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RatFunc.from_scalar(0, self.num.vars)
        # cheap cross-cancellation attempts keep chained products small
        num1, den2 = _cancel(self.num, other.den)
        num2, den1 = _cancel(other.num, self.den)
        return RatFunc(num1 * num2, den1 * den2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfunc(other, self)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return self * RatFunc(other.den, other.num)

    def __rtruediv__(self, other):
        return _as_ratfunc(other, self) / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc(self.den**(-k), self.num**(-k))
        return RatFunc(self.num**k, self.den**k)

    # -- operations -----------------------------------------------------------

    def substitute(self, assignments: Mapping[str, object]) -> "RatFunc":
        return RatFunc(self.num.substitute(assignments), self.den.substitute(assignments))

    def eval_all(self, values: Mapping[str, object]) -> Fraction:
        d = self.den.eval_all(values)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.eval_all(values) / d

    def swap_x(self) -> "RatFunc":
        return RatFunc(self.num.swap_x(), self.den.swap_x())

    def reduced(self) -> "RatFunc":
        """Gcd-reduced representative when num and den are univariate."""
        used = self.used_vars()
        if self.den.is_const() or len(used) != 1:
            return self
        name = used[0]
        ca = univariate_coeffs(self.num, name)
        cb = univariate_coeffs(self.den, name)
        g = univariate_gcd(ca, cb)
        if len(g) <= 1:
            return self
        gp = poly_from_coeffs(g, name)
        qn = self.num.divide_exact(gp)
        qd = self.den.divide_exact(gp)
        if qn is None or qd is None:  # pragma: no cover - gcd divides by construction
            return self
        return RatFunc(qn, qd)

    def to_string(self) -> str:
        if self.den.is_const() and self.den.const_value() == 1:
            return self.num.to_string()
        return f"({self.num.to_string()})/({self.den.to_string()})"

    def __repr__(self):
        return f"RatFunc({self.to_string()})"


def _as_ratfunc(other, like: RatFunc):
    if isinstance(other, RatFunc):
        return other
    if isinstance(other, SparsePoly):
        return RatFunc(other)
    if isinstance(other, (int, Fraction)):
        return RatFunc.from_scalar(other, like.num.vars)
    return NotImplemented


def _cancel(num: SparsePoly, den: SparsePoly):
    """Cheap cross-cancellation: only monomial denominators are attempted
    (full division attempts on dense inputs dominate runtime otherwise)."""
    if den.is_const() or len(den.terms) != 1:
        return num, den
    q = num.divide_exact(den)
    if q is not None:
        return q, SparsePoly.const(den.vars, 1)
    return num, den


def _normalize_pair(num: SparsePoly, den: SparsePoly):
    dn = math.lcm(num.content_denominator(), den.content_denominator())
    if dn != 1:
        num = num * Fraction(dn)
        den = den * Fraction(dn)
    g = math.gcd(num.integer_content(), den.integer_content())
    if g > 1:
        inv = Fraction(1, g)
        num = num * inv
        den = den * inv
    if den.leading()[1] < 0:
        num = -num
        den = -den
    return num, den


# Arithmetic dispatcher used by generic series code: accepts the mixed
# value types that appear as series coefficients.


def ratfunc_arithmetic(op: str, f: RatFunc, g: RatFunc):
    """Spec-level entry point: add / mul / div / eq on rational functions."""
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "eq":
        return f == g
    raise ValueError(f"unknown operation {op!r}")
