"""Generating-function builders: the two-variable ladder series over
P^(n-1) x P^(n-1) data, their specialization to a single weight family,
the bar transform to one q variable, the closed-form series of the
introduction, the scalar normalization series, and the recursion
coefficient tables.

Every q-coefficient is assembled as a single normalized fraction over the
explicit product denominator; pairs of summands are combined before any
division by (x1 - x2), so coefficients are genuine rational functions
regular on x1 = x2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .rings import RatFunc, SparsePoly
from .series import QSeries

V3 = ("x1", "x2", "h")
HV = ("h",)


@dataclass(frozen=True)
class CISpec:
    """Complete-intersection multidegree (a_1, ..., a_ell)."""

    a: tuple[int, ...]

    def __post_init__(self):
        if any(ak < 1 for ak in self.a):
            raise ValueError("all a_k must be positive")

    @property
    def ell(self) -> int:
        return len(self.a)

    @property
    def total(self) -> int:
        return sum(self.a)

    @property
    def product(self) -> int:
        return prod(self.a) if self.a else 1

    def validate(self, n: int) -> None:
        if self.total > n:
            raise ValueError(f"|a| = {self.total} exceeds n = {n}")


@dataclass(frozen=True)
class AMatrixSpec:
    """Two-slot data: rows (a_{r;1}, a_{r;2}) and one weight family per slot."""

    n: int
    rows: tuple[tuple[int, int], ...] = ()
    alpha1: tuple[Fraction, ...] | None = None  # None = all zero
    alpha2: tuple[Fraction, ...] | None = None

    def weight_sum(self) -> int:
        return sum(a1 + a2 for (a1, a2) in self.rows)

    def alpha(self, slot: int) -> tuple[Fraction, ...]:
        al = self.alpha1 if slot == 1 else self.alpha2
        return al if al is not None else (Fraction(0),) * self.n


def _xvar(name: str) -> SparsePoly:
    return SparsePoly.variable(V3, name)


def _c3(v) -> SparsePoly:
    return SparsePoly.const(V3, v)


@dataclass
class DenChain:
    """Ladder denominator products for one slot: B[d] = prod_{l<=d} factor_l."""

    xname: str
    factors: list[SparsePoly]
    products: list[SparsePoly]
    xtrunc: int | None = None

    @classmethod
    def build(cls, n: int, alphas, xname: str, D: int, xtrunc: int | None = None) -> "DenChain":
        factors = [den_factor(n, alphas, l, xname, xtrunc) for l in range(1, D + 1)]
        products = [_c3(1)]
        for f in factors:
            products.append(_mul(products[-1], f, xtrunc))
        return cls(xname, factors, products, xtrunc)

    def cofactor(self, d_from: int, d_to: int) -> SparsePoly:
        out = _c3(1)
        for l in range(d_from + 1, d_to + 1):
            out = _mul(out, self.factors[l - 1], self.xtrunc)
        return out


def _mul(a: SparsePoly, b: SparsePoly, xtrunc: int | None) -> SparsePoly:
    return a.mul_trunc(b, xtrunc) if xtrunc is not None else a * b


def den_factor(n: int, alphas, l: int, xname: str, xtrunc: int | None = None) -> SparsePoly:
    """prod_j (x - alpha_j + l h) - prod_j (x - alpha_j); (x+lh)^n - x^n at alpha=0."""
    x = _xvar(xname)
    h = _xvar("h")
    p1 = _c3(1)
    p2 = _c3(1)
    for j in range(n):
        aj = Fraction(0) if alphas is None else Fraction(alphas[j])
        p1 = _mul(p1, x - _c3(aj) + h * l, xtrunc)
        p2 = _mul(p2, x - _c3(aj), xtrunc)
    return p1 - p2


def den_factor_eval(n: int, alphas, l: int, xval: Fraction) -> SparsePoly:
    """The same ladder factor with x evaluated; univariate in h."""
    h = SparsePoly.variable(HV, "h")
    p1 = SparsePoly.const(HV, 1)
    c2 = Fraction(1)
    for j in range(n):
        aj = Fraction(0) if alphas is None else Fraction(alphas[j])
        p1 = p1 * (h * l + SparsePoly.const(HV, xval - aj))
        c2 *= xval - aj
    return p1 - SparsePoly.const(HV, c2)


def _num_l_range(kind: str, m: int) -> range:
    if kind == "dot":
        return range(1, m + 1)
    if kind == "ddot":
        return range(0, m)
    raise ValueError(f"kind must be 'dot' or 'ddot', got {kind!r}")


def amatrix_numerator(kind: str, rows, d1: int, d2: int, xtrunc: int | None = None) -> SparsePoly:
    """prod_r prod_l (a_{r;1} x1 + a_{r;2} x2 + l h) with the kind's l-range."""
    out = _c3(1)
    h = _xvar("h")
    for (a1, a2) in rows:
        m = a1 * d1 + a2 * d2
        base = _xvar("x1") * a1 + _xvar("x2") * a2
        for l in _num_l_range(kind, m):
            out = _mul(out, base + h * l, xtrunc)
    return out


def amatrix_numerator_eval(kind: str, rows, d1: int, d2: int, x1val, x2val) -> SparsePoly:
    h = SparsePoly.variable(HV, "h")
    out = SparsePoly.const(HV, 1)
    for (a1, a2) in rows:
        m = a1 * d1 + a2 * d2
        c = a1 * Fraction(x1val) + a2 * Fraction(x2val)
        for l in _num_l_range(kind, m):
            out = out * (h * l + SparsePoly.const(HV, c))
    return out


@dataclass
class HyperSeries:
    """A tagged generating function with its construction parameters."""

    kind: str  # e.g. "A_dot", "K_ddot", "Y_dot", "Yclosed_ddot"
    n: int
    spec: object  # CISpec or AMatrixSpec
    payload: QSeries
    xtrunc: int | None = None
    den_chains: tuple[DenChain, DenChain] | None = None
    num_parts: dict | None = None

    @property
    def D(self) -> int:
        return self.payload.trunc_q

    def coeff(self, key) -> RatFunc:
        v = self.payload.get(tuple(key))
        if isinstance(v, Fraction):
            return RatFunc.from_scalar(v, V3)
        return v


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_A(kind: str, spec: AMatrixSpec, D: int, xtrunc: int | None = None) -> HyperSeries:
    """The two-variable ladder series: the coefficient of q1^d1 q2^d2 is
    the weight-row numerator product over the slot-wise ladder denominators."""
    c1 = DenChain.build(spec.n, spec.alpha1, "x1", D, xtrunc)
    c2 = DenChain.build(spec.n, spec.alpha2, "x2", D, xtrunc)
    coeffs = {}
    nums = {}
    for d in range(D + 1):
        for d1 in range(d + 1):
            d2 = d - d1
            num = amatrix_numerator(kind, spec.rows, d1, d2, xtrunc)
            nums[(d1, d2)] = num
            coeffs[(d1, d2)] = RatFunc(num, _mul(c1.products[d1], c2.products[d2], xtrunc))
    return HyperSeries(
        kind=f"A_{kind}", n=spec.n, spec=spec,
        payload=QSeries(2, D, coeffs), xtrunc=xtrunc,
        den_chains=(c1, c2), num_parts=nums,
    )


def build_K(kind: str, n: int, a: CISpec, alphas, D: int, xtrunc: int | None = None) -> HyperSeries:
    """Specialized series: equal row weights and one common weight family."""
    a.validate(n)
    spec = AMatrixSpec(
        n=n,
        rows=tuple((ak, ak) for ak in a.a),
        alpha1=tuple(alphas) if alphas is not None else None,
        alpha2=tuple(alphas) if alphas is not None else None,
    )
    hs = build_A(kind, spec, D, xtrunc)
    hs.kind = f"K_{kind}"
    hs.spec = a
    return hs


def specialize_to_K(A: HyperSeries, a: CISpec, n: int, alphas, xtrunc: int | None = None) -> HyperSeries:
    """Rebuild a ladder series with specialized rows and weights."""
    kind = A.kind.split("_", 1)[1]
    return build_K(kind, n, a, alphas, A.D, xtrunc if xtrunc is not None else A.xtrunc)


def bar_assemble(F: HyperSeries, weight=None, out_kind: str | None = None) -> HyperSeries:
    """q1 = q2 = -q substitution plus the antisymmetrized derivative term.

    `weight(d1, d2)` optionally multiplies each numerator before assembly
    (the route used by the operator calculus).  The summed derivative
    numerator must be exactly divisible by (x1 - x2); failure signals an
    asymmetric input.
    """
    if F.payload.q_arity != 2:
        raise ValueError("bar transform needs a two-variable series")
    D = F.D
    x1mx2 = _xvar("x1") - _xvar("x2")
    h = _xvar("h")
    if F.den_chains is None or F.num_parts is None:
        return _bar_generic(F, weight, out_kind)
    c1, c2 = F.den_chains
    coeffs = {}
    nums = {}
    for d in range(D + 1):
        N0 = SparsePoly.zero(V3)
        N1 = SparsePoly.zero(V3)
        for d1 in range(d + 1):
            d2 = d - d1
            num = F.num_parts.get((d1, d2))
            if num is None:
                continue
            if weight is not None:
                num = _mul(num, weight(d1, d2), F.xtrunc)
            cof = _mul(c1.cofactor(d1, d), c2.cofactor(d2, d), F.xtrunc)
            t = _mul(num, cof, F.xtrunc)
            N0 = N0 + t
            if d1 != d2:
                N1 = N1 + t * (d1 - d2)
        if N1.is_zero():
            Q = SparsePoly.zero(V3)
        else:
            Q = N1.divide_exact(x1mx2)
            if Q is None:
                raise ValueError("derivative numerator not divisible by x1 - x2 (asymmetric input)")
        sign = -1 if d % 2 else 1
        num_d = (N0 + _mul(h, Q, F.xtrunc)) * sign
        nums[(d,)] = num_d
        coeffs[(d,)] = RatFunc(num_d, _mul(c1.products[d], c2.products[d], F.xtrunc))
    kind = out_kind or ("Y_" + F.kind.split("_", 1)[1])
    return HyperSeries(
        kind=kind, n=F.n, spec=F.spec,
        payload=QSeries(1, D, coeffs), xtrunc=(F.xtrunc - 1 if F.xtrunc is not None else None),
        den_chains=F.den_chains, num_parts=nums,
    )


def _bar_generic(F: HyperSeries, weight, out_kind):
    """Fallback assembly from bare RatFunc coefficients."""
    D = F.D
    x1mx2 = _xvar("x1") - _xvar("x2")
    h = _xvar("h")
    coeffs = {}
    for d in range(D + 1):
        S0 = RatFunc.from_scalar(0, V3)
        S1 = RatFunc.from_scalar(0, V3)
        for d1 in range(d + 1):
            d2 = d - d1
            v = F.coeff((d1, d2))
            if weight is not None:
                v = v * weight(d1, d2)
            S0 = S0 + v
            if d1 != d2:
                S1 = S1 + v * (d1 - d2)
        Q_num = S1.num.divide_exact(x1mx2)
        if Q_num is None:
            raise ValueError("derivative numerator not divisible by x1 - x2 (asymmetric input)")
        sign = -1 if d % 2 else 1
        coeffs[(d,)] = (S0 + RatFunc(h) * RatFunc(Q_num, S1.den)) * sign
    kind = out_kind or ("Y_" + F.kind.split("_", 1)[1])
    return HyperSeries(kind=kind, n=F.n, spec=F.spec, payload=QSeries(1, D, coeffs), xtrunc=F.xtrunc)


def bar_transform(F: HyperSeries) -> HyperSeries:
    return bar_assemble(F)


def build_Y_closed(kind: str, n: int, a: CISpec, D: int, xtrunc: int | None = None) -> HyperSeries:
    """The closed-form series of the introduction (weights all zero).

    Summand pairs (d1,d2), (d2,d1) are symmetrized before dividing by
    (x1 - x2), so every coefficient is regular on x1 = x2.
    """
    a.validate(n)
    chain1 = DenChain.build(n, None, "x1", D, xtrunc)
    chain2 = DenChain.build(n, None, "x2", D, xtrunc)
    x1mx2 = _xvar("x1") - _xvar("x2")
    h = _xvar("h")
    coeffs = {}
    nums = {}
    for d in range(D + 1):
        A_d = amatrix_numerator(kind, tuple((ak, ak) for ak in a.a), d, 0, xtrunc)
        total = SparsePoly.zero(V3)
        for d1 in range(d, (d - 1) // 2, -1):
            d2 = d - d1
            cof12 = _mul(chain1.cofactor(d1, d), chain2.cofactor(d2, d), xtrunc)
            if d1 == d2:
                total = total + cof12
                continue
            cof21 = _mul(chain1.cofactor(d2, d), chain2.cofactor(d1, d), xtrunc)
            pair = _mul(x1mx2 + h * (d1 - d2), cof12, xtrunc) + _mul(
                x1mx2 + h * (d2 - d1), cof21, xtrunc
            )
            q = pair.divide_exact(x1mx2)
            if q is None:  # pragma: no cover - pair sums are antisymmetric
                raise ArithmeticError("paired summand not divisible by x1 - x2")
            total = total + q
        sign = -1 if d % 2 else 1
        num_d = _mul(A_d, total, xtrunc) * sign
        nums[(d,)] = num_d
        coeffs[(d,)] = RatFunc(num_d, _mul(chain1.products[d], chain2.products[d], xtrunc))
    return HyperSeries(
        kind=f"Yclosed_{kind}", n=n, spec=a,
        payload=QSeries(1, D, coeffs), xtrunc=xtrunc,
        den_chains=(chain1, chain2), num_parts=nums,
    )


def normalization_I(kind: str, n: int, a: CISpec, D: int) -> QSeries:
    """The scalar normalization series: 1 unless (dot, |a| = n), in which
    case it is the closed-form series at x = (0,0), h = 1 (the constant
    term of the x-expansion; the x1 - x2 pole cancels pairwise)."""
    a.validate(n)
    if kind == "ddot" or a.total < n:
        return QSeries.one(1, D)
    Y = build_Y_closed("dot", n, a, D, xtrunc=2)
    coeffs = {}
    point = {"x1": Fraction(0), "x2": Fraction(0), "h": Fraction(1)}
    for d in range(D + 1):
        coeffs[(d,)] = Y.coeff((d,)).eval_all(point)
    return QSeries(1, D, coeffs)


# ---------------------------------------------------------------------------
# fixed-point evaluations (the cheap route used by all the verifier checks)
# ---------------------------------------------------------------------------


def a_series_evaluated(kind: str, spec: AMatrixSpec, i1: int, i2: int, D: int,
                       mutate: tuple[int, int] | None = None) -> QSeries:
    """The two-variable series evaluated at (x1, x2) = (alpha_{1;i1}, alpha_{2;i2}).

    Values are rational functions in h.  `mutate=(d, d1)` flips the sign of
    the single (d1, d-d1) summand (fault injection for the detection suites).
    """
    a1 = spec.alpha(1)
    a2 = spec.alpha(2)
    x1v, x2v = a1[i1 - 1], a2[i2 - 1]
    f1 = [den_factor_eval(spec.n, a1, l, x1v) for l in range(1, D + 1)]
    f2 = [den_factor_eval(spec.n, a2, l, x2v) for l in range(1, D + 1)]
    p1 = [SparsePoly.const(HV, 1)]
    p2 = [SparsePoly.const(HV, 1)]
    for l in range(D):
        p1.append(p1[-1] * f1[l])
        p2.append(p2[-1] * f2[l])
    coeffs = {}
    for d in range(D + 1):
        for d1 in range(d + 1):
            d2 = d - d1
            num = amatrix_numerator_eval(kind, spec.rows, d1, d2, x1v, x2v)
            if mutate is not None and mutate == (d, d1):
                num = -num
            coeffs[(d1, d2)] = RatFunc(num, p1[d1] * p2[d2])
    return QSeries(2, D, coeffs)


def k_series_evaluated(kind: str, n: int, a: CISpec, alphas, i: int, j: int, D: int,
                       mutate: tuple[int, int] | None = None) -> QSeries:
    spec = AMatrixSpec(n=n, rows=tuple((ak, ak) for ak in a.a),
                       alpha1=tuple(alphas), alpha2=tuple(alphas))
    return a_series_evaluated(kind, spec, i, j, D, mutate)


def bar_evaluated(K2q: QSeries, diff: Fraction, weight=None) -> QSeries:
    """Bar transform of an evaluated two-variable series; diff = x1 - x2 there."""
    h = SparsePoly.variable(HV, "h")
    inv = Fraction(1) / Fraction(diff)

    def w(d):
        d1, d2 = d
        base = RatFunc(SparsePoly.const(HV, 1) + h * ((d1 - d2) * inv))
        if weight is not None:
            base = base * weight(d1, d2)
        return base

    return K2q.substitute_q_neg(weight=w)


def y_series_evaluated(kind: str, n: int, a: CISpec, alphas, i: int, j: int, D: int,
                       mutate: tuple[int, int] | None = None) -> QSeries:
    """The bar-transformed series evaluated at the fixed point (i, j)."""
    K = k_series_evaluated(kind, n, a, alphas, i, j, D, mutate)
    return bar_evaluated(K, alphas[i - 1] - alphas[j - 1])


# ---------------------------------------------------------------------------
# recursion-coefficient tables
# ---------------------------------------------------------------------------


def scr_coeff(kind: str, slot: int, i1: int, i2: int, k: int, d: int, spec: AMatrixSpec) -> Fraction:
    """Two-variable ladder recursion coefficient for the given slot."""
    a1 = spec.alpha(1)
    a2 = spec.alpha(2)
    al_s = a1 if slot == 1 else a2
    i_s = i1 if slot == 1 else i2
    if k == i_s:
        raise ValueError("k must differ from the moving index")
    step_base = al_s[k - 1] - al_s[i_s - 1]
    num = Fraction(1)
    for r, (ar1, ar2) in enumerate(spec.rows):
        ars = (ar1, ar2)[slot - 1]
        base = ar1 * a1[i1 - 1] + ar2 * a2[i2 - 1]
        for l in _num_l_range(kind, ars * d):
            num *= base + Fraction(l, d) * step_base
    den = Fraction(d)
    for l in range(1, d + 1):
        for m in range(1, spec.n + 1):
            if (l, m) == (d, k):
                continue
            den *= al_s[i_s - 1] - al_s[m - 1] + Fraction(l, d) * step_base
    if den == 0:
        raise ZeroDivisionError("recursion-coefficient denominator vanishes (non-generic alpha)")
    return num / den


def frak_coeff(kind: str, slot: str, i: int, j: int, k: int, d: int, alphas, a: CISpec) -> Fraction:
    """Specialized ladder recursion coefficient.

    slot "second": the pole family moving j -> k; slot "first": moving i -> k.
    """
    al = tuple(Fraction(v) for v in alphas)
    if slot == "second":
        anchor, mover = i, j
    elif slot == "first":
        anchor, mover = j, i
    else:
        raise ValueError("slot must be 'first' or 'second'")
    if k == mover:
        raise ValueError("k must differ from the moving index")
    step = al[k - 1] - al[mover - 1]
    num = Fraction(1)
    for ak in a.a:
        base = ak * (al[i - 1] + al[j - 1])
        for l in _num_l_range(kind, ak * d):
            num *= base + Fraction(l, d) * step
    den = Fraction(d)
    for l in range(1, d + 1):
        for m in range(1, len(al) + 1):
            if (l, m) == (d, k):
                continue
            den *= al[mover - 1] - al[m - 1] + Fraction(l, d) * step
    if den == 0:
        raise ZeroDivisionError("recursion-coefficient denominator vanishes (non-generic alpha)")
    return num / den


def c_coeff(kind: str, slot: str, i: int, j: int, k: int, d: int, alphas, a: CISpec) -> Fraction:
    """Single-q recursion coefficients of the bar-transformed series."""
    al = tuple(Fraction(v) for v in alphas)
    sign = Fraction(-1) ** d
    fc = frak_coeff(kind, slot, i, j, k, d, alphas, a)
    if slot == "second":
        factor = (al[i - 1] - al[k - 1]) / (al[i - 1] - al[j - 1])
    else:
        factor = (al[k - 1] - al[j - 1]) / (al[i - 1] - al[j - 1])
    return sign * factor * fc


def recursion_coeff(flavor: str, indices: tuple, d: int, alphas, a: CISpec | None = None,
                    spec: AMatrixSpec | None = None) -> Fraction:
    """Uniform entry point for all recursion-coefficient flavors.

    flavor in {C_dot, C_ddot, frakC_dot, frakC_ddot, scrC_dot, scrC_ddot};
    indices = (slot, i, j, k) with slot 'first'/'second' (or 1/2 for scr).
    """
    fam, kind = flavor.split("_")
    slot, i, j, k = indices
    if fam == "C":
        return c_coeff(kind, slot, i, j, k, d, alphas, a)
    if fam == "frakC":
        return frak_coeff(kind, slot, i, j, k, d, alphas, a)
    if fam == "scrC":
        return scr_coeff(kind, int(slot), i, j, k, d, spec)
    raise ValueError(f"unknown flavor {flavor!r}")


class RecursionCoeffs:
    """Memoized recursion-coefficient table for one flavor.

    Calling it with (slot, i, j, k, d) matches the verifier's callback
    shape; entries are cached under the same key.
    """

    def __init__(self, flavor: str, alphas=None, a: CISpec | None = None,
                 spec: AMatrixSpec | None = None):
        self.flavor = flavor
        self.alphas = tuple(alphas) if alphas is not None else None
        self.a = a
        self.spec = spec
        self.entries: dict = {}

    def __call__(self, slot, i, j, k, d) -> Fraction:
        key = (slot, i, j, k, d)
        v = self.entries.get(key)
        if v is None:
            v = recursion_coeff(self.flavor, (slot, i, j, k), d, self.alphas, self.a, self.spec)
            self.entries[key] = v
        return v
