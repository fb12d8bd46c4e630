import random
from fractions import Fraction

import pytest

from qgr.residues import (
    INFINITY,
    NonSplitDenominatorError,
    residue_at,
    residue_at_infinity,
    residue_sum_check,
)
from qgr.rings import RatFunc, SparsePoly

Z = ("z",)
z = SparsePoly.variable(Z, "z")
one = SparsePoly.const(Z, 1)


def test_simple_poles():
    f = RatFunc(one, z * (z - one))
    assert residue_at(f, 1) == 1
    assert residue_at(f, 0) == -1
    assert residue_at(f, 5) == 0


def test_simple_pole_evaluation_rule():
    # 1/(z - w) * g(z) with g regular at w has residue g(w)
    w = Fraction(42)
    g = RatFunc(z * z + one)
    f = RatFunc(one, z - SparsePoly.const(Z, w)) * g
    assert residue_at(f, w) == w * w + 1


def test_double_pole():
    # 1/z^2: residue 0 at 0
    f = RatFunc(one, z * z)
    assert residue_at(f, 0) == 0
    ok, reports = residue_sum_check(f, [0])
    assert ok
    # (z+1)/z^2 has residue 1 at 0
    f2 = RatFunc(z + one, z * z)
    assert residue_at(f2, 0) == 1


def test_residue_at_infinity():
    assert residue_at_infinity(RatFunc(one, z)) == -1
    assert residue_at_infinity(RatFunc(z)) == 0
    assert residue_at_infinity(RatFunc(one, z * (z - one))) == 0


def test_sum_check_reports():
    f = RatFunc(one, z * (z - one))
    ok, reports = residue_sum_check(f, [0, 1])
    assert ok
    got = {r.pole_location: r.residue for r in reports}
    assert got[Fraction(0)] == -1 and got[Fraction(1)] == 1 and got[INFINITY] == 0


def test_sum_check_rejects_unsplit():
    f = RatFunc(one, z * z + one)
    with pytest.raises(NonSplitDenominatorError):
        residue_sum_check(f, [0])


def test_alternative_simple_pole_formula():
    # residue at simple pole z0 equals num(z0)/den'(z0)
    rng = random.Random(11)
    for _ in range(30):
        poles = rng.sample(range(-8, 9), 3)
        den = one
        for p in poles:
            den = den * (z - SparsePoly.const(Z, p))
        num = SparsePoly(Z, {(i,): Fraction(rng.randint(-5, 5)) for i in range(3)})
        if num.is_zero():
            num = one
        f = RatFunc(num, den)
        for p in poles:
            others = Fraction(1)
            for q in poles:
                if q != p:
                    others *= Fraction(p - q)
            expect = num.eval_all({"z": p}) / others
            assert residue_at(f, p) == expect


def test_random_prescribed_poles_sum_to_zero():
    rng = random.Random(5)
    for _ in range(100):
        k = rng.randint(1, 4)
        locs = rng.sample(range(-10, 11), k)
        mults = [rng.randint(1, 2) for _ in range(k)]
        den = one
        for p, m in zip(locs, mults):
            den = den * (z - SparsePoly.const(Z, p)) ** m
        num = SparsePoly(
            Z, {(i,): Fraction(rng.randint(-6, 6)) for i in range(sum(mults) + 1)}
        )
        if num.is_zero():
            num = one
        f = RatFunc(num, den)
        ok, _ = residue_sum_check(f, locs)
        assert ok
