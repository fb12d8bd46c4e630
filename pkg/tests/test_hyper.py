from fractions import Fraction

import pytest

from qgr.cohomology import default_generic_alpha
from qgr.hyper import (
    AMatrixSpec,
    CISpec,
    amatrix_numerator,
    bar_transform,
    build_A,
    build_K,
    build_Y_closed,
    c_coeff,
    frak_coeff,
    k_series_evaluated,
    normalization_I,
    recursion_coeff,
    scr_coeff,
    specialize_to_K,
    y_series_evaluated,
)
from qgr.rings import RatFunc, SparsePoly

V3 = ("x1", "x2", "h")
x1 = SparsePoly.variable(V3, "x1")
x2 = SparsePoly.variable(V3, "x2")
h = SparsePoly.variable(V3, "h")
one = SparsePoly.const(V3, 1)


def test_Y_closed_q0_is_one():
    Y = build_Y_closed("dot", 3, CISpec(()), 2)
    assert Y.coeff((0,)) == 1
    Ydd = build_Y_closed("ddot", 4, CISpec((2,)), 2)
    assert Ydd.coeff((0,)) == 1


def test_Y1_matches_display_n3():
    # hand-transcribed degree-1 coefficient for n=3, no hypersurfaces
    Y = build_Y_closed("dot", 3, CISpec(()), 1)
    P1 = (x1 + h) ** 3 - x1**3
    P2 = (x2 + h) ** 3 - x2**3
    lhs = RatFunc(x1 - x2 + h, (x1 - x2) * P1) + RatFunc(x1 - x2 - h, (x1 - x2) * P2)
    assert Y.coeff((1,)) == -lhs


def test_ddot_numerator_has_l0_factor():
    # lower limit l=0 supplies the a_r(x1+x2) factor
    num = amatrix_numerator("ddot", ((2, 2),), 1, 0)
    assert num == (2 * x1 + 2 * x2) * (2 * x1 + 2 * x2 + h)
    numdot = amatrix_numerator("dot", ((2, 2),), 1, 0)
    assert numdot == (2 * x1 + 2 * x2 + h) * (2 * x1 + 2 * x2 + 2 * h)


def test_A_q00_and_q10():
    spec = AMatrixSpec(n=3)
    A = build_A("dot", spec, 1)
    assert A.coeff((0, 0)) == 1
    # coefficient of q1: 1 / ((x1+h)^3 - x1^3)
    assert A.coeff((1, 0)) == RatFunc(one, (x1 + h) ** 3 - x1**3)


def test_K_swap_symmetry():
    al = default_generic_alpha(3)
    K = build_K("dot", 3, CISpec((1,)), al, 2)
    for d in range(3):
        for d1 in range(d + 1):
            a = K.coeff((d1, d - d1))
            b = K.coeff((d - d1, d1)).swap_x()
            assert a == b


def test_bar_transform_q0_and_symmetry():
    al = default_generic_alpha(3)
    K = build_K("dot", 3, CISpec(()), al, 2)
    Y = bar_transform(K)
    assert Y.coeff((0,)) == 1
    for d in range(3):
        c = Y.coeff((d,))
        assert c == c.swap_x()


def test_dual_path_small():
    # bar(K)|_{alpha=0} equals the closed form, kinds dot and ddot
    for kind, n, a in (("dot", 4, CISpec((2,))), ("ddot", 4, CISpec((2,)))):
        K = build_K(kind, n, a, None, 2)
        Ybar = bar_transform(K)
        Yclosed = build_Y_closed(kind, n, a, 2)
        for d in range(3):
            assert Ybar.coeff((d,)) == Yclosed.coeff((d,)), (kind, d)


def test_specialize_to_K_rebuild():
    spec = AMatrixSpec(n=3)
    A = build_A("dot", spec, 1)
    al = default_generic_alpha(3)
    K = specialize_to_K(A, CISpec((1,)), 3, al)
    K2 = build_K("dot", 3, CISpec((1,)), al, 1)
    assert K.coeff((1, 0)) == K2.coeff((1, 0))


def test_homogeneity_at_alpha_zero():
    # q^d coefficient jointly homogeneous of degree (|a| - n) d
    for kind in ("dot", "ddot"):
        Y = build_Y_closed(kind, 4, CISpec((2,)), 3)
        for d in range(4):
            c = Y.coeff((d,))
            dn = c.num.homogeneous_degree()
            dd = c.den.homogeneous_degree()
            assert dn is not None and dd is not None
            assert dn - dd == (2 - 4) * d


def test_normalization_I_cases():
    assert normalization_I("dot", 4, CISpec((2,)), 3) == normalization_I("ddot", 4, CISpec((2,)), 3)
    ones = normalization_I("ddot", 3, CISpec((1, 1, 1)), 2)
    for d in range(3):
        assert ones.get((d,)) == (1 if d == 0 else 0)
    with pytest.raises(ValueError):
        normalization_I("dot", 3, CISpec((4,)), 2)


def test_normalization_I_against_x_series_oracle():
    # constant term of the bivariate x-expansion at h=1, degree by degree
    from qgr.series import x_coefficients

    n, a = 3, CISpec((1, 1, 1))
    I = normalization_I("dot", n, a, 2)
    Y = build_Y_closed("dot", n, a, 2)
    assert I.get((0,)) == 1
    for d in (1, 2):
        f = Y.coeff((d,)).substitute({"h": Fraction(1)})
        const_term = x_coefficients(f, 0)[(0, 0)]
        assert I.get((d,)) == const_term.const_value()


def test_recursion_coeff_hand_value():
    al = default_generic_alpha(3)
    got = recursion_coeff("C_dot", ("second", 1, 2, 3), 1, al, CISpec(()))
    expect = Fraction(1) / ((al[0] - al[1]) * (al[2] - al[1]))
    assert got == expect


def test_c_over_frak_ratio():
    al = default_generic_alpha(4)
    a = CISpec((2,))
    for d in (1, 2):
        for (i, j, k) in ((1, 2, 3), (2, 4, 1), (3, 1, 4)):
            c = c_coeff("dot", "second", i, j, k, d, al, a)
            f = frak_coeff("dot", "second", i, j, k, d, al, a)
            ratio = Fraction(-1) ** d * (al[i - 1] - al[k - 1]) / (al[i - 1] - al[j - 1])
            assert c == ratio * f
            c1 = c_coeff("ddot", "first", i, j, k, d, al, a)
            f1 = frak_coeff("ddot", "first", i, j, k, d, al, a)
            ratio1 = Fraction(-1) ** d * (al[k - 1] - al[j - 1]) / (al[i - 1] - al[j - 1])
            assert c1 == ratio1 * f1


def test_frak_is_specialized_scr():
    # the specialized displays agree with the general two-family ones
    al = default_generic_alpha(4)
    a = CISpec((2, 1))
    spec = AMatrixSpec(n=4, rows=((2, 2), (1, 1)), alpha1=al, alpha2=al)
    for d in (1, 2):
        for (i, j, k) in ((1, 2, 3), (2, 3, 1)):
            assert frak_coeff("dot", "second", i, j, k, d, al, a) == scr_coeff(
                "dot", 2, i, j, k, d, spec
            )
            assert frak_coeff("ddot", "first", i, j, k, d, al, a) == scr_coeff(
                "ddot", 1, i, j, k, d, spec
            )


def test_ddot_C1_numerator_l0_factor():
    # the l=0 factor a_r(alpha_i + alpha_j) shows up in the ddot coefficient
    al = default_generic_alpha(3)
    a = CISpec((1,))
    got = frak_coeff("ddot", "second", 1, 2, 3, 1, al, a)
    # numerator prod_{l=0}^{0}: exactly a(alpha_1+alpha_2)
    den = Fraction(1)
    for m in range(1, 4):
        if m == 3:
            continue
        den *= al[1] - al[m - 1] + (al[2] - al[1])
    assert got == (al[0] + al[1]) / den


def test_evaluated_matches_trivariate():
    al = default_generic_alpha(3)
    a = CISpec((1,))
    K = build_K("dot", 3, a, al, 2)
    Ke = k_series_evaluated("dot", 3, a, al, 1, 2, 2)
    pt = {"x1": al[0], "x2": al[1]}
    for d in range(3):
        for d1 in range(d + 1):
            lhs = K.coeff((d1, d - d1)).substitute(pt)
            rhs = Ke.get((d1, d - d1))
            assert lhs == rhs
    Y = bar_transform(K)
    Ye = y_series_evaluated("dot", 3, a, al, 1, 2, 2)
    for d in range(3):
        assert Y.coeff((d,)).substitute(pt) == Ye.get((d,))


def test_mutation_changes_series():
    al = default_generic_alpha(3)
    a = CISpec(())
    clean = y_series_evaluated("dot", 3, a, al, 1, 2, 2)
    bad = None
    from qgr.hyper import bar_evaluated

    Kbad = k_series_evaluated("dot", 3, a, al, 1, 2, 2, mutate=(1, 1))
    bad = bar_evaluated(Kbad, al[0] - al[1])
    assert clean.get((1,)) != bad.get((1,))


def test_normalization_I_frozen_values():
    # frozen from the x-series-limit oracle (see the oracle test above)
    vals3 = [normalization_I("dot", 3, CISpec((3,)), 3).get((d,)) for d in range(4)]
    assert vals3 == [1, 6, 90, 1680]
    vals111 = [normalization_I("dot", 3, CISpec((1, 1, 1)), 3).get((d,)) for d in range(4)]
    assert vals111 == [1, 1, 1, 1]
    vals44 = [normalization_I("dot", 4, CISpec((4,)), 2).get((d,)) for d in range(3)]
    assert vals44 == [1, 48, 15120]
