from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legkit.errors import NotSkew, OddSize, SingularInput, ZeroParameter
from legkit.exactalg import (
    LaurentPoly,
    RatMatrix,
    det,
    inverse,
    kernel_fraction,
    laurent_eval,
    laurent_jacobian,
    mat_kernel,
    pfaffian,
    rank,
    rat_from_json,
    rat_to_json,
    row_space_basis,
    solve,
)
from legkit.exactalg.modular import kernel_multimodular

F = Fraction

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(max_rows=5, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def skew(n, entries):
    M = [[F(0)] * n for _ in range(n)]
    it = iter(entries)
    for i in range(n):
        for j in range(i + 1, n):
            v = next(it)
            M[i][j] = v
            M[j][i] = -v
    return RatMatrix(M, n)


# Kernels

def test_kernel_of_proportional_rows():
    K = mat_kernel([[1, 2], [2, 4]])
    assert K == [(F(1), F(-1, 2))]
    # same line as (-2, 1)
    assert rank([list(K[0]), [-2, 1]]) == 1


def test_kernel_identity_is_empty():
    assert mat_kernel(RatMatrix.identity(3)) == []


def test_kernel_single_row():
    assert len(mat_kernel([[1, 1, 1]])) == 2


def test_kernel_matches_frozen_oracle():
    # nullspace from sympy, brought to reduced row echelon form
    M = [[1, 2, 0, -1, 3], [2, 4, 1, 0, 1], [3, 6, 1, -1, 4]]
    expected = [
        (1, 0, 0, -5, -2),
        (0, 1, 0, -10, -4),
        (0, 0, 1, -3, -1),
    ]
    assert mat_kernel(M) == [tuple(F(x) for x in r) for r in expected]


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(rows):
    nc = len(rows[0])
    K = mat_kernel(rows)
    assert rank(rows) + len(K) == nc
    for v in K:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


def test_multimodular_agrees_with_fraction_elimination():
    import random

    rng = random.Random(5)
    for _ in range(6):
        nr, nc = rng.randint(3, 12), rng.randint(4, 14)
        base = [[F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(nc)] for _ in range(max(1, nr - 3))]
        rows = base + [[sum(rng.randint(-2, 2) * b[j] for b in base) for j in range(nc)] for _ in range(3)]
        assert kernel_multimodular(rows, nc) == kernel_fraction(rows)


def test_large_kernel_goes_through_modular_route():
    # 30 x 171 exceeds the threshold; compare with plain elimination
    import random

    rng = random.Random(11)
    rows = [[F(rng.randint(-3, 3)) for _ in range(171)] for _ in range(25)]
    rows += [[a + b for a, b in zip(rows[0], rows[1])] for _ in range(5)]
    assert mat_kernel(rows) == kernel_fraction(rows)


# Determinants, inverses, solving

def test_det_frozen_oracle():
    M = [[2, -1, 0, 3, 1], [1, 1, 4, 0, -2], [0, 3, -1, 2, 5], [7, 0, 1, 1, 1], [-3, 2, 2, 0, 1]]
    M = [[F(x, 3) for x in r] for r in M]
    assert det(M) == F(310, 243)


def test_inverse_roundtrip_and_singular():
    M = RatMatrix([[2, 1], [7, 4]])
    assert M @ inverse(M) == RatMatrix.identity(2)
    with pytest.raises(SingularInput):
        inverse([[1, 2], [2, 4]])


def test_solve_inconsistent_is_none():
    assert solve([[1, 1], [2, 2]], [1, 3]) is None
    assert solve([[1, 1], [1, -1]], [2, 0]) == (F(1), F(1))


def test_row_space_basis_is_echelon():
    B = row_space_basis([[0, 2, 4], [0, 1, 2], [1, 0, 0]])
    assert B == [(F(1), F(0), F(0)), (F(0), F(1), F(2))]


# Rationals in JSON

def test_rational_json():
    assert rat_to_json(F(3)) == "3"
    assert rat_to_json(F(-2, 4)) == "-1/2"
    assert rat_from_json("-1/2") == F(-1, 2)
    M = RatMatrix([[F(1, 2), 3]])
    assert RatMatrix.from_json(M.to_json()) == M


# Laurent polynomials

def test_laurent_eval_examples():
    t1, t2 = LaurentPoly.gens(2)
    assert laurent_eval(t1**2 * t2**-1, [2, 3]) == F(4, 3)
    assert laurent_eval(LaurentPoly.constant(5, 2), [7, -1]) == 5
    t = LaurentPoly.var(0, 1)
    assert laurent_eval(t**-3, [F(1, 2)]) == 8


def test_laurent_eval_rejects_zero():
    t = LaurentPoly.var(0, 1)
    with pytest.raises(ZeroParameter):
        laurent_eval(t**-1, [0])


def test_laurent_jacobian_examples():
    t1, t2 = LaurentPoly.gens(2)
    assert laurent_jacobian([t1**2 * t2**-1], [1, 1]).rows == ((F(2), F(-1)),)
    t = LaurentPoly.var(0, 1)
    assert laurent_jacobian([t**-3], [1]).rows == ((F(-3),),)


def test_toric_jacobian_pattern():
    # map of weights (2, 1, 1); columns at (1, 1) computed independently with sympy
    t1, t2 = LaurentPoly.gens(2)
    Fm = [-2 * t1 * t2, t1**2, t2**2, (t1 * t2) ** -1, t1**-2, t2**-2]
    Jm = laurent_jacobian(Fm, [1, 1])
    assert list(Jm.column(0)) == [-2, 2, 0, -1, -2, 0]
    assert list(Jm.column(1)) == [-2, 0, 2, -1, 0, -2]


exps = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
polys2 = st.dictionaries(exps, small.filter(bool), min_size=1, max_size=5).map(lambda d: LaurentPoly(2, d))
points2 = st.tuples(small.filter(bool), small.filter(bool))


@settings(max_examples=50, deadline=None)
@given(polys2, points2, st.tuples(small, small))
def test_jacobian_matches_central_differences(f, t, direction):
    # the central difference misses J.d by c h^2 + O(h^4): halving h cuts the error about 4x
    d = list(direction)
    Jd = sum(a * b for a, b in zip(laurent_jacobian([f], t).rows[0], d))

    def err(h):
        plus = [x + h * y for x, y in zip(t, d)]
        minus = [x - h * y for x, y in zip(t, d)]
        return abs((laurent_eval(f, plus) - laurent_eval(f, minus)) / (2 * h) - Jd)

    h = F(1, 10**4) * min(abs(x) for x in t)
    e1, e2 = err(h), err(h / 2)
    assert e1 == e2 == 0 or 3 * e2 <= e1


def test_laurent_arithmetic_and_json():
    x, y = LaurentPoly.gens(2)
    f = (x + y) ** 2 - x * x
    assert f == 2 * x * y + y * y
    assert f.is_homogeneous(2)
    assert (x**-2) * (x**2) == 1
    assert LaurentPoly.from_json(f.to_json(), 2) == f
    assert f.diff(0) == 2 * y


def test_shift_and_lowest_part():
    x, y = LaurentPoly.gens(2)
    f = x * x + y
    g = f.shift([1, 0])  # f(1 + x, y) = 1 + 2x + x^2 + y
    assert g == 1 + 2 * x + x * x + y
    assert g.lowest_part() == 1
    assert (g - 1).lowest_part() == 2 * x + y


# Pfaffians

def test_pfaffian_two_by_two():
    assert pfaffian(skew(2, [F(7, 3)])) == F(7, 3)
    assert pfaffian(skew(4, [1, 0, 0, 0, 0, 1])) == 1


def test_pfaffian_four_by_four_formula():
    g12, g13, g14, g23, g24, g34 = [F(2), F(-3), F(5), F(1, 2), F(7), F(-1, 3)]
    M = skew(4, [g12, g13, g14, g23, g24, g34])
    assert pfaffian(M) == g12 * g34 - g13 * g24 + g14 * g23


def test_pfaffian_frozen_oracle():
    # perfect-matching expansion, computed independently
    vals = [1, -2, F(1, 3), 4, 0, 5, -1, 2, 3, F(-1, 2), 7, 1, -3, 2, 6]
    assert pfaffian(skew(6, vals)) == F(-239, 3)


def test_pfaffian_errors():
    with pytest.raises(NotSkew):
        pfaffian([[0, 1], [1, 0]])
    with pytest.raises(OddSize):
        pfaffian(RatMatrix.zeros(3, 3))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 4, 6]).flatmap(lambda n: st.tuples(st.just(n), st.lists(small, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))))
def test_pfaffian_squared_is_det(data):
    n, vals = data
    M = skew(n, vals)
    assert pfaffian(M) ** 2 == det(M)
