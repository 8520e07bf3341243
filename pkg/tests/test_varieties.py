from fractions import Fraction

import pytest

from legkit import catalog
from legkit.exactalg import LaurentPoly, RatMatrix, SpanTester, rank
from legkit.symplinalg import QuadraticForm, SymplecticSpace, in_sp, is_bracket_closed, rho
from legkit.varieties import (
    ParamVariety,
    cone_tangent_space,
    interpolate_quadrics,
    legendrian_check,
    nondegeneracy_rank,
    random_rationals,
    sample_parameters,
    sample_point,
    stabilizer_algebra,
)

F = Fraction


def flat(g):
    return [x for r in g.rows for x in r]


def test_toric_point_oracle():
    X = catalog.get("toric-2,1,1")
    assert X.point([2, 3]) == (F(-12), F(4), F(9), F(1, 6), F(1, 4), F(1, 9))


def test_sampling_is_deterministic():
    X = catalog.get("xinv-3")
    assert sample_point(X, 3, 7) == sample_point(X, 3, 7)
    assert sample_point(X, 3, 7) != sample_point(X, 3, 8)
    t, _ = sample_parameters(X, 0, 0)
    assert all(t) and all(abs(v.numerator) <= 9 and v.denominator <= 9 for v in t)


def test_random_rationals_range():
    vals = random_rationals(500, 1, 2)
    assert all(1 <= abs(v.numerator) <= 9 and 1 <= v.denominator <= 9 for v in random_rationals(500, 4))
    assert vals == random_rationals(500, 1, 2)


def test_params_bounded_by_n():
    t = LaurentPoly.var(0, 2)
    with pytest.raises(ValueError):
        ParamVariety(SymplecticSpace.standard(1), 2, (t, t), "too many")


def test_json_roundtrip():
    X = catalog.get("toric-1,1,1")
    Y = ParamVariety.from_json(X.to_json())
    assert Y.map == X.map and Y.ambient == X.ambient and Y.label == X.label


# Tangent spaces

def test_tangent_space_toric():
    X = catalog.get("toric-2,1,1")
    assert cone_tangent_space(X, [1, 1]).dim == 3


def test_tangent_space_constant_map():
    one = LaurentPoly.constant(1, 1)
    zero = LaurentPoly(1)
    X = ParamVariety(SymplecticSpace.standard(1), 1, (one, zero), "const")
    assert cone_tangent_space(X, [5]).dim == 1


def test_tangent_space_xinv3_at_identity():
    from legkit.matpair import build_xinv

    X = build_xinv(3, centered=True)
    ones = [1] * X.params
    x = X.point(ones)
    assert x == tuple(F(int(i % 4 == 0)) for i in range(9)) * 2  # [Id, Id]
    assert cone_tangent_space(X, ones).dim == 9


# Legendrian checks

def test_toric_passes():
    rep = legendrian_check(catalog.get("toric-2,1,1"), samples=10)
    assert rep.verdict and rep.tangent_dims == [3] * 10 and rep.reason is None


def test_xinv3_passes_at_identity_and_random():
    from legkit.matpair import build_xinv

    X = build_xinv(3, centered=True)
    rep = legendrian_check(X, samples=9, points=[[1] * X.params])
    assert rep.samples == 10 and rep.verdict


def test_rational_normal_curve_fails():
    X = catalog.get("rnc-control")
    # omega(x, x') = 2t + 2t^3, which is 4 at t = 1
    x, dx = X.point([1]), X.jacobian([1]).column(0)
    assert X.ambient.omega(x, dx) == 4
    rep = legendrian_check(X, samples=5)
    assert not rep.verdict and rep.reason == "OmegaNonzero"
    assert rep.failures and rep.failures[0]["pair"] == (0, 1)


def test_not_full_dimensional():
    # a line in Q^6: isotropic but too small
    t = LaurentPoly.var(0, 1)
    one = LaurentPoly.constant(1, 1)
    zero = LaurentPoly(1)
    X = ParamVariety(SymplecticSpace.standard(3), 1, (one, t, zero, zero, zero, zero), "line")
    rep = legendrian_check(X, samples=3)
    assert not rep.verdict and rep.reason == "NotFullDimensional"


def _random_symplectic(n, key):
    # exp of nilpotent sp elements: [[I, S], [0, I]] and [[I, 0], [T, I]] with S, T symmetric
    vals = random_rationals(n * n * 2, *key)
    S = [[F(0)] * n for _ in range(n)]
    T = [[F(0)] * n for _ in range(n)]
    k = 0
    for i in range(n):
        for j in range(i, n):
            S[i][j] = S[j][i] = vals[k]
            T[i][j] = T[j][i] = vals[k + 1]
            k += 2
    I = RatMatrix.identity(n)
    Z = RatMatrix.zeros(n, n)
    U = RatMatrix.block([[I, RatMatrix(S, n)], [Z, I]])
    L = RatMatrix.block([[I, Z], [RatMatrix(T, n), I]])
    return U @ L


@pytest.mark.parametrize("name", ["toric-2,1,1", "xinv-3", "rnc-control"])
def test_verdict_invariant_under_symplectic_change(name):
    X = catalog.get(name)
    P = _random_symplectic(X.ambient.n, (9, len(name)))
    assert (P.T @ X.ambient.J @ P) == X.ambient.J
    Y = X.transformed(P)
    assert legendrian_check(Y, samples=4).verdict == legendrian_check(X, samples=4).verdict


# Quadrics

def test_quadrics_of_linear_lagrangian():
    assert len(interpolate_quadrics(catalog.get("linear-lagrangian-2"))) == 7


def test_quadrics_of_full_space():
    assert interpolate_quadrics(catalog.full_projective_line()) == []


def test_oversample_guard():
    with pytest.raises(ValueError):
        interpolate_quadrics(catalog.get("toric-2,1,1"), oversample=10)


def test_quadrics_of_xinv3_span_y():
    from legkit.matpair import y_quadrics

    X = catalog.get("xinv-3")
    quads = interpolate_quadrics(X)
    assert len(quads) == 16
    found = SpanTester([flat(q.M) for q in quads], 18 * 18)
    for _, f in y_quadrics(3):
        assert found.contains(flat(QuadraticForm.from_poly(X.ambient, f).M))


def test_quadric_count_independent_of_seed():
    X = catalog.get("toric-1,1,1,1")
    assert len({len(interpolate_quadrics(X, seed=s)) for s in range(3)}) == 1


# Stabilizers

def test_stabilizer_of_linear_lagrangian():
    assert stabilizer_algebra(catalog.get("linear-lagrangian-2")).dim == 12


def test_stabilizer_of_xinv3():
    X = catalog.get("xinv-3")
    st = stabilizer_algebra(X)
    assert st.dim == 17 and st.split_closed
    assert st.sp_dim == 16 and st.wsp_dim == 1


def test_stabilizer_contains_torus_for_toric():
    X = catalog.get("toric-1,1,1")
    st = stabilizer_algebra(X)
    span = SpanTester([flat(g) for g in st.basis], 36)
    W = [(1, 1), (1, 0), (0, 1)]
    for j in range(2):
        diag = [F(w[j]) for w in W] + [F(-w[j]) for w in W]
        g = RatMatrix([[diag[i] if i == k else 0 for k in range(6)] for i in range(6)])
        assert span.contains(flat(g))


SMOOTH_NONLINEAR = ["toric-2,1,1", "toric-1,1,1", "toric-1,1,1,1", "xinv-3", "xinv-sym-3", "segre-p1p1p1"]
SMALL = SMOOTH_NONLINEAR + ["xinv-2", "xdeg-2,1", "xdeg-3,1", "linear-lagrangian-2", "conormal-conic"]


@pytest.mark.parametrize("name", SMALL)
def test_rho_of_ideal_is_subalgebra_of_stabilizer(name):
    X = catalog.get(name)
    quads = interpolate_quadrics(X)
    R = [rho(q) for q in quads]
    assert all(in_sp(r, X.ambient) for r in R)
    assert is_bracket_closed(R).closed
    st = stabilizer_algebra(X)
    assert is_bracket_closed(st.basis).closed
    span = SpanTester([flat(g) for g in st.basis], X.ambient.dim ** 2)
    assert all(span.contains(flat(g)) for g in R + [RatMatrix.identity(X.ambient.dim)])
    if name in SMOOTH_NONLINEAR:
        assert st.dim == len(quads) + 1


@pytest.mark.slow
@pytest.mark.parametrize("name", ["xinv-4", "xinv-skew-3"])
def test_rho_of_ideal_closed_large(name):
    X = catalog.get(name)
    R = [rho(q) for q in interpolate_quadrics(X)]
    assert is_bracket_closed(R).closed


# Nondegeneracy

def test_nondegeneracy_examples():
    assert nondegeneracy_rank(catalog.get("toric-2,1,1")) == 6
    assert nondegeneracy_rank(catalog.get("linear-lagrangian-2")) == 2
    assert nondegeneracy_rank(catalog.get("xinv-2")) == 4


def test_secant_probe_zero_trials():
    from legkit.varieties import secant_probe

    X = catalog.get("toric-1,1,1")
    assert secant_probe(X, [1, 2, 3, 4, 5, 6], trials=0).failures == 0
