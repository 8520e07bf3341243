from fractions import Fraction

import pytest

from legkit import catalog
from legkit.errors import NoParametrization
from legkit.exactalg import LaurentPoly, RatMatrix
from legkit.reduction import (
    HyperplaneSpec,
    conic_fixture,
    conormal_extend,
    direct_sum,
    hyperplane_reduce,
    hyperplane_through,
    join_legendrian,
    phi_apply,
    phi_map,
    point_variety,
    qw_quadric,
    random_hyperplane,
    secant_probe,
)
from legkit.symplinalg import SymplecticSpace
from legkit.varieties import legendrian_check, nondegeneracy_rank

F = Fraction


# Hyperplanes

def test_h_of_first_coordinate():
    S = SymplecticSpace.standard(2)
    H = HyperplaneSpec.from_eta(S, [1, 0, 0, 0])
    assert H.h == (0, 0, -1, 0)
    # omega(h, .) is eta
    assert all(S.omega(H.h, e) == H.eta[i] for i, e in enumerate(RatMatrix.identity(4).rows))


def test_from_h_inverts_from_eta():
    S = SymplecticSpace.standard(3)
    H = random_hyperplane(S, 4, 4)
    assert HyperplaneSpec.from_h(S, H.h).eta == H.eta
    assert H.subspace.dim == 5 and H.subspace.contains(H.h)


def test_zero_covector_rejected():
    with pytest.raises(ValueError):
        HyperplaneSpec.from_eta(SymplecticSpace.standard(1), [0, 0])


# Hyperplane reduction

def test_reduce_toric_111():
    X = catalog.get("toric-1,1,1")
    rep = hyperplane_reduce(X, random_hyperplane(X.ambient, 1, 0), samples=5)
    assert rep.verdict and rep.max_residual < 1e-8
    assert all(s.tangent_dim == 2 for s in rep.samples)


def test_reduce_exact_fixture_has_zero_residual():
    X = catalog.get("toric-2,1,1")
    t0 = [F(2), F(-1, 3)]
    H = hyperplane_through(X, t0, 7)
    rep = hyperplane_reduce(X, H, samples=0, points=[t0])
    (s,) = rep.samples
    assert s.exact and s.residual == 0 and s.tangent_dim == 2


def test_reduce_rejects_point_off_hyperplane():
    X = catalog.get("toric-2,1,1")
    H = hyperplane_through(X, [2, 3], 1)
    with pytest.raises(ValueError):
        hyperplane_reduce(X, H, samples=0, points=[[1, 1]])


def test_reduction_report_json():
    X = catalog.get("toric-1,1,1")
    rep = hyperplane_reduce(X, random_hyperplane(X.ambient, 2, 0), samples=2)
    js = rep.to_json()
    assert js["reduced_dim_expected"] == 2 and js["verdict"] is True


# Secant probe

def test_secant_probe_random_h():
    X = catalog.get("toric-1,1,1")
    h = random_hyperplane(X.ambient, 3, 3).h
    rep = secant_probe(X, h, trials=50)
    assert rep.failures == 0


def test_secant_probe_catches_midpoint_pair():
    # x(t) and x(-t) on the (1,1,1) surface are omega-orthogonal; h on the
    # line through them is a bad centre
    X = catalog.get("toric-1,1,1")
    t = [F(2), F(3)]
    u = [-v for v in t]
    x1, x2 = X.point(t), X.point(u)
    assert X.ambient.omega(x1, x2) == 0
    h = [a + b for a, b in zip(x1, x2)]
    rep = secant_probe(X, h, trials=0, pairs=[(t, u)])
    assert rep.failures == 1


# The chart map

@pytest.mark.parametrize("n", [2, 3, 4])
def test_phi_certificate(n):
    cert = phi_map(n)
    assert cert.ok and cert.conformal_factor == -1


def test_phi_n2_display():
    x1, x2, y0, y1 = F(3), F(5), F(7), F(11)
    assert phi_apply(2, [x1, x2], [y0, y1]) == [y1, y0 - x2, x1, 1]


def test_phi_zero_point():
    assert phi_apply(2, [0, 0], [0, 0]) == [0, 0, 0, 1]


# Joins

def test_join_of_points_is_lagrangian_line():
    S = SymplecticSpace.standard(1)
    J = join_legendrian(point_variety(S, [1, 0]), point_variety(S, [0, 1]))
    assert J.params == 1 and J.ambient.dim == 4
    assert legendrian_check(J, samples=3).verdict


def test_join_of_toric_surfaces():
    X = catalog.get("toric-2,1,1")
    J = join_legendrian(X, X)
    assert J.params == 5
    assert legendrian_check(J, samples=5).verdict
    assert nondegeneracy_rank(J) == 2 * nondegeneracy_rank(X)


def test_join_fails_iff_an_input_fails():
    good = catalog.get("toric-1,1,1")
    bad = catalog.get("rnc-control")
    assert legendrian_check(join_legendrian(good, good), samples=3).verdict
    assert not legendrian_check(join_legendrian(good, bad), samples=3).verdict
    assert not legendrian_check(join_legendrian(bad, good), samples=3).verdict


def test_direct_sum_blocks():
    S = direct_sum(SymplecticSpace.standard(1), SymplecticSpace.standard(2))
    assert S.dim == 6 and S.J[0, 1] == 1 and S.J[2, 4] == 1 and S.J[0, 3] == 0


# Conormal extension

def test_qw_quadric():
    x = LaurentPoly.gens(4)
    assert qw_quadric(2) == x[0] * x[2] + x[1] * x[3]


def test_conic_conormal():
    f, z = conic_fixture()
    res = conormal_extend(f, z)
    assert res.qw_identity and res.qw_value.is_zero()
    assert legendrian_check(res.variety, samples=10).verdict


def test_conormal_of_plane_line():
    x0, x1, x2 = LaurentPoly.gens(3)
    t = LaurentPoly.var(0, 1)
    one = LaurentPoly.constant(1, 1)
    res = conormal_extend(x0 + x1 - x2, [one, t, one + t])
    assert res.qw_identity and legendrian_check(res.variety, samples=4).verdict


def test_conormal_errors():
    f, z = conic_fixture()
    with pytest.raises(NoParametrization):
        conormal_extend(f, None)
    t = LaurentPoly.var(0, 1)
    with pytest.raises(NoParametrization):
        conormal_extend(f, [t, t, 2 * t])
