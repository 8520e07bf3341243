import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legkit.errors import InvalidWeights
from legkit.exactalg import LaurentPoly
from legkit.toric import (
    WeightSystem,
    build_toric_legendrian,
    classify_smooth_candidates,
    hermite_normal_form,
    hull_edges,
    lemma_edge_predictions,
    same_lattice,
    vertex_smoothness_test,
    weight_tuples,
)
from legkit.varieties import legendrian_check, nondegeneracy_rank


def named_edges(a):
    W = WeightSystem(a)
    P = hull_edges(a)
    return {frozenset((W.point_name(x), W.point_name(y))) for x, y in P.edges}


# Weight systems and maps

def test_weight_validation():
    for bad in [(1,), (2, 2), (1, 2, 1), (3, 0, 1), (4, 2, 2)]:
        with pytest.raises(InvalidWeights):
            WeightSystem(bad)


def test_weights_relation():
    W = WeightSystem((5, 3, 2, 1))
    a0 = W.a[0]
    w = W.weights
    lhs = [a0 * x for x in w[0]]
    rhs = [sum(W.a[i] * w[i][k] for i in range(1, W.n)) for k in range(W.n - 1)]
    assert lhs == rhs


def test_map_211():
    t1, t2 = LaurentPoly.gens(2)
    X = build_toric_legendrian((2, 1, 1))
    assert X.map == (-2 * t1 * t2, t1**2, t2**2, (t1 * t2) ** -1, t1**-2, t2**-2)


def test_map_111_coefficients():
    X = build_toric_legendrian((1, 1, 1))
    assert [X.map[i].evaluate([1, 1]) for i in range(6)] == [-1, 1, 1, 1, 1, 1]


def test_map_1111_lives_in_p7():
    X = build_toric_legendrian((1, 1, 1, 1))
    assert X.ambient.dim == 8 and X.params == 3
    assert legendrian_check(X, samples=5).verdict


def test_orbit_identity_symbolic():
    # tangent vectors v, u_i at [x_0, ..., x_{n-1}, 1, ..., 1] with symbolic x
    for a in [(2, 1, 1), (1, 1, 1), (1, 1, 1, 1), (5, 3, 2, 1)]:
        n = len(a)
        x = LaurentPoly.gens(n)
        one = LaurentPoly.constant(1, n)
        zero = LaurentPoly(n)
        v = list(x) + [one] * n
        for i in range(1, n):
            u = [zero] * (2 * n)
            u[0] = a[i] * x[0]
            u[i] = a[0] * x[i]
            u[n] = zero - a[i]
            u[n + i] = zero - a[0]
            om = sum((u[k] * v[n + k] - u[n + k] * v[k] for k in range(n)), zero)
            assert om == 2 * (x[0] * a[i] + x[i] * a[0])
            point = [-a[0]] + list(a[1:])
            assert om.evaluate(point) == 0


# Hulls

def test_hull_211():
    P = hull_edges((2, 1, 1))
    assert len(P.vertices) == 4 and len(P.edges) == 4
    assert named_edges((2, 1, 1)) == {
        frozenset(e) for e in [("w1", "w2"), ("w1", "-w2"), ("w2", "-w1"), ("-w1", "-w2")]
    }
    # w_0 sits in the middle of the edge (w_1, w_2)
    assert 0 not in P.vertices


def test_hull_111_is_hexagon():
    P = hull_edges((1, 1, 1))
    assert len(P.vertices) == 6 and len(P.edges) == 6
    assert all(len(P.neighbours(v)) == 2 for v in P.vertices)


def test_hull_1111_has_cross_edges():
    edges = named_edges((1, 1, 1, 1))
    for k in range(1, 4):
        for l in range(1, 4):
            if k != l:
                assert frozenset((f"w{k}", f"-w{l}")) in edges
    assert len(edges) == 12


def test_edge_endpoints_are_vertices():
    P = hull_edges((4, 3, 2, 1))
    assert all(a in P.vertices and b in P.vertices for a, b in P.edges)


def random_tuple(rng):
    n = rng.randint(3, 5)
    while True:
        a = tuple(sorted((rng.randint(1, 9) for _ in range(n)), reverse=True))
        try:
            return WeightSystem(a)
        except InvalidWeights:
            pass


def test_edge_lemma_agreement_random():
    rng = random.Random(2)
    applied = 0
    for _ in range(60):
        W = random_tuple(rng)
        edges = {tuple(sorted(e)) for e in hull_edges(W).edges}
        for pair in lemma_edge_predictions(W):
            assert pair in edges, (W.a, pair)
            applied += 1
    assert applied > 0


# Vertex test

def test_vertex_test_111_by_hand():
    v = vertex_smoothness_test((1, 1, 1))
    assert v.passed
    vecs = v.details["w1"]["edge_vectors"]
    assert sorted(vecs) == [(-1, -1), (0, 1)]


def test_vertex_test_211_uses_short_step():
    v = vertex_smoothness_test((2, 1, 1))
    assert v.verdict == "pass"
    assert (-1, 1) in v.details["w1"]["edge_vectors"]


def test_vertex_test_322_fails():
    assert vertex_smoothness_test((3, 2, 2)).verdict == "fail"


def test_hermite_normal_form():
    assert hermite_normal_form([[2, 0], [0, 2], [1, 1]]) == [(1, 1), (0, 2)]
    assert same_lattice([[1, 0], [0, 1]], [[2, 1], [1, 1]])
    assert not same_lattice([[1, 0], [0, 2]], [[1, 0], [0, 1]])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_hnf_invariant_under_adding_combinations(vs, coefs):
    extra = tuple(sum(c * v[k] for c, v in zip(coefs, vs)) for k in range(3))
    assert same_lattice(vs, vs + [extra])


# Classification

def test_weight_tuples_are_valid():
    ts = weight_tuples(3, 5)
    assert (2, 1, 1) in ts and (2, 2, 2) not in ts
    for a in ts:
        WeightSystem(a)


def test_classify_surfaces():
    assert classify_smooth_candidates(2, 12) == [(2, 1, 1), (1, 1, 1)]


def test_classify_threefolds_and_fourfolds():
    assert classify_smooth_candidates(3, 8) == [(1, 1, 1, 1)]
    assert classify_smooth_candidates(4, 6) == []


def test_classify_range_errors():
    with pytest.raises(ValueError):
        classify_smooth_candidates(1, 5)
    with pytest.raises(ValueError):
        classify_smooth_candidates(2, 1)


@pytest.mark.parametrize("a", [(2, 1, 1), (1, 1, 1), (1, 1, 1, 1)])
def test_survivors_are_legendrian_and_nondegenerate(a):
    X = build_toric_legendrian(a)
    assert legendrian_check(X, samples=5).verdict
    assert nondegeneracy_rank(X) == 2 * len(a)


def test_nonsmooth_toric_still_legendrian():
    X = build_toric_legendrian((3, 2, 1))
    assert legendrian_check(X, samples=3).verdict
    assert X.point([Fraction(1), Fraction(1)])[0] == -3
