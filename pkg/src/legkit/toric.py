"""Toric Legendrian varieties from weight tuples a_0 >= a_1 >= ... >= a_{n-1} > 0.

The weights are w_0 = (a_1, ..., a_{n-1}) and w_i = a_0 e_i in Z^{n-1}; the
variety is the closure of the torus orbit of [-a_0, a_1, ..., a_{n-1}, 1, ..., 1]
acting with weights (w_0, ..., w_{n-1}, -w_0, ..., -w_{n-1}).  Smoothness is
screened by the vertex test on the polytope conv{+-w_i}: the polytope must be
simple and the edge vectors at each vertex must generate the lattice spanned
by all weights relative to that vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

from ._parallel import pmap
from .errors import InvalidWeights
from .exactalg import LaurentPoly, mat_kernel
from .symplinalg import SymplecticSpace
from .varieties import ParamVariety


@dataclass(frozen=True)
class WeightSystem:
    a: tuple

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 2:
            raise InvalidWeights("need at least two weights")
        if any(x <= 0 for x in a):
            raise InvalidWeights("weights must be positive")
        if any(a[i] < a[i + 1] for i in range(len(a) - 1)):
            raise InvalidWeights("weights must be non-increasing")
        g = 0
        for x in a:
            g = gcd(g, x)
        if g != 1:
            raise InvalidWeights(f"weights {a} are not coprime")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def weights(self) -> list[tuple[int, ...]]:
        """w_0, ..., w_{n-1}."""
        a0 = self.a[0]
        d = self.n - 1
        w = [tuple(self.a[1:])]
        for i in range(d):
            w.append(tuple(a0 if j == i else 0 for j in range(d)))
        return w

    @property
    def points(self) -> list[tuple[int, ...]]:
        """w_0..w_{n-1} followed by -w_0..-w_{n-1}."""
        w = self.weights
        return w + [tuple(-x for x in v) for v in w]

    def point_name(self, idx: int) -> str:
        n = self.n
        return f"w{idx}" if idx < n else f"-w{idx - n}"


def build_toric_legendrian(a: Sequence[int]) -> ParamVariety:
    W = a if isinstance(a, WeightSystem) else WeightSystem(tuple(a))
    n = W.n
    coefs = [-W.a[0]] + list(W.a[1:]) + [1] * n
    comps = tuple(LaurentPoly.monomial(p, c) for p, c in zip(W.points, coefs))
    label = "toric-" + ",".join(map(str, W.a))
    return ParamVariety(SymplecticSpace.standard(n), n - 1, comps, label)


# Exact polytope combinatorics ---------------------------------------------

def _int_kernel_vector(rows: list[list[int]], d: int) -> tuple[int, ...] | None:
    ker = mat_kernel(rows) if rows else None
    if ker is None or len(ker) != 1:
        return None
    v = ker[0]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class Facet:
    normal: tuple
    offset: int
    members: frozenset


@dataclass
class LatticePolytope:
    points: list
    facets: list
    vertices: list
    edges: list
    certificates: dict

    def neighbours(self, v: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == v} | {a for a, b in self.edges if b == v})


def _facets(points: list[tuple[int, ...]]) -> list[Facet]:
    d = len(points[0])
    seen = {}
    for subset in combinations(range(len(points)), d):
        p0 = points[subset[0]]
        diffs = [[points[i][k] - p0[k] for k in range(d)] for i in subset[1:]]
        c = _int_kernel_vector(diffs, d)
        if c is None:
            continue
        vals = [sum(ci * pi for ci, pi in zip(c, p)) for p in points]
        b = sum(ci * pi for ci, pi in zip(c, p0))
        if all(v <= b for v in vals):
            pass
        elif all(v >= b for v in vals):
            c = tuple(-x for x in c)
            b = -b
            vals = [-v for v in vals]
        else:
            continue
        if c in seen:
            continue
        members = frozenset(i for i, v in enumerate(vals) if v == b)
        seen[c] = Facet(c, b, members)
    return sorted(seen.values(), key=lambda f: f.normal)


def _collinear(points, idxs, a, b) -> bool:
    pa, pb = points[a], points[b]
    u = [y - x for x, y in zip(pa, pb)]
    for i in idxs:
        w = [y - x for x, y in zip(pa, points[i])]
        for j in range(len(u)):
            for k in range(j + 1, len(u)):
                if u[j] * w[k] - u[k] * w[j]:
                    return False
    return True


def polytope_of(points: list[tuple[int, ...]]) -> LatticePolytope:
    """Vertices and edges of conv(points), each certified by a linear functional.

    The smallest face containing a set of points is the intersection of the
    facets containing them.  A point is a vertex when that face is the point
    itself; a pair is an edge when that face is the segment between them.
    The certificate is the sum of the normals of those facets, which is
    maximized on the polytope exactly on that face.
    """
    facets = _facets(points)
    everything = frozenset(range(len(points)))

    def face_of(idxs) -> frozenset:
        face = everything
        for f in facets:
            if all(i in f.members for i in idxs):
                face = face & f.members
        return face

    def certificate(idxs) -> tuple[int, ...]:
        d = len(points[0])
        c = [0] * d
        for f in facets:
            if all(i in f.members for i in idxs):
                c = [x + y for x, y in zip(c, f.normal)]
        return tuple(c)

    vertices = []
    for i in range(len(points)):
        face = face_of([i])
        if all(points[j] == points[i] for j in face):
            vertices.append(i)
    edges = []
    certs = {}
    for a, b in combinations(vertices, 2):
        face = face_of([a, b])
        if face == everything:
            continue
        if _collinear(points, face, a, b):
            edges.append((a, b))
            certs[(a, b)] = certificate([a, b])
    for (a, b), c in certs.items():
        vals = [sum(x * y for x, y in zip(c, p)) for p in points]
        top = max(vals)
        on = {i for i, v in enumerate(vals) if v == top}
        if a not in on or b not in on or not _collinear(points, on, a, b):
            raise AssertionError(f"edge certificate for {(a, b)} does not check out")
    return LatticePolytope(points, facets, vertices, edges, certs)


def hull_edges(W) -> LatticePolytope:
    W = W if isinstance(W, WeightSystem) else WeightSystem(tuple(W))
    return polytope_of(W.points)


def lemma_edge_predictions(W) -> dict[tuple[int, int], str]:
    """Edges predicted by the lemma on edges of conv{+-w_i}.

    Keys are point-index pairs (sorted); values name the clause that applies.
    Point i < n is w_i and point n + i is -w_i.  Only strict hypotheses are used.
    """
    W = W if isinstance(W, WeightSystem) else WeightSystem(tuple(W))
    n, a = W.n, W.a
    a0 = a[0]
    idx = list(range(1, n))
    out: dict[tuple[int, int], str] = {}

    def put(p, q, tag):
        out.setdefault((min(p, q), max(p, q)), tag)

    for r in range(len(idx) + 1):
        for I in combinations(idx, r):
            J = [j for j in idx if j not in I]
            alpha = sum(a[i] for i in I) - sum(a[j] for j in J)
            if abs(alpha) < a0:
                for i1, i2 in combinations(I, 2):
                    put(i1, i2, "a")
            if alpha > a0:
                for k in I:
                    put(0, k, "b")
                for l in J:
                    put(0, n + l, "b")
    for k in idx:
        for l in idx:
            if k != l:
                put(k, n + l, "c")
    return out


# Lattices -----------------------------------------------------------------

def hermite_normal_form(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style HNF of the lattice spanned by integer vectors (zero rows dropped)."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    d = len(rows[0])
    out = []
    r = 0
    for c in range(d):
        # Euclid on column c among rows r.. until a single nonzero remains.
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda i: abs(rows[i][c]))
            for i in nz:
                if i != p:
                    q = rows[i][c] // rows[p][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[p])]
        nz = [i for i in range(r, len(rows)) if rows[i][c]]
        if not nz:
            continue
        p = nz[0]
        rows[r], rows[p] = rows[p], rows[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    out = [tuple(x) for x in rows[:r] if any(x)]
    return out


def same_lattice(u: Sequence[Sequence[int]], v: Sequence[Sequence[int]]) -> bool:
    return hermite_normal_form(u) == hermite_normal_form(v)


def _nearest_on_segment(points, a: int, b: int) -> int:
    """Index of the point on segment [a, b] closest to a (other than a)."""
    pa, pb = points[a], points[b]
    u = [y - x for x, y in zip(pa, pb)]
    k = max(range(len(u)), key=lambda j: abs(u[j]))
    best, best_t = b, Fraction(1)
    for i, p in enumerate(points):
        if i in (a, b) or not _collinear(points, [i], a, b):
            continue
        t = Fraction(p[k] - pa[k], u[k])
        if 0 < t < best_t:
            best, best_t = i, t
    return best


@dataclass
class VertexVerdict:
    simple: bool
    lattice_ok: bool
    details: dict

    @property
    def verdict(self) -> str:
        return "pass" if self.simple and self.lattice_ok else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def vertex_smoothness_test(W) -> VertexVerdict:
    """Simple polytope and edge vectors generating M_v at every vertex.

    The edge vector at v points to the first weight met along the edge, so
    an edge carrying an intermediate weight contributes the short step (for
    (2,1,1) the edge from w_1 to w_2 contributes w_0 - w_1).
    """
    W = W if isinstance(W, WeightSystem) else WeightSystem(tuple(W))
    P = hull_edges(W)
    pts = P.points
    d = W.n - 1
    simple = True
    lattice_ok = True
    details = {}
    for v in P.vertices:
        nb = P.neighbours(v)
        if len(nb) != d:
            simple = False
        steps = [_nearest_on_segment(pts, v, b) for b in nb]
        evecs = [tuple(y - x for x, y in zip(pts[v], pts[s])) for s in steps]
        allv = [tuple(y - x for x, y in zip(pts[v], p)) for p in pts]
        ok = same_lattice(evecs, allv)
        lattice_ok = lattice_ok and ok
        details[W.point_name(v)] = {"edges": [W.point_name(b) for b in nb], "edge_vectors": evecs, "lattice_ok": ok}
    return VertexVerdict(simple, lattice_ok, details)


def weight_tuples(n: int, max_weight: int, a0: int | None = None) -> list[tuple[int, ...]]:
    """All coprime non-increasing positive n-tuples with a_0 <= max_weight."""
    out = []
    firsts = [a0] if a0 is not None else range(1, max_weight + 1)

    def rec(prefix, top, left):
        if left == 0:
            g = 0
            for x in prefix:
                g = gcd(g, x)
            if g == 1:
                out.append(tuple(prefix))
            return
        for x in range(top, 0, -1):
            rec(prefix + [x], x, left - 1)

    for first in firsts:
        rec([first], first, n - 1)
    return out


def _classify_slice(job) -> list[tuple[int, ...]]:
    n, bound, a0 = job
    return [a for a in weight_tuples(n, bound, a0) if vertex_smoothness_test(a).passed]


def classify_smooth_candidates(dim: int, max_weight: int) -> list[tuple[int, ...]]:
    """Tuples of polytope dimension `dim` passing the vertex test, largest first."""
    if not 2 <= dim <= 5:
        raise ValueError("dimension must be between 2 and 5")
    if max_weight < 2:
        raise ValueError("max_weight must be at least 2")
    n = dim + 1
    slices = pmap(_classify_slice, [(n, max_weight, a0) for a0 in range(1, max_weight + 1)])
    found = [a for s in slices for a in s]
    return sorted(found, reverse=True)
