"""Varieties of pairs of matrices (A, B) under the trace form.

V is the space of pairs of m x m matrices with
omega((A, B), (A', B')) = tr(A B'^T - A' B^T).  Inside P(V) live

* Y: pairs with A B^T = B^T A = lambda^2 Id,
* X_inv(m): closure of [g, (g^-1)^T] with det g = 1,
* X_deg(m, k): A B^T = B^T A = 0, rank A <= k, rank B <= m - k,

together with symmetric and skew-symmetric variants.  Coordinates are
a_11, ..., a_mm, b_11, ..., b_mm in lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ._parallel import pmap
from .errors import (
    CenterNotOnVariety,
    FlavorViolation,
    InvalidFlavor,
    InvalidRange,
    NotUnimodular,
    SingularInput,
)
from .exactalg import (
    ONE,
    ZERO,
    LaurentPoly,
    Q,
    RatMatrix,
    det,
    inverse,
    pfaffian,
    polynomial_eval,
    rank,
    rat_to_json,
)
from .symplinalg import SymplecticSpace
from .varieties import ParamVariety, random_rationals

FLAVORS = ("full", "symmetric", "skew")


# The space --------------------------------------------------------------

@dataclass(frozen=True)
class MatrixPairSpec:
    m: int
    flavor: str
    ambient: SymplecticSpace
    index: tuple  # the (i, j) positions used as coordinates for each matrix

    @property
    def half(self) -> int:
        return len(self.index)

    def flatten(self, p: PairPoint) -> tuple[Fraction, ...]:
        check_flavor(p, self.flavor)
        return tuple(p.A[i, j] for i, j in self.index) + tuple(p.B[i, j] for i, j in self.index)

    def unflatten(self, v: Sequence) -> PairPoint:
        v = [Q(x) for x in v]
        h = self.half
        return PairPoint(self._fill(v[:h]), self._fill(v[h:]))

    def _fill(self, vals) -> RatMatrix:
        M = [[ZERO] * self.m for _ in range(self.m)]
        for (i, j), x in zip(self.index, vals):
            M[i][j] = x
            if i != j:
                M[j][i] = x if self.flavor == "symmetric" else (-x if self.flavor == "skew" else M[j][i])
        return RatMatrix(M, self.m)

    def omega(self, p: PairPoint, q: PairPoint) -> Fraction:
        return self.ambient.omega(self.flatten(p), self.flatten(q))


def build_matpair_space(m: int, flavor: str = "full") -> MatrixPairSpec:
    """The pair space with the form matrix of tr(A B'^T - A' B^T).

    On the symmetric and skew subspaces the pairing sums a_ij b'_ij over all
    entries, so an off-diagonal coordinate carries weight 2.
    """
    if flavor not in FLAVORS:
        raise InvalidFlavor(f"unknown flavor {flavor!r}")
    if m < 2:
        raise InvalidFlavor("matrix size must be at least 2")
    if flavor == "skew" and m % 2:
        raise InvalidFlavor("skew pairs need even matrix size")
    if flavor == "full":
        index = tuple((i, j) for i in range(m) for j in range(m))
    elif flavor == "symmetric":
        index = tuple((i, j) for i in range(m) for j in range(i, m))
    else:
        index = tuple((i, j) for i in range(m) for j in range(i + 1, m))
    h = len(index)
    weights = [ONE if (flavor == "full" or i == j) else Fraction(2) for i, j in index]
    J = [[ZERO] * (2 * h) for _ in range(2 * h)]
    for k, w in enumerate(weights):
        J[k][h + k] = w
        J[h + k][k] = -w
    return MatrixPairSpec(m, flavor, SymplecticSpace(RatMatrix(J, 2 * h)), index)


@dataclass(frozen=True)
class PairPoint:
    A: RatMatrix
    B: RatMatrix

    @property
    def m(self) -> int:
        return self.A.nrows

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "B": self.B.to_json()}

    @classmethod
    def from_json(cls, data) -> PairPoint:
        return cls(RatMatrix.from_json(data["A"]), RatMatrix.from_json(data["B"]))

    def __add__(self, other: PairPoint) -> PairPoint:
        return PairPoint(self.A + other.A, self.B + other.B)

    def scale(self, c) -> PairPoint:
        return PairPoint(self.A.scale(c), self.B.scale(c))


def check_flavor(p: PairPoint, flavor: str) -> None:
    if flavor == "symmetric" and not (p.A.is_symmetric() and p.B.is_symmetric()):
        raise FlavorViolation("pair is not symmetric")
    if flavor == "skew" and not (p.A.is_skew() and p.B.is_skew()):
        raise FlavorViolation("pair is not skew-symmetric")


def trace_omega(p: PairPoint, q: PairPoint) -> Fraction:
    """tr(A B'^T - A' B^T) computed directly from the matrices."""
    m = p.m
    return sum((p.A[i, j] * q.B[i, j] - q.A[i, j] * p.B[i, j] for i in range(m) for j in range(m)), ZERO)


def E(m: int, i: int, j: int) -> RatMatrix:
    return RatMatrix([[ONE if (r, c) == (i, j) else ZERO for c in range(m)] for r in range(m)], m)


def p1(m: int) -> PairPoint:
    return PairPoint(E(m, m - 1, m - 1), RatMatrix.zeros(m, m))


def p2(m: int) -> PairPoint:
    return PairPoint(RatMatrix.zeros(m, m), E(m, m - 1, m - 1))


# Group actions ----------------------------------------------------------

def act(g: RatMatrix, h: RatMatrix, p: PairPoint) -> PairPoint:
    """(g, h) . (A, B) = (g^T A h, g^-1 B (h^-1)^T)."""
    return PairPoint(g.T @ p.A @ h, inverse(g) @ p.B @ inverse(h).T)


def act_tangent(x: RatMatrix, y: RatMatrix, p: PairPoint) -> PairPoint:
    """Derivative of the action at the identity in direction (x, y) in sl x sl."""
    return PairPoint(x.T @ p.A + p.A @ y, -(x @ p.B) - p.B @ y.T)


def psi(mu, p: PairPoint) -> PairPoint:
    mu = Q(mu)
    return PairPoint(p.A.scale(mu), p.B.scale(1 / mu))


def random_unimodular(m: int, *key: int, steps: int | None = None) -> RatMatrix:
    """Product of elementary matrices I + c E_ij and a diagonal diag(q, 1/q, 1, ...)."""
    steps = steps if steps is not None else 3 * m
    vals = random_rationals(3 * steps + 1, *key)
    g = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    q = vals[-1]
    g[0][0] = q
    g[1][1] = 1 / q
    for s in range(steps):
        i = int(abs(vals[3 * s].numerator)) % m
        j = (i + 1 + int(abs(vals[3 * s + 1].numerator)) % (m - 1)) % m
        c = vals[3 * s + 2]
        # row_i += c * row_j keeps the determinant.
        g[i] = [a + c * b for a, b in zip(g[i], g[j])]
    return RatMatrix(g, m)


# Symbolic helpers -------------------------------------------------------

def symbolic_pair(m: int) -> tuple[list[list[LaurentPoly]], list[list[LaurentPoly]]]:
    """Matrices of coordinate functions a_ij, b_ij on the full pair space."""
    nv = 2 * m * m
    x = LaurentPoly.gens(nv)
    A = [[x[i * m + j] for j in range(m)] for i in range(m)]
    B = [[x[m * m + i * m + j] for j in range(m)] for i in range(m)]
    return A, B


def sym_det(M: list[list[LaurentPoly]], nvars: int | None = None) -> LaurentPoly:
    n = len(M)
    if n == 0:
        return LaurentPoly.constant(1, nvars if nvars is not None else 0)
    nv = M[0][0].nvars
    memo: dict[tuple, LaurentPoly] = {}

    def rec(r: int, cols: tuple) -> LaurentPoly:
        if r == n:
            return LaurentPoly.constant(1, nv)
        if cols in memo:
            return memo[cols]
        total = LaurentPoly(nv)
        for pos, c in enumerate(cols):
            if M[r][c].is_zero():
                continue
            sub = rec(r + 1, cols[:pos] + cols[pos + 1:])
            term = M[r][c] * sub
            total = total + (term if pos % 2 == 0 else -term)
        memo[cols] = total
        return total

    return rec(0, tuple(range(n)))


def _sub(M, rows, cols):
    return [[M[i][j] for j in cols] for i in rows]


def _complement(idx, m):
    return [x for x in range(m) if x not in idx]


def _matmul_sym(X, Y):
    n, k, p = len(X), len(Y), len(Y[0])
    nv = X[0][0].nvars
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = LaurentPoly(nv)
            for l in range(k):
                if X[i][l] and Y[l][j]:
                    acc = acc + X[i][l] * Y[l][j]
            row.append(acc)
        out.append(row)
    return out


def _transpose(X):
    return [list(r) for r in zip(*X)]


def y_quadrics(m: int) -> list[tuple[str, LaurentPoly]]:
    """The 2(m-1) + 2m(m-1) quadrics cutting out Y."""
    A, B = symbolic_pair(m)
    out = []
    row0 = sum((A[0][k] * B[0][k] for k in range(m)), LaurentPoly(2 * m * m))
    col0 = sum((A[k][0] * B[k][0] for k in range(m)), LaurentPoly(2 * m * m))
    for i in range(1, m):
        out.append((f"rows:{i}", sum((A[i][k] * B[i][k] for k in range(m)), LaurentPoly(2 * m * m)) - row0))
    for i in range(m):
        for j in range(m):
            if i != j:
                out.append((f"AB^T:{i},{j}", sum((A[i][k] * B[j][k] for k in range(m)), LaurentPoly(2 * m * m))))
    for i in range(1, m):
        out.append((f"cols:{i}", sum((A[k][i] * B[k][i] for k in range(m)), LaurentPoly(2 * m * m)) - col0))
    for i in range(m):
        for j in range(m):
            if i != j:
                out.append((f"B^TA:{i},{j}", sum((B[k][i] * A[k][j] for k in range(m)), LaurentPoly(2 * m * m))))
    return out


def half_minor_quadrics(m: int) -> list[tuple[str, LaurentPoly]]:
    """det A_{I,J} - (-1)^(sum I + sum J) det B_{I',J'} for |I| = |J| = m/2.

    A_{I,J} drops rows I and columns J; B_{I',J'} keeps rows I and columns J.
    """
    if m % 2:
        raise InvalidRange("half minors need even m")
    A, B = symbolic_pair(m)
    k = m // 2
    out = []
    for I in combinations(range(m), k):
        for J in combinations(range(m), k):
            sign = -1 if (sum(I) + sum(J)) % 2 else 1
            lhs = sym_det(_sub(A, _complement(I, m), _complement(J, m)))
            rhs = sym_det(_sub(B, I, J))
            out.append((f"I={I},J={J}", lhs - rhs * sign))
    return out


def xdeg_generators(m: int, k: int) -> list[tuple[str, LaurentPoly]]:
    """Entries of A B^T and B^T A, (k+1)-minors of A and (m-k+1)-minors of B."""
    if not 0 <= k <= m:
        raise InvalidRange("k must lie in 0..m")
    A, B = symbolic_pair(m)
    ABt = _matmul_sym(A, _transpose(B))
    BtA = _matmul_sym(_transpose(B), A)
    out = []
    for i in range(m):
        for j in range(m):
            out.append((f"AB^T:{i},{j}", ABt[i][j]))
            out.append((f"B^TA:{i},{j}", BtA[i][j]))
    for M, r, tag in ((A, k + 1, "A"), (B, m - k + 1, "B")):
        if r > m:
            continue
        for rows in combinations(range(m), r):
            for cols in combinations(range(m), r):
                out.append((f"minor{tag}:{rows},{cols}", sym_det(_sub(M, rows, cols))))
    return [(name, f) for name, f in out if not f.is_zero()]


# Membership tests -------------------------------------------------------

def _is_scalar(M: RatMatrix) -> Fraction | None:
    c = M[0, 0]
    if M == RatMatrix.identity(M.nrows).scale(c):
        return c
    return None


@dataclass
class YMembership:
    member: bool
    lambda_sq: Fraction | None
    quadrics: dict = field(default_factory=dict)

    @property
    def all_quadrics_vanish(self) -> bool:
        return all(v == 0 for v in self.quadrics.values())


def flatten_full(p: PairPoint) -> list[Fraction]:
    return [x for r in p.A.rows for x in r] + [x for r in p.B.rows for x in r]


def y_membership(p: PairPoint) -> YMembership:
    ABt = p.A @ p.B.T
    BtA = p.B.T @ p.A
    c1, c2 = _is_scalar(ABt), _is_scalar(BtA)
    member = c1 is not None and c2 is not None and c1 == c2
    x = flatten_full(p)
    vals = {name: polynomial_eval(f, x) for name, f in y_quadrics(p.m)}
    return YMembership(member, c1 if member else None, vals)


def minor(M: RatMatrix, rows, cols) -> Fraction:
    return det(M.submatrix(list(rows), list(cols))) if rows else ONE


def cubic_minor_residuals(p: PairPoint) -> dict[tuple, Fraction]:
    """det(A_ij) a_kl - (-1)^(i+j+k+l) b_ij det(B_kl) over all i, j, k, l."""
    m = p.m
    cofA = {(i, j): minor(p.A, _complement([i], m), _complement([j], m)) for i in range(m) for j in range(m)}
    cofB = {(i, j): minor(p.B, _complement([i], m), _complement([j], m)) for i in range(m) for j in range(m)}
    out = {}
    for (i, j), dA in cofA.items():
        for (k, l), dB in cofB.items():
            s = -1 if (i + j + k + l) % 2 else 1
            out[(i, j, k, l)] = dA * p.A[k, l] - s * p.B[i, j] * dB
    return out


def minor_pair_residuals(p: PairPoint, k: int) -> dict[tuple, Fraction]:
    """Residuals of the minor relations between A and B for index size k.

    For m = 2k: det A_{I,J} - (-1)^(sum I + sum J) det B_{I',J'}.
    For k < m/2: (det A_{I,J})^2 - (det B_{I',J'})^2 (a_1 . b_1)^(m - 2k).
    """
    m = p.m
    out = {}
    row_dot = sum((p.A[0, j] * p.B[0, j] for j in range(m)), ZERO)
    for I in combinations(range(m), k):
        for J in combinations(range(m), k):
            dA = minor(p.A, _complement(I, m), _complement(J, m))
            dB = minor(p.B, I, J)
            if 2 * k == m:
                sign = -1 if (sum(I) + sum(J)) % 2 else 1
                out[(I, J)] = dA - sign * dB
            elif 2 * k < m:
                out[(I, J)] = dA * dA - dB * dB * row_dot ** (m - 2 * k)
    return out


@dataclass
class Battery:
    point: PairPoint
    counts: dict
    failures: dict

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())


def equation_battery(p: PairPoint) -> Battery:
    """Y quadrics, the cubic minor relations and the minor corollaries at p."""
    m = p.m
    counts, failures = {}, {}
    y = y_membership(p)
    counts["Y"] = len(y.quadrics)
    failures["Y"] = [name for name, v in y.quadrics.items() if v]
    cubic = cubic_minor_residuals(p)
    counts["cubic"] = len(cubic)
    failures["cubic"] = [key for key, v in cubic.items() if v]
    for k in range(0, m // 2 + 1):
        res = minor_pair_residuals(p, k)
        if res:
            counts[f"minors:{k}"] = len(res)
            failures[f"minors:{k}"] = [key for key, v in res.items() if v]
    return Battery(p, counts, failures)


def xinv_point(g: RatMatrix, flavor: str = "full") -> tuple[PairPoint, Battery | YMembership]:
    """The X_inv point of g with its equation checks.

    full: (g, (g^-1)^T) with det g = 1; symmetric: (g, g^-1) with g
    symmetric and det g = 1; skew: (g, -g^-1) with g skew and Pf(g) = 1.
    The full flavor returns the whole Battery; the variants return the Y test.
    """
    if flavor not in FLAVORS:
        raise InvalidFlavor(flavor)
    if flavor == "skew":
        if not g.is_skew():
            raise FlavorViolation("g is not skew-symmetric")
        if pfaffian(g) != 1:
            raise NotUnimodular("Pfaffian is not 1")
        p = PairPoint(g, -inverse(g))
        return p, y_membership(p)
    if det(g) != 1:
        raise NotUnimodular(f"det g = {det(g)}")
    if flavor == "symmetric":
        if not g.is_symmetric():
            raise FlavorViolation("g is not symmetric")
        p = PairPoint(g, inverse(g))
        return p, y_membership(p)
    p = PairPoint(g, inverse(g).T)
    return p, equation_battery(p)


def xdeg_membership(p: PairPoint, k: int) -> bool:
    m = p.m
    if not 0 <= k <= m:
        raise InvalidRange("k must lie in 0..m")
    if not (p.A @ p.B.T).is_zero() or not (p.B.T @ p.A).is_zero():
        return False
    return rank(p.A) <= k and rank(p.B) <= m - k


def minor_identity_check(g: RatMatrix, I: Sequence[int], J: Sequence[int]) -> bool:
    """det A_{I,J} == (-1)^(sum I + sum J) det B_{I',J'} for A = g, B = (g^-1)^T.

    Indices are 0-based; the sign is unchanged from 1-based indexing since
    |I| = |J|.
    """
    if det(g) != 1:
        raise SingularInput("det g must be 1")
    m = g.nrows
    I, J = sorted(I), sorted(J)
    if len(I) != len(J):
        raise InvalidRange("index sets differ in size")
    A, B = g, inverse(g).T
    sign = -1 if (sum(I) + sum(J)) % 2 else 1
    return minor(A, _complement(I, m), _complement(J, m)) == sign * minor(B, I, J)


# Tangent cones ----------------------------------------------------------

def tangent_cone_lowest(gens: Sequence[LaurentPoly], chart_var: int | None, center: Sequence) -> list[LaurentPoly]:
    """Lowest-degree homogeneous parts at `center` in the affine chart chart_var = 1.

    The center is rescaled so its chart coordinate is 1, the chart variable is
    set to 1 and the remaining coordinates are shifted to the center.  The
    results live in the same ring with the chart variable absent.  With
    chart_var=None the generators are already affine and are only shifted.
    """
    center = [Q(c) for c in center]
    if chart_var is not None:
        if center[chart_var] == 0:
            raise CenterNotOnVariety("center has zero chart coordinate")
        s = center[chart_var]
        center = [c / s for c in center]
    out = []
    for f in gens:
        g = f
        shift = list(center)
        if chart_var is not None:
            # Dehomogenize: every power of the chart variable becomes 1.
            terms = {}
            for e, c in f.terms.items():
                e2 = list(e)
                e2[chart_var] = 0
                e2 = tuple(e2)
                terms[e2] = terms.get(e2, ZERO) + c
            g = LaurentPoly(f.nvars, terms)
            shift[chart_var] = ZERO
        g = g.shift(shift)
        if g.terms and min(g.degrees()) == 0:
            raise CenterNotOnVariety("a generator does not vanish at the center")
        out.append(g.lowest_part())
    return out


@dataclass
class ConeSignal:
    all_linear: bool
    linear_forms: int
    surviving: list


def all_linear(parts: Sequence[LaurentPoly]) -> ConeSignal:
    """Does every nonlinear lowest part vanish modulo the linear ones?

    The linear parts are solved for pivot variables and substituted into the
    higher-degree parts; any nonzero remainder is a surviving nonlinear
    equation of the tangent cone.
    """
    parts = [p for p in parts if not p.is_zero()]
    linear = [p for p in parts if p.is_homogeneous(1)]
    higher = [p for p in parts if not p.is_homogeneous(1)]
    nv = parts[0].nvars if parts else 0
    from .exactalg import rref

    rows = [[p.terms.get(tuple(int(i == j) for i in range(nv)), ZERO) for j in range(nv)] for p in linear]
    R, piv = rref(rows, nv) if rows else ([], [])
    x = LaurentPoly.gens(nv)
    images = list(x)
    for row, pc in zip(R, piv):
        images[pc] = -sum((x[j] * row[j] for j in range(nv) if j != pc and row[j]), LaurentPoly(nv))
    surviving = []
    for p in higher:
        r = p.substitute(images) if nv else p
        if not r.is_zero():
            surviving.append(r)
    return ConeSignal(not surviving, len(piv), surviving)


def xdeg_cone_signals(m: int, k: int) -> dict[str, ConeSignal]:
    """Tangent-cone signals of X_deg(m, k) at p1 and p2 (where they lie on it)."""
    gens = [f for _, f in xdeg_generators(m, k)]
    out = {}
    chart = m * m - 1
    for name, p, var in (("p1", p1(m), chart), ("p2", p2(m), m * m + chart)):
        if not xdeg_membership(p, k):
            continue
        out[name] = all_linear(tangent_cone_lowest(gens, var, flatten_full(p)))
    return out


def xdeg_smooth_signal(m: int, k: int) -> bool:
    return all(s.all_linear for s in xdeg_cone_signals(m, k).values())


# Spinor map -------------------------------------------------------------

def _pf_minor(g, i: int, j: int):
    keep = [r for r in range(6) if r not in (i - 1, j - 1)]
    return pf_generic([[g[a][b] for b in keep] for a in keep])


def pf_generic(M):
    """Pfaffian by expansion along the first row; works for LaurentPoly or Fraction entries."""
    n = len(M)
    if n == 0:
        return 1
    total = None
    for j in range(1, n):
        if not M[0][j]:
            continue
        keep = [r for r in range(1, n) if r != j]
        term = M[0][j] * pf_generic([[M[a][b] for b in keep] for a in keep])
        term = term if j % 2 == 1 else -term
        total = term if total is None else total + term
    return total if total is not None else M[0][0] * 0


def spinor_pair(g) -> tuple[list[list], list[list]]:
    """The pair (A, B) attached to a 6 x 6 skew matrix g (entries Fraction or LaurentPoly).

    A's upper 3 x 3 block holds the 4 x 4 Pfaffian minors Pf_{i, j+3} with a
    checkerboard sign, its last row and column hold entries of g, and B holds
    the complementary data, with -Pf(g) in the corner.  The sign pattern is
    the one for which every Y quadric and every half-minor relation vanishes.
    """
    G = lambda i, j: g[i - 1][j - 1]
    P = lambda i, j: _pf_minor(g, i, j)
    A = [
        [-P(1, 4), P(1, 5), -P(1, 6), G(2, 3)],
        [P(2, 4), -P(2, 5), P(2, 6), -G(1, 3)],
        [-P(3, 4), P(3, 5), -P(3, 6), G(1, 2)],
        [-G(5, 6), G(4, 6), -G(4, 5), 1],
    ]
    B = [
        [G(1, 4), G(1, 5), G(1, 6), P(2, 3)],
        [G(2, 4), G(2, 5), G(2, 6), P(1, 3)],
        [G(3, 4), G(3, 5), G(3, 6), P(1, 2)],
        [-P(5, 6), -P(4, 6), -P(4, 5), -pf_generic(g)],
    ]
    return A, B


def random_skew(size: int, *key: int) -> RatMatrix:
    vals = random_rationals(size * (size - 1) // 2, *key)
    M = [[ZERO] * size for _ in range(size)]
    it = iter(vals)
    for i in range(size):
        for j in range(i + 1, size):
            v = next(it)
            M[i][j] = v
            M[j][i] = -v
    return RatMatrix(M, size)


@dataclass
class SpinorCheck:
    trials: int
    y_quadrics: int
    half_minors: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def _spinor_trial(job):
    seed, t, g = job
    if g is None:
        g = random_skew(6, seed, t)
    A, B = spinor_pair([list(r) for r in g.rows])
    x = [Q(v) for r in A for v in r] + [Q(v) for r in B for v in r]
    bad = [name for name, f in y_quadrics(4) if polynomial_eval(f, x)]
    bad += [name for name, f in half_minor_quadrics(4) if polynomial_eval(f, x)]
    return bad


def s6_identity_check(trials: int = 25, seed: int = 0, symbolic: bool = False,
                      extra: Sequence[RatMatrix] = ()) -> SpinorCheck:
    """Do the spinor pairs satisfy the 30 Y quadrics and 36 half-minor quadrics?

    By default each identity is tested by exact evaluation at random rational
    skew matrices; `symbolic=True` expands everything as polynomials in the
    15 entries of g instead.
    """
    yq = y_quadrics(4)
    hq = half_minor_quadrics(4)
    failures = []
    if symbolic:
        x = LaurentPoly.gens(15)
        g = [[LaurentPoly(15)] * 6 for _ in range(6)]
        g = [list(r) for r in g]
        it = iter(x)
        for i in range(6):
            for j in range(i + 1, 6):
                v = next(it)
                g[i][j] = v
                g[j][i] = -v
        A, B = spinor_pair(g)
        one = LaurentPoly.constant(1, 15)
        coords = [v if isinstance(v, LaurentPoly) else one * v for r in A for v in r]
        coords += [v if isinstance(v, LaurentPoly) else one * v for r in B for v in r]
        for name, f in yq + hq:
            if not f.substitute(coords).is_zero():
                failures.append(("symbolic", name))
        return SpinorCheck(0, len(yq), len(hq), failures)
    jobs = [(seed, -1 - i, g) for i, g in enumerate(extra)] + [(seed, t, None) for t in range(trials)]
    for (s, t, _), bad in zip(jobs, pmap(_spinor_trial, jobs)):
        failures.extend((t, name) for name in bad)
    return SpinorCheck(len(jobs), len(yq), len(hq), failures)


# Singularity probe ------------------------------------------------------

@dataclass
class ProbeResult:
    m: int
    k: int
    alpha: int
    beta: int
    direction: PairPoint
    on_curve: bool
    in_orbit: bool
    rank_A: int
    rank_B: int


def singularity_probe(m: int, k: int) -> ProbeResult:
    """Follow a diagonal curve in INV^m into p1 and read off its limiting direction."""
    if m < 4 or not 0 <= k <= -(-m // 2) - 2:
        raise InvalidRange(f"need m >= 4 and 0 <= k <= ceil(m/2) - 2, got m={m}, k={k}")
    beta = 2
    alpha = m - 2 * k - 2
    a_exp = [alpha] * k + [alpha + beta] * (m - k - 1) + [0]
    b_exp = [alpha + beta] * k + [alpha] * (m - k - 1) + [2 * alpha + beta]
    t = LaurentPoly.var(0, 1)
    zero = LaurentPoly(1)
    A = [[t ** a_exp[i] if i == j else zero for j in range(m)] for i in range(m)]
    B = [[t ** b_exp[i] if i == j else zero for j in range(m)] for i in range(m)]
    coords = [v for r in A for v in r] + [v for r in B for v in r]
    on_curve = all(f.substitute(coords).is_zero() for _, f in y_quadrics(m))
    lam_sq = t ** (2 * alpha + beta)
    ABt = _matmul_sym(A, _transpose(B))
    on_curve = on_curve and all(
        ABt[i][j] == (lam_sq if i == j else zero) for i in range(m) for j in range(m)
    )
    # det(A)^2 = (lambda^2)^m puts the pair on INV^m itself, not a psi-twist of it.
    on_curve = on_curve and sym_det(A) ** 2 == lam_sq ** m
    # Lowest order of x(t) - p1 in the chart a_mm = 1.
    diffs = [c - (1 if idx == m * m - 1 else 0) for idx, c in enumerate(coords)]
    low = min(min(f.degrees()) for f in diffs if not f.is_zero())
    vals = [f.terms.get((low,), ZERO) for f in diffs]
    direction = PairPoint(
        RatMatrix([vals[i * m:(i + 1) * m] for i in range(m)], m),
        RatMatrix([vals[m * m + i * m: m * m + (i + 1) * m] for i in range(m)], m),
    )
    rA, rB = rank(direction.A), rank(direction.B)
    last_zero = all(direction.A[m - 1, j] == 0 and direction.A[j, m - 1] == 0
                    and direction.B[m - 1, j] == 0 and direction.B[j, m - 1] == 0 for j in range(m))
    in_orbit = (
        rA == k and rB == m - k - 1 and last_zero
        and (direction.A @ direction.B.T).is_zero() and (direction.B.T @ direction.A).is_zero()
    )
    return ProbeResult(m, k, alpha, beta, direction, on_curve, in_orbit, rA, rB)


# Parametrized families --------------------------------------------------

def _unit_triangular(m: int, x: list, lower: bool, start: int, shift: bool):
    """Unit triangular matrix of LaurentPolys using parameters from `start`."""
    nv = len(x)
    one = LaurentPoly.constant(1, nv)
    M = [[one if i == j else LaurentPoly(nv) for j in range(m)] for i in range(m)]
    k = start
    for i in range(m):
        for j in range(m):
            if (lower and i > j) or (not lower and i < j):
                M[i][j] = x[k] - 1 if shift else x[k]
                k += 1
    return M, k


def _inverse_unit_lower(L):
    """Inverse of a unit lower triangular matrix by forward substitution."""
    m = len(L)
    nv = L[0][0].nvars
    one = LaurentPoly.constant(1, nv)
    inv = [[one if i == j else LaurentPoly(nv) for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(i):
            acc = LaurentPoly(nv)
            for l in range(j, i):
                if L[i][l] and inv[l][j]:
                    acc = acc + L[i][l] * inv[l][j]
            inv[i][j] = -acc
    return inv


def _diag_sl(x: list, start: int, m: int):
    """diag(d_1, ..., d_{m-1}, 1/(d_1 ... d_{m-1})) and its inverse."""
    nv = len(x)
    ds = x[start:start + m - 1]
    prod = LaurentPoly.constant(1, nv)
    for d in ds:
        prod = prod * d
    D = list(ds) + [prod ** -1]
    Dinv = [d ** -1 for d in ds] + [prod]
    return D, Dinv, start + m - 1


def _diag_mul(Dv, M, left=True):
    if left:
        return [[Dv[i] * M[i][j] for j in range(len(M))] for i in range(len(M))]
    return [[M[i][j] * Dv[j] for j in range(len(M))] for i in range(len(M))]


def _pair_variety(spec: MatrixPairSpec, A, B, params: int, label: str) -> ParamVariety:
    comps = tuple(A[i][j] for i, j in spec.index) + tuple(B[i][j] for i, j in spec.index)
    return ParamVariety(spec.ambient, params, comps, label)


def build_xinv(m: int, centered: bool = False) -> ParamVariety:
    """X_inv(m) through g = L D U with L, U unit triangular and det D = 1.

    With `centered`, the triangular entries are s - 1 so that the all-ones
    parameter point maps to [Id, Id]; the default keeps the polynomials small.
    """
    spec = build_matpair_space(m, "full")
    k = m * m - 1
    x = LaurentPoly.gens(k)
    L, pos = _unit_triangular(m, x, True, 0, centered)
    U, pos = _unit_triangular(m, x, False, pos, centered)
    D, Dinv, pos = _diag_sl(x, pos, m)
    g = _matmul_sym(_diag_mul(D, L, left=False), U)
    Linv = _inverse_unit_lower(L)
    Uinv_T = _inverse_unit_lower(_transpose(U))
    # (g^-1)^T = (L^-1)^T D^-1 (U^-1)^T
    B = _matmul_sym(_diag_mul(Dinv, _transpose(Linv), left=False), Uinv_T)
    return _pair_variety(spec, g, B, k, f"xinv-{m}" + ("-centered" if centered else ""))


def build_xinv_sym(m: int, centered: bool = False) -> ParamVariety:
    """Symmetric X_inv(m): [A, A^-1] with A = L D L^T and det A = 1."""
    spec = build_matpair_space(m, "symmetric")
    k = m * (m - 1) // 2 + m - 1
    x = LaurentPoly.gens(k)
    L, pos = _unit_triangular(m, x, True, 0, centered)
    D, Dinv, pos = _diag_sl(x, pos, m)
    A = _matmul_sym(_diag_mul(D, L, left=False), _transpose(L))
    Linv = _inverse_unit_lower(L)
    B = _matmul_sym(_diag_mul(Dinv, _transpose(Linv), left=False), Linv)
    return _pair_variety(spec, A, B, k, f"xinv-sym-{m}")


def build_xinv_skew(size: int) -> ParamVariety:
    """Skew X_inv: [A, -A^-1] with A = L K L^T skew of Pfaffian 1.

    L is block unit lower triangular with 2 x 2 identity blocks on the
    diagonal and K is block diagonal with blocks [[0, d], [-d, 0]].
    """
    if size % 2 or size < 4:
        raise InvalidFlavor("skew family needs even size >= 4")
    spec = build_matpair_space(size, "skew")
    r = size // 2
    below = [(i, j) for i in range(size) for j in range(size) if i // 2 > j // 2]
    k = len(below) + r - 1
    x = LaurentPoly.gens(k)
    one = LaurentPoly.constant(1, k)
    zero = LaurentPoly(k)
    L = [[one if i == j else zero for j in range(size)] for i in range(size)]
    for n_, (i, j) in enumerate(below):
        L[i][j] = x[n_]
    ds = x[len(below):]
    prod = one
    for d in ds:
        prod = prod * d
    dvals = list(ds) + [prod ** -1]
    K = [[zero] * size for _ in range(size)]
    Kinv = [[zero] * size for _ in range(size)]
    for b in range(r):
        i = 2 * b
        K[i][i + 1] = dvals[b]
        K[i + 1][i] = -dvals[b]
        Kinv[i][i + 1] = -(dvals[b] ** -1)
        Kinv[i + 1][i] = dvals[b] ** -1
    A = _matmul_sym(_matmul_sym(L, K), _transpose(L))
    Linv = _inverse_unit_lower(L)
    Binner = _matmul_sym(_matmul_sym(_transpose(Linv), Kinv), Linv)
    B = [[-v for v in row] for row in Binner]
    return _pair_variety(spec, A, B, k, f"xinv-skew-{size}")


def build_xdeg(m: int, k: int) -> ParamVariety:
    """X_deg(m, k) through A = [I; X] M [I; Y]^T and B = [-X^T; I] N [-Y^T; I]^T.

    X, Y are (m-k) x k, M is k x k and N is (m-k) x (m-k): m^2 parameters,
    matching the cone dimension.
    """
    if not 0 <= k <= m:
        raise InvalidRange("k must lie in 0..m")
    spec = build_matpair_space(m, "full")
    nv = m * m
    x = iter(LaurentPoly.gens(nv))
    one = LaurentPoly.constant(1, nv)
    zero = LaurentPoly(nv)
    l = m - k
    X = [[next(x) for _ in range(k)] for _ in range(l)]
    Y = [[next(x) for _ in range(k)] for _ in range(l)]
    M = [[next(x) for _ in range(k)] for _ in range(k)]
    N = [[next(x) for _ in range(l)] for _ in range(l)]
    Ik = [[one if i == j else zero for j in range(k)] for i in range(k)]
    Il = [[one if i == j else zero for j in range(l)] for i in range(l)]
    P = Ik + X
    Qm = Ik + Y
    R = [[-v for v in row] for row in _transpose(X)] + Il if k else Il
    S = [[-v for v in row] for row in _transpose(Y)] + Il if k else Il
    if k:
        A = _matmul_sym(_matmul_sym(P, M), _transpose(Qm))
    else:
        A = [[zero] * m for _ in range(m)]
    if l:
        B = _matmul_sym(_matmul_sym(R, N), _transpose(S))
    else:
        B = [[zero] * m for _ in range(m)]
    return _pair_variety(spec, A, B, nv, f"xdeg-{m},{k}")


def build_segre_xdeg21() -> ParamVariety:
    """P^1 x P^1 x P^1 as X_deg(2, 1) via [xi_1 mu nu^T, xi_2 (adjugate pattern)].

    Affine chart mu = (1, s), nu = (1, u); parameters (xi_1, xi_2, s, u).
    """
    spec = build_matpair_space(2, "full")
    xi1, xi2, s, u = LaurentPoly.gens(4)
    one = LaurentPoly.constant(1, 4)
    mu = [one, s]
    nu = [one, u]
    A = [[xi1 * mu[0] * nu[0], xi1 * mu[0] * nu[1]], [xi1 * mu[1] * nu[0], xi1 * mu[1] * nu[1]]]
    B = [[xi2 * mu[1] * nu[1], -(xi2 * mu[1] * nu[0])], [-(xi2 * mu[0] * nu[1]), xi2 * mu[0] * nu[0]]]
    return _pair_variety(spec, A, B, 4, "segre-p1p1p1")


def identity_tangent_certificate(m: int, samples: int | None = None, seed: int = 0) -> tuple[int, bool]:
    """Tangent space of X_inv(m) at [Id, Id] from the group action.

    Spanned by (Id, Id) and (x^T + y, -x - y^T) for traceless x, y; returns
    its dimension and whether it is Lagrangian.  The default draws 2 m^2
    directions, comfortably more than the m^2 - 1 needed.
    """
    samples = 2 * m * m if samples is None else samples
    spec = build_matpair_space(m, "full")
    I = RatMatrix.identity(m)
    base = PairPoint(I, I)
    vecs = [spec.flatten(base)]
    for s in range(samples):
        vals = random_rationals(2 * m * m, seed, s)
        xm = [vals[i * m:(i + 1) * m] for i in range(m)]
        ym = [vals[m * m + i * m: m * m + (i + 1) * m] for i in range(m)]
        xm[m - 1][m - 1] = -sum((xm[i][i] for i in range(m - 1)), ZERO)
        ym[m - 1][m - 1] = -sum((ym[i][i] for i in range(m - 1)), ZERO)
        vecs.append(spec.flatten(act_tangent(RatMatrix(xm, m), RatMatrix(ym, m), base)))
    from .exactalg import row_space_basis

    basis = row_space_basis(vecs, spec.ambient.dim)
    lag = all(spec.ambient.omega(u, v) == 0 for u in basis for v in basis)
    return len(basis), lag
