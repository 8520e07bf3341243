"""Symplectic vector spaces over Q.

Forms, perpendicular complements, subspace classes, symplectic reduction,
the splitting gl = sp + wsp, the map q -> 2 J M(q), and bracket closure
tests for matrices and for polynomials under the Poisson bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import SizeMismatch, Unsupported
from .exactalg import (
    ONE,
    ZERO,
    LaurentPoly,
    Q,
    RatMatrix,
    det,
    inverse,
    mat_kernel,
    rank,
    row_space_basis,
    rref,
)


def standard_J(n: int) -> RatMatrix:
    """[[0, I_n], [-I_n, 0]]."""
    rows = []
    for i in range(2 * n):
        r = [ZERO] * (2 * n)
        if i < n:
            r[n + i] = ONE
        else:
            r[i - n] = -ONE
        rows.append(r)
    return RatMatrix(rows, 2 * n)


@dataclass(frozen=True)
class SymplecticSpace:
    J: RatMatrix

    def __post_init__(self):
        J = self.J
        if not J.is_square() or J.nrows % 2:
            raise SizeMismatch("form matrix must be square of even size")
        if not J.is_skew():
            raise ValueError("form matrix is not skew-symmetric")
        if J.nrows and det(J) == 0:
            raise ValueError("form is degenerate")

    @classmethod
    def standard(cls, n: int) -> SymplecticSpace:
        return cls(standard_J(n))

    @property
    def dim(self) -> int:
        return self.J.nrows

    @property
    def n(self) -> int:
        return self.J.nrows // 2

    def omega(self, v, w) -> Fraction:
        Jw = self.J @ w
        return sum((a * b for a, b in zip(v, Jw) if a), ZERO)

    def is_standard(self) -> bool:
        return self.J == standard_J(self.n)

    def to_json(self) -> dict:
        if self.is_standard():
            return {"standard": self.n}
        return {"dim": self.dim, "J": self.J.to_json()}

    @classmethod
    def from_json(cls, data) -> SymplecticSpace:
        if "standard" in data:
            return cls.standard(int(data["standard"]))
        J = RatMatrix.from_json(data["J"])
        if "dim" in data and int(data["dim"]) != J.nrows:
            raise SizeMismatch("dim disagrees with J")
        return cls(J)


@dataclass(frozen=True)
class Subspace:
    ambient: SymplecticSpace
    basis: tuple = field(default=())

    def __post_init__(self):
        basis = tuple(tuple(Q(x) for x in v) for v in self.basis)
        for v in basis:
            if len(v) != self.ambient.dim:
                raise SizeMismatch("basis vector length")
        if basis and rank(basis) != len(basis):
            raise ValueError("basis vectors are dependent")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def span(cls, ambient: SymplecticSpace, vectors) -> Subspace:
        vectors = [list(v) for v in vectors]
        return cls(ambient, tuple(row_space_basis(vectors, ambient.dim)) if vectors else ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        if not self.basis:
            return all(x == 0 for x in v)
        return rank(list(self.basis) + [list(v)]) == self.dim

    def contains_subspace(self, other: Subspace) -> bool:
        return all(self.contains(v) for v in other.basis)

    def perp(self) -> Subspace:
        return perp(self)

    def intersect(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient == other.ambient and self.dim == other.dim
                and self.contains_subspace(other))

    def __hash__(self):
        return hash((self.ambient.J, tuple(row_space_basis(self.basis, self.ambient.dim)) if self.basis else ()))


def perp(W: Subspace) -> Subspace:
    """{v : omega(w, v) = 0 for all w in W}."""
    S = W.ambient
    if not W.basis:
        return Subspace(S, tuple(tuple(ONE if i == j else ZERO for j in range(S.dim)) for i in range(S.dim)))
    rows = [list(r.rows[0]) for r in (RatMatrix([w]) @ S.J for w in W.basis)]
    return Subspace(S, tuple(mat_kernel(rows)))


def intersect(U: Subspace, W: Subspace) -> Subspace:
    if not U.basis or not W.basis:
        return Subspace(U.ambient, ())
    # Solve sum a_i u_i - sum b_j w_j = 0 and map back through the u's.
    cols = list(U.basis) + [tuple(-x for x in w) for w in W.basis]
    M = RatMatrix.from_columns(cols)
    vecs = []
    for k in mat_kernel(M):
        a = k[: U.dim]
        vecs.append([sum((c * u[i] for c, u in zip(a, U.basis)), ZERO) for i in range(U.ambient.dim)])
    return Subspace.span(U.ambient, vecs)


SUBSPACE_CLASSES = ("lagrangian", "symplectic", "isotropic", "coisotropic", "none")


@dataclass(frozen=True)
class Classification:
    cls: str
    perp: Subspace
    isotropic: bool
    coisotropic: bool
    symplectic: bool

    @property
    def lagrangian(self) -> bool:
        return self.isotropic and self.coisotropic


def classify_subspace(W: Subspace) -> Classification:
    """Class of W by containment tests against its perpendicular.

    Checked in the order lagrangian, symplectic, isotropic, coisotropic.  A
    nonzero subspace meeting its perp trivially is symplectic (so the whole
    space is symplectic); the zero subspace reads as isotropic.  The
    individual flags are kept on the result.
    """
    P = perp(W)
    iso = P.contains_subspace(W)
    coiso = W.contains_subspace(P)
    sym = intersect(W, P).dim == 0
    if iso and coiso:
        c = "lagrangian"
    elif sym and W.dim > 0:
        c = "symplectic"
    elif iso:
        c = "isotropic"
    elif coiso:
        c = "coisotropic"
    elif sym:
        c = "symplectic"
    else:
        c = "none"
    return Classification(c, P, iso, coiso, sym)


def _extend_to_basis(vectors: list, dim: int) -> list:
    """Append standard basis vectors until the list spans Q^dim."""
    out = [list(v) for v in vectors]
    r = rank(out) if out else 0
    for i in range(dim):
        if r == dim:
            break
        e = [ONE if j == i else ZERO for j in range(dim)]
        if rank(out + [e]) > r:
            out.append(e)
            r += 1
    return out


@dataclass(frozen=True)
class Reduction:
    """W/(W ∩ W^perp) with its induced form.

    `project` is a matrix on ambient coordinates: for w in W, project @ w are
    the coordinates of [w] in the quotient basis `lifts` (vectors of W).
    """

    source: Subspace
    radical: Subspace
    quotient: SymplecticSpace
    project: RatMatrix
    lifts: tuple

    def image(self, L: Subspace) -> Subspace:
        """The image of L ∩ W in the quotient."""
        LW = intersect(L, self.source)
        return Subspace.span(self.quotient, [self.project @ v for v in LW.basis])

    def __call__(self, v):
        return self.project @ v


def symplectic_reduce(W: Subspace) -> Reduction:
    S = W.ambient
    rad = intersect(W, perp(W))
    # Complete a radical basis to a basis of W; the extra vectors lift the quotient.
    chosen = [list(v) for v in rad.basis]
    r = len(chosen)
    lifts = []
    for w in W.basis:
        if rank(chosen + [list(w)]) > r:
            chosen.append(list(w))
            lifts.append(tuple(w))
            r += 1
    full = _extend_to_basis(chosen, S.dim)
    P = RatMatrix.from_columns(full)
    Pinv = inverse(P)
    k = rad.dim
    proj = RatMatrix(Pinv.rows[k:k + len(lifts)], S.dim)
    Jq = RatMatrix([[S.omega(a, b) for b in lifts] for a in lifts], len(lifts))
    return Reduction(W, rad, SymplecticSpace(Jq), proj, tuple(lifts))


def in_sp(g: RatMatrix, S: SymplecticSpace) -> bool:
    return (g.T @ S.J + S.J @ g).is_zero()


def in_wsp(g: RatMatrix, S: SymplecticSpace) -> bool:
    return (g.T @ S.J - S.J @ g).is_zero()


def sp_wsp_split(g: RatMatrix, S: SymplecticSpace) -> tuple[RatMatrix, RatMatrix]:
    """g = g_plus + g_minus with g_plus in sp(V) and g_minus in wsp(V).

    Uses the omega-adjoint g* = J^-1 g^T J; for the standard J this is the
    familiar g_plus = (g + J g^T J) / 2.
    """
    if g.shape != (S.dim, S.dim):
        raise SizeMismatch(f"{g.shape} does not act on dimension {S.dim}")
    adj = inverse(S.J) @ g.T @ S.J
    half = Fraction(1, 2)
    return (g - adj).scale(half), (g + adj).scale(half)


@dataclass(frozen=True)
class QuadraticForm:
    ambient: SymplecticSpace
    M: RatMatrix

    def __post_init__(self):
        if self.M.shape != (self.ambient.dim, self.ambient.dim):
            raise SizeMismatch("form matrix size")
        if not self.M.is_symmetric():
            raise ValueError("quadratic form matrix must be symmetric")

    def __call__(self, v) -> Fraction:
        Mv = self.M @ v
        return sum((a * b for a, b in zip(v, Mv)), ZERO)

    @classmethod
    def from_poly(cls, ambient: SymplecticSpace, f: LaurentPoly) -> QuadraticForm:
        return cls(ambient, quadric_matrix(f))

    def to_poly(self) -> LaurentPoly:
        d = self.ambient.dim
        terms = {}
        for i in range(d):
            for j in range(i, d):
                c = self.M[i, j] if i == j else 2 * self.M[i, j]
                if c:
                    e = [0] * d
                    e[i] += 1
                    e[j] += 1
                    terms[tuple(e)] = c
        return LaurentPoly(d, terms)


def quadric_matrix(f: LaurentPoly) -> RatMatrix:
    """Symmetric M with f(v) = v^T M v; cross terms split in halves."""
    if not f.is_homogeneous(2) or not f.is_polynomial():
        raise Unsupported("not a quadratic form")
    d = f.nvars
    M = [[ZERO] * d for _ in range(d)]
    for e, c in f.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            M[i][i] += c
        else:
            M[i][j] += c / 2
            M[j][i] += c / 2
    return RatMatrix(M, d)


def rho(q: QuadraticForm) -> RatMatrix:
    """The Hamiltonian field of q: -2 J^-1 M(q), an element of sp(V).

    For the standard J (where J^-1 = -J) this is 2 J M(q).
    """
    S = q.ambient
    if S.is_standard():
        return (S.J @ q.M).scale(2)
    return (inverse(S.J) @ q.M).scale(-2)


def _flat(m: RatMatrix) -> list:
    return [x for r in m.rows for x in r]


@dataclass(frozen=True)
class Closure:
    closed: bool
    witness: tuple | None = None
    bracket: object = None


def is_bracket_closed(span: Sequence[RatMatrix]) -> Closure:
    """Is the linear span of the matrices closed under [a, b] = ab - ba?"""
    mats = list(span)
    if not mats:
        return Closure(True)
    flats = [_flat(m) for m in mats]
    basis, _ = rref(flats)
    r = len(basis)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            br = mats[i] @ mats[j] - mats[j] @ mats[i]
            if br.is_zero():
                continue
            if rank(basis + [_flat(br)]) > r:
                return Closure(False, (i, j), br)
    return Closure(True)


def poisson_bracket(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """{f, g} = sum_i df/dx_i dg/dy_i - df/dy_i dg/dx_i, with variables x_1..x_n, y_1..y_n."""
    if f.nvars != g.nvars or f.nvars % 2:
        raise SizeMismatch("Poisson bracket needs a common ring in 2n variables")
    n = f.nvars // 2
    out = LaurentPoly(f.nvars)
    for i in range(n):
        out = out + f.diff(i) * g.diff(n + i) - f.diff(n + i) * g.diff(i)
    return out


def _coefficient_rows(polys: Sequence[LaurentPoly]) -> tuple[list, list]:
    monos = sorted({e for p in polys for e in p.terms})
    index = {e: k for k, e in enumerate(monos)}
    rows = []
    for p in polys:
        r = [ZERO] * len(monos)
        for e, c in p.terms.items():
            r[index[e]] = c
        rows.append(r)
    return rows, monos


def poly_in_span(f: LaurentPoly, polys: Sequence[LaurentPoly]) -> bool:
    if f.is_zero():
        return True
    rows, _ = _coefficient_rows(list(polys) + [f])
    base = rows[:-1]
    r = rank(base) if base else 0
    return rank(rows) == r


def is_poisson_closed_mod_span(polys: Sequence[LaurentPoly]) -> Closure:
    polys = list(polys)
    if not polys:
        return Closure(True)
    degs = set()
    for p in polys:
        if not p.is_polynomial() or not p.is_homogeneous():
            raise Unsupported("inputs must be homogeneous polynomials")
        degs |= p.degrees()
    if degs != {2}:
        raise Unsupported(f"span membership is only tested for quadrics, got degrees {sorted(degs)}")
    rows, monos = _coefficient_rows(polys)
    index = {e: k for k, e in enumerate(monos)}
    basis, _ = rref(rows)
    r = len(basis)
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            br = poisson_bracket(polys[i], polys[j])
            if br.is_zero():
                continue
            if any(e not in index for e in br.terms):
                return Closure(False, (i, j), br)
            row = [ZERO] * len(monos)
            for e, c in br.terms.items():
                row[index[e]] = c
            if rank(basis + [row]) > r:
                return Closure(False, (i, j), br)
    return Closure(True)


# Eigenvalues restricted to rational roots -------------------------------

def charpoly(g: RatMatrix) -> list[Fraction]:
    """Coefficients c_0..c_n of det(t I - g), via Faddeev-LeVerrier."""
    n = g.nrows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = RatMatrix.zeros(n, n)
    I = RatMatrix.identity(n)
    for k in range(1, n + 1):
        Mk = g @ Mk + I.scale(coeffs[n - k + 1])
        AM = g @ Mk
        coeffs[n - k] = -sum((AM[i, i] for i in range(n)), ZERO) / k
    return coeffs


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Distinct rational roots of sum c_i t^i (rational root theorem)."""
    c = [Q(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    roots = []
    while c and c[0] == 0:
        c.pop(0)
        if ZERO not in roots:
            roots.append(ZERO)
    if len(c) <= 1:
        return roots
    d = lcm(*(x.denominator for x in c))
    ints = [int(x * d) for x in c]
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            for s in (1, -1):
                t = Fraction(s * p, q)
                if t in roots:
                    continue
                if sum(a * t ** i for i, a in enumerate(ints)) == 0:
                    roots.append(t)
    return sorted(roots)


@dataclass(frozen=True)
class Eigen:
    spaces: dict
    all_rational: bool


def rational_eigenspaces(g: RatMatrix) -> Eigen:
    """Eigenspaces for the rational eigenvalues of g.

    all_rational is True when these account for every root of the
    characteristic polynomial counted with multiplicity and g is
    diagonalizable over Q.
    """
    n = g.nrows
    roots = rational_roots(charpoly(g))
    spaces = {}
    for lam in roots:
        spaces[lam] = mat_kernel(g - RatMatrix.identity(n).scale(lam))
    total = sum(len(v) for v in spaces.values())
    return Eigen(spaces, total == n)
