"""Dense matrices over the rationals and the exact elimination kernels."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import NotSkew, OddSize, SizeMismatch

ZERO = Fraction(0)
ONE = Fraction(1)

# Above this many entries mat_kernel switches to the multimodular route.
MODULAR_THRESHOLD = 4000


def Q(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


def rat_to_json(x: Fraction) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_from_json(s) -> Fraction:
    return Q(s)


class RatMatrix:
    """Immutable dense matrix with Fraction entries, stored as a tuple of rows."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(Q(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise SizeMismatch("ragged rows")
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> RatMatrix:
        return cls([[ZERO] * c for _ in range(r)], c)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> RatMatrix:
        if not cols:
            return cls([[] for _ in range(nrows or 0)], 0)
        return cls(list(zip(*cols)), len(cols))

    @classmethod
    def block(cls, blocks: Sequence[Sequence[RatMatrix]]) -> RatMatrix:
        rows = []
        for brow in blocks:
            for i in range(brow[0].nrows):
                rows.append([x for b in brow for x in b.rows[i]])
        return cls(rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(list(zip(*self.rows)) if self.nrows else [], self.nrows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def tolists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.ncols, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(rat_to_json(x) for x in r) for r in self.rows)
        return f"RatMatrix([{body}])"

    def _check_same(self, other):
        if self.shape != other.shape:
            raise SizeMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._check_same(other)
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        self._check_same(other)
        return RatMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> RatMatrix:
        return RatMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, c) -> RatMatrix:
        c = Q(c)
        return RatMatrix([[c * a for a in r] for r in self.rows], self.ncols)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.ncols != other.nrows:
                raise SizeMismatch(f"{self.shape} @ {other.shape}")
            cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
            return RatMatrix([[_dot(r, c) for c in cols] for r in self.rows], other.ncols)
        v = tuple(other)
        if len(v) != self.ncols:
            raise SizeMismatch("vector length")
        return tuple(_dot(r, v) for r in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self == self.T

    def is_skew(self) -> bool:
        return self == -self.T

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> RatMatrix:
        return RatMatrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def rank(self) -> int:
        return rank(self)

    def det(self) -> Fraction:
        return det(self)

    def inverse(self) -> RatMatrix:
        return inverse(self)

    def kernel(self) -> list[tuple[Fraction, ...]]:
        return mat_kernel(self)

    def to_json(self) -> list[list[str]]:
        return [[rat_to_json(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> RatMatrix:
        return cls([[Q(x) for x in r] for r in data])


def _dot(a, b) -> Fraction:
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def dot(a, b) -> Fraction:
    if len(a) != len(b):
        raise SizeMismatch("vector length")
    return _dot(a, b)


def _as_rows(M) -> tuple[list[list[Fraction]], int]:
    if isinstance(M, RatMatrix):
        return [list(r) for r in M.rows], M.ncols
    rows = [[Q(x) for x in r] for r in M]
    return rows, (len(rows[0]) if rows else 0)


def rref(M, ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    rows, nc = _as_rows(M)
    if ncols is not None:
        nc = ncols
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(nc):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        nzc = [j for j in range(c, nc) if prow[j]]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    for j in nzc:
                        ri[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(M) -> int:
    return len(rref(M)[1])


def _kernel_from_rref(R: list[list[Fraction]], pivots: list[int], nc: int) -> list[tuple]:
    free = [j for j in range(nc) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [ZERO] * nc
        v[f] = ONE
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def kernel_fraction(M) -> list[tuple[Fraction, ...]]:
    """Canonical kernel basis by plain Fraction elimination."""
    rows, nc = _as_rows(M)
    R, piv = rref(rows, nc)
    raw = _kernel_from_rref(R, piv, nc)
    if not raw:
        return []
    K, _ = rref(raw, nc)
    return [tuple(v) for v in K]


def mat_kernel(M) -> list[tuple[Fraction, ...]]:
    """Basis of {v : M v = 0}.

    The basis is returned as the rows of a reduced row echelon matrix (leading
    entry 1), so the output depends only on the kernel itself.  Large systems
    go through the certified multimodular solver, which returns the same
    canonical basis.
    """
    rows, nc = _as_rows(M)
    if len(rows) * nc > MODULAR_THRESHOLD:
        from .modular import kernel_multimodular

        return kernel_multimodular(rows, nc)
    return kernel_fraction(rows)


def row_space_basis(vectors, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Canonical (RREF) basis of the span of the given vectors."""
    rows, nc = _as_rows(vectors)
    if ncols is not None:
        nc = ncols
    R, _ = rref(rows, nc)
    return [tuple(r) for r in R]


def in_span(v, basis) -> bool:
    if not basis:
        return all(x == 0 for x in v)
    return rank(list(basis) + [list(v)]) == rank(list(basis))


def det(M) -> Fraction:
    rows, nc = _as_rows(M)
    n = len(rows)
    if n != nc:
        raise SizeMismatch("determinant of a non-square matrix")
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        piv = rows[c][c]
        d *= piv
        for i in range(c + 1, n):
            f = rows[i][c]
            if f:
                f = f / piv
                ri, rc = rows[i], rows[c]
                for j in range(c + 1, n):
                    if rc[j]:
                        ri[j] -= f * rc[j]
    return d


def solve(M, b) -> tuple[Fraction, ...] | None:
    """One solution of M x = b, or None when inconsistent."""
    rows, nc = _as_rows(M)
    aug = [r + [Q(x)] for r, x in zip(rows, b)]
    R, piv = rref(aug, nc + 1)
    if piv and piv[-1] == nc:
        return None
    x = [ZERO] * nc
    for row, p in zip(R, piv):
        x[p] = row[nc]
    return tuple(x)


def inverse(M) -> RatMatrix:
    from ..errors import SingularInput

    rows, nc = _as_rows(M)
    n = len(rows)
    if n != nc:
        raise SizeMismatch("inverse of a non-square matrix")
    aug = [r + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(rows)]
    R, piv = rref(aug, 2 * n)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise SingularInput("matrix is singular")
    return RatMatrix([r[n:] for r in R], n)


def pfaffian(M) -> Fraction:
    """Pfaffian by skew-symmetric Gaussian elimination.

    Normalized so the block-diagonal matrix with blocks [[0,1],[-1,0]] has
    Pfaffian +1; then pfaffian(M)**2 == det(M).
    """
    rows, nc = _as_rows(M)
    n = len(rows)
    if n != nc:
        raise SizeMismatch("Pfaffian of a non-square matrix")
    for i in range(n):
        for j in range(i, n):
            if rows[i][j] != -rows[j][i]:
                raise NotSkew(f"entry ({i},{j}) breaks skew symmetry")
    if n % 2:
        raise OddSize(f"size {n} is odd")
    A = rows
    pf = ONE
    for k in range(0, n - 1, 2):
        kp = next((j for j in range(k + 1, n) if A[k][j]), None)
        if kp is None:
            return ZERO
        if kp != k + 1:
            A[k + 1], A[kp] = A[kp], A[k + 1]
            for r in A:
                r[k + 1], r[kp] = r[kp], r[k + 1]
            pf = -pf
        piv = A[k][k + 1]
        pf *= piv
        tau = [A[k][j] / piv for j in range(k + 2, n)]
        col = [A[i][k + 1] for i in range(k + 2, n)]
        for a in range(len(tau)):
            ra = A[k + 2 + a]
            for b in range(len(tau)):
                delta = tau[a] * col[b] - col[a] * tau[b]
                if delta:
                    ra[k + 2 + b] += delta
    return pf


class SpanTester:
    """Membership tests against a fixed span, reusing one echelon basis."""

    def __init__(self, vectors, ncols: int):
        self.ncols = ncols
        rows = [list(v) for v in vectors]
        self.rows, self.pivots = rref(rows, ncols) if rows else ([], [])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def residual(self, v) -> list[Fraction]:
        v = [Q(x) for x in v]
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                for j in range(p, self.ncols):
                    if row[j]:
                        v[j] -= c * row[j]
        return v

    def contains(self, v) -> bool:
        return not any(self.residual(v))
