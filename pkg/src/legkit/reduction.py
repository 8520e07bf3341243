"""Hyperplane sections with symplectic reduction, joins and conormal extensions.

For a hyperplane H = ker(eta) in V, the line h = H^perp lies in H and the
reduction H/h is again symplectic.  Projecting X ∩ H from h gives a
Legendrian subvariety of P(H/h) for generic H.  Sampling X ∩ H means solving
one Laurent equation in one parameter; those roots are found numerically,
everything else here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .errors import (
    DegenerateSection,
    NoParametrization,
    NoRootFound,
    SingularInput,
    SizeMismatch,
    SolverFailed,
)
from .exactalg import (
    ONE,
    ZERO,
    LaurentPoly,
    Q,
    RatMatrix,
    inverse,
    mat_kernel,
    rank,
    row_space_basis,
    solve,
)
from .symplinalg import Subspace, SymplecticSpace, symplectic_reduce
from .varieties import ParamVariety, random_rationals, tangent_rows


@dataclass(frozen=True)
class FloatTolerance:
    residual_bound: float = 1e-8
    root_residual: float = 1e-12


@dataclass(frozen=True)
class HyperplaneSpec:
    ambient: SymplecticSpace
    eta: tuple
    h: tuple

    @classmethod
    def from_eta(cls, ambient: SymplecticSpace, eta: Sequence) -> HyperplaneSpec:
        """H = ker(eta) with h the solution of h^T J = eta, so omega(h, .) = eta."""
        eta = tuple(Q(c) for c in eta)
        if len(eta) != ambient.dim:
            raise SizeMismatch(f"covector has {len(eta)} entries, expected {ambient.dim}")
        if not any(eta):
            raise ValueError("eta is zero")
        h = solve(ambient.J.T, list(eta))
        return cls(ambient, eta, tuple(h))

    @classmethod
    def from_h(cls, ambient: SymplecticSpace, h: Sequence) -> HyperplaneSpec:
        """The hyperplane h^perp."""
        h = tuple(Q(c) for c in h)
        if not any(h):
            raise ValueError("h is zero")
        eta = tuple(sum((h[i] * ambient.J[i, j] for i in range(ambient.dim)), ZERO) for j in range(ambient.dim))
        return cls(ambient, eta, h)

    @property
    def subspace(self) -> Subspace:
        return Subspace.span(self.ambient, mat_kernel(RatMatrix([list(self.eta)], self.ambient.dim)))

    def to_json(self) -> dict:
        from .exactalg import rat_to_json

        return {"eta": [rat_to_json(c) for c in self.eta], "h": [rat_to_json(c) for c in self.h]}


def random_hyperplane(S: SymplecticSpace, *key: int) -> HyperplaneSpec:
    return HyperplaneSpec.from_eta(S, random_rationals(S.dim, *key))


def hyperplane_through(X: ParamVariety, t0: Sequence, *key: int) -> HyperplaneSpec:
    """A random hyperplane containing x(t0), so that t0 is an exact rational root."""
    x0 = X.point(t0)
    eta = random_rationals(X.ambient.dim, *key)
    j = max(range(len(x0)), key=lambda i: x0[i] != 0)
    rest = sum((eta[i] * x0[i] for i in range(len(x0)) if i != j), ZERO)
    eta[j] = -rest / x0[j]
    if not any(eta):
        eta[j] = ONE  # pragma: no cover - needs x0 proportional to a basis vector
    return HyperplaneSpec.from_eta(X.ambient, eta)


# One-parameter restriction ----------------------------------------------

def restrict_to_line(F: Sequence[LaurentPoly], fixed: Sequence, free: int) -> list[dict[int, Fraction]]:
    """Each component as {exponent of t_free: exact coefficient} with the other parameters fixed."""
    out = []
    for f in F:
        terms: dict[int, Fraction] = {}
        for e, c in f.terms.items():
            v = c
            for i, k in enumerate(e):
                if i != free and k:
                    v *= Q(fixed[i]) ** k
            terms[e[free]] = terms.get(e[free], ZERO) + v
        out.append({k: v for k, v in terms.items() if v})
    return out


def _section_poly(comps: list[dict[int, Fraction]], eta: Sequence[Fraction]) -> dict[int, Fraction]:
    total: dict[int, Fraction] = {}
    for c, comp in zip(eta, comps):
        if not c:
            continue
        for k, v in comp.items():
            total[k] = total.get(k, ZERO) + c * v
    return {k: v for k, v in total.items() if v}


def _real_roots(poly: dict[int, Fraction], tol: FloatTolerance) -> list[float]:
    """Nonzero real roots of a univariate Laurent polynomial, Newton-polished and gated."""
    if not poly:
        return []
    lo, hi = min(poly), max(poly)
    if lo == hi:
        return []
    coeffs = [float(poly.get(k, 0)) for k in range(hi, lo - 1, -1)]
    scale = max(abs(c) for c in coeffs)
    coeffs = [c / scale for c in coeffs]
    p = np.poly1d(coeffs)
    dp = p.deriv()
    roots = []
    for r in np.roots(coeffs):
        if abs(r.imag) > 1e-7 * max(1.0, abs(r)):
            continue
        t = float(r.real)
        for _ in range(50):
            d = dp(t)
            if d == 0:
                break
            step = p(t) / d
            t -= step
            if abs(step) <= 1e-16 * max(1.0, abs(t)):
                break
        if t == 0:
            continue
        mag = sum(abs(c) * abs(t) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs))
        if abs(p(t)) <= tol.root_residual * max(mag, 1e-300):
            if all(abs(t - s) > 1e-9 * max(1.0, abs(t)) for s in roots):
                roots.append(t)
    return sorted(roots)


def _exact_root(poly: dict[int, Fraction], t: float) -> Fraction | None:
    q = Fraction(t).limit_denominator(10**6)
    if q and sum((c * q ** k for k, c in poly.items()), ZERO) == 0:
        return q
    return None


def _float_point(F: Sequence[LaurentPoly], t: Sequence[float]) -> np.ndarray:
    out = np.zeros(len(F))
    for i, f in enumerate(F):
        s = 0.0
        for e, c in f.terms.items():
            v = float(c)
            for tj, k in zip(t, e):
                if k:
                    v *= tj ** k
            s += v
        out[i] = s
    return out


def _float_jacobian(F: Sequence[LaurentPoly], t: Sequence[float]) -> np.ndarray:
    k = len(t)
    Jm = np.zeros((len(F), k))
    for i, f in enumerate(F):
        for e, c in f.terms.items():
            base = float(c)
            for tj, p in zip(t, e):
                if p:
                    base *= tj ** p
            for j, p in enumerate(e):
                if p:
                    Jm[i, j] += base * p / t[j]
    return Jm


def _orth(M: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of M."""
    if M.size == 0:
        return M.reshape(M.shape[0], 0)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if not s.size or s[0] == 0:
        return U[:, :0]
    r = int(np.sum(s > rtol * s[0]))
    return U[:, :r]


def _null(M: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    _, s, Vt = np.linalg.svd(M)
    top = s[0] if s.size else 0.0
    r = int(np.sum(s > rtol * top)) if top else 0
    return Vt[r:].T


# Hyperplane reduction ---------------------------------------------------

@dataclass
class ReducedSample:
    trial: int
    params: list
    exact: bool
    tangent_dim: int
    residual: float


@dataclass
class ReductionReport:
    label: str
    n: int
    samples: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    residual_bound: float = 1e-8

    @property
    def max_residual(self) -> float:
        return max((s.residual for s in self.samples), default=0.0)

    @property
    def verdict(self) -> bool:
        return bool(self.samples) and all(
            s.tangent_dim == self.n - 1 and s.residual < self.residual_bound for s in self.samples
        )

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "reduced_dim_expected": self.n - 1,
            "samples": [
                {"trial": s.trial, "params": s.params, "exact": s.exact,
                 "tangent_dim": s.tangent_dim, "residual": s.residual}
                for s in self.samples
            ],
            "skipped": self.skipped,
            "max_residual": self.max_residual,
            "residual_bound": self.residual_bound,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class _Quotient:
    project: RatMatrix
    J: RatMatrix
    project_f: np.ndarray
    J_f: np.ndarray


def _quotient(H: HyperplaneSpec) -> _Quotient:
    R = symplectic_reduce(H.subspace)
    P = R.project
    Jq = R.quotient.J
    return _Quotient(P, Jq, np.array([[float(v) for v in r] for r in P.rows]),
                     np.array([[float(v) for v in r] for r in Jq.rows]))


def section_points(X: ParamVariety, H: HyperplaneSpec, trial: int, seed: int,
                   tol: FloatTolerance = FloatTolerance()) -> tuple[list, int, list]:
    """Parameter points of X ∩ H on one random coordinate line.

    Returns (points, free index, fixed parameters); each point is a list whose
    entries are Fractions, except the free one which is a float unless the
    root is exactly rational.
    """
    if X.params == 0:
        raise NoRootFound("a constant map has no free parameter")
    fixed = random_rationals(X.params + 1, seed, trial)
    free = int(abs(fixed[-1].numerator)) % X.params
    fixed = fixed[:-1]
    poly = _section_poly(restrict_to_line(X.map, fixed, free), H.eta)
    pts = []
    for r in _real_roots(poly, tol):
        t = list(fixed)
        q = _exact_root(poly, r)
        t[free] = q if q is not None else r
        pts.append(t)
    return pts, free, fixed


def _reduce_exact(X: ParamVariety, H: HyperplaneSpec, Qt: _Quotient, t: list) -> tuple[int, Fraction]:
    rows = tangent_rows(X, t)
    T = row_space_basis(rows, X.ambient.dim)
    # T ∩ H: combinations c with eta(sum c_i T_i) = 0.
    etas = [[sum((a * b for a, b in zip(v, H.eta)), ZERO) for v in T]]
    K = mat_kernel(RatMatrix(etas, len(T)))
    sect = [[sum((c[i] * T[i][j] for i in range(len(T))), ZERO) for j in range(X.ambient.dim)] for c in K]
    img = row_space_basis([list(Qt.project @ v) for v in sect], Qt.project.nrows) if sect else []
    worst = ZERO
    for a in img:
        Ja = Qt.J @ a
        for b in img:
            w = abs(sum((x * y for x, y in zip(b, Ja)), ZERO))
            worst = max(worst, w)
    return len(img), worst


def _reduce_float(X: ParamVariety, H: HyperplaneSpec, Qt: _Quotient, t: list) -> tuple[int, float]:
    tf = [float(v) for v in t]
    x = _float_point(X.map, tf)
    Jm = _float_jacobian(X.map, tf)
    T = _orth(np.column_stack([x, Jm]))
    eta = np.array([float(c) for c in H.eta])
    N = _null((eta @ T).reshape(1, -1))
    sect = T @ N
    img = _orth(Qt.project_f @ sect)
    if img.shape[1] == 0:
        return 0, 0.0
    W = img.T @ Qt.J_f @ img
    return img.shape[1], float(np.max(np.abs(W)))


# Lines tried per trial before giving up; a random line can miss the real locus.
LINE_ATTEMPTS = 16


def _reduce_trial(job):
    X, H, Qt, trial, seed, tol = job
    pts = []
    for attempt in range(LINE_ATTEMPTS):
        try:
            pts, _, _ = section_points(X, H, trial + 1000 * attempt, seed, tol)
        except NoRootFound as exc:
            return trial, None, str(exc)
        if pts:
            break
    if not pts:
        return trial, None, f"no real root on {LINE_ATTEMPTS} sampled lines"
    out = []
    for t in pts:
        exact = all(isinstance(v, Fraction) for v in t)
        if exact:
            d, w = _reduce_exact(X, H, Qt, t)
            res = float(w)
        else:
            d, res = _reduce_float(X, H, Qt, t)
        out.append(ReducedSample(trial, [str(v) if isinstance(v, Fraction) else v for v in t], exact, d, res))
    return trial, out, None


def hyperplane_reduce(X: ParamVariety, H: HyperplaneSpec, samples: int = 5, seed: int = 0,
                      tol: FloatTolerance = FloatTolerance(), points: Sequence[Sequence] = ()) -> ReductionReport:
    """Project X ∩ H from h into P(H/h) and test the image for being Legendrian.

    Each trial fixes all parameters but one, solves eta(x(t)) = 0 for the free
    one and checks the reduced tangent space of every real root found.
    `points` adds exact parameter points of X ∩ H, run entirely in rationals.
    """
    Qt = _quotient(H)
    report = ReductionReport(X.label, X.n, residual_bound=tol.residual_bound)
    for i, t in enumerate(points):
        t = [Q(v) for v in t]
        if sum((a * b for a, b in zip(H.eta, X.point(t))), ZERO) != 0:
            raise ValueError("explicit point is not on the hyperplane")
        d, w = _reduce_exact(X, H, Qt, t)
        report.samples.append(ReducedSample(-1 - i, [str(v) for v in t], True, d, float(w)))
    jobs = [(X, H, Qt, trial, seed, tol) for trial in range(samples)]
    for trial, out, why in pmap(_reduce_trial, jobs):
        if out is None:
            report.skipped.append({"trial": trial, "reason": why})
        else:
            report.samples.extend(out)
    if not report.samples:
        raise DegenerateSection(f"no trial of {samples} met the hyperplane")
    return report


# Secant probe -----------------------------------------------------------

@dataclass
class SecantReport:
    trials: int
    failures: int
    skipped: list = field(default_factory=list)


def _rank_float(rows, rtol=1e-9) -> int:
    s = np.linalg.svd(np.array(rows, dtype=float), compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s.size and s[0] else 0


def _probe_point(X, H, trial, seed, tol, which, avoid=None):
    """A real point of X ∩ H, distinct in P(V) from `avoid` when given."""
    for attempt in range(LINE_ATTEMPTS):
        pts, _, _ = section_points(X, H, 2 * trial + which + 1000 * attempt, seed, tol)
        for t in pts:
            if avoid is None:
                return t
            x = _float_point(X.map, [float(v) for v in t])
            if _rank_float([avoid, x]) == 2:
                return t
    raise SolverFailed(f"no real point of X ∩ H found for trial {trial}")


def secant_probe(X: ParamVariety, h: Sequence, trials: int = 50, seed: int = 0, tol: float = 1e-8,
                 pairs: Sequence[tuple[Sequence, Sequence]] = ()) -> SecantReport:
    """Count pairs (x1, x2) in X ∩ h^perp with h on the line through them.

    Random pairs are found numerically; explicit parameter `pairs` are tested
    exactly first and counted as extra trials.
    """
    H = HyperplaneSpec.from_h(X.ambient, h)
    ftol = FloatTolerance(residual_bound=tol)
    report = SecantReport(trials + len(pairs), 0)
    hv = [Q(c) for c in h]
    for t1, t2 in pairs:
        x1, x2 = X.point([Q(v) for v in t1]), X.point([Q(v) for v in t2])
        if rank([list(x1), list(x2), hv]) <= 2:
            report.failures += 1
    hf = [float(c) for c in hv]
    for trial in range(trials):
        try:
            t1 = _probe_point(X, H, trial, seed, ftol, 0)
            x1 = _float_point(X.map, [float(v) for v in t1])
            t2 = _probe_point(X, H, trial, seed, ftol, 1, avoid=x1)
        except SolverFailed as exc:
            report.skipped.append({"trial": trial, "reason": str(exc)})
            continue
        x2 = _float_point(X.map, [float(v) for v in t2])
        if _rank_float([x1, x2, hf]) <= 2:
            report.failures += 1
    return report


# The chart map of the extension construction -----------------------------

@dataclass
class PhiCertificate:
    n: int
    matrix: RatMatrix  # rows: target coordinates as functionals on V
    kernel_is_h: bool
    conformal_factor: Fraction | None
    factors_through_reduction: bool
    chart_formula: bool

    @property
    def ok(self) -> bool:
        return self.kernel_is_h and self.conformal_factor is not None and self.factors_through_reduction \
            and self.chart_formula


def phi_map(n: int) -> PhiCertificate:
    """[1, x_1..x_n, y_0..y_{n-1}, 1] -> [y_1..y_{n-1}, y_0 - x_n, x_1..x_{n-1}, 1].

    V = Q^{2n+2} has coordinates x_0..x_n, y_0..y_n with the standard form and
    H = {x_0 = y_n}.  The certificate checks, exactly, that the linear map
    restricted to H has kernel h, pulls the standard form on the target back
    to a constant multiple of omega on H, factors through the generic
    symplectic reduction of H, and turns the chart point into the formula
    above as an identity of polynomials.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    S = SymplecticSpace.standard(n + 1)
    d = 2 * n + 2
    X = lambda i: i
    Y = lambda i: n + 1 + i

    def unit(i, c=ONE):
        row = [ZERO] * d
        row[i] = c
        return row

    rows = [unit(Y(i)) for i in range(1, n)]
    r = unit(Y(0))
    r[X(n)] = -ONE
    rows.append(r)
    rows += [unit(X(i)) for i in range(1, n)]
    rows.append(unit(X(0)))
    Phi = RatMatrix(rows, d)

    eta = [ZERO] * d
    eta[X(0)] = ONE
    eta[Y(n)] = -ONE
    H = HyperplaneSpec.from_eta(S, eta)
    Hs = H.subspace
    images = [Phi @ v for v in Hs.basis]
    ker = mat_kernel(RatMatrix([list(r) for r in zip(*images)], len(images)))
    kernel_vecs = [[sum((c[i] * Hs.basis[i][j] for i in range(len(c))), ZERO) for j in range(d)] for c in ker]
    kernel_is_h = len(kernel_vecs) == 1 and rank([kernel_vecs[0], list(H.h)]) == 1

    Jt = SymplecticSpace.standard(n).J
    factor = None
    consistent = True
    for a, u in zip(images, Hs.basis):
        for b, v in zip(images, Hs.basis):
            lhs = S.omega(u, v)
            rhs = sum((x * y for x, y in zip(a, Jt @ b)), ZERO)
            if lhs == 0 and rhs == 0:
                continue
            if lhs == 0 or rhs == 0:
                consistent = False
                continue
            c = rhs / lhs
            if factor is None:
                factor = c
            elif c != factor:
                consistent = False
    if not consistent:
        factor = None

    R = symplectic_reduce(Hs)
    # Phi = A . project on H for some invertible A.
    Pimg = [list(R.project @ v) for v in Hs.basis]
    A_rows = []
    factors = True
    for k in range(2 * n):
        target = [images[i][k] for i in range(len(images))]
        sol = solve(RatMatrix(Pimg, len(Pimg[0])), target)
        if sol is None:
            factors = False
            break
        A_rows.append(sol)
    if factors:
        try:
            inverse(RatMatrix(A_rows, 2 * n))
        except SingularInput:
            factors = False

    # Symbolic chart point: variables x_1..x_n, y_0..y_{n-1}.
    nv = 2 * n
    g = LaurentPoly.gens(nv)
    one = LaurentPoly.constant(1, nv)
    xs = [one] + g[:n]
    ys = g[n:] + [one]
    chart = xs + ys
    mapped = [sum((chart[j] * Phi[k, j] for j in range(d) if Phi[k, j]), LaurentPoly(nv)) for k in range(2 * n)]
    expected = [ys[i] for i in range(1, n)] + [ys[0] - xs[n]] + [xs[i] for i in range(1, n)] + [one]
    chart_formula = mapped == expected
    return PhiCertificate(n, Phi, kernel_is_h, factor, factors, chart_formula)


def phi_apply(n: int, x: Sequence, y: Sequence) -> list[Fraction]:
    """Image of the chart point with x = (x_1..x_n), y = (y_0..y_{n-1})."""
    x = [Q(v) for v in x]
    y = [Q(v) for v in y]
    return y[1:n] + [y[0] - x[n - 1]] + x[:n - 1] + [ONE]


# Joins ------------------------------------------------------------------

def direct_sum(S1: SymplecticSpace, S2: SymplecticSpace) -> SymplecticSpace:
    d1, d2 = S1.dim, S2.dim
    rows = [list(r) + [ZERO] * d2 for r in S1.J.rows] + [[ZERO] * d1 + list(r) for r in S2.J.rows]
    return SymplecticSpace(RatMatrix(rows, d1 + d2))


def join_legendrian(X1: ParamVariety, X2: ParamVariety) -> ParamVariety:
    """The join in P(V1 + V2): (x1(t), lam * x2(u)) with a fresh parameter lam."""
    k1, k2 = X1.params, X2.params
    k = k1 + k2 + 1

    def lift(f: LaurentPoly, offset: int, lam: bool) -> LaurentPoly:
        terms = {}
        for e, c in f.terms.items():
            ne = [0] * k
            ne[offset:offset + len(e)] = e
            if lam:
                ne[k - 1] = 1
            terms[tuple(ne)] = c
        return LaurentPoly(k, terms)

    comps = tuple(lift(f, 0, False) for f in X1.map) + tuple(lift(f, k1, True) for f in X2.map)
    label = f"join({X1.label},{X2.label})"
    return ParamVariety(direct_sum(X1.ambient, X2.ambient), k, comps, label)


def point_variety(S: SymplecticSpace, v: Sequence, label: str = "point") -> ParamVariety:
    """The constant map onto the line through v."""
    return ParamVariety(S, 0, tuple(LaurentPoly.constant(Q(c), 0) for c in v), label)


# Conormal extension -----------------------------------------------------

def gradient(f: LaurentPoly) -> list[LaurentPoly]:
    return [f.diff(i) for i in range(f.nvars)]


@dataclass
class ConormalResult:
    variety: ParamVariety
    qw_identity: bool
    qw_value: LaurentPoly


def qw_quadric(n1: int) -> LaurentPoly:
    """x_0 y_0 + ... + x_n y_n on W + W* with n1 = dim W."""
    g = LaurentPoly.gens(2 * n1)
    return sum((g[i] * g[n1 + i] for i in range(n1)), LaurentPoly(2 * n1))


def conormal_extend(f: LaurentPoly, z: Sequence[LaurentPoly] | None, label: str = "conormal") -> ConormalResult:
    """(r, t, s) -> (r z(t), s grad f(z(t))) in W + W* with its standard form.

    z must parametrize the hypersurface {f = 0} in an affine chart of P(W)
    (so f(z(t)) = 0 identically); r is the cone scale and s the conormal
    direction.  The form on W + W* is omega((v, a), (w, b)) = b(v) - a(w).
    """
    if z is None:
        raise NoParametrization("a rational parametrization of the hypersurface is required")
    if not f.is_homogeneous() or f.total_degree() < 1 or not f.is_polynomial():
        raise ValueError("f must be a nonconstant homogeneous polynomial")
    n1 = f.nvars
    if len(z) != n1:
        raise SizeMismatch(f"parametrization has {len(z)} components, expected {n1}")
    if not f.substitute(list(z)).is_zero():
        raise NoParametrization("z does not lie on f = 0")
    k = z[0].nvars
    nv = k + 2

    def widen(p: LaurentPoly) -> LaurentPoly:
        return LaurentPoly(nv, {tuple(e) + (0, 0): c for e, c in p.terms.items()})

    r = LaurentPoly.var(k, nv)
    s = LaurentPoly.var(k + 1, nv)
    grad = [widen(gi.substitute(list(z))) for gi in gradient(f)]
    comps = tuple(r * widen(zi) for zi in z) + tuple(s * gi for gi in grad)
    X = ParamVariety(SymplecticSpace.standard(n1), nv, comps, label)
    value = qw_quadric(n1).substitute(list(comps))
    return ConormalResult(X, value.is_zero(), value)


def conic_fixture() -> tuple[LaurentPoly, list[LaurentPoly]]:
    """f = x0 x2 - x1^2 with z(t) = (1, t, t^2)."""
    x0, x1, x2 = LaurentPoly.gens(3)
    t = LaurentPoly.var(0, 1)
    one = LaurentPoly.constant(1, 1)
    return x0 * x2 - x1 * x1, [one, t, t * t]
