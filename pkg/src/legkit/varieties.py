"""Parametrized varieties in a symplectic space and the exact checks run on them.

A variety is given by a Laurent map from (Q*)^k to V whose image spans an
open subset of the affine cone.  Everything here works on sampled rational
parameter points, so each answer is exact at the samples drawn.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import cached_property
from math import ceil
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .errors import DegenerateSample, SizeMismatch
from .exactalg import (
    ZERO,
    LaurentPoly,
    Q,
    RatMatrix,
    SpanTester,
    laurent_eval_many,
    laurent_jacobian,
    mat_kernel,
    rank,
    rat_to_json,
    row_space_basis,
)
from .symplinalg import QuadraticForm, Subspace, SymplecticSpace, in_sp, in_wsp, sp_wsp_split

MAX_RESAMPLE = 64


@dataclass(frozen=True)
class ParamVariety:
    ambient: SymplecticSpace
    params: int
    map: tuple
    label: str = ""

    def __post_init__(self):
        comps = tuple(self.map)
        object.__setattr__(self, "map", comps)
        if len(comps) != self.ambient.dim:
            raise SizeMismatch(f"map has {len(comps)} components for a space of dimension {self.ambient.dim}")
        for f in comps:
            if f.nvars != self.params:
                raise SizeMismatch("component in the wrong number of parameters")
        if self.params > self.ambient.n:
            raise ValueError(f"{self.params} parameters exceed n = {self.ambient.n}; the cone would be too big")

    @property
    def n(self) -> int:
        return self.ambient.n

    def point(self, t: Sequence) -> tuple[Fraction, ...]:
        return laurent_eval_many(self.map, t)

    def jacobian(self, t: Sequence) -> RatMatrix:
        return laurent_jacobian(self.map, t)

    @cached_property
    def _float_terms(self):
        """(exponent array, coefficient array) per component, for numeric evaluation."""
        out = []
        for f in self.map:
            if f.terms:
                exps = np.array(list(f.terms.keys()), dtype=float).reshape(len(f.terms), self.params)
                coefs = np.array([float(c) for c in f.terms.values()])
            else:
                exps = np.zeros((0, self.params))
                coefs = np.zeros(0)
            out.append((exps, coefs))
        return out

    def transformed(self, P: RatMatrix, label: str | None = None) -> ParamVariety:
        """The image of X under the linear map P, with the same form matrix."""
        comps = []
        for row in P.rows:
            acc = LaurentPoly(self.params)
            for c, f in zip(row, self.map):
                if c:
                    acc = acc + f * c
            comps.append(acc)
        return ParamVariety(self.ambient, self.params, tuple(comps), label or self.label)

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient.to_json(),
            "params": self.params,
            "map": [f.to_json() for f in self.map],
            "label": self.label,
        }

    @classmethod
    def from_json(cls, data) -> ParamVariety:
        k = int(data["params"])
        return cls(
            SymplecticSpace.from_json(data["ambient"]),
            k,
            tuple(LaurentPoly.from_json(f, k) for f in data["map"]),
            data.get("label", ""),
        )


def random_rationals(count: int, *key: int) -> list[Fraction]:
    """Nonzero rationals p/q with 1 <= |p| <= 9 and 1 <= q <= 9, from a counter-based stream."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([abs(int(k)) for k in key])))
    nums = rng.integers(1, 10, size=count) * rng.choice([-1, 1], size=count)
    dens = rng.integers(1, 10, size=count)
    return [Fraction(int(p), int(q)) for p, q in zip(nums, dens)]


def sample_parameters(X: ParamVariety, seed: int, index: int) -> tuple[list[Fraction], tuple[Fraction, ...]]:
    for attempt in range(MAX_RESAMPLE):
        t = random_rationals(X.params, seed, index, attempt)
        x = X.point(t)
        if any(x):
            return t, x
    raise DegenerateSample(f"{X.label or 'map'} vanished at {MAX_RESAMPLE} draws for index {index}")


def sample_point(X: ParamVariety, seed: int, index: int) -> tuple[Fraction, ...]:
    return sample_parameters(X, seed, index)[1]


def tangent_rows(X: ParamVariety, t: Sequence, x: Sequence | None = None) -> list[list[Fraction]]:
    if x is None:
        x = X.point(t)
    Jm = X.jacobian(t)
    return [list(x)] + [list(c) for c in zip(*Jm.rows)] if X.params else [list(x)]


def cone_tangent_space(X: ParamVariety, t: Sequence) -> Subspace:
    """Span of x(t) and the partial derivatives at t, in echelon form."""
    rows = tangent_rows(X, t)
    return Subspace(X.ambient, tuple(row_space_basis(rows, X.ambient.dim)))


@dataclass
class SampleCheck:
    index: int
    params: list
    tangent_dim: int
    lagrangian: bool
    failing_pair: tuple | None = None
    failing_value: Fraction | None = None


@dataclass
class VarietyReport:
    label: str
    samples: int
    tangent_dims: list
    lagrangian: list
    n: int
    i2_dim: int | None = None
    stab_dim: int | None = None
    nondegenerate: bool | None = None
    reason: str | None = None
    failures: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return bool(self.lagrangian) and all(self.lagrangian) and all(d == self.n for d in self.tangent_dims)

    def to_json(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        d["failures"] = [
            {"sample": f["sample"], "pair": list(f["pair"]), "omega": rat_to_json(f["omega"])} for f in self.failures
        ]
        return d


def _check_sample(job) -> SampleCheck:
    X, seed, index, t = job
    if t is None:
        t, x = sample_parameters(X, seed, index)
    else:
        x = X.point(t)
    T = row_space_basis(tangent_rows(X, t, x), X.ambient.dim)
    dim = len(T)
    Jt = [X.ambient.J @ v for v in T]
    for i in range(dim):
        for j in range(i + 1, dim):
            w = sum((a * b for a, b in zip(T[i], Jt[j]) if a), ZERO)
            if w:
                return SampleCheck(index, [rat_to_json(s) for s in t], dim, False, (i, j), w)
    return SampleCheck(index, [rat_to_json(s) for s in t], dim, dim == X.n)


def legendrian_check(
    X: ParamVariety, samples: int = 10, seed: int = 0, points: Sequence[Sequence] | None = None
) -> VarietyReport:
    """Is the affine cone Lagrangian at every sampled point?

    `points` adds explicit parameter points, checked before the random ones.
    """
    jobs = [(X, seed, -1 - i, list(map(Q, p))) for i, p in enumerate(points or [])]
    jobs += [(X, seed, i, None) for i in range(samples)]
    checks = pmap(_check_sample, jobs)
    report = VarietyReport(
        X.label, len(checks), [c.tangent_dim for c in checks], [c.lagrangian for c in checks], X.n
    )
    for c in checks:
        if c.failing_pair is not None:
            report.failures.append({"sample": c.index, "pair": c.failing_pair, "omega": c.failing_value})
    if checks and all(d < X.n for d in report.tangent_dims):
        report.reason = "NotFullDimensional"
    elif report.failures:
        report.reason = "OmegaNonzero"
    elif not report.verdict:
        report.reason = "TangentDimension"
    return report


def quadric_monomials(dim: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def _quadric_row(x: Sequence[Fraction], monos) -> list[Fraction]:
    return [x[i] * x[j] for i, j in monos]


def quadric_from_vector(S: SymplecticSpace, c: Sequence[Fraction], monos) -> QuadraticForm:
    d = S.dim
    M = [[ZERO] * d for _ in range(d)]
    for (i, j), v in zip(monos, c):
        if i == j:
            M[i][i] += v
        else:
            M[i][j] += v / 2
            M[j][i] += v / 2
    return QuadraticForm(S, RatMatrix(M, d))


def interpolate_quadrics(X: ParamVariety, oversample: int | None = None, seed: int = 0) -> list[QuadraticForm]:
    """Basis of the quadrics vanishing on X, by interpolation through samples."""
    from .errors import InterpolationFailed

    d = X.ambient.dim
    monos = quadric_monomials(d)
    need = 2 * len(monos)
    if oversample is None:
        oversample = need
    if oversample < need:
        raise ValueError(f"oversample {oversample} is below 2 * dim Sym^2 = {need}")
    rows = [_quadric_row(sample_point(X, seed, i), monos) for i in range(oversample)]
    kernel = mat_kernel(rows)
    quads = [quadric_from_vector(X.ambient, c, monos) for c in kernel]
    for i in range(oversample, oversample + 20):
        x = sample_point(X, seed, i)
        for q in quads:
            if q(x):
                raise InterpolationFailed(f"quadric does not vanish at fresh sample {i}")
    return quads


def _flat(g: RatMatrix) -> list:
    return [x for r in g.rows for x in r]


def _unflat(v: Sequence, d: int) -> RatMatrix:
    return RatMatrix([v[i * d:(i + 1) * d] for i in range(d)], d)


@dataclass
class StabilizerResult:
    basis: list
    samples: int
    split_closed: bool
    sp_dim: int
    wsp_dim: int

    @property
    def dim(self) -> int:
        return len(self.basis)


def default_stabilizer_samples(X: ParamVariety) -> int:
    d = X.ambient.dim
    codim = max(1, d - (X.params + 1))
    return max(2 * X.n, ceil(d * d / codim) + 4)


def _stabilizer_rows(job) -> list[list[Fraction]]:
    X, seed, index = job
    t, x = sample_parameters(X, seed, index)
    rows = tangent_rows(X, t, x)
    normals = mat_kernel(rows)
    d = X.ambient.dim
    out = []
    for nv in normals:
        out.append([a * b for a in nv for b in x])
    return out


def stabilizer_algebra(X: ParamVariety, samples: int | None = None, seed: int = 0) -> StabilizerResult:
    """All g in gl(V) with g x in T_x(cone) at every sampled x.

    With the tangent space cut out by normals n (orthogonal complement under
    the dot product), the constraints n^T g x = 0 are linear in g.
    """
    d = X.ambient.dim
    if samples is None:
        samples = default_stabilizer_samples(X)
    blocks = pmap(_stabilizer_rows, [(X, seed, i) for i in range(samples)])
    rows = [r for b in blocks for r in b]
    if rows:
        kernel = mat_kernel(rows)
    else:
        kernel = [tuple(Fraction(int(i == j)) for j in range(d * d)) for i in range(d * d)]
    basis = [_unflat(v, d) for v in kernel]
    span = SpanTester([_flat(g) for g in basis], d * d)
    split_closed = True
    for g in basis:
        gp, gm = sp_wsp_split(g, X.ambient)
        if not (span.contains(_flat(gp)) and span.contains(_flat(gm))):
            split_closed = False
            break
    sp_part = [g for g in basis if in_sp(g, X.ambient)]
    wsp_part = [g for g in basis if in_wsp(g, X.ambient)]
    sp_dim = wsp_dim = None
    if split_closed:
        halves = [sp_wsp_split(g, X.ambient) for g in basis]
        sp_dim = rank([_flat(h[0]) for h in halves]) if halves else 0
        wsp_dim = rank([_flat(h[1]) for h in halves]) if halves else 0
    else:
        sp_dim, wsp_dim = len(sp_part), len(wsp_part)
    return StabilizerResult(basis, samples, split_closed, sp_dim, wsp_dim)


def nondegeneracy_rank(X: ParamVariety, samples: int | None = None, seed: int = 0) -> int:
    if samples is None:
        samples = 2 * X.ambient.dim
    pts = [list(sample_point(X, seed, i)) for i in range(samples)]
    return rank(pts)


def secant_probe(X: ParamVariety, h: Sequence, trials: int = 50, seed: int = 0, tol: float = 1e-8):
    """Count sampled pairs of X ∩ h^perp whose secant line passes through h."""
    from .reduction import secant_probe as _probe

    return _probe(X, h, trials=trials, seed=seed, tol=tol)
