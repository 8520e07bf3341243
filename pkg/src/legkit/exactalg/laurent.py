"""Sparse multivariate Laurent polynomials with rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb
from typing import Mapping, Sequence

from ..errors import SizeMismatch, ZeroParameter
from .matrix import ZERO, Q, RatMatrix, rat_to_json


class LaurentPoly:
    """A map from integer exponent tuples to nonzero Fraction coefficients.

    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        clean: dict[tuple, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise SizeMismatch(f"exponent {e} has length != {nvars}")
                c = Q(c)
                if c:
                    clean[e] = clean.get(e, ZERO) + c
                    if not clean[e]:
                        del clean[e]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> LaurentPoly:
        f = cls.__new__(cls)
        f.nvars = nvars
        f.terms = terms
        f._hash = None
        return f

    @classmethod
    def constant(cls, c, nvars: int) -> LaurentPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int) -> LaurentPoly:
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1) -> LaurentPoly:
        return cls(len(exp), {tuple(exp): coef})

    @classmethod
    def gens(cls, nvars: int) -> list[LaurentPoly]:
        return [cls.var(i, nvars) for i in range(nvars)]

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise SizeMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        return LaurentPoly.constant(other, self.nvars)

    def __add__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            c = Q(other)
            if not c:
                return LaurentPoly._raw(self.nvars, {})
            return LaurentPoly._raw(self.nvars, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return LaurentPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly._raw(self.nvars, {tuple(x * k for x in e): c ** k})
        result = LaurentPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # structure --------------------------------------------------------
    def is_polynomial(self) -> bool:
        return all(x >= 0 for e in self.terms for x in e)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def total_degree(self) -> int:
        return max(self.degrees()) if self.terms else -1

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or ds == {degree})

    def homogeneous_part(self, d: int) -> LaurentPoly:
        return LaurentPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def lowest_part(self) -> LaurentPoly:
        if not self.terms:
            return self
        return self.homogeneous_part(min(self.degrees()))

    def diff(self, j: int) -> LaurentPoly:
        out = {}
        for e, c in self.terms.items():
            w = e[j]
            if w:
                f = list(e)
                f[j] -= 1
                out[tuple(f)] = c * w
        return LaurentPoly._raw(self.nvars, out)

    def evaluate(self, t: Sequence) -> Fraction:
        return laurent_eval(self, t)

    def substitute(self, images: Sequence[LaurentPoly]) -> LaurentPoly:
        """Compose: replace variable i by images[i] (all in a common ring)."""
        if len(images) != self.nvars:
            raise SizeMismatch("substitution length")
        nv = images[0].nvars if images else 0
        cache: dict[tuple[int, int], LaurentPoly] = {}
        total = LaurentPoly._raw(nv, {})
        for e, c in self.terms.items():
            term = LaurentPoly.constant(c, nv)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            total = total + term
        return total

    def shift(self, center: Sequence) -> LaurentPoly:
        """The polynomial y -> f(center + y); needs nonnegative exponents."""
        if not self.is_polynomial():
            raise ValueError("shift needs a polynomial")
        center = [Q(c) for c in center]
        out: dict[tuple, Fraction] = {}
        for e, c in self.terms.items():
            ranges = [range(k + 1) if center[i] else (k,) for i, k in enumerate(e)]
            for sub in product(*ranges):
                coef = c
                for i, (k, s) in enumerate(zip(e, sub)):
                    if s != k:
                        coef *= comb(k, s) * center[i] ** (k - s)
                out[sub] = out.get(sub, ZERO) + coef
        return LaurentPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(f"t{i}" + (f"^{k}" if k != 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{rat_to_json(self.terms[e])}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> list[dict]:
        return [{"exp": list(e), "coef": rat_to_json(c)} for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data, nvars: int | None = None) -> LaurentPoly:
        if nvars is None:
            if not data:
                raise ValueError("nvars is needed for the zero polynomial")
            nvars = len(data[0]["exp"])
        return cls(nvars, {tuple(d["exp"]): Q(d["coef"]) for d in data})


class _PowerTable:
    def __init__(self, t: Sequence[Fraction]):
        self.t = t
        self.cache: dict[tuple[int, int], Fraction] = {}

    def __call__(self, i: int, k: int) -> Fraction:
        key = (i, k)
        v = self.cache.get(key)
        if v is None:
            v = self.t[i] ** k
            self.cache[key] = v
        return v


def _check_point(t: Sequence, nvars: int) -> list[Fraction]:
    if len(t) != nvars:
        raise SizeMismatch(f"point has {len(t)} coordinates, expected {nvars}")
    t = [Q(x) for x in t]
    for i, x in enumerate(t):
        if x == 0:
            raise ZeroParameter(f"parameter {i} is zero")
    return t


def _eval_with(f: LaurentPoly, pw: _PowerTable) -> Fraction:
    total = ZERO
    for e, c in f.terms.items():
        v = c
        for i, k in enumerate(e):
            if k:
                v *= pw(i, k)
        total += v
    return total


def laurent_eval(f: LaurentPoly, t: Sequence) -> Fraction:
    t = _check_point(t, f.nvars)
    return _eval_with(f, _PowerTable(t))


def laurent_eval_many(F: Sequence[LaurentPoly], t: Sequence) -> tuple[Fraction, ...]:
    if not F:
        return ()
    t = _check_point(t, F[0].nvars)
    pw = _PowerTable(t)
    return tuple(_eval_with(f, pw) for f in F)


def laurent_jacobian(F: Sequence[LaurentPoly], t: Sequence) -> RatMatrix:
    """Entry (i, j) is dF_i/dt_j at t, by term-wise differentiation."""
    if not F:
        return RatMatrix([])
    nv = F[0].nvars
    t = _check_point(t, nv)
    pw = _PowerTable(t)
    rows = []
    for f in F:
        row = [ZERO] * nv
        for e, c in f.terms.items():
            base = c
            for i, k in enumerate(e):
                if k:
                    base *= pw(i, k)
            if not base:
                continue
            for j, k in enumerate(e):
                if k:
                    row[j] += base * k / t[j]
        rows.append(row)
    return RatMatrix(rows, nv)


def polynomial_eval(f: LaurentPoly, x: Sequence) -> Fraction:
    """Evaluate at x, allowing zero coordinates wherever exponents are nonnegative."""
    if len(x) != f.nvars:
        raise SizeMismatch(f"point has {len(x)} coordinates, expected {f.nvars}")
    x = [Q(v) for v in x]
    total = ZERO
    for e, c in f.terms.items():
        v = c
        for i, k in enumerate(e):
            if k:
                if x[i] == 0:
                    if k < 0:
                        raise ZeroParameter(f"coordinate {i} is zero under a negative exponent")
                    v = ZERO
                    break
                v *= x[i] ** k
        total += v
    return total
