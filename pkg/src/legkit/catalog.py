"""Named varieties used by the CLI and the test suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .exactalg import LaurentPoly
from .symplinalg import SymplecticSpace
from .varieties import ParamVariety


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[[], ParamVariety]
    summary: str
    legendrian: bool = True

    def build(self) -> ParamVariety:
        X = self.builder()
        return ParamVariety(X.ambient, X.params, X.map, self.name)


def rational_normal_curve() -> ParamVariety:
    """(1, t, t^2, t^3) in the standard 4-dimensional space; not Legendrian there."""
    t = LaurentPoly.var(0, 1)
    one = LaurentPoly.constant(1, 1)
    return ParamVariety(SymplecticSpace.standard(2), 1, (one, t, t * t, t * t * t), "rnc-control")


def linear_lagrangian(n: int = 2) -> ParamVariety:
    """P(span(e_1..e_n)) as the image of (1, t_1, ..., t_{n-1}, 0, ..., 0)."""
    k = n - 1
    g = LaurentPoly.gens(k)
    one = LaurentPoly.constant(1, k)
    zero = LaurentPoly(k)
    comps = (one, *g) + (zero,) * n
    return ParamVariety(SymplecticSpace.standard(n), k, comps, f"linear-lagrangian-{n}")


def full_projective_line() -> ParamVariety:
    """(1, t) onto all of Q^2: no quadric vanishes on it."""
    t = LaurentPoly.var(0, 1)
    return ParamVariety(SymplecticSpace.standard(1), 1, (LaurentPoly.constant(1, 1), t), "full-p1")


def _toric(a):
    from .toric import build_toric_legendrian

    return lambda: build_toric_legendrian(a)


def _xinv(m):
    from .matpair import build_xinv

    return lambda: build_xinv(m)


def _conic_conormal() -> ParamVariety:
    from .reduction import conic_fixture, conormal_extend

    f, z = conic_fixture()
    return conormal_extend(f, z).variety


def _entries() -> list[CatalogEntry]:
    from .matpair import build_segre_xdeg21, build_xdeg, build_xinv_skew, build_xinv_sym

    out = [
        CatalogEntry("toric-2,1,1", _toric((2, 1, 1)), "toric surface, P^1 x conic"),
        CatalogEntry("toric-1,1,1", _toric((1, 1, 1)), "toric surface, P^2 blown up in three points"),
        CatalogEntry("toric-1,1,1,1", _toric((1, 1, 1, 1)), "toric threefold, P^1 x P^1 x P^1"),
    ]
    out += [CatalogEntry(f"xinv-{m}", _xinv(m), f"closure of [g, (g^-1)^T] with g in SL_{m}") for m in range(2, 6)]
    out += [
        CatalogEntry("xinv-sym-3", lambda: build_xinv_sym(3), "symmetric pairs [A, A^-1], 3 x 3"),
        CatalogEntry("xinv-skew-3", lambda: build_xinv_skew(6), "skew pairs [A, -A^-1], 6 x 6 (3 blocks)"),
        CatalogEntry("xdeg-2,1", lambda: build_xdeg(2, 1), "degenerate pairs, m = 2, k = 1"),
        CatalogEntry("xdeg-3,1", lambda: build_xdeg(3, 1), "degenerate pairs, m = 3, k = 1"),
        CatalogEntry("segre-p1p1p1", build_segre_xdeg21, "Segre P^1 x P^1 x P^1 as X_deg(2, 1)"),
        CatalogEntry("linear-lagrangian-2", lambda: linear_lagrangian(2), "a Lagrangian plane in Q^4"),
        CatalogEntry("conormal-conic", _conic_conormal, "conormal extension of a plane conic"),
        CatalogEntry("rnc-control", rational_normal_curve, "twisted cubic, a non-Legendrian control", False),
    ]
    return out


def entries() -> dict[str, CatalogEntry]:
    return {e.name: e for e in _entries()}


def get(name: str) -> ParamVariety:
    table = entries()
    if name not in table:
        raise KeyError(f"unknown catalog entry {name!r}; try one of {', '.join(table)}")
    return table[name].build()
