"""Command line entry point: `legkit <command> ...`, JSON report on stdout.

Exit status 0 means every check passed, 1 that a mathematical check failed
(the report says which) and 2 a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog
from .errors import LegkitError
from .exactalg import LaurentPoly, RatMatrix, rat_to_json
from .varieties import ParamVariety, legendrian_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


# Input helpers ----------------------------------------------------------

def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _variety_ref(ref: str) -> ParamVariety:
    """A catalog name or a path to a variety JSON file."""
    if Path(ref).is_file():
        return _variety_from_json(_read_json(ref))
    try:
        return catalog.get(ref)
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc


def _load_variety(args) -> ParamVariety:
    if args.catalog and args.spec:
        raise InputError("give either --catalog or --spec, not both")
    if args.catalog:
        return _variety_ref(args.catalog)
    if args.spec:
        return _variety_from_json(_read_json(args.spec))
    raise InputError("a variety is required: --catalog NAME or --spec FILE")


def _poly_from_json(data, nvars=None) -> LaurentPoly:
    try:
        if isinstance(data, dict):
            return LaurentPoly.from_json(data.get("terms", []), data.get("nvars", nvars))
        return LaurentPoly.from_json(data, nvars)
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed polynomial: {exc!r}") from exc


def _variety_from_json(data) -> ParamVariety:
    try:
        return ParamVariety.from_json(data)
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed variety: {exc!r}") from exc


def _matrix_json(M: RatMatrix):
    return [[rat_to_json(x) for x in r] for r in M.rows]


# Commands ---------------------------------------------------------------

def cmd_check(args) -> tuple[dict, bool]:
    X = _load_variety(args)
    rep = legendrian_check(X, samples=args.samples, seed=args.seed)
    return rep.to_json(), rep.verdict


def cmd_ideal(args) -> tuple[dict, bool]:
    from .symplinalg import is_bracket_closed, rho
    from .varieties import interpolate_quadrics

    X = _load_variety(args)
    quads = interpolate_quadrics(X, oversample=args.oversample, seed=args.seed)
    closure = is_bracket_closed([rho(q) for q in quads])
    report = {
        "label": X.label,
        "i2_dim": len(quads),
        "rho_bracket_closed": closure.closed,
        "quadrics": [_matrix_json(q.M) for q in quads] if args.with_quadrics else None,
    }
    return report, closure.closed


def cmd_stabilizer(args) -> tuple[dict, bool]:
    from .exactalg import SpanTester
    from .symplinalg import is_bracket_closed, rho
    from .varieties import interpolate_quadrics, stabilizer_algebra

    X = _load_variety(args)
    st = stabilizer_algebra(X, samples=args.samples, seed=args.seed)
    d = X.ambient.dim
    flat = lambda g: [x for r in g.rows for x in r]
    span = SpanTester([flat(g) for g in st.basis], d * d)
    quads = interpolate_quadrics(X, seed=args.seed)
    extra = [rho(q) for q in quads] + [RatMatrix.identity(d)]
    contains = all(span.contains(flat(g)) for g in extra)
    closed = is_bracket_closed(st.basis).closed
    report = {
        "label": X.label,
        "dim": st.dim,
        "samples": st.samples,
        "sp_dim": st.sp_dim,
        "wsp_dim": st.wsp_dim,
        "split_closed": st.split_closed,
        "bracket_closed": closed,
        "i2_dim": len(quads),
        "contains_rho_i2_and_id": contains,
        "equals_rho_i2_plus_id": contains and st.dim == len(quads) + 1,
    }
    return report, closed and contains


def cmd_toric_classify(args) -> tuple[dict, bool]:
    from .toric import WeightSystem, classify_smooth_candidates, vertex_smoothness_test

    tuples = classify_smooth_candidates(args.dim, args.max_weight)
    verdicts = [vertex_smoothness_test(WeightSystem(t)).verdict for t in tuples]
    return {"dim": args.dim, "max_weight": args.max_weight, "tuples": [list(t) for t in tuples],
            "verdicts": verdicts}, True


def cmd_toric_build(args) -> tuple[dict, bool]:
    from .toric import WeightSystem, build_toric_legendrian, hull_edges, vertex_smoothness_test

    try:
        a = tuple(int(x) for x in args.weights.split(","))
    except ValueError as exc:
        raise InputError(f"bad weights {args.weights!r}") from exc
    W = WeightSystem(a)
    X = build_toric_legendrian(a)
    report = {"weights": list(a), "variety": X.to_json()}
    ok = True
    if W.n >= 3:
        P = hull_edges(W)
        v = vertex_smoothness_test(W)
        report["vertices"] = [list(P.points[i]) for i in P.vertices]
        report["edges"] = [[list(P.points[i]), list(P.points[j])] for i, j in P.edges]
        report["smoothness"] = {"simple": v.simple, "lattice_ok": v.lattice_ok, "verdict": v.verdict}
    if args.check:
        rep = legendrian_check(X, samples=args.samples, seed=args.seed)
        report["check"] = rep.to_json()
        ok = rep.verdict
    return report, ok


def _matpair_xinv(args, m) -> tuple[dict, bool]:
    from . import matpair as mp

    builder = {"full": mp.build_xinv, "symmetric": mp.build_xinv_sym, "skew": mp.build_xinv_skew}[args.flavor]
    X = builder(m)
    rep = legendrian_check(X, samples=args.samples, seed=args.seed)
    report = {"what": "xinv", "m": m, "flavor": args.flavor, "legendrian": rep.to_json()}
    ok = rep.verdict
    if args.flavor == "full":
        batteries = []
        for i in range(args.samples):
            g = mp.random_unimodular(m, args.seed, i)
            _, b = mp.xinv_point(g)
            batteries.append({"counts": b.counts, "failures": {k: [str(x) for x in v] for k, v in b.failures.items()}})
            ok = ok and b.ok
        dim, lag = mp.identity_tangent_certificate(m, seed=args.seed)
        report["equations"] = batteries
        report["identity_tangent"] = {"dim": dim, "lagrangian": lag}
        ok = ok and lag and dim == m * m
    return report, ok


def _matpair_xdeg(args, m, k) -> tuple[dict, bool]:
    from . import matpair as mp
    from .varieties import sample_point

    X = mp.build_xdeg(m, k)
    rep = legendrian_check(X, samples=args.samples, seed=args.seed)
    spec = mp.build_matpair_space(m)
    members = [mp.xdeg_membership(spec.unflatten(sample_point(X, args.seed, i)), k) for i in range(args.samples)]
    signals = mp.xdeg_cone_signals(m, k)
    expected = k == 0 or k == m or (m, k) == (2, 1)
    smooth = all(s.all_linear for s in signals.values())
    report = {
        "what": f"xdeg:{k}", "m": m, "legendrian": rep.to_json(), "members": members,
        "cone_signals": {p: {"all_linear": s.all_linear, "linear_forms": s.linear_forms} for p, s in signals.items()},
        "smooth_signal": smooth, "expected_smooth": expected,
    }
    return report, rep.verdict and all(members) and smooth == expected


def _matpair_y(args, m) -> tuple[dict, bool]:
    from . import matpair as mp
    from .symplinalg import is_poisson_closed_mod_span

    rows = []
    ok = True
    for i in range(args.samples):
        g = mp.random_unimodular(m, args.seed, i)
        p, _ = mp.xinv_point(g)
        mu = mp.random_rationals(1, args.seed, i, 99)[0]
        for q in (p, mp.psi(mu, p)):
            y = mp.y_membership(q)
            rows.append({"member": y.member, "lambda_sq": rat_to_json(y.lambda_sq) if y.member else None})
            ok = ok and y.member and y.all_quadrics_vanish
    closure = is_poisson_closed_mod_span([f for _, f in mp.y_quadrics(m)])
    report = {"what": "y", "m": m, "quadrics": len(mp.y_quadrics(m)), "points": rows,
              "poisson_closed": closure.closed}
    return report, ok and closure.closed


def cmd_matpair_check(args) -> tuple[dict, bool]:
    what = args.what
    if what == "xinv":
        return _matpair_xinv(args, args.m)
    if what == "y":
        return _matpair_y(args, args.m)
    if what.startswith("xdeg:"):
        try:
            k = int(what.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad --what {what!r}") from exc
        return _matpair_xdeg(args, args.m, k)
    raise InputError(f"--what must be xinv, y or xdeg:K, got {what!r}")


def cmd_matpair_s6(args) -> tuple[dict, bool]:
    from .matpair import s6_identity_check

    r = s6_identity_check(trials=args.trials, seed=args.seed, symbolic=args.symbolic)
    return {"trials": r.trials, "symbolic": args.symbolic, "y_quadrics": r.y_quadrics,
            "half_minor_quadrics": r.half_minors, "failures": [list(map(str, f)) for f in r.failures],
            "ok": r.ok}, r.ok


def cmd_matpair_probe(args) -> tuple[dict, bool]:
    from .matpair import singularity_probe

    r = singularity_probe(args.m, args.k)
    return {"m": r.m, "k": r.k, "alpha": r.alpha, "beta": r.beta, "on_curve": r.on_curve,
            "in_orbit": r.in_orbit, "rank_A": r.rank_A, "rank_B": r.rank_B,
            "direction": r.direction.to_json()}, r.on_curve and r.in_orbit


def cmd_reduce(args) -> tuple[dict, bool]:
    from .reduction import FloatTolerance, HyperplaneSpec, hyperplane_reduce, random_hyperplane, secant_probe

    X = _load_variety(args)
    if args.eta:
        eta = _read_json(args.eta)
        if isinstance(eta, dict):
            eta = eta.get("eta")
        H = HyperplaneSpec.from_eta(X.ambient, eta)
    else:
        H = random_hyperplane(X.ambient, args.seed, 7919)
    rep = hyperplane_reduce(X, H, samples=args.samples, seed=args.seed,
                            tol=FloatTolerance(residual_bound=args.tol))
    report = {"hyperplane": H.to_json(), "reduction": rep.to_json()}
    if args.secant_trials:
        s = secant_probe(X, H.h, trials=args.secant_trials, seed=args.seed, tol=args.tol)
        report["secant"] = {"trials": s.trials, "failures": s.failures, "skipped": s.skipped}
    return report, rep.verdict


def cmd_extend(args) -> tuple[dict, bool]:
    from .reduction import conic_fixture, conormal_extend

    if args.fixture == "conic":
        f, z = conic_fixture()
    else:
        if not args.hypersurface:
            raise InputError("--hypersurface is required without --fixture")
        f = _poly_from_json(_read_json(args.hypersurface))
        z = None
        if args.param:
            zd = _read_json(args.param)
            comps = zd["components"] if isinstance(zd, dict) else zd
            nv = zd.get("nvars") if isinstance(zd, dict) else None
            z = [_poly_from_json(c, nv) for c in comps]
    res = conormal_extend(f, z)
    rep = legendrian_check(res.variety, samples=args.samples, seed=args.seed)
    report = {"qw_identity": res.qw_identity, "variety": res.variety.to_json(), "check": rep.to_json()}
    return report, res.qw_identity and rep.verdict


def cmd_join(args) -> tuple[dict, bool]:
    from .reduction import join_legendrian
    from .varieties import nondegeneracy_rank

    X1, X2 = _variety_ref(args.a), _variety_ref(args.b)
    Jn = join_legendrian(X1, X2)
    rep = legendrian_check(Jn, samples=args.samples, seed=args.seed)
    report = {"variety": Jn.to_json(), "check": rep.to_json(),
              "nondegeneracy_rank": nondegeneracy_rank(Jn, seed=args.seed)}
    return report, rep.verdict


def cmd_catalog_list(args) -> tuple[dict, bool]:
    return {"entries": [{"name": e.name, "summary": e.summary, "legendrian": e.legendrian}
                        for e in catalog.entries().values()]}, True


# Parser -----------------------------------------------------------------

def _common(p, samples=10):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--json", metavar="OUT", help="also write the report to this file")
    p.add_argument("--tol", type=float, default=1e-8)


def _variety_args(p):
    p.add_argument("--catalog", metavar="NAME")
    p.add_argument("--spec", metavar="FILE")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="legkit", description="Exact checks for Legendrian varieties.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="certify the Lagrangian cone condition")
    _variety_args(p)
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ideal", help="interpolate the quadrics through a variety")
    _variety_args(p)
    _common(p)
    p.add_argument("--oversample", type=int)
    p.add_argument("--with-quadrics", action="store_true")
    p.set_defaults(func=cmd_ideal)

    p = sub.add_parser("stabilizer", help="the projective stabilizer algebra")
    _variety_args(p)
    _common(p, samples=None)
    p.set_defaults(func=cmd_stabilizer)

    tor = sub.add_parser("toric").add_subparsers(dest="toric_command", required=True)
    p = tor.add_parser("classify")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-weight", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_toric_classify)
    p = tor.add_parser("build")
    p.add_argument("--weights", required=True)
    p.add_argument("--check", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_toric_build)

    mat = sub.add_parser("matpair").add_subparsers(dest="matpair_command", required=True)
    p = mat.add_parser("check")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--what", default="xinv")
    p.add_argument("--flavor", choices=["full", "symmetric", "skew"], default="full")
    _common(p, samples=5)
    p.set_defaults(func=cmd_matpair_check)
    p = mat.add_parser("s6")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--symbolic", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_matpair_s6)
    p = mat.add_parser("probe")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_matpair_probe)

    p = sub.add_parser("reduce", help="hyperplane section and symplectic reduction")
    _variety_args(p)
    p.add_argument("--eta", metavar="FILE", help="JSON list of covector entries; random if omitted")
    p.add_argument("--secant-trials", type=int, default=0)
    _common(p, samples=5)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("extend", help="conormal extension of a hypersurface")
    p.add_argument("--hypersurface", metavar="FILE")
    p.add_argument("--param", metavar="FILE")
    p.add_argument("--fixture", choices=["conic"])
    _common(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("join", help="join of two Legendrian varieties")
    p.add_argument("--a", required=True, help="catalog name or variety JSON file")
    p.add_argument("--b", required=True, help="catalog name or variety JSON file")
    _common(p)
    p.set_defaults(func=cmd_join)

    cat = sub.add_parser("catalog").add_subparsers(dest="catalog_command", required=True)
    p = cat.add_parser("list")
    _common(p)
    p.set_defaults(func=cmd_catalog_list)
    return ap


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = getattr(args, "json", None)
    try:
        report, ok = args.func(args)
    except (InputError, ValueError, KeyError) as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__}, None)
        return EXIT_USAGE
    except LegkitError as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__, "ok": False}, out)
        return EXIT_FAIL
    report = dict(report, ok=ok)
    _emit(report, out)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
