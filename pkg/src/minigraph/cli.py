"""Command-line interface.

Exit codes: 0 when the verdict is a success, 1 when it is a failure, 2 for
usage and expression errors. A JSON report is written to stdout for 0 and 1.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
import warnings

from . import catalog
from .exprlang import COMPLEX1, ExprError, parse
from .geometry import grid_minimality_report, parse_pair
from .grid import DEFAULT_GRID, GridSpec
from .isothermal import FIT_GRID, fit_shear, harmonicity_check
from .jacobian import CRClass, RangeVerdict, classify_cr, jacobian, jacobian_range
from .report import RUN_SEED, AnalysisReport, write_csv
from .slag import FuClass, SlagProblem, fit_theta, fu_classify, gradient_graph, slag_report
from .weierstrass import HoloData, construct_surface, graph_jets, verify_construction

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _grid(text: str) -> GridSpec:
    try:
        return GridSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


VALUE_OPTIONS = {"--f1", "--f2", "--h", "--u", "--a", "--b", "--theta", "--offset", "--grid", "--radii"}


def _bind_values(argv: list[str]) -> list[str]:
    """Attach option values that start with '-' (e.g. ``--f2 "-x"``) as ``--f2=-x``."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def cmd_verify(args) -> tuple[AnalysisReport, int]:
    f = parse_pair(args.f1, args.f2)
    samples = []
    report = grid_minimality_report(f, _grid(args.grid), args.tol, samples_out=samples)
    if args.dump:
        write_csv(args.dump, ["x", "y", "res1", "res2", "H1", "H2"],
                  [(s.x, s.y, s.res[0], s.res[1], s.H[0], s.H[1]) for s in samples])
    ok = report.verdicts["minimality"] == "minimal"
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_classify(args) -> tuple[AnalysisReport, int]:
    f = parse_pair(args.f1, args.f2)
    grid = _grid(args.grid)
    res = classify_cr(f, grid, args.tol)
    report = AnalysisReport("classify", inputs={"f1": str(f[0]), "f2": str(f[1]), "grid": str(grid),
                                                "tol": args.tol})
    report.errors.extend(res.errors)
    report.checks.update(max_abs_f_z=res.max_abs_fz, max_abs_f_zbar=res.max_abs_fzbar,
                         jacobian_min=res.jacobian_min, jacobian_max=res.jacobian_max)
    report.verdicts["classification"] = res.kind.value
    sign_ok = {CRClass.HOLOMORPHIC: res.jacobian_min >= 0,
               CRClass.ANTI_HOLOMORPHIC: res.jacobian_max <= 0,
               CRClass.NEITHER: True}[res.kind]
    report.verdicts["jacobian_sign"] = "consistent" if sign_ok else "inconsistent"
    report.details["note"] = res.note
    return report, EXIT_OK if sign_ok and not res.errors else EXIT_FAIL


def cmd_jrange(args) -> tuple[AnalysisReport, int]:
    f = parse_pair(args.f1, args.f2)
    radii = _floats(args.radii)
    try:
        ev = jacobian_range(f, radii, args.resolution, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = AnalysisReport("jrange", inputs={"f1": str(f[0]), "f2": str(f[1]), "radii": radii,
                                              "resolution": args.resolution, "tol": args.tol})
    d = ev.as_dict()
    report.checks.update(sampled_min=ev.sampled_min, sampled_max=ev.sampled_max)
    report.verdicts["range"] = d.pop("verdict")
    report.details.update(d)
    if args.dump:
        write_csv(args.dump, ["radius", "x", "y", "J"], ev.samples)
    return report, EXIT_OK


def cmd_construct(args) -> tuple[AnalysisReport, int]:
    offset = _floats(args.offset)
    if len(offset) != 2:
        raise UsageError("--offset takes two numbers C1,C2")
    try:
        data = HoloData(parse(args.h, COMPLEX1), args.a, args.b, origin_offset=tuple(offset))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = _grid(args.grid)
    report = verify_construction(data, grid)
    report.inputs["quad_order"] = args.quad_order
    if args.dump:
        surface = construct_surface(data, grid, args.quad_order)
        write_csv(args.dump, list(surface.CSV_HEADER), surface.rows())
    ok = report.verdicts["construction"] == "consistent"
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_fit(args) -> tuple[AnalysisReport, int]:
    f = parse_pair(args.f1, args.f2)
    grid = _grid(args.grid) if args.grid else FIT_GRID
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = fit_shear(f, grid, args.starts, args.max_iter)
    report = AnalysisReport("fit-isothermal", inputs={"f1": str(f[0]), "f2": str(f[1]), "grid": str(grid),
                                                      "starts": args.starts, "max_iter": args.max_iter})
    report.checks.update(a=params.a, b=params.b, defect=params.defect,
                         harmonicity=harmonicity_check(f, params, grid))
    report.details.update(params.as_dict())
    report.details["warnings"] = [str(w.message) for w in caught]
    report.verdicts["fit"] = "converged" if params.converged else "not-converged"
    return report, EXIT_OK if params.converged else EXIT_FAIL


def cmd_slag(args) -> tuple[AnalysisReport, int]:
    p = SlagProblem(parse(args.u), args.theta)
    report = slag_report(p, _grid(args.grid), args.tol)
    return report, EXIT_OK if report.verdicts["slag"] == "solution" else EXIT_FAIL


# --------------------------------------------------------------------------
# selftest
# --------------------------------------------------------------------------


def _selftest_checks():
    osserman = parse_pair(catalog.OSSERMAN_F1, catalog.OSSERMAN_F2)
    grid = GridSpec.parse(DEFAULT_GRID)

    def osserman_minimal():
        rep = grid_minimality_report(osserman, grid)
        worst = max(rep.checks["max_residual_norm"], rep.checks["max_abs_H1"], rep.checks["max_abs_H2"])
        return worst < 1e-9, worst

    def osserman_jacobian():
        from .geometry import map_jets
        rng = random.Random(RUN_SEED)
        worst = 0.0
        for _ in range(100):
            x, y = rng.uniform(-2, 2), rng.uniform(-2, 2)
            exact = catalog.osserman_jacobian(x)
            worst = max(worst, abs(jacobian(map_jets(osserman, x, y)) - exact) / abs(exact))
        return worst < 1e-10, worst

    def osserman_range():
        ev = jacobian_range(osserman, [1, 2, 3], 41)
        ok = ev.verdict is RangeVerdict.FULL_RANGE_EVIDENCE and ev.sampled_min < -50 and ev.sampled_max > 400
        return ok, [ev.sampled_min, ev.sampled_max]

    def weierstrass_seeds():
        worst = {}
        ok = True
        for h, a, b in catalog.WEIERSTRASS_SEEDS:
            rep = verify_construction(HoloData.from_strings(h, a, b), grid)
            ok = ok and rep.verdicts["construction"] == "consistent"
            for k, v in rep.checks.items():
                worst[k] = max(worst.get(k, 0.0), v)
        return ok, worst

    def osserman_reconstruction():
        h, a, b, off = catalog.OSSERMAN_SEED
        data = HoloData.from_strings(h, a, b, off)
        J0 = jacobian(graph_jets(data, 0.0, 0.0))
        worst = max(abs(jacobian(graph_jets(data, u, 0.0, with_values=False)) - catalog.osserman_jacobian(u))
                    for u in [-2 + 0.1 * k for k in range(41)])
        return abs(J0 - 1.0) < 1e-12 and worst < 1e-9, [J0, worst]

    def isothermal_fit():
        out = []
        ok = True
        for f, (a, b) in ((osserman, (0.0, 2.0)), (parse_pair("0", "0"), (0.0, 1.0)),
                          (parse_pair(*catalog.Z_SQUARED), (0.0, 1.0))):
            p = fit_shear(f, FIT_GRID, check_minimal=False)
            harm = harmonicity_check(f, p, FIT_GRID)
            ok = ok and abs(p.a - a) < 1e-4 and abs(p.b - b) < 1e-4 and harm < 1e-9
            out.append([p.a, p.b, harm])
        return ok, out

    def classification():
        kinds = []
        ok = True
        for pair, want in ((catalog.Z_SQUARED, CRClass.HOLOMORPHIC),
                           (catalog.CONJ_Z_SQUARED, CRClass.ANTI_HOLOMORPHIC),
                           ((catalog.OSSERMAN_F1, catalog.OSSERMAN_F2), CRClass.NEITHER)):
            res = classify_cr(parse_pair(*pair), grid)
            sign = {CRClass.HOLOMORPHIC: res.jacobian_min >= 0,
                    CRClass.ANTI_HOLOMORPHIC: res.jacobian_max <= 0}.get(res.kind, True)
            ok = ok and res.kind is want and sign
            kinds.append(res.kind.value)
        return ok, kinds

    def slag_suite():
        quad = SlagProblem.from_string("x^2+y^2")
        fq = fit_theta(quad, grid)
        ok = abs(fq.theta - math.atan2(4, 3)) < 1e-12 and fq.residual < 1e-12
        ok = ok and fu_classify(quad, grid).kind is FuClass.QUADRATIC
        harm = SlagProblem.from_string("exp(x)*cos(y)")
        fh = fit_theta(harm, grid)
        g = gradient_graph(harm)
        gres = grid_minimality_report(g, grid).checks["max_residual_norm"]
        ok = ok and fh.theta == 0.0 and fu_classify(harm, grid).kind is FuClass.HARMONIC
        ok = ok and classify_cr(g, grid).kind is CRClass.ANTI_HOLOMORPHIC and gres < 1e-9
        quartic = SlagProblem.from_string("x^4")
        ok = ok and fu_classify(quartic, grid).kind is FuClass.OTHER and fit_theta(quartic, grid).residual > 0
        return ok, [fq.theta, fq.residual, fh.theta, gres]

    return [
        ("osserman_minimal", osserman_minimal),
        ("osserman_jacobian_closed_form", osserman_jacobian),
        ("osserman_jacobian_range", osserman_range),
        ("weierstrass_identities", weierstrass_seeds),
        ("osserman_reconstruction", osserman_reconstruction),
        ("isothermal_fit", isothermal_fit),
        ("cr_classification", classification),
        ("slag_suite", slag_suite),
    ]


def cmd_selftest(args) -> tuple[AnalysisReport, int]:
    report = AnalysisReport("selftest")
    all_ok = True
    rows = []
    for name, check in _selftest_checks():
        ok, value = check()
        all_ok = all_ok and ok
        report.checks[name] = value
        report.verdicts[name] = "pass" if ok else "fail"
        rows.append((name, ok))
    report.details["all_passed"] = all_ok
    width = max(len(n) for n, _ in rows)
    for name, ok in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}", file=args.table_stream)
    return report, EXIT_OK if all_ok else EXIT_FAIL


# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="minigraph",
        description="Minimal graphs in R^4: minimality checks, holomorphy classification, "
                    "Weierstrass-type construction, isothermal shear fitting and special Lagrangian checks.",
        epilog="Grids are X0:X1:NX,Y0:Y1:NY (default -2:2:41,-2:2:41). Exit status: 0 success, "
               "1 failed verdict, 2 usage or expression error. MINIGRAPH_THREADS caps worker threads.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pair(p):
        p.add_argument("--f1", required=True, help="first component f1(x, y)")
        p.add_argument("--f2", required=True, help="second component f2(x, y)")

    p = sub.add_parser("verify", help="minimal surface equation and mean curvature on a grid")
    pair(p)
    p.add_argument("--grid", default=DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--dump", metavar="PATH", help="CSV of x,y,res1,res2,H1,H2")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="holomorphic / anti-holomorphic / neither")
    pair(p)
    p.add_argument("--grid", default=DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("jrange", help="sampled range of the Jacobian on growing squares")
    pair(p)
    p.add_argument("--radii", default="1,2,3")
    p.add_argument("--resolution", type=int, default=41)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--dump", metavar="PATH", help="CSV of radius,x,y,J")
    p.set_defaults(func=cmd_jrange)

    p = sub.add_parser("construct", help="minimal graph from holomorphic seed (h, a, b)")
    p.add_argument("--h", required=True, help="holomorphic seed h(w)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--offset", default="0,0", help="values C1,C2 of (f1, f2) at w = 0")
    p.add_argument("--grid", default=DEFAULT_GRID, help="grid in the w = u + iv plane")
    p.add_argument("--quad-order", type=int, default=8)
    p.add_argument("--dump", metavar="PATH", help="CSV of u,v,x,y,f1,f2,J")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("fit-isothermal", help="recover shear parameters (a, b)")
    pair(p)
    p.add_argument("--grid", default=None, help=f"default {FIT_GRID}")
    p.add_argument("--starts", type=int, default=15)
    p.add_argument("--max-iter", type=int, default=2000)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("slag", help="special Lagrangian equation checks for a potential u")
    p.add_argument("--u", required=True)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--grid", default=DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_slag)

    p = sub.add_parser("selftest", help="run the built-in reference examples")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_bind_values(argv))
        args.table_stream = stderr
        report, code = args.func(args)
    except (UsageError, ExprError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    report.inputs.setdefault("argv", list(argv))
    stdout.write(report.to_json() + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
