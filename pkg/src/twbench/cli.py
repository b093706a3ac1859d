"""Command-line front end.

Subcommands dispatch to the library modules and emit deterministic JSON
reports or CSV curves: floats are printed with 17 significant digits, exact
rationals as "p/q" strings, and JSON keys are sorted, so identical inputs and
seeds produce byte-identical output.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input or schema,
3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import catalog, hydro, model, reducer
from .symcore import frac_str


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _value_str(x) -> str:
    """Exact values as p/q, floats with 17 significant digits."""
    if isinstance(x, float):
        return _fmt(x)
    return frac_str(Fraction(x))


def _parse_assignments(text: str) -> dict[str, Fraction]:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise model.SchemaError(f"expected name=value, got {item!r}")
        name, _, raw = item.partition("=")
        out[name.strip()] = Fraction(raw.strip())
    return out


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(doc, out_path: str | None):
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out_path)


def _csv(header: str, rows, out_path: str | None):
    lines = [header]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    _emit("\n".join(lines) + "\n", out_path)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


# -- subcommand handlers -------------------------------------------------------


def _cmd_reduce(args) -> int:
    pde = model.parse_model(_read(args.model))
    try:
        m_deg, n_deg = (int(x) for x in args.ansatz.split("/"))
    except ValueError:
        raise model.SchemaError("--ansatz must look like M/N (numerator/denominator degree)")
    ansatz = reducer.ExpAnsatz(
        a=tuple(f"a{i}" for i in range(m_deg + 1)),
        b=tuple(f"b{i}" for i in range(n_deg + 1)),
        power=args.power,
    )
    system = reducer.reduce(pde, ansatz)
    _emit(system.to_json(), args.out)
    return 0


def _cmd_verify(args) -> int:
    system = reducer.AlgebraicSystem.from_json(_read(args.system))
    assignment = _parse_assignments(args.assign)
    verdict = reducer.verify_assignment(system, assignment)
    _dump_json({
        "status": verdict.status,
        "residuals": [frac_str(r) for r in verdict.residuals],
        "report": verdict.report,
    }, args.out)
    return 0 if verdict.passed else 1


def _cmd_solve(args) -> int:
    system = reducer.AlgebraicSystem.from_json(_read(args.system))
    fixed = _parse_assignments(args.fix)
    solutions = reducer.solve_numeric(system, fixed, seed=args.seed, starts=args.starts)
    _dump_json({
        "count": len(solutions),
        "seed": args.seed,
        "starts": args.starts,
        "solutions": [{k: _fmt(v) for k, v in sol.items()} for sol in solutions],
    }, args.out)
    return 0 if solutions else 3


def _cmd_catalog(args) -> int:
    if args.action == "list":
        doc = [{
            "family": e.family_id,
            "shape": e.shape,
            "free": list(e.free),
            "derived": dict(e.derived),
            "admissibility": list(e.admissibility),
            "expected": e.expected,
            "annotations": list(e.annotations),
        } for e in catalog.list_families()]
        _dump_json(doc, args.out)
        return 0
    # action == "verify"
    report = catalog.verify_entry(args.family, trials=args.trials, seed=args.seed)
    expectations = catalog.load_expectations(args.expectations)
    entry = expectations.get(args.family)
    matched = entry is not None and catalog.matches_expectations(report, entry)
    report["matches_expectations"] = matched
    _dump_json(report, args.out)
    return 0 if matched else 1


def _cmd_eval(args) -> int:
    free = _parse_assignments(args.free)
    _, solution = catalog.instantiate(args.family, free)
    try:
        lo, hi, n = args.range.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise model.SchemaError("--range must look like lo:hi:n")
    if n < 2:
        raise model.SchemaError("--range needs n >= 2")
    xi = np.linspace(lo, hi, n)
    u = reducer.sample_solution(solution, xi)
    _csv("xi,u", zip(xi, u), args.out)
    return 0


def _hydro_model(args) -> hydro.HydroModel:
    return hydro.parse_hydro_model(_read(args.model))


def _cmd_hydro_analyze(args) -> int:
    m = _hydro_model(args)
    report = hydro.critical_points(m)
    r3 = hydro.turning_point(m)
    points = []
    for R, kind, eig in report.points:
        points.append({
            "R": _fmt(R),
            "kind": kind,
            "eigenvalues": [str(e) if isinstance(e, complex) else _fmt(e) for e in eig],
        })
    _dump_json({
        "C1": _value_str(m.C1),
        "E": _value_str(m.E),
        "H1": _value_str(hydro.saddle_level(m)),
        "R1": _value_str(m.R1),
        "R2": _fmt(report.R2),
        "R3": _fmt(r3),
        "Psi_positive": report.Psi_positive,
        "saddle_angle": _fmt(hydro.saddle_angle(m)),
        "theorem_precondition": m.theorem_holds(),
        "critical_points": points,
    }, args.out)
    return 0


def _cmd_hydro_orbit(args) -> int:
    m = _hydro_model(args)
    try:
        r0, y0 = (float(x) for x in args.start.split(","))
    except ValueError:
        raise model.SchemaError("--start must look like R,Y")
    traj = hydro.flow(m, (r0, y0), (0.0, args.span), rel_tol=args.rtol)
    _csv("omega,R,Y,H", zip(traj.omega, traj.R, traj.Y, traj.H), args.out)
    return 0


def _cmd_hydro_separatrix(args) -> int:
    m = _hydro_model(args)
    r1, r3 = float(m.R1), hydro.turning_point(m)
    rows = []
    for R in np.linspace(r1, r3, args.samples):
        yp, ym = hydro.separatrix(m, float(R))
        rows.append((R, yp, ym))
    _csv("R,Y_plus,Y_minus", rows, args.out)
    return 0


def _cmd_hydro_homoclinic(args) -> int:
    m = _hydro_model(args)
    omega, R = hydro.homoclinic_profile(m, n=args.n)
    # full even profile: mirror the omega >= 0 branch
    rows = [(-w, r) for w, r in zip(omega[::-1], R[::-1])]
    rows.extend((w, r) for w, r in zip(omega[1:], R[1:]))
    _csv("omega,R", rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twbench",
        description="Travelling-wave reduction workbench and hydrodynamic "
                    "phase-plane analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a PDE against a symbolic exp-rational ansatz")
    p.add_argument("--model", required=True, help="PDE model JSON file")
    p.add_argument("--ansatz", required=True, help="degrees M/N of the ansatz")
    p.add_argument("--power", type=int, default=1, choices=(1, 2))
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_reduce)

    p = sub.add_parser("verify", help="exactly verify an assignment against a system")
    p.add_argument("--system", required=True, help="system JSON file from `reduce`")
    p.add_argument("--assign", required=True, help="comma list name=rational")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("solve", help="multistart damped-Newton solve of a system")
    p.add_argument("--system", required=True)
    p.add_argument("--fix", default="", help="comma list name=rational to pin")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("catalog", help="list or verify the closed-form families")
    p.add_argument("action", choices=("list", "verify"))
    p.add_argument("--family", help="family id (for verify)")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--expectations", default="./expectations.json")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_catalog)

    p = sub.add_parser("eval", help="sample a family's closed-form solution to CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--free", required=True, help="comma list name=rational")
    p.add_argument("--range", required=True, help="lo:hi:n sampling window")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("hydro-analyze", help="critical points, levels and angles")
    p.add_argument("--model", required=True, help="hydro model JSON file")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_hydro_analyze)

    p = sub.add_parser("hydro-orbit", help="integrate a phase trajectory to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--start", required=True, help="initial R,Y")
    p.add_argument("--span", type=float, default=100.0)
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_hydro_orbit)

    p = sub.add_parser("hydro-separatrix", help="sample the saddle separatrix to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_hydro_separatrix)

    p = sub.add_parser("hydro-homoclinic", help="homoclinic profile by quadrature to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_hydro_homoclinic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog" and args.action == "verify" and not args.family:
        parser.error("catalog verify requires --family")
    try:
        return args.handler(args)
    except (model.SchemaError, model.DomainError, hydro.OutOfDomain,
            catalog.Inadmissible, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (reducer.PoleInWindow, hydro.StiffnessFailure, hydro.QuadratureFailure,
            hydro.NoSecondRoot, hydro.NoTurningPoint, catalog.BranchFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
