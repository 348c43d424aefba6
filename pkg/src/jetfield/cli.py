"""Command-line front end.

Subcommands: analyze, solve, curvature, legendre, verify.  Every command
reads one problem file, builds a single report structure, and emits it as
text or (with --json) as a JSON document on stdout.  Exit codes: 0 on
success, 1 when the analysis itself is negative (failed residuals,
incompatible system, non-flat member, singular input to legendre), 2 on
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import connection as conn
from . import hamiltonian as ham
from . import lagrangian as lag
from . import numeric as num
from .expressions import Expr, ExprError, parse, zero_test
from .families import HAMILTONIAN_SIDE, LAGRANGIAN_SIDE
from .linsolve import IncompatibleSystemError
from .problem import HAMILTONIAN, LAGRANGIAN, ProblemError, load_problem

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


class AnalysisNegative(Exception):
    def __init__(self, report):
        super().__init__("analysis negative")
        self.report = report


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (ProblemError, ExprError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except AnalysisNegative as neg:
        _emit(neg.report, args.json)
        return EXIT_NEGATIVE
    _emit(report, args.json)
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="jetfield",
        description="Field equations of first-order field theories as "
        "multivector-field coefficient systems.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem file (TOML, schema = 1)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol", type=float, default=1e-4, help="residual tolerance")
    common.add_argument(
        "--assign",
        default="",
        help="free-parameter assignments, e.g. g1=0,g2=x1*y1",
    )
    sub = parser.add_subparsers(required=True)
    sub.add_parser("analyze", parents=[common]).set_defaults(func=cmd_analyze)
    sub.add_parser("solve", parents=[common]).set_defaults(func=cmd_solve)
    sub.add_parser("curvature", parents=[common]).set_defaults(func=cmd_curvature)
    pl = sub.add_parser("legendre", parents=[common])
    pl.add_argument(
        "--check-fl",
        action="store_true",
        help="also certify relatedness of matched solution members",
    )
    pl.set_defaults(func=cmd_legendre)
    pv = sub.add_parser("verify", parents=[common])
    pv.add_argument("--grid", help="serialized grid section instead of [section]")
    pv.set_defaults(func=cmd_verify)
    return parser


# ---------------------------------------------------------------------------
# report plumbing


def _emit(report, as_json):
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        _render(report, "")


def _render(value, indent):
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)):
                print(f"{indent}{k}:")
                _render(v, indent + "  ")
            else:
                print(f"{indent}{k}: {v}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, list) and not any(
                isinstance(x, (dict, list)) for x in v
            ):
                print(f"{indent}- [{', '.join(str(x) for x in v)}]")
            elif isinstance(v, (dict, list)):
                _render(v, indent)
            else:
                print(f"{indent}- {v}")
    else:
        print(f"{indent}{value}")


def _base_report(prob, command):
    return {
        "command": command,
        "formalism": prob.formalism,
        "m": prob.chart.m,
        "n": prob.chart.n,
        "expression": prob.expression_text,
    }


def _parse_assignments(text, prob):
    out = {}
    if not text:
        return out
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ProblemError(f"bad assignment '{piece}' (expected name=expr)")
        name, val = piece.split("=", 1)
        out[name.strip()] = parse(val, prob.chart, prob.parameters)
    return out


def _systems(prob):
    if prob.formalism == LAGRANGIAN:
        return lag.LagrangianSystem(prob.chart, prob.expression)
    return ham.HamiltonianSystem(prob.chart, prob.expression)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args):
    prob = load_problem(args.file)
    sys_ = _systems(prob)
    report = _base_report(prob, "analyze")
    if prob.formalism == LAGRANGIAN:
        h = lag.hessian_matrix(sys_)
        det = lag.hessian_det(sys_)
        reg = lag.is_regular(sys_)
        rank = lag.semi_holonomy_forcing(sys_, require_regular=False).solution.rank
        report["hessian"] = [[e.text() for e in row] for row in h]
        report["hessian_det"] = det.text()
        report["hessian_rank"] = rank
        report["regularity"] = str(reg)
        report["euler_lagrange"] = [
            f"EL{a + 1} = {e.text()}" for a, e in enumerate(lag.euler_lagrange(sys_))
        ]
    else:
        ch = prob.chart
        eqs = []
        for a in ch.fibers():
            for mu in ch.mus():
                eqs.append(
                    f"dy{a}/dx{mu} = {sys_.H.diff(ch.p(a, mu)).text()}"
                )
        for a in ch.fibers():
            lhs = " + ".join(f"dp{a}_{mu}/dx{mu}" for mu in ch.mus())
            eqs.append(f"{lhs} = {(-sys_.H.diff(ch.y(a))).text()}")
        report["hdw_equations"] = eqs
    return report


def _solve_family(prob):
    sys_ = _systems(prob)
    if prob.formalism == LAGRANGIAN:
        return sys_, lag.solve_el_mvf(sys_)
    return sys_, ham.hdw_solve(sys_)


def cmd_solve(args):
    prob = load_problem(args.file)
    report = _base_report(prob, "solve")
    sys_ = _systems(prob)
    ch = prob.chart
    if prob.formalism == LAGRANGIAN and lag.is_regular(sys_).kind == "proven-zero":
        rep = lag.singular_report(sys_)
        report["regular"] = False
        report["hessian_rank"] = rep.hessian_rank
        report["compatible"] = rep.compatible
        report["message"] = rep.message
        if rep.compatible:
            report["free_count"] = rep.free_count
        raise AnalysisNegative(report)
    try:
        sys_, fam = _solve_family(prob)
    except IncompatibleSystemError as e:
        report["compatible"] = False
        report["incompatible"] = str(e)
        raise AnalysisNegative(report)
    report["free_count"] = fam.free_count
    report["parameters"] = fam.parameters
    report["F"] = {
        f"F{a}_{mu}": fam.F[(a, mu)].text() for a in ch.fibers() for mu in ch.mus()
    }
    report["G"] = {
        f"G{a}_{mu}_{rho}": fam.G[(a, mu, rho)].text()
        for a in ch.fibers()
        for mu in ch.mus()
        for rho in ch.mus()
    }
    if fam.notes:
        report["notes"] = list(fam.notes)
    if prob.formalism == LAGRANGIAN:
        forcing = lag.semi_holonomy_forcing(sys_, require_regular=False)
        report["semi_holonomy"] = {
            "unique": forcing.unique,
            "F": {
                f"F{a}_{mu}": forcing.F[(a, mu)].text()
                for a in ch.fibers()
                for mu in ch.mus()
            },
        }
    else:
        report["trace_constraints"] = [
            f"{' + '.join(f'G{a}_{mu}_{mu}' for mu in ch.mus())} = "
            f"{(-sys_.H.diff(ch.y(a))).text()}"
            for a in ch.fibers()
        ]
    return report


def cmd_curvature(args):
    prob = load_problem(args.file)
    report = _base_report(prob, "curvature")
    sys_, fam = _solve_family(prob)
    assignment = {p: Expr.const(0) for p in fam.parameters}
    assignment.update(_parse_assignments(args.assign, prob))
    report["member"] = {p: e.text() for p, e in assignment.items()}
    F, G = fam.member(assignment)
    side = LAGRANGIAN_SIDE if prob.formalism == LAGRANGIAN else HAMILTONIAN_SIDE
    rep = conn.curvature(conn.mvf_to_connection(prob.chart, side, F, G))
    components = {}
    for (b, mu, eta), (e, verdict) in rep.symmetry.items():
        components[f"transverse[{b};{mu},{eta}]"] = {
            "value": e.text(),
            "verdict": str(verdict),
        }
    for (b, rho, mu, eta), (e, verdict) in rep.bracket.items():
        components[f"fiber[{b},{rho};{mu},{eta}]"] = {
            "value": e.text(),
            "verdict": str(verdict),
        }
    report["components"] = components
    report["flat"] = rep.flat
    if rep.flat == conn.NON_FLAT:
        key, e, _ = rep.nonflat_witness()
        report["offending_component"] = e.text()
        raise AnalysisNegative(report)
    return report


def cmd_legendre(args):
    prob = load_problem(args.file)
    if prob.formalism != LAGRANGIAN:
        raise ProblemError("legendre requires a lagrangian problem file")
    report = _base_report(prob, "legendre")
    sys_ = _systems(prob)
    ch = prob.chart
    reg = lag.is_regular(sys_)
    if reg.kind != "proven-nonzero":
        rank = lag.semi_holonomy_forcing(sys_, require_regular=False).solution.rank
        report["regularity"] = str(reg)
        report["hessian_rank"] = rank
        report["rejected"] = "singular Lagrangian: Legendre map is not invertible"
        raise AnalysisNegative(report)
    try:
        lm, sysH = ham.legendre_of(sys_)
    except ham.InversionFailure as e:
        report["inversion_failure"] = str(e)
        report["hint"] = "not quadratic in velocities; use the numeric fallback"
        raise AnalysisNegative(report)
    report["momenta"] = {
        f"p{a}_{mu}": lm.forward[(a, mu)].text() for a in ch.fibers() for mu in ch.mus()
    }
    report["inverse_velocities"] = {
        f"v{a}_{mu}": lm.inverse[(a, mu)].text() for a in ch.fibers() for mu in ch.mus()
    }
    report["H"] = sysH.H.text()
    report["hyper_regular"] = lm.hyper_regular
    if args.check_fl:
        famL = lag.solve_el_mvf(sys_)
        famH = ham.hdw_solve(sysH)
        zero = {p: Expr.const(0) for p in famL.parameters}
        FL, GL = famL.member(zero)
        zero_h = {p: Expr.const(0) for p in famH.parameters}
        FH, GH = famH.member(zero_h)
        try:
            verdict = ham.fl_relatedness(sys_, (FL, GL), (FH, GH))
            report["fl_related"] = True
            report["fl_scalar"] = verdict.f.text()
        except ham.ProportionalityFailure as e:
            report["fl_related"] = False
            report["fl_failure"] = str(e)
            raise AnalysisNegative(report)
    return report


def cmd_verify(args):
    prob = load_problem(args.file)
    report = _base_report(prob, "verify")
    sys_ = _systems(prob)
    ch = prob.chart
    if args.grid:
        section = num.read_section(args.grid)
    else:
        if prob.section is None:
            raise ProblemError("verify needs a [section] table or --grid")
        if prob.section.grid_path:
            section = num.read_section(prob.section.grid_path)
        else:
            axes = prob.section.axes
            if axes is None:
                raise ProblemError("closed-form sections need [section.axes]")
            missing = [p for p in prob.parameters if p not in prob.parameter_values]
            if missing:
                raise ProblemError(
                    f"parameters need numeric values for verification: {missing}"
                )
            section = num.section_from_exprs(
                ch,
                axes,
                prob.section.y_exprs,
                p_exprs=prob.section.p_exprs,
                parameters=prob.parameter_values,
            )
    if prob.formalism == LAGRANGIAN:
        rep = num.el_residual_grid(sys_, section, tol=args.tol)
    else:
        rep = num.hdw_residual_grid(sys_, section, tol=args.tol)
    report["tol"] = args.tol
    report["grid"] = {
        "shape": list(rep.shape),
        "axes": [
            {"n": ax.n, "h": ax.h, "x0": ax.x0} for ax in section.axes
        ],
    }
    report["residuals"] = [
        {"equation": label, "max_abs": mx, "rms": rms}
        for label, mx, rms in zip(rep.labels, rep.max_abs, rep.rms)
    ]
    report["passed"] = rep.passed
    if not rep.passed:
        label, worst = rep.worst()
        report["worst"] = {"equation": label, "max_abs": worst}
        raise AnalysisNegative(report)
    return report


if __name__ == "__main__":
    sys.exit(main())
