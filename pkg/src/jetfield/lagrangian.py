"""Lagrangian formalism on the jet chart: Cartan forms, Euler-Lagrange
operator, and the coefficient system for Euler-Lagrange multivector fields.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .chart import ChartSpec, total_derivative
from .expressions import (
    Expr,
    ExprError,
    PROVEN_NONZERO,
    PROVEN_ZERO,
    sym,
    zero_test,
)
from .exterior import DiffForm, base_volume_contraction, contract, ext_d, volume_form, wedge
from .families import LAGRANGIAN_SIDE, MvfFamily, member_multivector
from .linsolve import IncompatibleSystemError, solve_linear


@dataclass(frozen=True)
class LagrangianSystem:
    chart: ChartSpec
    L: Expr

    def __post_init__(self):
        banned = set(self.chart.p_names()) | set(self.chart.w_names())
        bad = sorted(self.L.free_symbols() & banned)
        if bad:
            raise ExprError(
                f"Lagrangian may only involve x, y, v coordinates; found {', '.join(bad)}"
            )


def velocity_indices(chart):
    """(A, mu) pairs in the canonical (fiber-major) order used for Hessian
    rows and columns."""
    return [(a, mu) for a in chart.fibers() for mu in chart.mus()]


def hessian(sys):
    """Velocity Hessian as a dict ((A, mu), (B, nu)) -> Expr."""
    chart = sys.chart
    out = {}
    first = {
        (a, mu): sys.L.diff(chart.v(a, mu)) for a, mu in velocity_indices(chart)
    }
    for a, mu in velocity_indices(chart):
        for b, nu in velocity_indices(chart):
            out[((a, mu), (b, nu))] = first[(a, mu)].diff(chart.v(b, nu))
    return out


def hessian_matrix(sys):
    idx = velocity_indices(sys.chart)
    h = hessian(sys)
    return [[h[(r, c)] for c in idx] for r in idx]


def hessian_det(sys):
    rows = hessian_matrix(sys)
    n = len(rows)
    det = Expr.const(0)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = Expr.const(sign)
        for i, j in enumerate(perm):
            term = term * rows[i][j]
            if term.is_zero():
                break
        det = det + term
    return det


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def is_regular(sys):
    """Zero-test verdict on det of the velocity Hessian: proven nonzero
    means regular on the whole chart, proven zero means nowhere regular."""
    return zero_test(hessian_det(sys))


def cartan_forms(sys):
    """(Theta_L, Omega_L) from the standard local expression of Theta_L
    and Omega_L = -d Theta_L."""
    chart = sys.chart
    theta = DiffForm.zero(chart, chart.m)
    for a, mu in velocity_indices(chart):
        dL = sys.L.diff(chart.v(a, mu))
        if dL.is_zero():
            continue
        dy = DiffForm.monomial(chart, [chart.y(a)], Expr.const(1))
        theta = theta + wedge(dy, base_volume_contraction(chart, mu)).scale(dL)
    energy = -sys.L
    for a, mu in velocity_indices(chart):
        energy = energy + sys.L.diff(chart.v(a, mu)) * sym(chart.v(a, mu))
    theta = theta - volume_form(chart).scale(energy)
    omega = -ext_d(theta)
    return theta, omega


def omega_display(sys):
    """Omega_L assembled term family by term family from its displayed
    chart expression; used as a cross-check against -d Theta_L."""
    chart = sys.chart
    L = sys.L
    out = DiffForm.zero(chart, chart.m + 1)
    vol = volume_form(chart)
    for a, mu in velocity_indices(chart):
        Lv = L.diff(chart.v(a, mu))
        dmu = base_volume_contraction(chart, mu)
        for b, nu in velocity_indices(chart):
            c = Lv.diff(chart.v(b, nu))
            if not c.is_zero():
                dv_dy = wedge(
                    DiffForm.monomial(chart, [chart.v(b, nu)], Expr.const(1)),
                    DiffForm.monomial(chart, [chart.y(a)], Expr.const(1)),
                )
                out = out + wedge(dv_dy, dmu).scale(-c)
                out = out + wedge(
                    DiffForm.monomial(chart, [chart.v(b, nu)], Expr.const(1)), vol
                ).scale(c * sym(chart.v(a, mu)))
        for b in chart.fibers():
            c = Lv.diff(chart.y(b))
            if not c.is_zero():
                dy_dy = wedge(
                    DiffForm.monomial(chart, [chart.y(b)], Expr.const(1)),
                    DiffForm.monomial(chart, [chart.y(a)], Expr.const(1)),
                )
                out = out + wedge(dy_dy, dmu).scale(-c)
    for b in chart.fibers():
        coeff = -L.diff(chart.y(b))
        for a, mu in velocity_indices(chart):
            coeff = coeff + L.diff(chart.v(a, mu)).diff(chart.y(b)) * sym(chart.v(a, mu))
        for mu in chart.mus():
            coeff = coeff + L.diff(chart.v(b, mu)).diff(chart.x(mu))
        if not coeff.is_zero():
            out = out + wedge(
                DiffForm.monomial(chart, [chart.y(b)], Expr.const(1)), vol
            ).scale(coeff)
    return out


def euler_lagrange(sys):
    """EL_A = dL/dy^A - D_mu(dL/dv^A_mu), one Expr per fiber component,
    over the extended (x, y, v, w) coordinates."""
    chart = sys.chart
    out = []
    for a in chart.fibers():
        e = sys.L.diff(chart.y(a))
        for mu in chart.mus():
            e = e - total_derivative(sys.L.diff(chart.v(a, mu)), mu, chart)
        out.append(e)
    return out


def g_unknowns(chart):
    """(B, nu, mu) unknown order for the dy-coefficient system; (B, nu, mu)
    addresses the coefficient of d/dv^B_mu in wedge factor nu."""
    return [
        (b, nu, mu)
        for b in chart.fibers()
        for nu in chart.mus()
        for mu in chart.mus()
    ]


def assemble_el_system(sys):
    """The N x N m^2 linear system on the G coefficients coming from the
    vanishing of the dy coefficients of i(X)Omega_L (with F = v)."""
    chart = sys.chart
    h = hessian(sys)
    unknowns = g_unknowns(chart)
    matrix = []
    rhs = []
    for a in chart.fibers():
        row = []
        for b, nu, mu in unknowns:
            row.append(h[((b, nu), (a, mu))])
        r = sys.L.diff(chart.y(a))
        for mu in chart.mus():
            r = r - sys.L.diff(chart.v(a, mu)).diff(chart.x(mu))
        for b in chart.fibers():
            for mu in chart.mus():
                r = r - sys.L.diff(chart.v(a, mu)).diff(chart.y(b)) * sym(chart.v(b, mu))
        matrix.append(row)
        rhs.append(r)
    return matrix, rhs, unknowns


@dataclass
class ForcingRecord:
    """The dv-coefficient system on the transverse coefficients F and its
    solution; for regular Lagrangians it forces F^A_mu = v^A_mu."""

    matrix: list
    unknowns: list
    solution: object
    unique: bool
    F: dict
    undetermined: list


def semi_holonomy_forcing(sys, require_regular=True):
    chart = sys.chart
    reg = is_regular(sys)
    if require_regular and reg.kind != PROVEN_NONZERO:
        raise ExprError(
            f"regularity not certified (hessian determinant verdict: {reg})"
        )
    h = hessian(sys)
    unknowns = velocity_indices(chart)  # (B, mu) slots for F^B_mu - v^B_mu
    matrix = []
    for a, nu in velocity_indices(chart):
        matrix.append([h[((a, nu), (b, mu))] for b, mu in unknowns])
    rhs = [Expr.const(0)] * len(matrix)
    sol = solve_linear(matrix, rhs)
    unique = sol.compatible and sol.free_count == 0
    F = {}
    undetermined = []
    free_cols = set(range(len(unknowns))) - set(sol.pivot_columns)
    for i, (b, mu) in enumerate(unknowns):
        if i in free_cols:
            undetermined.append((b, mu))
        F[(b, mu)] = sym(chart.v(b, mu)) + sol.particular[i]
    return ForcingRecord(
        matrix=matrix,
        unknowns=unknowns,
        solution=sol,
        unique=unique,
        F=F,
        undetermined=undetermined,
    )


def solve_el_mvf(sys):
    """Solve the coefficient system for semi-holonomic Euler-Lagrange
    multivector fields; free unknowns become parameter symbols g1, g2, ..."""
    reg = is_regular(sys)
    if reg.kind == PROVEN_ZERO:
        raise ExprError("Lagrangian is nowhere regular; use singular_report")
    chart = sys.chart
    matrix, rhs, unknowns = assemble_el_system(sys)
    sol = solve_linear(matrix, rhs)
    if not sol.compatible:
        raise IncompatibleSystemError(sol.bad_row, sol.bad_residual)
    params = [f"g{i + 1}" for i in range(len(sol.null_basis))]
    G = {}
    for i, (b, nu, mu) in enumerate(unknowns):
        e = sol.particular[i]
        for j, vec in enumerate(sol.null_basis):
            e = e + sym(params[j]) * vec[i]
        G[(b, nu, mu)] = e
    F = {(a, mu): sym(chart.v(a, mu)) for a, mu in velocity_indices(chart)}
    notes = list(sol.notes)
    if reg.kind != PROVEN_NONZERO:
        notes.append(f"regularity verdict: {reg}")
    return MvfFamily(
        chart=chart,
        side=LAGRANGIAN_SIDE,
        F=F,
        G=G,
        parameters=params,
        free_count=sol.free_count,
        notes=notes,
    )


@dataclass
class ContractionResidual:
    dv: dict  # (A, mu) -> Expr
    dy: dict  # A -> Expr
    dx: dict  # mu -> Expr

    def all_zero(self):
        return all(
            zero_test(e).kind == PROVEN_ZERO
            for group in (self.dv, self.dy, self.dx)
            for e in group.values()
        )


def contraction_residual(sys, F, G):
    """Coefficients of the 1-form i(X)Omega_L for a concrete normalized
    member, grouped by dv^A_mu, dy^A and dx^mu."""
    chart = sys.chart
    _, omega = cartan_forms(sys)
    X = member_multivector(chart, LAGRANGIAN_SIDE, F, G)
    r = contract(X, omega)
    dv = {
        (a, mu): r.coefficient([chart.v(a, mu)])
        for a, mu in velocity_indices(chart)
    }
    dy = {a: r.coefficient([chart.y(a)]) for a in chart.fibers()}
    dx = {mu: r.coefficient([chart.x(mu)]) for mu in chart.mus()}
    return ContractionResidual(dv=dv, dy=dy, dx=dx)


@dataclass
class SingularReport:
    regular: bool
    regularity: object
    hessian_rank: int
    forcing: ForcingRecord
    compatible: bool
    incompatible_row: int = None
    incompatible_residual: Expr = None
    free_count: int = None
    message: str = ""


def singular_report(sys):
    """Rank and compatibility facts for the coefficient system; no
    constraint-submanifold analysis is attempted."""
    reg = is_regular(sys)
    forcing = semi_holonomy_forcing(sys, require_regular=False)
    rank = forcing.solution.rank
    matrix, rhs, _ = assemble_el_system(sys)
    sol = solve_linear(matrix, rhs)
    if reg.kind == PROVEN_NONZERO:
        return SingularReport(
            regular=True,
            regularity=reg,
            hessian_rank=rank,
            forcing=forcing,
            compatible=sol.compatible,
            free_count=sol.free_count,
            message="regular; singular analysis not applicable",
        )
    if sol.compatible:
        msg = (
            f"hessian rank {rank}; coefficient system compatible with "
            f"{sol.free_count} free functions"
        )
    else:
        msg = (
            f"hessian rank {rank}; coefficient system incompatible on the chart "
            f"(row {sol.bad_row} reduces to 0 = {sol.bad_residual})"
        )
    return SingularReport(
        regular=False,
        regularity=reg,
        hessian_rank=rank,
        forcing=forcing,
        compatible=sol.compatible,
        incompatible_row=sol.bad_row,
        incompatible_residual=sol.bad_residual,
        free_count=sol.free_count if sol.compatible else None,
        message=msg,
    )
