"""Hamiltonian formalism on the multimomentum chart: Hamilton-Cartan
forms, the Hamilton-De Donder-Weyl coefficient equations, the Legendre map
for hyper-regular (velocity-quadratic) Lagrangians, and relatedness of
Lagrangian/Hamiltonian solution members through that map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chart import ChartSpec
from .expressions import (
    Expr,
    ExprError,
    PROVEN_NONZERO,
    PROVEN_ZERO,
    sym,
    zero_test,
)
from .exterior import DiffForm, base_volume_contraction, contract, ext_d, volume_form, wedge
from .families import HAMILTONIAN_SIDE, LAGRANGIAN_SIDE, MvfFamily, member_multivector
from .lagrangian import LagrangianSystem, hessian, is_regular, velocity_indices
from .linsolve import solve_linear


class InversionFailure(ExprError):
    pass


class ProportionalityFailure(ExprError):
    def __init__(self, key, lhs, rhs):
        super().__init__(
            f"pushed-forward component {key} is {lhs}, expected multiple of {rhs}"
        )
        self.component = key
        self.lhs = lhs
        self.rhs = rhs


@dataclass(frozen=True)
class HamiltonianSystem:
    chart: ChartSpec
    H: Expr

    def __post_init__(self):
        banned = set(self.chart.v_names()) | set(self.chart.w_names())
        bad = sorted(self.H.free_symbols() & banned)
        if bad:
            raise ExprError(
                f"Hamiltonian may only involve x, y, p coordinates; found {', '.join(bad)}"
            )


def hamilton_cartan_forms(sys):
    """(Theta_h, Omega_h) with Theta_h = p dy ^ d^{m-1}x - H d^m x and
    Omega_h = -d Theta_h."""
    chart = sys.chart
    theta = DiffForm.zero(chart, chart.m)
    for a in chart.fibers():
        dy = DiffForm.monomial(chart, [chart.y(a)], Expr.const(1))
        for mu in chart.mus():
            theta = theta + wedge(dy, base_volume_contraction(chart, mu)).scale(
                sym(chart.p(a, mu))
            )
    theta = theta - volume_form(chart).scale(sys.H)
    omega = -ext_d(theta)
    return theta, omega


def omega_h_display(sys):
    """Omega_h = -dp ^ dy ^ d^{m-1}x_mu + dH ^ d^m x, assembled directly
    from its displayed form as a cross-check."""
    chart = sys.chart
    out = DiffForm.zero(chart, chart.m + 1)
    for a in chart.fibers():
        dy = DiffForm.monomial(chart, [chart.y(a)], Expr.const(1))
        for mu in chart.mus():
            dp = DiffForm.monomial(chart, [chart.p(a, mu)], Expr.const(1))
            out = out - wedge(wedge(dp, dy), base_volume_contraction(chart, mu))
    dH = ext_d(DiffForm.function(chart, sys.H))
    out = out + wedge(dH, volume_form(chart))
    return out


def hdw_g_unknowns(chart):
    """(A, mu, rho): coefficient of d/dp^A_rho in wedge factor mu."""
    return [
        (a, mu, rho)
        for a in chart.fibers()
        for mu in chart.mus()
        for rho in chart.mus()
    ]


def hdw_solve(sys):
    """F^A_nu = dH/dp^A_nu (unique), trace of G constrained by -dH/dy^A,
    remaining N(m^2 - 1) momentum coefficients free."""
    chart = sys.chart
    F = {
        (a, nu): sys.H.diff(chart.p(a, nu))
        for a in chart.fibers()
        for nu in chart.mus()
    }
    unknowns = hdw_g_unknowns(chart)
    matrix = []
    rhs = []
    for a in chart.fibers():
        row = [
            Expr.const(1) if (b == a and mu == rho) else Expr.const(0)
            for b, mu, rho in unknowns
        ]
        matrix.append(row)
        rhs.append(-sys.H.diff(chart.y(a)))
    sol = solve_linear(matrix, rhs)
    params = [f"g{i + 1}" for i in range(len(sol.null_basis))]
    G = {}
    for i, key in enumerate(unknowns):
        e = sol.particular[i]
        for j, vec in enumerate(sol.null_basis):
            e = e + sym(params[j]) * vec[i]
        G[key] = e
    return MvfFamily(
        chart=chart,
        side=HAMILTONIAN_SIDE,
        F=F,
        G=G,
        parameters=params,
        free_count=sol.free_count,
    )


@dataclass
class HdwResidual:
    dp: dict  # (A, mu) -> Expr
    dy: dict  # A -> Expr
    dx: dict  # mu -> Expr

    def all_zero(self):
        return all(
            zero_test(e).kind == PROVEN_ZERO
            for group in (self.dp, self.dy, self.dx)
            for e in group.values()
        )


def hdw_residual(sys, F, G):
    """Grouped coefficients of i(X)Omega_h for a concrete normalized
    member."""
    chart = sys.chart
    _, omega = hamilton_cartan_forms(sys)
    X = member_multivector(chart, HAMILTONIAN_SIDE, F, G)
    r = contract(X, omega)
    dp = {
        (a, mu): r.coefficient([chart.p(a, mu)])
        for a in chart.fibers()
        for mu in chart.mus()
    }
    dy = {a: r.coefficient([chart.y(a)]) for a in chart.fibers()}
    dx = {mu: r.coefficient([chart.x(mu)]) for mu in chart.mus()}
    return HdwResidual(dp=dp, dy=dy, dx=dx)


@dataclass
class LegendreMap:
    forward: dict  # (A, mu) -> Expr in (x, y, v): the momenta dL/dv^A_mu
    inverse: dict  # (A, mu) -> Expr in (x, y, p), when hyper-regular
    hyper_regular: bool
    notes: list = field(default_factory=list)

    def forward_subs(self):
        """Substitution map p name -> momentum Expr (pullback to the jet
        chart)."""
        return {
            f"p{a}_{mu}": e for (a, mu), e in self.forward.items()
        }

    def inverse_subs(self):
        return {
            f"v{a}_{mu}": e for (a, mu), e in self.inverse.items()
        }


def legendre_of(sys):
    """Legendre map p = dL/dv plus the induced Hamiltonian H = p.v - L.

    Exact symbolic inversion is performed for Lagrangians whose velocity
    Hessian is velocity-independent (quadratic kinetic terms); anything
    else raises InversionFailure and is left to pointwise numerics.
    """
    chart = sys.chart
    reg = is_regular(sys)
    if reg.kind != PROVEN_NONZERO:
        raise ExprError(
            f"Legendre map requires certified regularity (verdict: {reg})"
        )
    idx = velocity_indices(chart)
    forward = {(a, mu): sys.L.diff(chart.v(a, mu)) for a, mu in idx}
    h = hessian(sys)
    vnames = set(chart.v_names())
    for entry in h.values():
        if entry.free_symbols() & vnames:
            raise InversionFailure(
                "Lagrangian is not quadratic in the velocities; symbolic "
                "inversion unavailable (use the numeric fallback)"
            )
    zero_v = {name: Expr.const(0) for name in chart.v_names()}
    matrix = [[h[(r, c)] for c in idx] for r in idx]
    rhs = [
        sym(chart.p(a, mu)) - forward[(a, mu)].subs(zero_v) for a, mu in idx
    ]
    sol = solve_linear(matrix, rhs)
    hyper = sol.compatible and sol.free_count == 0
    inverse = {}
    if hyper:
        for i, (a, mu) in enumerate(idx):
            inverse[(a, mu)] = sol.particular[i]
    lm = LegendreMap(
        forward=forward, inverse=inverse, hyper_regular=hyper, notes=list(sol.notes)
    )
    if not hyper:
        raise InversionFailure("velocity system is not uniquely invertible")
    vmap = lm.inverse_subs()
    H = -sys.L.subs(vmap)
    for a, mu in idx:
        H = H + sym(chart.p(a, mu)) * inverse[(a, mu)]
    return lm, HamiltonianSystem(chart, H)


@dataclass
class FlVerdict:
    related: bool
    f: Expr


def fl_relatedness(sysL, FL_member, XH_member):
    """Certify that a Lagrangian solution member maps onto a Hamiltonian
    one under the Legendre map: push each wedge factor forward, rebuild the
    m-vector in the momentum chart, and compare componentwise with the
    Hamiltonian member.  Returns the proportionality scalar (1 for matched
    f_mu = 1 normalizations)."""
    chart = sysL.chart
    F_L, G_L = FL_member
    F_H, G_H = XH_member
    lm, _ = legendre_of(sysL)
    vmap = lm.inverse_subs()

    pushed_factors = []
    for mu in chart.mus():
        comp = {chart.x(mu): Expr.const(1)}
        for a in chart.fibers():
            comp[chart.y(a)] = F_L[(a, mu)].subs(vmap)
        for b in chart.fibers():
            for rho in chart.mus():
                # tangent map applied to the momentum function dL/dv^B_rho
                e = lm.forward[(b, rho)].diff(chart.x(mu))
                for a in chart.fibers():
                    e = e + F_L[(a, mu)] * lm.forward[(b, rho)].diff(chart.y(a))
                    for gamma in chart.mus():
                        e = e + G_L[(a, mu, gamma)] * lm.forward[(b, rho)].diff(
                            chart.v(a, gamma)
                        )
                comp[chart.p(b, rho)] = e.subs(vmap)
        pushed_factors.append(comp)

    from .exterior import decomposable

    pushed = decomposable(chart, pushed_factors)
    target = member_multivector(chart, HAMILTONIAN_SIDE, F_H, G_H)

    from .exterior import coordinate_index

    index = coordinate_index(chart)
    base_key = tuple(sorted(index[n] for n in chart.x_names()))
    lhs = pushed.terms.get(base_key, Expr.const(0))
    rhs = target.terms.get(base_key, Expr.const(0))
    if rhs.is_zero():
        raise ProportionalityFailure(base_key, lhs, rhs)
    f = lhs / rhs
    keys = set(pushed.terms) | set(target.terms)
    for key in sorted(keys):
        a = pushed.terms.get(key, Expr.const(0))
        b = target.terms.get(key, Expr.const(0))
        d = a - f * b
        if zero_test(d).kind != PROVEN_ZERO:
            raise ProportionalityFailure(key, a, b)
    return FlVerdict(related=True, f=f)
