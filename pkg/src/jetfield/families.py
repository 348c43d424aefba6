"""Parametrized families of normalized decomposable multivector fields.

A family stores the transverse coefficients F^A_mu and the fiber
coefficients G (velocity directions on the jet side, momentum directions
on the multimomentum side) as Exprs that may contain named free-function
parameter symbols g1, g2, ...  Substituting expressions for those symbols
yields a concrete member whose wedge-factor form is

    factor mu = d/dx^mu + F^A_mu d/dy^A + G(a, mu, rho) d/d(fiber rho)

with the representative normalized by f_mu = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expressions import Expr, ExprError
from .exterior import MultiVec, decomposable

LAGRANGIAN_SIDE = "lagrangian"
HAMILTONIAN_SIDE = "hamiltonian"


class UnassignedParameterError(ExprError):
    def __init__(self, names):
        super().__init__(f"free parameters not assigned: {', '.join(sorted(names))}")
        self.names = names


@dataclass
class MvfFamily:
    chart: object
    side: str
    F: dict  # (a, mu) -> Expr
    G: dict  # (a, mu, rho) -> Expr; lagrangian: G^A_{mu rho}, hamiltonian: G^rho_{A mu}
    parameters: list
    free_count: int
    normalized: bool = True
    notes: list = field(default_factory=list)

    def member(self, assignment=None):
        """Concrete (F, G) coefficient dicts with parameters substituted.

        `assignment` maps parameter names to Exprs; all parameters must be
        covered.  A family with no parameters needs no assignment.
        """
        assignment = assignment or {}
        missing = [p for p in self.parameters if p not in assignment]
        if missing:
            raise UnassignedParameterError(missing)
        if not self.parameters:
            return dict(self.F), dict(self.G)
        F = {k: e.subs(assignment) for k, e in self.F.items()}
        G = {k: e.subs(assignment) for k, e in self.G.items()}
        return F, G

    def fiber_name(self, a, rho):
        if self.side == LAGRANGIAN_SIDE:
            return self.chart.v(a, rho)
        return self.chart.p(a, rho)


def member_factors(chart, side, F, G):
    """Wedge-factor component maps of a concrete normalized member."""
    factors = []
    for mu in chart.mus():
        comp = {chart.x(mu): Expr.const(1)}
        for a in chart.fibers():
            comp[chart.y(a)] = F[(a, mu)]
            for rho in chart.mus():
                name = chart.v(a, rho) if side == LAGRANGIAN_SIDE else chart.p(a, rho)
                comp[name] = G[(a, mu, rho)]
        factors.append(comp)
    return factors


def member_multivector(chart, side, F, G):
    return decomposable(chart, member_factors(chart, side, F, G))
