"""Ehresmann connections associated with normalized multivector classes,
their curvature, and holonomy classification.

Curvature components are computed from the generic commutator of the
horizontal lifts H_mu = d/dx^mu + F^A_mu d/dy^A + G(a,mu,rho) d/d(fiber),
with the concrete F, G substituted afterwards.  (The substituted display
form of the Hamiltonian-side curvature in the literature appears to carry
a typo in one mixed-derivative term; the commutator form is unambiguous.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expressions import (
    Expr,
    ExprError,
    NUMERICALLY_ZERO,
    PROVEN_ZERO,
    zero_test,
)
from .families import HAMILTONIAN_SIDE, LAGRANGIAN_SIDE, MvfFamily

FLAT = "flat"
SAMPLED_FLAT = "sampled-flat"
NON_FLAT = "non-flat"

HOLONOMIC = "holonomic"
SEMI_HOLONOMIC_NOT_FLAT = "semi-holonomic-not-flat"
TRANSVERSE_ONLY = "transverse-only"


@dataclass
class JetConnection:
    side: str  # lagrangian-side bundle J1E -> M or hamiltonian-side J1*E -> M
    chart: object
    F: dict  # (a, mu) -> Expr
    G: dict  # (a, mu, rho) -> Expr


def mvf_to_connection(chart, side, F, G, normalized=True):
    """Horizontal-lift coefficients of the connection attached to the class
    of a normalized (f_mu = 1) member."""
    if not normalized:
        raise ExprError("multivector member must be normalized (f_mu = 1)")
    return JetConnection(side=side, chart=chart, F=dict(F), G=dict(G))


def connection_to_mvf(conn):
    """Coefficient dicts of the normalized representative; inverse of
    mvf_to_connection."""
    return dict(conn.F), dict(conn.G)


def horizontal_apply(conn, mu, e):
    """H_mu(e) for the horizontal lift of d/dx^mu."""
    chart = conn.chart
    out = e.diff(chart.x(mu))
    for a in chart.fibers():
        out = out + conn.F[(a, mu)] * e.diff(chart.y(a))
        for rho in chart.mus():
            if conn.side == LAGRANGIAN_SIDE:
                name = chart.v(a, rho)
            else:
                name = chart.p(a, rho)
            out = out + conn.G[(a, mu, rho)] * e.diff(name)
    return out


@dataclass
class CurvatureReport:
    side: str
    symmetry: dict  # (B, mu, eta) -> (Expr, verdict); Lagrangian first group
    bracket: dict  # (B, rho, mu, eta) -> (Expr, verdict)
    flat: str = FLAT

    def components(self):
        yield from self.symmetry.items()
        yield from self.bracket.items()

    def nonflat_witness(self):
        for key, (e, verdict) in self.components():
            if not verdict.is_zero_like:
                return key, e, verdict
        return None


def curvature(conn):
    """Commutator components [H_mu, H_eta] for mu < eta, split into the
    y-direction (symmetry) group and the fiber-direction (bracket) group."""
    chart = conn.chart
    symmetry = {}
    bracket = {}
    overall = FLAT
    for mu in chart.mus():
        for eta in range(mu + 1, chart.m + 1):
            for b in chart.fibers():
                e = horizontal_apply(conn, mu, conn.F[(b, eta)]) - horizontal_apply(
                    conn, eta, conn.F[(b, mu)]
                )
                verdict = zero_test(e)
                symmetry[(b, mu, eta)] = (e, verdict)
                overall = _merge_flat(overall, verdict)
                for rho in chart.mus():
                    e = horizontal_apply(conn, mu, conn.G[(b, eta, rho)]) - (
                        horizontal_apply(conn, eta, conn.G[(b, mu, rho)])
                    )
                    verdict = zero_test(e)
                    bracket[(b, rho, mu, eta)] = (e, verdict)
                    overall = _merge_flat(overall, verdict)
    return CurvatureReport(side=conn.side, symmetry=symmetry, bracket=bracket, flat=overall)


def _merge_flat(current, verdict):
    if verdict.kind == PROVEN_ZERO:
        return current
    if verdict.kind == NUMERICALLY_ZERO:
        return SAMPLED_FLAT if current == FLAT else current
    return NON_FLAT


@dataclass
class Classification:
    verdict: str
    semi_holonomic: bool
    curvature: CurvatureReport
    offending_F: tuple = None


def classify(chart, F, G, side=LAGRANGIAN_SIDE):
    """holonomic <=> (F = v symbolically) and flat; records both
    sub-verdicts."""
    from .expressions import sym

    semi = True
    offending = None
    for a in chart.fibers():
        for mu in chart.mus():
            d = F[(a, mu)] - sym(chart.v(a, mu))
            if zero_test(d).kind != PROVEN_ZERO:
                semi = False
                offending = (a, mu)
                break
        if not semi:
            break
    report = curvature(mvf_to_connection(chart, side, F, G))
    if semi and report.flat in (FLAT, SAMPLED_FLAT):
        verdict = HOLONOMIC
    elif semi:
        verdict = SEMI_HOLONOMIC_NOT_FLAT
    else:
        verdict = TRANSVERSE_ONLY
    return Classification(
        verdict=verdict,
        semi_holonomic=semi,
        curvature=report,
        offending_F=offending,
    )
