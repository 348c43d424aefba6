import pytest

from jetfield import parse, sym
from jetfield.connection import (
    FLAT,
    HOLONOMIC,
    JetConnection,
    NON_FLAT,
    SEMI_HOLONOMIC_NOT_FLAT,
    TRANSVERSE_ONLY,
    classify,
    connection_to_mvf,
    curvature,
    horizontal_apply,
    mvf_to_connection,
)
from jetfield.expressions import Expr, ExprError, PROVEN_NONZERO, zero_test
from jetfield.families import HAMILTONIAN_SIDE, LAGRANGIAN_SIDE
from jetfield.hamiltonian import HamiltonianSystem, hdw_solve
from jetfield.lagrangian import solve_el_mvf


def _member(fam, **text_assignments):
    chart = fam.chart
    assignment = {
        p: parse(text_assignments.get(p, "0"), chart) for p in fam.parameters
    }
    return fam.member(assignment)


def test_round_trip(laplace):
    fam = solve_el_mvf(laplace)
    F, G = _member(fam)
    conn = mvf_to_connection(laplace.chart, LAGRANGIAN_SIDE, F, G)
    F2, G2 = connection_to_mvf(conn)
    assert F2 == F and G2 == G


def test_unnormalized_member_rejected(laplace):
    fam = solve_el_mvf(laplace)
    F, G = _member(fam)
    with pytest.raises(ExprError, match="normalized"):
        mvf_to_connection(laplace.chart, LAGRANGIAN_SIDE, F, G, normalized=False)


def test_horizontal_lift_action(laplace):
    fam = solve_el_mvf(laplace)
    F, G = _member(fam)
    conn = mvf_to_connection(laplace.chart, LAGRANGIAN_SIDE, F, G)
    # H_1(y1) = F1_1 = v1_1 and H_1(x2) = 0
    assert horizontal_apply(conn, 1, sym("y1")) == sym("v1_1")
    assert horizontal_apply(conn, 1, sym("x2")).is_zero()
    # H_1(v1_1) is the first fiber coefficient of the lift
    assert horizontal_apply(conn, 1, sym("v1_1")) == G[(1, 1, 1)]


def test_laplace_zero_member_is_flat(laplace):
    fam = solve_el_mvf(laplace)
    F, G = _member(fam)
    rep = curvature(mvf_to_connection(laplace.chart, LAGRANGIAN_SIDE, F, G))
    assert rep.flat == FLAT
    assert rep.nonflat_witness() is None


def test_kg_zero_member_is_not_flat(kg):
    fam = solve_el_mvf(kg)
    F, G = _member(fam)
    rep = curvature(mvf_to_connection(kg.chart, LAGRANGIAN_SIDE, F, G))
    assert rep.flat == NON_FLAT
    key, e, verdict = rep.nonflat_witness()
    assert verdict.kind == PROVEN_NONZERO
    # H_1(G1_2_2) - H_2(G1_1_2) picks up d(-y1)/dx acting through F = v
    assert any(
        zero_test(comp - sym("v1_2")).kind == "proven-zero"
        or zero_test(comp + sym("v1_2")).kind == "proven-zero"
        for comp, _ in (pair for pair in rep.bracket.values())
    )


def test_constant_g_member_is_flat(laplace):
    # constant coefficients with symmetric mixed slots G1_1_2 = G1_2_1
    fam = solve_el_mvf(laplace)
    F, G = _member(fam, g1="1", g2="1")
    rep = curvature(mvf_to_connection(laplace.chart, LAGRANGIAN_SIDE, F, G))
    assert rep.flat == FLAT


def test_field_dependent_g_member_is_not_flat(laplace):
    fam = solve_el_mvf(laplace)
    F, G = _member(fam, g1="y1")
    rep = curvature(mvf_to_connection(laplace.chart, LAGRANGIAN_SIDE, F, G))
    assert rep.flat == NON_FLAT


def test_symmetry_group_detects_asymmetric_transverse(chart21):
    # F1_2 = y1 with F1_1 = v1_1: [H_1, H_2] has a y-direction component
    F = {(1, 1): sym("v1_1"), (1, 2): sym("y1")}
    G = {(1, mu, rho): Expr.const(0) for mu in (1, 2) for rho in (1, 2)}
    rep = curvature(JetConnection(LAGRANGIAN_SIDE, chart21, F, G))
    e, verdict = rep.symmetry[(1, 1, 2)]
    assert verdict.kind == PROVEN_NONZERO


def test_hamiltonian_side_curvature(chart21):
    sysH = HamiltonianSystem(
        chart21, parse("1/2*(p1_1^2 - p1_2^2) + 1/2*y1^2", chart21)
    )
    fam = hdw_solve(sysH)
    F, G = _member(fam)
    rep = curvature(mvf_to_connection(chart21, HAMILTONIAN_SIDE, F, G))
    assert rep.side == HAMILTONIAN_SIDE
    assert rep.flat == NON_FLAT


class TestClassify:
    def test_holonomic(self, laplace):
        fam = solve_el_mvf(laplace)
        F, G = _member(fam)
        c = classify(laplace.chart, F, G)
        assert c.verdict == HOLONOMIC
        assert c.semi_holonomic

    def test_semi_holonomic_not_flat(self, kg):
        fam = solve_el_mvf(kg)
        F, G = _member(fam)
        c = classify(kg.chart, F, G)
        assert c.verdict == SEMI_HOLONOMIC_NOT_FLAT
        assert c.semi_holonomic

    def test_transverse_only(self, chart21):
        F = {(1, 1): sym("y1"), (1, 2): sym("v1_2")}
        G = {(1, mu, rho): Expr.const(0) for mu in (1, 2) for rho in (1, 2)}
        c = classify(chart21, F, G)
        assert c.verdict == TRANSVERSE_ONLY
        assert not c.semi_holonomic
        assert c.offending_F == (1, 1)
