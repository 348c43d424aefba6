import random

import pytest

from jetfield import ChartSpec, parse, rat, sym, zero_test
from jetfield.expressions import Expr, ExprError, PROVEN_NONZERO, PROVEN_ZERO
from jetfield.hamiltonian import (
    FlVerdict,
    HamiltonianSystem,
    InversionFailure,
    ProportionalityFailure,
    fl_relatedness,
    hamilton_cartan_forms,
    hdw_residual,
    hdw_solve,
    legendre_of,
    omega_h_display,
)
from jetfield.lagrangian import LagrangianSystem, solve_el_mvf


@pytest.fixture
def kg_h(chart21):
    """Hamiltonian counterpart of the Klein-Gordon fixture."""
    return HamiltonianSystem(
        chart21, parse("1/2*p1_1^2 - 1/2*p1_2^2 + 1/2*y1^2", chart21)
    )


def _zero_member(fam):
    return fam.member({p: Expr.const(0) for p in fam.parameters})


class TestForms:
    def test_rejects_velocity_coordinates(self, chart21):
        with pytest.raises(ExprError):
            HamiltonianSystem(chart21, parse("v1_1*p1_1", chart21))

    @pytest.mark.parametrize(
        "m,n,text",
        [
            (1, 1, "1/2*p1_1^2"),
            (2, 1, "1/2*p1_1^2 - 1/2*p1_2^2 + 1/2*y1^2"),
            (2, 2, "p1_1*p2_2 + y1*y2"),
        ],
    )
    def test_omega_matches_displayed_expansion(self, m, n, text):
        chart = ChartSpec(m, n)
        sysH = HamiltonianSystem(chart, parse(text, chart))
        _, omega = hamilton_cartan_forms(sysH)
        assert (omega - omega_h_display(sysH)).is_zero()

    def test_kg_theta_coefficients(self, kg_h):
        theta, _ = hamilton_cartan_forms(kg_h)
        assert theta.coefficient(["y1", "x2"]) == sym("p1_1")
        # d^{m-1}x_2 = -dx1, so the second momentum enters through dx1 ^ dy
        assert theta.coefficient(["x1", "y1"]) == sym("p1_2")
        assert (theta.coefficient(["x1", "x2"]) + kg_h.H).is_zero()


class TestHdwSolve:
    def test_kg(self, kg_h):
        fam = hdw_solve(kg_h)
        assert fam.F[(1, 1)] == sym("p1_1")
        assert fam.F[(1, 2)] == -sym("p1_2")
        assert fam.free_count == 3
        trace = fam.G[(1, 1, 1)] + fam.G[(1, 2, 2)]
        assert zero_test(trace + sym("y1")).kind == PROVEN_ZERO

    def test_free_count_scaling(self):
        for m, n in ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1)):
            chart = ChartSpec(m, n)
            text = " + ".join(
                f"1/2*{chart.p(a, mu)}^2" for a in chart.fibers() for mu in chart.mus()
            )
            fam = hdw_solve(HamiltonianSystem(chart, parse(text, chart)))
            assert fam.free_count == n * (m * m - 1)

    def test_mechanics_has_no_freedom(self, chart11):
        fam = hdw_solve(HamiltonianSystem(chart11, parse("1/2*p1_1^2", chart11)))
        assert fam.free_count == 0
        assert fam.parameters == []
        assert fam.F[(1, 1)] == sym("p1_1")
        assert fam.G[(1, 1, 1)].is_zero()

    def test_zero_hamiltonian(self, chart21):
        fam = hdw_solve(HamiltonianSystem(chart21, parse("0", chart21)))
        assert fam.free_count == 3
        assert all(e.is_zero() for e in fam.F.values())


class TestHdwResidual:
    def test_solved_members_annihilate_omega(self, kg_h):
        fam = hdw_solve(kg_h)
        rng = random.Random(11)
        pool = ["0", "1", "y1", "p1_2*x1", "y1^2"]
        for _ in range(5):
            assignment = {
                p: parse(rng.choice(pool), kg_h.chart) for p in fam.parameters
            }
            F, G = fam.member(assignment)
            assert hdw_residual(kg_h, F, G).all_zero()

    def test_wrong_transverse_coefficient_shows_in_dp(self, kg_h):
        fam = hdw_solve(kg_h)
        F, G = _zero_member(fam)
        F = dict(F)
        F[(1, 1)] = Expr.const(0)  # drop dH/dp1_1 = p1_1
        res = hdw_residual(kg_h, F, G)
        assert not res.all_zero()
        assert zero_test(res.dp[(1, 1)] + sym("p1_1")).kind == PROVEN_ZERO or (
            zero_test(res.dp[(1, 1)] - sym("p1_1")).kind == PROVEN_ZERO
        )


class TestLegendre:
    def test_kg(self, kg):
        lm, sysH = legendre_of(kg)
        assert lm.forward[(1, 1)] == sym("v1_1")
        assert lm.forward[(1, 2)] == -sym("v1_2")
        assert lm.inverse[(1, 1)] == sym("p1_1")
        assert lm.inverse[(1, 2)] == -sym("p1_2")
        assert lm.hyper_regular
        expected = parse("1/2*p1_1^2 - 1/2*p1_2^2 + 1/2*y1^2", kg.chart)
        assert (sysH.H - expected).is_zero()

    def test_round_trip_through_momenta(self, laplace):
        lm, sysH = legendre_of(laplace)
        # L = p.v - H pulled back along the forward map
        back = -sysH.H.subs(lm.forward_subs())
        for (a, mu), p in lm.forward.items():
            back = back + p * sym(laplace.chart.v(a, mu))
        assert (back - laplace.L).is_zero()

    def test_potential_term_survives(self, chart11):
        sys = LagrangianSystem(chart11, parse("1/2*v1_1^2 - y1^2", chart11))
        _, sysH = legendre_of(sys)
        expected = parse("1/2*p1_1^2 + y1^2", chart11)
        assert (sysH.H - expected).is_zero()

    def test_singular_rejected(self, singular_n2):
        with pytest.raises(ExprError, match="regularity"):
            legendre_of(singular_n2)

    def test_non_quadratic_rejected(self, chart11):
        sys = LagrangianSystem(chart11, parse("1/4*v1_1^4", chart11))
        with pytest.raises(InversionFailure, match="quadratic"):
            legendre_of(sys)


class TestRelatedness:
    def test_kg_members_match_with_unit_scalar(self, kg, kg_h):
        famL = solve_el_mvf(kg)
        famH = hdw_solve(kg_h)
        verdict = fl_relatedness(kg, _zero_member(famL), _zero_member(famH))
        assert verdict.related
        assert verdict.f == rat(1)

    def test_laplace_members_match(self, laplace):
        _, sysH = legendre_of(laplace)
        famL = solve_el_mvf(laplace)
        famH = hdw_solve(sysH)
        verdict = fl_relatedness(laplace, _zero_member(famL), _zero_member(famH))
        assert verdict.related
        assert verdict.f == rat(1)

    def test_perturbed_member_fails(self, kg, kg_h):
        famL = solve_el_mvf(kg)
        famH = hdw_solve(kg_h)
        FH, GH = _zero_member(famH)
        FH = dict(FH)
        FH[(1, 2)] = FH[(1, 2)] + Expr.const(1)
        with pytest.raises(ProportionalityFailure):
            fl_relatedness(kg, _zero_member(famL), (FH, GH))


def test_field_equations_agree_through_the_map(kg):
    """Substituting the inverse momenta into the transverse Hamiltonian
    coefficients recovers the velocities, and the trace constraint on the
    momentum side maps to the field equation on the jet side."""
    lm, sysH = legendre_of(kg)
    famH = hdw_solve(sysH)
    chart = kg.chart
    for (a, mu), e in famH.F.items():
        pulled = e.subs(lm.forward_subs())
        assert (pulled - sym(chart.v(a, mu))).is_zero()
