import io
import math
import random

import numpy as np
import pytest

from jetfield import ChartSpec, parse
from jetfield.expressions import Expr
from jetfield.hamiltonian import HamiltonianSystem, legendre_of
from jetfield.lagrangian import solve_el_mvf
from jetfield.numeric import (
    Axis,
    GridFormatError,
    GridSection,
    InitialData,
    NonFlatError,
    el_residual_grid,
    eval_array,
    fd_check,
    hdw_residual_grid,
    integrate_flat,
    read_section,
    section_from_exprs,
    section_pde_residual,
    write_section,
)


def _zero_member(fam):
    return fam.member({p: Expr.const(0) for p in fam.parameters})


class TestEvalArray:
    def test_matches_scalar_math(self, chart21):
        e = parse("sin(x1)*y1 + 1/3*v1_2^2", chart21)
        env = {"x1": 0.7, "y1": -1.2, "v1_2": 0.5}
        expected = math.sin(0.7) * -1.2 + 0.5 ** 2 / 3
        assert abs(eval_array(e, env) - expected) < 1e-14

    def test_broadcasts_over_arrays(self, chart21):
        e = parse("x1^2 - x2", chart21)
        x1 = np.linspace(0, 1, 5)
        out = eval_array(e, {"x1": x1, "x2": 2.0})
        assert np.allclose(out, x1 ** 2 - 2.0)

    def test_rational_function(self, chart11):
        e = parse("x1/(1 + y1^2)", chart11)
        val = eval_array(e, {"x1": 3.0, "y1": 2.0})
        assert abs(val - 0.6) < 1e-14


class TestFdCheck:
    def test_polynomial(self, chart11):
        e = parse("x1^3 - 2*x1", chart11)
        assert fd_check(e, "x1", {"x1": 0.9}) < 1e-9

    def test_random_triples(self, chart21):
        rng = random.Random(5)
        texts = ["sin(x1)*y1", "exp(1/2*v1_1)", "x2^2*y1 - v1_2"]
        names = ["x1", "x2", "y1", "v1_1", "v1_2"]
        for _ in range(30):
            e = parse(rng.choice(texts), chart21)
            name = rng.choice(names)
            point = {n: rng.uniform(-1.0, 1.0) for n in names}
            assert fd_check(e, name, point, h=1e-5) < 1e-6

    def test_rejects_bad_step(self, chart11):
        with pytest.raises(ValueError):
            fd_check(parse("x1", chart11), "x1", {"x1": 0.0}, h=0.0)


class TestGridSection:
    def test_shape_validation(self):
        axes = (Axis(n=4, h=0.1), Axis(n=5, h=0.1))
        with pytest.raises(ValueError):
            GridSection(m=2, n_fields=1, axes=axes, y=np.zeros((1, 4, 4)))

    def test_axis_validation(self):
        with pytest.raises(ValueError):
            Axis(n=2, h=0.1)
        with pytest.raises(ValueError):
            Axis(n=8, h=-0.1)

    def test_section_from_exprs_with_parameters(self, chart21):
        axes = (Axis(n=5, h=0.25), Axis(n=5, h=0.25))
        sec = section_from_exprs(
            chart21,
            axes,
            {1: parse("cos(k1*x1 - k2*x2)", chart21, ["k1", "k2"])},
            parameters={"k1": 1.25, "k2": 0.75},
        )
        assert sec.y.shape == (1, 5, 5)
        assert abs(sec.y[0, 0, 0] - 1.0) < 1e-14
        assert abs(sec.y[0, 1, 0] - math.cos(1.25 * 0.25)) < 1e-14


class TestResidualGrids:
    def test_exact_harmonic_for_laplace(self, laplace, chart21):
        # y = x1^2 - x2^2 is harmonic; central stencils are exact on quadratics
        axes = (Axis(n=17, h=0.125), Axis(n=17, h=0.125))
        sec = section_from_exprs(chart21, axes, {1: parse("x1^2 - x2^2", chart21)})
        rep = el_residual_grid(laplace, sec, tol=1e-10)
        assert rep.passed
        assert max(rep.max_abs) < 1e-10

    def test_kg_solution_converges_at_second_order(self, kg, chart21):
        # y = cos(k1 x1 - k2 x2) solves the field equation when
        # k1^2 - k2^2 = 1; residual is pure discretization error
        expr = parse("cos(k1*x1 - k2*x2)", chart21, ["k1", "k2"])
        params = {"k1": 1.25, "k2": 0.75}
        maxima = []
        for n, h in ((33, 1 / 32), (65, 1 / 64)):
            axes = (Axis(n=n, h=h), Axis(n=n, h=h))
            sec = section_from_exprs(chart21, axes, {1: expr}, parameters=params)
            rep = el_residual_grid(kg, sec, tol=1e-2)
            assert rep.passed
            maxima.append(max(rep.max_abs))
        ratio = maxima[0] / maxima[1]
        assert 3.5 <= ratio <= 4.5

    def test_non_solution_is_rejected(self, kg, chart21):
        # k1 = k2 violates the dispersion relation by exactly one unit
        expr = parse("cos(x1 - x2)", chart21)
        axes = (Axis(n=33, h=1 / 32), Axis(n=33, h=1 / 32))
        sec = section_from_exprs(chart21, axes, {1: expr})
        rep = el_residual_grid(kg, sec, tol=1e-4)
        assert not rep.passed
        label, worst = rep.worst()
        assert label == "EL1"
        assert worst > 0.1

    def test_hdw_residuals(self, kg, chart21):
        lm, sysH = legendre_of(kg)
        expr = parse("cos(k1*x1 - k2*x2)", chart21, ["k1", "k2"])
        params = {"k1": 1.25, "k2": 0.75}
        # p1_1 = v1_1 = dy/dx1, p1_2 = -v1_2 = -dy/dx2
        p1 = parse("-k1*sin(k1*x1 - k2*x2)", chart21, ["k1", "k2"])
        p2 = parse("-k2*sin(k1*x1 - k2*x2)", chart21, ["k1", "k2"])
        axes = (Axis(n=65, h=1 / 64), Axis(n=65, h=1 / 64))
        sec = section_from_exprs(
            chart21, axes, {1: expr}, p_exprs={(1, 1): p1, (1, 2): p2},
            parameters=params,
        )
        rep = hdw_residual_grid(sysH, sec, tol=1e-3)
        assert rep.passed

    def test_hdw_needs_momenta(self, chart21):
        sysH = HamiltonianSystem(chart21, parse("1/2*p1_1^2", chart21))
        axes = (Axis(n=5, h=0.1), Axis(n=5, h=0.1))
        sec = section_from_exprs(chart21, axes, {1: parse("x1", chart21)})
        with pytest.raises(ValueError, match="momentum"):
            hdw_residual_grid(sysH, sec)


class TestIntegrateFlat:
    def test_free_mechanics_is_exact(self, free_mechanics, chart11):
        fam = solve_el_mvf(free_mechanics)
        F, G = _zero_member(fam)
        axes = (Axis(n=11, h=0.1),)
        sec, cross = integrate_flat(
            chart11, F, G, InitialData(y0=[0.0], v0=[1.0]), axes
        )
        assert cross is None
        assert np.allclose(sec.y[0], axes[0].nodes(), atol=1e-12)

    def test_laplace_flat_member(self, laplace, chart21):
        # y = 1/2 (x1^2 - x2^2) lies in the flat member G11 = 1, G22 = -1
        fam = solve_el_mvf(laplace)
        assignment = {
            "g1": Expr.const(0),
            "g2": Expr.const(0),
            "g3": parse("-1", laplace.chart),
        }
        F, G = fam.member(assignment)
        axes = (Axis(n=65, h=1 / 64), Axis(n=65, h=1 / 64))
        sec, cross = integrate_flat(
            chart21, F, G, InitialData(y0=[0.0], v0=[0.0, 0.0]), axes
        )
        x1 = axes[0].nodes()[:, None]
        x2 = axes[1].nodes()[None, :]
        exact = 0.5 * (x1 ** 2 - x2 ** 2)
        assert float(np.max(np.abs(sec.y[0] - exact))) < 1e-6
        assert cross < 1e-6
        rep = section_pde_residual(chart21, G, sec, tol=1e-6)
        assert rep.passed

    def test_rejects_non_flat(self, kg, chart21):
        fam = solve_el_mvf(kg)
        F, G = _zero_member(fam)
        with pytest.raises(NonFlatError):
            integrate_flat(
                chart21, F, G, InitialData(y0=[1.0], v0=[0.0, 0.0]),
                (Axis(n=5, h=0.1), Axis(n=5, h=0.1)),
            )

    def test_rejects_non_semi_holonomic(self, chart21):
        from jetfield.expressions import sym

        F = {(1, 1): sym("y1"), (1, 2): sym("v1_2")}
        G = {(1, mu, rho): Expr.const(0) for mu in (1, 2) for rho in (1, 2)}
        with pytest.raises(Exception, match="semi-holonomic"):
            integrate_flat(
                chart21, F, G, InitialData(y0=[0.0], v0=[0.0, 0.0]),
                (Axis(n=5, h=0.1), Axis(n=5, h=0.1)),
            )


class TestSerialization:
    def test_round_trip_is_exact(self, chart21):
        axes = (Axis(n=4, h=0.25, x0=-0.5), Axis(n=3, h=0.5))
        rng = np.random.default_rng(0)
        sec = GridSection(
            m=2,
            n_fields=2,
            axes=axes,
            y=rng.standard_normal((2, 4, 3)),
            v=rng.standard_normal((2, 2, 4, 3)),
        )
        buf = io.StringIO()
        write_section(sec, buf)
        buf.seek(0)
        back = read_section(buf)
        assert back.m == 2 and back.n_fields == 2
        assert back.axes == axes
        assert np.array_equal(back.y, sec.y)
        assert np.array_equal(back.v, sec.v)
        assert back.p is None

    def test_header_is_stable(self, chart11):
        sec = GridSection(
            m=1, n_fields=1, axes=(Axis(n=3, h=0.5),), y=np.zeros((1, 3))
        )
        buf = io.StringIO()
        write_section(sec, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "jetfield-grid 1 m=1 N=1 fields=y"
        assert lines[1] == "axis1 n=3 h=0.5 x0=0.0"
        assert lines[2] == "columns y1"
        assert lines[3:] == ["0", "0", "0"]

    def test_rejects_foreign_file(self):
        with pytest.raises(GridFormatError):
            read_section(io.StringIO("not a grid\n"))

    def test_rejects_truncated_data(self):
        text = (
            "jetfield-grid 1 m=1 N=1 fields=y\n"
            "axis1 n=4 h=0.5 x0=0.0\n"
            "columns y1\n"
            "0\n0\n"
        )
        with pytest.raises(GridFormatError, match="rows"):
            read_section(io.StringIO(text))

    def test_write_is_deterministic(self, chart11):
        axes = (Axis(n=5, h=0.2),)
        sec = section_from_exprs(chart11, axes, {1: parse("sin(x1)", chart11)})
        a, b = io.StringIO(), io.StringIO()
        write_section(sec, a)
        write_section(sec, b)
        assert a.getvalue() == b.getvalue()
