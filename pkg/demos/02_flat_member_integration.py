"""Integrating a flat member of the Laplace solution family.

The 2d Laplace equation only pins down the trace of the second-order
coefficients; choosing constant values for the free functions gives a
flat connection whose integral section can be swept out numerically and
compared against the exact harmonic polynomial.
"""

import io

import numpy as np

from jetfield import (
    Axis,
    ChartSpec,
    Expr,
    InitialData,
    LagrangianSystem,
    integrate_flat,
    parse,
    read_section,
    section_pde_residual,
    solve_el_mvf,
    write_section,
)

chart = ChartSpec(2, 1)
sys = LagrangianSystem(chart, parse("1/2*(v1_1^2 + v1_2^2)", chart))
fam = solve_el_mvf(sys)
print("trace constraint leaves", fam.free_count, "free functions")

# g3 picks G(1,2,2); the pivot slot G(1,1,1) follows as its negative.
F, G = fam.member(
    {"g1": Expr.const(0), "g2": Expr.const(0), "g3": parse("-1", chart)}
)
print("chosen member: d2y/dx1dx1 =", G[(1, 1, 1)], ", d2y/dx2dx2 =", G[(1, 2, 2)])

axes = (Axis(n=64, h=1 / 63), Axis(n=64, h=1 / 63))
section, cross = integrate_flat(
    chart, F, G, InitialData(y0=[0.0], v0=[0.0, 0.0]), axes
)

x1 = axes[0].nodes()[:, None]
x2 = axes[1].nodes()[None, :]
exact = 0.5 * (x1 ** 2 - x2 ** 2)
print("max error vs y = (x1^2 - x2^2)/2:", float(np.max(np.abs(section.y[0] - exact))))
print("mixed-derivative cross-consistency:", cross)

rep = section_pde_residual(chart, G, section, tol=1e-6)
print("second-order residual check passed:", rep.passed)

# The swept section round-trips exactly through the text grid format.
buf = io.StringIO()
write_section(section, buf)
buf.seek(0)
back = read_section(buf)
print("serialization round trip exact:", bool(np.array_equal(back.y, section.y)))
