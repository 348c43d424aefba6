"""What the solver reports when the velocity Hessian degenerates.

Two mechanical examples on a 1d base with two fields: one where the
coefficient system stays compatible and keeps a free function, and one
where a degenerate row turns into an unsatisfiable equation on the
whole chart.
"""

from jetfield import ChartSpec, LagrangianSystem, parse, singular_report

chart = ChartSpec(1, 2)

# Only y1 carries kinetic energy; y2 is a spectator with no equation.
lazy = LagrangianSystem(chart, parse("1/2*v1_1^2", chart))
rep = singular_report(lazy)
print("L = v1_1^2/2:")
print("  hessian rank:", rep.hessian_rank)
print("  compatible:", rep.compatible, "with", rep.free_count, "free functions")
print("  undetermined transverse slots:", rep.forcing.undetermined)

# The coupling v1_1 * y2 produces the equation 0 = v2_1 from one row and
# 0 = v1_1 from the other: no solution anywhere on the chart.
coupled = LagrangianSystem(chart, parse("v1_1*y2", chart))
rep = singular_report(coupled)
print("\nL = v1_1*y2:")
print("  compatible:", rep.compatible)
print("  " + rep.message)
