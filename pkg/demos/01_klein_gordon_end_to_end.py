"""Klein-Gordon scalar field, end to end.

Walks one Lagrangian through the whole toolchain: field equations,
the coefficient system and its solution family, curvature of a chosen
member, the induced Hamiltonian picture, and a numeric check of a
plane-wave candidate section.
"""

from jetfield import (
    Axis,
    ChartSpec,
    Expr,
    HamiltonianSystem,
    LagrangianSystem,
    contraction_residual,
    curvature,
    el_residual_grid,
    euler_lagrange,
    fl_relatedness,
    hdw_solve,
    hessian_matrix,
    legendre_of,
    mvf_to_connection,
    parse,
    section_from_exprs,
    solve_el_mvf,
)

chart = ChartSpec(2, 1)
L = parse("1/2*(v1_1^2 - v1_2^2) - 1/2*y1^2", chart)
sys = LagrangianSystem(chart, L)

print("Lagrangian:", L)
print("velocity Hessian:", [[e.text() for e in row] for row in hessian_matrix(sys)])
print("field equation:", euler_lagrange(sys)[0], "= 0")

# The coefficient system determines the second-order slots only up to
# n (m^2 - 1) free functions.
fam = solve_el_mvf(sys)
print("\nsolution family with", fam.free_count, "free functions", fam.parameters)
for key in sorted(fam.G):
    print(f"  G{key} =", fam.G[key])

# Pick the member with every free function set to zero and certify that
# it really annihilates the variational two-form.
F, G = fam.member({p: Expr.const(0) for p in fam.parameters})
res = contraction_residual(sys, F, G)
print("\nall contraction coefficients vanish:", res.all_zero())

# Integrability: the associated connection of that member is curved, so
# its integral sections exist only on a submanifold, not the whole chart.
rep = curvature(mvf_to_connection(chart, "lagrangian", F, G))
key, witness, verdict = rep.nonflat_witness()
print("member is", rep.flat, "- witness component", key, "=", witness)

# Momentum picture through p = dL/dv and back.
lm, sysH = legendre_of(sys)
print("\nLegendre map:", {k: e.text() for k, e in lm.forward.items()})
print("Hamiltonian:", sysH.H)
famH = hdw_solve(sysH)
verdict = fl_relatedness(
    sys,
    fam.member({p: Expr.const(0) for p in fam.parameters}),
    famH.member({p: Expr.const(0) for p in famH.parameters}),
)
print("solution members correspond under the map with factor", verdict.f)

# A plane wave cos(k.x) solves the field equation iff k1^2 - k2^2 = 1.
wave = parse("cos(k1*x1 - k2*x2)", chart, ["k1", "k2"])
axes = (Axis(n=65, h=1 / 64), Axis(n=65, h=1 / 64))
for k1, k2, label in ((1.25, 0.75, "on the dispersion surface"),
                      (1.0, 1.0, "off the dispersion surface")):
    sec = section_from_exprs(chart, axes, {1: wave}, parameters={"k1": k1, "k2": k2})
    grid_rep = el_residual_grid(sys, sec, tol=1e-4)
    print(f"\nk = ({k1}, {k2}) {label}:")
    print("  max residual", max(grid_rep.max_abs), "passed:", grid_rep.passed)
