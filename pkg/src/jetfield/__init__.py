"""Symbolic-numeric workbench for first-order classical field theories:
field equations as multivector-field coefficient systems, integrability
via connection curvature, and numeric verification of candidate sections.
"""

from .chart import ChartSpec, total_derivative
from .expressions import (
    Expr,
    ExprError,
    ExprSyntaxError,
    UnknownSymbolError,
    ZeroVerdict,
    cos,
    exp,
    parse,
    rat,
    sin,
    sym,
    zero_test,
)
from .exterior import DiffForm, MultiVec, contract, decomposable, ext_d, wedge
from .families import MvfFamily
from .hamiltonian import (
    HamiltonianSystem,
    LegendreMap,
    fl_relatedness,
    hamilton_cartan_forms,
    hdw_residual,
    hdw_solve,
    legendre_of,
)
from .lagrangian import (
    LagrangianSystem,
    cartan_forms,
    contraction_residual,
    euler_lagrange,
    hessian,
    hessian_det,
    hessian_matrix,
    is_regular,
    semi_holonomy_forcing,
    singular_report,
    solve_el_mvf,
)
from .connection import JetConnection, classify, curvature, mvf_to_connection
from .linsolve import LinSolution, solve_linear
from .numeric import (
    Axis,
    GridSection,
    InitialData,
    el_residual_grid,
    fd_check,
    hdw_residual_grid,
    integrate_flat,
    read_section,
    section_from_exprs,
    section_pde_residual,
    write_section,
)

__version__ = "0.1.0"
