"""Gaussian elimination over the expression fraction field.

Pivots must be certified nonzero before dividing by them: a proven-nonzero
entry is preferred, a numerically-zero entry is treated as zero (recorded
in the solution's notes), and an undecided entry with no certified
alternative aborts the elimination.  Pivot search is in deterministic
row/column order so identical inputs give identical solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expressions import (
    Expr,
    ExprError,
    NUMERICALLY_ZERO,
    PROVEN_NONZERO,
    PROVEN_ZERO,
    UNDECIDED,
    zero_test,
)


class PivotUndecidableError(ExprError):
    pass


class IncompatibleSystemError(ExprError):
    def __init__(self, row, residual):
        super().__init__(
            f"linear system is incompatible: row {row} reduces to 0 = {residual}"
        )
        self.row = row
        self.residual = residual


@dataclass
class LinSolution:
    rank: int
    compatible: bool
    particular: list
    null_basis: list
    free_count: int
    pivot_columns: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    bad_row: int = None
    bad_residual: Expr = None


def solve_linear(matrix, rhs):
    """Row-reduce matrix|rhs and return rank, compatibility, a particular
    solution (free unknowns set to zero) and a null-space basis."""
    nrows = len(matrix)
    if nrows != len(rhs):
        raise ExprError("matrix and right-hand side sizes disagree")
    ncols = len(matrix[0]) if nrows else 0
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    notes = []

    pivot_cols = []
    row = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(row, nrows):
            entry = aug[r][col]
            if entry.is_zero():
                continue
            verdict = zero_test(entry)
            if verdict.kind == PROVEN_NONZERO:
                pivot_row = r
                if not entry.is_const():
                    notes.append(
                        f"pivot at row {r}, column {col} is {entry}; "
                        "assumed nonvanishing on the chart"
                    )
                break
            if verdict.kind == NUMERICALLY_ZERO:
                notes.append(
                    f"entry at row {r}, column {col} is numerically zero "
                    f"({verdict.samples} samples); treated as zero"
                )
                aug[r][col] = Expr.const(0)
                continue
            if verdict.kind == UNDECIDED:
                raise PivotUndecidableError(
                    f"cannot certify zero-status of candidate pivot {entry} "
                    f"at row {r}, column {col}"
                )
        if pivot_row is None:
            continue
        aug[row], aug[pivot_row] = aug[pivot_row], aug[row]
        piv = aug[row][col]
        aug[row] = [e / piv for e in aug[row]]
        for r in range(nrows):
            if r == row:
                continue
            factor = aug[r][col]
            if factor.is_zero():
                continue
            aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
        pivot_cols.append(col)
        row += 1
        if row == nrows:
            break

    rank = len(pivot_cols)
    compatible = True
    bad_row = bad_residual = None
    for r in range(rank, nrows):
        residual = aug[r][ncols]
        if residual.is_zero():
            continue
        verdict = zero_test(residual)
        if verdict.kind == PROVEN_ZERO:
            continue
        if verdict.kind == NUMERICALLY_ZERO:
            notes.append(
                f"residual of degenerate row {r} is numerically zero; treated as zero"
            )
            continue
        compatible = False
        bad_row, bad_residual = r, residual
        break

    zero = Expr.const(0)
    particular = [zero] * ncols
    null_basis = []
    if compatible:
        for i, col in enumerate(pivot_cols):
            particular[col] = aug[i][ncols]
        free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
        for fc in free_cols:
            vec = [zero] * ncols
            vec[fc] = Expr.const(1)
            for i, col in enumerate(pivot_cols):
                vec[col] = -aug[i][fc]
            null_basis.append(vec)
    free_count = ncols - rank if compatible else 0

    return LinSolution(
        rank=rank,
        compatible=compatible,
        particular=particular if compatible else [],
        null_basis=null_basis,
        free_count=free_count,
        pivot_columns=pivot_cols,
        notes=notes,
        bad_row=bad_row,
        bad_residual=bad_residual,
    )
