"""Floating-point verification layer: grid sections, finite-difference
residuals of the field equations, and sweep integration of flat members.

All stencils are plain second-order central differences and boundaries are
trimmed rather than one-sided, so residual reports have a clean h^2
convergence story.  Everything is deterministic: fixed reduction order,
no randomness.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .connection import FLAT, SAMPLED_FLAT, curvature, mvf_to_connection
from .expressions import Expr, ExprError, Fn, Sym, _NP_KERNEL
from .families import LAGRANGIAN_SIDE
from .lagrangian import euler_lagrange, velocity_indices


class GridFormatError(ExprError):
    pass


class NonFlatError(ExprError):
    def __init__(self, component, expr):
        super().__init__(
            f"multivector member is not flat: curvature component {component} = {expr}"
        )
        self.component = component
        self.expr = expr


# ---------------------------------------------------------------------------
# float evaluation of Exprs over numpy arrays


def eval_array(e, env):
    num = _eval_poly(e.num, env)
    if e.den.is_const():
        return num / float(e.den.const_value())
    return num / _eval_poly(e.den, env)


def _eval_poly(p, env):
    total = 0.0
    for mono, c in p.terms.items():
        val = float(c)
        for atom, k in mono:
            if isinstance(atom, Sym):
                base = env[atom.name]
            else:
                base = _NP_KERNEL[atom.name](eval_array(atom.arg, env))
            val = val * base ** k
        total = total + val
    return total


def fd_check(e, name, point, h=1e-5):
    """Relative error between the symbolic partial derivative and a
    central finite difference at a point."""
    if h <= 0:
        raise ValueError("step must be positive")
    hi = dict(point)
    lo = dict(point)
    hi[name] = point[name] + h
    lo[name] = point[name] - h
    fd = (eval_array(e, hi) - eval_array(e, lo)) / (2 * h)
    exact = eval_array(e.diff(name), point)
    return abs(fd - exact) / max(1.0, abs(exact))


# ---------------------------------------------------------------------------
# grid sections


@dataclass(frozen=True)
class Axis:
    n: int
    h: float
    x0: float = 0.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("axis needs at least 3 nodes")
        if self.h <= 0:
            raise ValueError("axis spacing must be strictly positive")

    def nodes(self):
        return self.x0 + self.h * np.arange(self.n)


@dataclass
class GridSection:
    m: int
    n_fields: int
    axes: tuple
    y: np.ndarray  # (N, *grid)
    v: np.ndarray = None  # (N, m, *grid)
    p: np.ndarray = None  # (N, m, *grid)

    def __post_init__(self):
        if self.m > 3:
            raise ValueError("grids support m <= 3")
        shape = tuple(ax.n for ax in self.axes)
        if self.y.shape != (self.n_fields,) + shape:
            raise ValueError(
                f"field array shape {self.y.shape} does not match grid {shape}"
            )
        for name in ("v", "p"):
            arr = getattr(self, name)
            if arr is not None and arr.shape != (self.n_fields, self.m) + shape:
                raise ValueError(f"{name} array shape {arr.shape} is inconsistent")

    def coordinate_arrays(self, chart):
        grids = np.meshgrid(*(ax.nodes() for ax in self.axes), indexing="ij")
        return {chart.x(mu): grids[mu - 1] for mu in chart.mus()}


def section_from_exprs(chart, axes, y_exprs, p_exprs=None, parameters=None):
    """Sample closed-form section expressions (functions of x and declared
    parameters) onto a grid."""
    axes = tuple(axes)
    grids = np.meshgrid(*(ax.nodes() for ax in axes), indexing="ij")
    env = {chart.x(mu): grids[mu - 1] for mu in chart.mus()}
    if parameters:
        env.update(parameters)
    shape = tuple(ax.n for ax in axes)
    y = np.empty((chart.n,) + shape)
    for a in chart.fibers():
        y[a - 1] = np.broadcast_to(eval_array(y_exprs[a], env), shape)
    p = None
    if p_exprs:
        p = np.zeros((chart.n, chart.m) + shape)
        for (a, mu), e in p_exprs.items():
            p[a - 1, mu - 1] = np.broadcast_to(eval_array(e, env), shape)
    return GridSection(m=chart.m, n_fields=chart.n, axes=axes, y=y, p=p)


def _interior(arr, m):
    sl = (Ellipsis,) + (slice(1, -1),) * m
    return arr[sl]


def _first_diff(arr, axis, h):
    out = np.zeros_like(arr)
    sl_c = [slice(None)] * arr.ndim
    sl_p = [slice(None)] * arr.ndim
    sl_m = [slice(None)] * arr.ndim
    sl_c[axis] = slice(1, -1)
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(None, -2)
    out[tuple(sl_c)] = (arr[tuple(sl_p)] - arr[tuple(sl_m)]) / (2 * h)
    return out


def _second_diff(arr, axis, h):
    out = np.zeros_like(arr)
    sl_c = [slice(None)] * arr.ndim
    sl_p = [slice(None)] * arr.ndim
    sl_m = [slice(None)] * arr.ndim
    sl_c[axis] = slice(1, -1)
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(None, -2)
    out[tuple(sl_c)] = (arr[tuple(sl_p)] - 2 * arr[tuple(sl_c)] + arr[tuple(sl_m)]) / (
        h * h
    )
    return out


@dataclass
class ResidualReport:
    labels: list
    max_abs: list
    rms: list
    shape: tuple
    tol: float
    passed: bool

    def worst(self):
        i = int(np.argmax(self.max_abs))
        return self.labels[i], self.max_abs[i]


def _make_report(residuals, tol):
    labels = []
    max_abs = []
    rms = []
    shape = None
    for label, arr in residuals:
        labels.append(label)
        max_abs.append(float(np.max(np.abs(arr))))
        rms.append(float(np.sqrt(np.mean(arr ** 2))))
        shape = arr.shape
    passed = all(v <= tol for v in max_abs)
    return ResidualReport(
        labels=labels, max_abs=max_abs, rms=rms, shape=shape, tol=tol, passed=passed
    )


def el_residual_grid(sys, section, tol=1e-4):
    """Residual of the Euler-Lagrange expressions on the grid interior,
    with v from first central differences and w from second differences."""
    chart = sys.chart
    if section.m != chart.m or section.n_fields != chart.n:
        raise ValueError("section shape does not match the chart")
    env = section.coordinate_arrays(chart)
    hs = [ax.h for ax in section.axes]
    for a in chart.fibers():
        ya = section.y[a - 1]
        env[chart.y(a)] = ya
        for mu in chart.mus():
            env[chart.v(a, mu)] = _first_diff(ya, mu - 1, hs[mu - 1])
            for nu in range(mu, chart.m + 1):
                if nu == mu:
                    w = _second_diff(ya, mu - 1, hs[mu - 1])
                else:
                    w = _first_diff(
                        _first_diff(ya, mu - 1, hs[mu - 1]), nu - 1, hs[nu - 1]
                    )
                env[chart.w(a, mu, nu)] = w
    residuals = []
    for a, e in enumerate(euler_lagrange(sys), start=1):
        vals = np.broadcast_to(eval_array(e, env), section.y[a - 1].shape)
        residuals.append((f"EL{a}", _interior(vals, chart.m)))
    return _make_report(residuals, tol)


def hdw_residual_grid(sys, section, tol=1e-4):
    """Residuals of the first-order Hamilton-De Donder-Weyl system on the
    grid interior."""
    chart = sys.chart
    if section.p is None:
        raise ValueError("section carries no momentum arrays")
    env = section.coordinate_arrays(chart)
    hs = [ax.h for ax in section.axes]
    for a in chart.fibers():
        env[chart.y(a)] = section.y[a - 1]
        for mu in chart.mus():
            env[chart.p(a, mu)] = section.p[a - 1, mu - 1]
    residuals = []
    shape = section.y.shape[1:]
    for a in chart.fibers():
        for mu in chart.mus():
            dy = _first_diff(section.y[a - 1], mu - 1, hs[mu - 1])
            rhs = np.broadcast_to(
                eval_array(sys.H.diff(chart.p(a, mu)), env), shape
            )
            residuals.append((f"dy{a}/dx{mu}", _interior(dy - rhs, chart.m)))
        div = np.zeros(shape)
        for mu in chart.mus():
            div = div + _first_diff(section.p[a - 1, mu - 1], mu - 1, hs[mu - 1])
        rhs = np.broadcast_to(eval_array(sys.H.diff(chart.y(a)), env), shape)
        residuals.append((f"div p{a}", _interior(div + rhs, chart.m)))
    return _make_report(residuals, tol)


def section_pde_residual(chart, G, section, tol=1e-6):
    """Residual of the second-order system d2y/dx^rho dx^nu = G_{nu rho}
    for a concrete semi-holonomic member."""
    env = section.coordinate_arrays(chart)
    hs = [ax.h for ax in section.axes]
    for a in chart.fibers():
        ya = section.y[a - 1]
        env[chart.y(a)] = ya
        for mu in chart.mus():
            env[chart.v(a, mu)] = _first_diff(ya, mu - 1, hs[mu - 1])
    residuals = []
    for a in chart.fibers():
        ya = section.y[a - 1]
        for nu in chart.mus():
            for rho in range(nu, chart.m + 1):
                if nu == rho:
                    d2 = _second_diff(ya, nu - 1, hs[nu - 1])
                else:
                    d2 = _first_diff(
                        _first_diff(ya, nu - 1, hs[nu - 1]), rho - 1, hs[rho - 1]
                    )
                rhs = np.broadcast_to(eval_array(G[(a, nu, rho)], env), ya.shape)
                residuals.append(
                    (f"d2y{a}/dx{nu}dx{rho}", _interior(d2 - rhs, chart.m))
                )
    return _make_report(residuals, tol)


# ---------------------------------------------------------------------------
# integration of flat members


@dataclass
class InitialData:
    y0: list  # N values
    v0: list  # N x m values


def _rk4(state, x, h, deriv):
    k1 = deriv(x, state)
    k2 = deriv(x + h / 2, state + h / 2 * k1)
    k3 = deriv(x + h / 2, state + h / 2 * k2)
    k4 = deriv(x + h, state + h * k3)
    return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_flat(chart, F, G, initial, axes, check_flat=True):
    """Integrate a flat semi-holonomic member into a grid section.

    m = 1 marches y'' = G with RK4; m = 2 sweeps along x1 then x2 and
    reports the mixed-derivative cross-consistency, which flatness
    guarantees only up to discretization error.

    Returns (GridSection, cross_consistency_max or None).
    """
    if chart.m not in (1, 2):
        raise ValueError("integration supports m in {1, 2}")
    from .expressions import sym, zero_test, PROVEN_ZERO

    for a in chart.fibers():
        for mu in chart.mus():
            d = F[(a, mu)] - sym(chart.v(a, mu))
            if not d.is_zero() and zero_test(d).kind != PROVEN_ZERO:
                raise ExprError("integration requires a semi-holonomic member (F = v)")
    if check_flat:
        report = curvature(mvf_to_connection(chart, LAGRANGIAN_SIDE, F, G))
        if report.flat not in (FLAT, SAMPLED_FLAT):
            key, e, _ = report.nonflat_witness()
            raise NonFlatError(key, e)

    axes = tuple(axes)
    N, m = chart.n, chart.m

    def g_eval(mu, rho, xvals, yvals, vvals):
        env = {}
        for i in range(m):
            env[chart.x(i + 1)] = xvals[i]
        for a in chart.fibers():
            env[chart.y(a)] = yvals[a - 1]
            for j in chart.mus():
                env[chart.v(a, j)] = vvals[a - 1, j - 1]
        return np.array(
            [eval_array(G[(a, mu, rho)], env) for a in chart.fibers()], dtype=float
        )

    def step_along(mu, xvals, state, h):
        # state: [y (N), v (N, m) flattened]
        def deriv(x, s):
            xs = list(xvals)
            xs[mu - 1] = x
            y = s[:N]
            v = s[N:].reshape(N, m)
            dy = v[:, mu - 1]
            dv = np.stack(
                [g_eval(mu, rho, xs, y, v) for rho in chart.mus()], axis=1
            )
            return np.concatenate([dy, dv.reshape(-1)])

        return _rk4(state, xvals[mu - 1], h, deriv)

    y0 = np.asarray(initial.y0, dtype=float)
    v0 = np.asarray(initial.v0, dtype=float).reshape(N, m)

    if m == 1:
        ax = axes[0]
        ys = np.zeros((N, ax.n))
        vs = np.zeros((N, 1, ax.n))
        state = np.concatenate([y0, v0.reshape(-1)])
        for i in range(ax.n):
            ys[:, i] = state[:N]
            vs[:, 0, i] = state[N:]
            if i + 1 < ax.n:
                state = step_along(1, [ax.x0 + i * ax.h], state, ax.h)
        section = GridSection(m=1, n_fields=N, axes=axes, y=ys, v=vs)
        return section, None

    ax1, ax2 = axes
    ys = np.zeros((N, ax1.n, ax2.n))
    vs = np.zeros((N, 2, ax1.n, ax2.n))
    # sweep 1: along x1 at the first x2 row
    state = np.concatenate([y0, v0.reshape(-1)])
    line_states = []
    for i in range(ax1.n):
        line_states.append(state.copy())
        if i + 1 < ax1.n:
            state = step_along(1, [ax1.x0 + i * ax1.h, ax2.x0], state, ax1.h)
    # sweep 2: along x2 from every node of that line
    for i, st in enumerate(line_states):
        x1 = ax1.x0 + i * ax1.h
        s = st
        for j in range(ax2.n):
            ys[:, i, j] = s[:N]
            vs[:, :, i, j] = s[N:].reshape(N, 2)
            if j + 1 < ax2.n:
                s = step_along(2, [x1, ax2.x0 + j * ax2.h], s, ax2.h)
    section = GridSection(m=2, n_fields=N, axes=axes, y=ys, v=vs)

    # cross-consistency: mixed second difference against G(1,2)
    env = section.coordinate_arrays(chart)
    for a in chart.fibers():
        env[chart.y(a)] = ys[a - 1]
        for mu in chart.mus():
            env[chart.v(a, mu)] = vs[a - 1, mu - 1]
    worst = 0.0
    for a in chart.fibers():
        mixed = _first_diff(_first_diff(ys[a - 1], 0, ax1.h), 1, ax2.h)
        target = np.broadcast_to(eval_array(G[(a, 1, 2)], env), ys[a - 1].shape)
        diff = _interior(mixed - target, 2)
        worst = max(worst, float(np.max(np.abs(diff))))
    return section, worst


# ---------------------------------------------------------------------------
# columnar text serialization (format pinned by golden files)


def write_section(section, stream):
    own = isinstance(stream, str)
    f = open(stream, "w") if own else stream
    try:
        fields = ["y"]
        if section.v is not None:
            fields.append("v")
        if section.p is not None:
            fields.append("p")
        f.write(f"jetfield-grid 1 m={section.m} N={section.n_fields} "
                f"fields={','.join(fields)}\n")
        for i, ax in enumerate(section.axes, start=1):
            f.write(f"axis{i} n={ax.n} h={ax.h!r} x0={ax.x0!r}\n")
        cols = [f"y{a}" for a in range(1, section.n_fields + 1)]
        if section.v is not None:
            cols += [
                f"v{a}_{mu}"
                for a in range(1, section.n_fields + 1)
                for mu in range(1, section.m + 1)
            ]
        if section.p is not None:
            cols += [
                f"p{a}_{mu}"
                for a in range(1, section.n_fields + 1)
                for mu in range(1, section.m + 1)
            ]
        f.write("columns " + " ".join(cols) + "\n")
        shape = tuple(ax.n for ax in section.axes)
        for idx in np.ndindex(shape):
            row = [f"{section.y[(a,) + idx]:.17g}" for a in range(section.n_fields)]
            if section.v is not None:
                row += [
                    f"{section.v[(a, mu) + idx]:.17g}"
                    for a in range(section.n_fields)
                    for mu in range(section.m)
                ]
            if section.p is not None:
                row += [
                    f"{section.p[(a, mu) + idx]:.17g}"
                    for a in range(section.n_fields)
                    for mu in range(section.m)
                ]
            f.write(" ".join(row) + "\n")
    finally:
        if own:
            f.close()


def read_section(stream):
    own = isinstance(stream, str)
    f = open(stream) if own else stream
    try:
        header = f.readline().split()
        if not header or header[0] != "jetfield-grid" or header[1] != "1":
            raise GridFormatError("not a jetfield-grid version 1 file")
        meta = dict(part.split("=", 1) for part in header[2:])
        m = int(meta["m"])
        n_fields = int(meta["N"])
        fields = meta["fields"].split(",")
        axes = []
        for _ in range(m):
            parts = f.readline().split()
            kv = dict(part.split("=", 1) for part in parts[1:])
            axes.append(Axis(n=int(kv["n"]), h=float(kv["h"]), x0=float(kv["x0"])))
        cols = f.readline().split()
        if not cols or cols[0] != "columns":
            raise GridFormatError("missing columns header")
        shape = tuple(ax.n for ax in axes)
        data = np.loadtxt(f, ndmin=2)
        expected = int(np.prod(shape))
        if data.shape[0] != expected:
            raise GridFormatError(
                f"expected {expected} rows, found {data.shape[0]}"
            )
        pos = 0
        y = data[:, pos:pos + n_fields].T.reshape((n_fields,) + shape)
        pos += n_fields
        v = p = None
        if "v" in fields:
            v = data[:, pos:pos + n_fields * m].T.reshape((n_fields, m) + shape)
            pos += n_fields * m
        if "p" in fields:
            p = data[:, pos:pos + n_fields * m].T.reshape((n_fields, m) + shape)
        return GridSection(m=m, n_fields=n_fields, axes=tuple(axes), y=y, v=v, p=p)
    finally:
        if own:
            f.close()
