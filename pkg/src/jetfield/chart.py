"""Natural coordinates on a trivial first-order jet / multimomentum chart.

For base dimension m and fiber dimension N the generated names are
x1..xm, y1..yN, vA_mu, pA_mu and wA_mu_nu (second-order slots, stored with
mu <= nu so the symmetric pair has one canonical name).
"""

from __future__ import annotations

from dataclasses import dataclass

from .expressions import Expr, ExprError, sym


@dataclass(frozen=True)
class ChartSpec:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("chart dimensions must be positive")

    # -- coordinate names -------------------------------------------------

    def x(self, mu):
        self._check_mu(mu)
        return f"x{mu}"

    def y(self, a):
        self._check_a(a)
        return f"y{a}"

    def v(self, a, mu):
        self._check_a(a)
        self._check_mu(mu)
        return f"v{a}_{mu}"

    def p(self, a, mu):
        self._check_a(a)
        self._check_mu(mu)
        return f"p{a}_{mu}"

    def w(self, a, mu, nu):
        self._check_a(a)
        self._check_mu(mu)
        self._check_mu(nu)
        lo, hi = min(mu, nu), max(mu, nu)
        return f"w{a}_{lo}_{hi}"

    def _check_mu(self, mu):
        if not 1 <= mu <= self.m:
            raise IndexError(f"base index {mu} out of range 1..{self.m}")

    def _check_a(self, a):
        if not 1 <= a <= self.n:
            raise IndexError(f"fiber index {a} out of range 1..{self.n}")

    # -- coordinate groups ------------------------------------------------

    def x_names(self):
        return [self.x(mu) for mu in self.mus()]

    def y_names(self):
        return [self.y(a) for a in self.fibers()]

    def v_names(self):
        return [self.v(a, mu) for a in self.fibers() for mu in self.mus()]

    def p_names(self):
        return [self.p(a, mu) for a in self.fibers() for mu in self.mus()]

    def w_names(self):
        return [
            self.w(a, mu, nu)
            for a in self.fibers()
            for mu in self.mus()
            for nu in range(mu, self.m + 1)
        ]

    def coordinate_names(self):
        return (
            self.x_names()
            + self.y_names()
            + self.v_names()
            + self.p_names()
            + self.w_names()
        )

    def mus(self):
        return range(1, self.m + 1)

    def fibers(self):
        return range(1, self.n + 1)

    def contains_w(self, e):
        wset = set(self.w_names())
        return any(name in wset for name in e.free_symbols())

    def contains(self, e, group):
        names = set(group)
        return any(name in names for name in e.free_symbols())


def total_derivative(e, mu, chart):
    """Derivative along x^mu of a first-order expression, lifted to the
    second-order slots: D_mu = d/dx^mu + v^A_mu d/dy^A + w^A_{mu,nu} d/dv^A_nu.

    Rejects input already containing w symbols (would need third-order
    slots the chart does not generate).
    """
    if chart.contains_w(e):
        raise ExprError("total derivative input already contains second-order w symbols")
    out = e.diff(chart.x(mu))
    for a in chart.fibers():
        out = out + sym(chart.v(a, mu)) * e.diff(chart.y(a))
        for nu in chart.mus():
            out = out + sym(chart.w(a, mu, nu)) * e.diff(chart.v(a, nu))
    return out
