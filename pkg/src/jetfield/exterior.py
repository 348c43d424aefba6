"""Differential forms and multivector fields on a chart.

Both are stored sparsely: a map from strictly increasing tuples of
coordinate indices (in the chart's canonical coordinate order) to Expr
coefficients.  Multivectors built as a wedge of vector fields keep the
factor list, which contraction exploits: the interior-product convention
is i(X_1 ^ ... ^ X_m) = i(X_m) o ... o i(X_1), the first factor acting
innermost.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expressions import Expr, ExprError


class DegreeError(ExprError):
    pass


_INDEX_CACHE = {}


def coordinate_index(chart):
    table = _INDEX_CACHE.get(chart)
    if table is None:
        table = {name: i for i, name in enumerate(chart.coordinate_names())}
        _INDEX_CACHE[chart] = table
    return table


def _merge_key(k1, k2):
    """Concatenate two increasing index tuples; returns (key, sign) or
    (None, 0) on a repeated index."""
    merged = list(k1)
    sign = 1
    for idx in k2:
        pos = len(merged)
        while pos > 0 and merged[pos - 1] > idx:
            pos -= 1
        if pos > 0 and merged[pos - 1] == idx:
            return None, 0
        sign *= -1 if (len(merged) - pos) % 2 else 1
        merged.insert(pos, idx)
    return tuple(merged), sign


def _add_term(terms, key, coeff):
    if coeff.is_zero():
        return
    cur = terms.get(key)
    s = coeff if cur is None else cur + coeff
    if s.is_zero():
        terms.pop(key, None)
    else:
        terms[key] = s


def _wedge_terms(t1, t2):
    out = {}
    for k1, c1 in t1.items():
        for k2, c2 in t2.items():
            key, sign = _merge_key(k1, k2)
            if key is None:
                continue
            _add_term(out, key, c1 * c2 if sign > 0 else -(c1 * c2))
    return out


def _insert_vector(terms, components):
    """Interior product of a single vector field (index -> Expr) with a
    term map, lowering the degree by one."""
    out = {}
    for key, coeff in terms.items():
        for j, idx in enumerate(key):
            comp = components.get(idx)
            if comp is None or comp.is_zero():
                continue
            reduced = key[:j] + key[j + 1 :]
            val = comp * coeff
            _add_term(out, reduced, val if j % 2 == 0 else -val)
    return out


def _terms_text(terms, names, prefix):
    if not terms:
        return "0"
    pieces = []
    for key in sorted(terms):
        mono = "^".join(f"{prefix}{names[i]}" for i in key)
        pieces.append(f"({terms[key].text()}) {mono}" if mono else f"({terms[key].text()})")
    return " + ".join(pieces)


@dataclass
class DiffForm:
    chart: object
    degree: int
    terms: dict

    @staticmethod
    def zero(chart, degree):
        return DiffForm(chart, degree, {})

    @staticmethod
    def function(chart, e):
        return DiffForm(chart, 0, {(): e} if not e.is_zero() else {})

    @staticmethod
    def monomial(chart, names, coeff):
        index = coordinate_index(chart)
        key, sign = _merge_key((), tuple(index[n] for n in names))
        if key is None:
            return DiffForm.zero(chart, len(names))
        return DiffForm(chart, len(names), {key: coeff if sign > 0 else -coeff})

    def __add__(self, other):
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_term(out, k, c)
        return DiffForm(self.chart, self.degree, out)

    def __neg__(self):
        return DiffForm(self.chart, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, e):
        out = {}
        for k, c in self.terms.items():
            _add_term(out, k, e * c)
        return DiffForm(self.chart, self.degree, out)

    def is_zero(self):
        return not self.terms

    def coefficient(self, names):
        index = coordinate_index(self.chart)
        key, sign = _merge_key((), tuple(index[n] for n in names))
        if key is None:
            return Expr.const(0)
        c = self.terms.get(key)
        if c is None:
            return Expr.const(0)
        return c if sign > 0 else -c

    def text(self):
        return _terms_text(self.terms, self.chart.coordinate_names(), "d")

    def __str__(self):
        return self.text()


@dataclass
class MultiVec:
    chart: object
    degree: int
    terms: dict
    factors: list = field(default=None)

    @staticmethod
    def vector(chart, components):
        """Degree-1 multivector from a name -> Expr component map."""
        index = coordinate_index(chart)
        terms = {}
        for name, e in components.items():
            _add_term(terms, (index[name],), e)
        return MultiVec(chart, 1, terms)

    def component_map(self):
        if self.degree != 1:
            raise DegreeError("component_map is only defined for vector fields")
        return dict(self.terms)

    def is_zero(self):
        return not self.terms

    def text(self):
        return _terms_text(self.terms, self.chart.coordinate_names(), "@")

    def __str__(self):
        return self.text()


def wedge(a, b):
    """Exterior product of two forms."""
    dim = len(a.chart.coordinate_names())
    if a.degree + b.degree > dim:
        raise DegreeError(
            f"wedge degree {a.degree}+{b.degree} exceeds chart dimension {dim}"
        )
    return DiffForm(a.chart, a.degree + b.degree, _wedge_terms(a.terms, b.terms))


def ext_d(omega):
    """Exterior derivative."""
    chart = omega.chart
    index = coordinate_index(chart)
    out = {}
    for key, coeff in omega.terms.items():
        for name in coeff.free_symbols():
            idx = index.get(name)
            if idx is None:
                continue  # named parameters are constants for d
            d = coeff.diff(name)
            if d.is_zero():
                continue
            # d(c w_K) = dc ^ w_K: the new differential goes in front
            newkey, sign = _merge_key((idx,), key)
            if newkey is None:
                continue
            _add_term(out, newkey, d if sign > 0 else -d)
    return DiffForm(chart, omega.degree + 1, out)


def decomposable(chart, factor_components):
    """Wedge of degree-1 vector fields; the factor list is retained so the
    contraction can run factor by factor."""
    factors = []
    index = coordinate_index(chart)
    terms = {(): Expr.const(1)}
    for comp in factor_components:
        comp_idx = {}
        for name, e in comp.items():
            if not e.is_zero():
                comp_idx[index[name]] = e
        factors.append(comp_idx)
        terms = _wedge_terms(terms, {(i,): c for i, c in comp_idx.items()})
    return MultiVec(chart, len(factors), terms, factors=factors)


def contract(X, omega):
    """Interior product i(X) of an m-multivector with a k-form (k >= m)."""
    if omega.degree < X.degree:
        raise DegreeError(
            f"cannot contract degree-{X.degree} multivector with degree-{omega.degree} form"
        )
    if X.factors is not None:
        terms = omega.terms
        for comp in X.factors:
            terms = _insert_vector(terms, comp)
        return DiffForm(omega.chart, omega.degree - X.degree, terms)
    out = {}
    for key, g in X.terms.items():
        terms = omega.terms
        for idx in key:
            terms = _insert_vector(terms, {idx: Expr.const(1)})
        for k, c in terms.items():
            _add_term(out, k, g * c)
    return DiffForm(omega.chart, omega.degree - X.degree, out)


def volume_form(chart):
    """d^m x on the chart."""
    return DiffForm.monomial(chart, chart.x_names(), Expr.const(1))


def base_volume_contraction(chart, mu):
    """d^{m-1}x_mu = i(d/dx^mu)(d^m x); the single definition site for the
    orientation signs."""
    index = coordinate_index(chart)
    vec = MultiVec.vector(chart, {chart.x(mu): Expr.const(1)})
    vol = volume_form(chart)
    return contract(vec, vol)
