"""Exact symbolic expressions over a fixed set of named coordinates.

The representation is a rational function num/den where both parts are
expanded multivariate polynomials with Fraction coefficients.  The
polynomial "variables" (atoms) are either plain symbols or kernel atoms
sin(e), cos(e), exp(e) whose argument is again an expression.  Atoms carry
a total order derived from their canonical text, so every polynomial has a
unique sorted form and equal canonical forms evaluate identically.

Zero testing is decidable on the polynomial fragment (no kernel atoms):
the canonical form is zero iff the function is zero, and a nonzero
polynomial admits an exact rational witness point.  With kernel atoms the
atoms are not algebraically independent (sin^2 + cos^2 = 1), so vanishing
can only be sampled, never proven.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "UnknownSymbolError",
    "ZeroVerdict",
    "parse",
    "sym",
    "rat",
    "sin",
    "cos",
    "exp",
    "zero_test",
]

KERNELS = ("sin", "cos", "exp")


class ExprError(Exception):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(ExprError):
    def __init__(self, name, position):
        super().__init__(f"unknown symbol '{name}' (at position {position})")
        self.name = name
        self.position = position


# ---------------------------------------------------------------------------
# atoms


class Sym:
    __slots__ = ("name", "key")

    def __init__(self, name):
        self.name = name
        self.key = ("sym", name)

    def __eq__(self, other):
        return isinstance(other, Sym) and self.name == other.name

    def __hash__(self):
        return hash(self.key)

    def text(self):
        return self.name


class Fn:
    __slots__ = ("name", "arg", "key")

    def __init__(self, name, arg):
        self.name = name
        self.arg = arg
        self.key = ("fn", name, arg.key)

    def __eq__(self, other):
        return isinstance(other, Fn) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def text(self):
        return f"{self.name}({self.arg.text()})"


_NP_KERNEL = {"sin": np.sin, "cos": np.cos, "exp": np.exp}


def _atom_eval(atom, env):
    if isinstance(atom, Sym):
        try:
            return env[atom.name]
        except KeyError:
            raise ExprError(f"no value supplied for symbol '{atom.name}'") from None
    return _NP_KERNEL[atom.name](atom.arg.eval(env))


def _atom_free(atom, out):
    if isinstance(atom, Sym):
        out.add(atom.name)
    else:
        atom.arg._free(out)


def _atom_has_fn(atom):
    return isinstance(atom, Fn)


# ---------------------------------------------------------------------------
# polynomials
#
# A monomial is a tuple of (atom, exponent) pairs, sorted by atom key, with
# strictly positive integer exponents.  A Poly maps monomials to nonzero
# Fraction coefficients.


def _mono_mul(a, b):
    out = dict(a)
    for atom, e in b:
        cur = out.get(atom, 0)
        cur += e
        out[atom] = cur
    return tuple(sorted(out.items(), key=lambda kv: kv[0].key))


def _mono_degree(mono):
    return sum(e for _, e in mono)


def _mono_lex_key(mono, atom_order):
    # exponent vector over a shared atom order, for graded-lex comparisons
    exps = dict((atom.key, e) for atom, e in mono)
    return tuple(exps.get(k, 0) for k in atom_order)


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = terms  # dict mono -> Fraction, no zero values

    @staticmethod
    def const(c):
        c = Fraction(c)
        return Poly({(): c} if c else {})

    @staticmethod
    def symbol(name):
        return Poly({((Sym(name), 1),): Fraction(1)})

    @staticmethod
    def atom(a):
        return Poly({((a, 1),): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self):
        return self.terms.get((), Fraction(0))

    def __add__(self, other):
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, Fraction(0)) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Poly(out)

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly(out)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return Poly({})
        return Poly({m: c * v for m, v in self.terms.items()})

    def powi(self, k):
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- ordering and text ------------------------------------------------

    def sorted_monos(self):
        return sorted(
            self.terms,
            key=lambda m: (-_mono_degree(m), tuple((a.key, -e) for a, e in m)),
        )

    def text(self):
        if not self.terms:
            return "0"
        pieces = []
        for mono in self.sorted_monos():
            c = self.terms[mono]
            factors = []
            for atom, e in mono:
                t = atom.text()
                factors.append(t if e == 1 else f"{t}^{e}")
            if not factors:
                body = _frac_text(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = _frac_text(abs(c)) + "*" + "*".join(factors)
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    # -- calculus ---------------------------------------------------------

    def _free(self, out):
        for mono in self.terms:
            for atom, _ in mono:
                _atom_free(atom, out)

    def has_fn(self):
        return any(_atom_has_fn(a) for mono in self.terms for a, _ in mono)

    def eval(self, env):
        total = None
        for mono, c in self.terms.items():
            val = c
            for atom, e in mono:
                val = val * _atom_eval(atom, env) ** e
            total = val if total is None else total + val
        if total is None:
            return Fraction(0)
        return total

    def diff(self, name):
        """Partial derivative with respect to a symbol; returns an Expr
        because kernel arguments may carry denominators."""
        total = Expr.const(0)
        for mono, c in self.terms.items():
            for i, (atom, e) in enumerate(mono):
                rest = mono[:i] + mono[i + 1 :]
                dat = _atom_diff(atom, name)
                if dat.is_zero():
                    continue
                base = {rest: Fraction(e) * c} if e == 1 else {
                    _mono_mul(rest, ((atom, e - 1),)): Fraction(e) * c
                }
                total = total + Expr(Poly(base), Poly.const(1)) * dat
        return total

    def subs(self, mapping):
        """Replace symbols by Exprs (also inside kernel arguments)."""
        total = Expr.const(0)
        for mono, c in self.terms.items():
            term = Expr.const(c)
            for atom, e in mono:
                if isinstance(atom, Sym):
                    rep = mapping.get(atom.name)
                    a = rep if rep is not None else Expr.symbol(atom.name)
                else:
                    a = _kernel(atom.name, atom.arg.subs(mapping))
                term = term * a ** e
            total = total + term
        return total

    # -- exact division ---------------------------------------------------

    def exact_div(self, d):
        """Quotient self/d if the division is exact, else None.

        Plain multivariate division in graded-lex order; exactness makes
        the greedy leading-term loop succeed whenever a quotient exists.
        """
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if d.is_const():
            return self.scale(Fraction(1) / d.const_value())
        atoms = {}
        for p in (self, d):
            for mono in p.terms:
                for atom, _ in mono:
                    atoms[atom.key] = None
        order = sorted(atoms)

        def mkey(mono):
            return (_mono_degree(mono), _mono_lex_key(mono, order))

        d_lead = max(d.terms, key=mkey)
        d_lc = d.terms[d_lead]
        d_lead_map = dict((a.key, (a, e)) for a, e in d_lead)
        r = dict(self.terms)
        q = {}
        while r:
            lead = max(r, key=mkey)
            lc = r[lead]
            # divide lead by d_lead
            quot = dict((a.key, (a, e)) for a, e in lead)
            ok = True
            for k, (a, e) in d_lead_map.items():
                have = quot.get(k)
                if have is None or have[1] < e:
                    ok = False
                    break
                if have[1] == e:
                    del quot[k]
                else:
                    quot[k] = (a, have[1] - e)
            if not ok:
                return None
            qmono = tuple(sorted((ae for ae in quot.values()), key=lambda ae: ae[0].key))
            qc = lc / d_lc
            q[qmono] = q.get(qmono, Fraction(0)) + qc
            sub = Poly({qmono: qc}) * d
            for m, c in sub.terms.items():
                s = r.get(m, Fraction(0)) - c
                if s:
                    r[m] = s
                else:
                    r.pop(m, None)
        return Poly({m: c for m, c in q.items() if c})


def _frac_text(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _atom_diff(atom, name):
    if isinstance(atom, Sym):
        return Expr.const(1 if atom.name == name else 0)
    darg = atom.arg.diff(name)
    if darg.is_zero():
        return Expr.const(0)
    if atom.name == "sin":
        outer = Expr.from_poly(Poly.atom(Fn("cos", atom.arg)))
    elif atom.name == "cos":
        outer = -Expr.from_poly(Poly.atom(Fn("sin", atom.arg)))
    else:
        outer = Expr.from_poly(Poly.atom(atom))
    return outer * darg


# ---------------------------------------------------------------------------
# rational expressions


_POLY_ONE = Poly.const(1)


class Expr:
    """Immutable rational function num/den in canonical form."""

    __slots__ = ("num", "den", "key", "_free_cache")

    def __init__(self, num, den):
        # normalization: zero has den 1; den is scaled to leading
        # coefficient 1; exact divisions are cancelled.
        if den.is_zero():
            raise ZeroDivisionError("expression denominator is zero")
        if num.is_zero():
            num, den = Poly({}), _POLY_ONE
        elif den.is_const():
            num, den = num.scale(Fraction(1) / den.const_value()), _POLY_ONE
        else:
            q = num.exact_div(den)
            if q is not None:
                num, den = q, _POLY_ONE
            else:
                lead = den.sorted_monos()[0]
                lc = den.terms[lead]
                num = num.scale(Fraction(1) / lc)
                den = den.scale(Fraction(1) / lc)
        self.num = num
        self.den = den
        self.key = self._text()
        self._free_cache = None

    # -- constructors -----------------------------------------------------

    @staticmethod
    def const(c):
        return Expr(Poly.const(c), _POLY_ONE)

    @staticmethod
    def symbol(name):
        return Expr(Poly.symbol(name), _POLY_ONE)

    @staticmethod
    def from_poly(p):
        return Expr(p, _POLY_ONE)

    # -- predicates -------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_const(self):
        return self.num.is_const() and self.den.is_const()

    def const_value(self):
        if not self.is_const():
            raise ExprError("expression is not constant")
        return self.num.const_value()

    def has_kernels(self):
        return self.num.has_fn() or self.den.has_fn()

    def _free(self, out):
        self.num._free(out)
        self.den._free(out)

    def free_symbols(self):
        if self._free_cache is None:
            out = set()
            self._free(out)
            self._free_cache = frozenset(out)
        return self._free_cache

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if self.den is other.den or self.den.terms == other.den.terms:
            return Expr(self.num + other.num, self.den)
        return Expr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Expr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return Expr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero expression")
        return Expr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise ExprError("only integer powers are supported")
        if k >= 0:
            return Expr(self.num.powi(k), self.den.powi(k))
        if self.is_zero():
            raise ZeroDivisionError("zero to a negative power")
        return Expr(self.den.powi(-k), self.num.powi(-k))

    def __eq__(self, other):
        return isinstance(other, Expr) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # -- calculus and evaluation ------------------------------------------

    def diff(self, name):
        if name not in self.free_symbols():
            return Expr.const(0)
        dn = self.num.diff(name)
        if self.den.is_const():
            return dn
        dd = self.den.diff(name)
        den_e = Expr.from_poly(self.den)
        return (dn * den_e - Expr.from_poly(self.num) * dd) / (den_e * den_e)

    def eval(self, env):
        nv = self.num.eval(env)
        if self.den.is_const():
            dv = self.den.const_value()
        else:
            dv = self.den.eval(env)
        return nv / dv

    def subs(self, mapping):
        n = self.num.subs(mapping)
        if self.den.is_const():
            return n / self.den.const_value()
        return n / self.den.subs(mapping)

    # -- text -------------------------------------------------------------

    def _text(self):
        if self.den.is_const():
            return self.num.text()
        return f"({self.num.text()})/({self.den.text()})"

    def text(self):
        return self.key

    def __str__(self):
        return self.key

    def __repr__(self):
        return f"Expr({self.key!r})"


def _coerce(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Expr.const(v)
    raise TypeError(f"cannot mix Expr with {type(v).__name__}")


def sym(name):
    return Expr.symbol(name)


def rat(p, q=1):
    return Expr.const(Fraction(p, q))


def _kernel(name, arg):
    if arg.is_zero():
        arg_zero = {"sin": Expr.const(0), "cos": Expr.const(1), "exp": Expr.const(1)}
        return arg_zero[name]
    return Expr.from_poly(Poly.atom(Fn(name, arg)))


def sin(e):
    return _kernel("sin", _coerce(e))


def cos(e):
    return _kernel("cos", _coerce(e))


def exp(e):
    return _kernel("exp", _coerce(e))


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/^]))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", pos)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, symbols):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected '{op}'", pos)

    def parse(self):
        e = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError("unexpected trailing input", pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.factor()
                if val == "*":
                    e = e * rhs
                else:
                    if rhs.is_zero():
                        raise ExprSyntaxError("division by zero", pos)
                    e = e / rhs
            else:
                return e

    def factor(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return -self.factor()
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.next()
            return base ** self.exponent()
        return base

    def exponent(self):
        kind, val, pos = self.next()
        sign = 1
        if kind == "op" and val == "-":
            sign = -1
            kind, val, pos = self.next()
        if kind != "int":
            raise ExprSyntaxError("expected integer exponent", pos)
        return sign * val

    def atom(self):
        kind, val, pos = self.next()
        if kind == "int":
            return Expr.const(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "name":
            nk, nv, _ = self.peek()
            if nk == "op" and nv == "(":
                if val not in KERNELS:
                    raise UnknownSymbolError(val, pos)
                self.next()
                arg = self.expr()
                self.expect_op(")")
                return _kernel(val, arg)
            if val not in self.symbols:
                raise UnknownSymbolError(val, pos)
            return Expr.symbol(val)
        raise ExprSyntaxError("expected a value", pos)


def parse(text, chart=None, parameters=()):
    """Parse an expression string over a chart's coordinates plus declared
    parameter names.  `chart` may be any object with a `coordinate_names()`
    method, or an explicit iterable of names."""
    if chart is None:
        names = set()
    elif hasattr(chart, "coordinate_names"):
        names = set(chart.coordinate_names())
    else:
        names = set(chart)
    names.update(parameters)
    return _Parser(text, names).parse()


# ---------------------------------------------------------------------------
# zero testing

PROVEN_ZERO = "proven-zero"
PROVEN_NONZERO = "proven-nonzero"
NUMERICALLY_ZERO = "numerically-zero"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class ZeroVerdict:
    kind: str
    witness: dict = field(default=None, compare=False)
    samples: int = 0
    max_abs: float = 0.0

    @property
    def is_zero_like(self):
        return self.kind in (PROVEN_ZERO, NUMERICALLY_ZERO)

    def __str__(self):
        if self.kind == PROVEN_NONZERO:
            pt = ", ".join(f"{k}={v}" for k, v in sorted(self.witness.items()))
            return f"{self.kind}({pt})"
        if self.kind == NUMERICALLY_ZERO:
            return f"{self.kind}({self.samples} samples)"
        return self.kind


def zero_test(e, samples=16, tol=1e-9, seed=0):
    """Decide whether an expression vanishes identically.

    Polynomial fragment: exact (proven zero, or proven nonzero with a
    rational witness).  With kernel atoms, vanishing at `samples` random
    points is reported as numerically zero; a clearly nonzero sample set is
    left undecided since kernel atoms satisfy hidden identities.
    """
    if e.is_zero():
        return ZeroVerdict(PROVEN_ZERO)
    rng = random.Random(seed)
    names = sorted(e.free_symbols())
    if not e.has_kernels():
        for _ in range(64):
            point = {
                n: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for n in names
            }
            den_val = e.den.eval(point)
            if den_val == 0:
                continue
            val = e.num.eval(point)
            if val != 0:
                return ZeroVerdict(PROVEN_NONZERO, witness=point)
        # a nonzero polynomial over Q essentially always yields a witness
        # above; reaching here means the sampling box was degenerate
        return ZeroVerdict(UNDECIDED)
    max_abs = 0.0
    done = 0
    while done < samples:
        point = {n: rng.uniform(-2.0, 2.0) for n in names}
        try:
            den_val = e.den.eval(point)
        except (OverflowError, ZeroDivisionError):
            continue
        if abs(den_val) < 1e-6:
            continue
        val = e.num.eval(point) / den_val
        max_abs = max(max_abs, abs(val))
        done += 1
    if max_abs < tol:
        return ZeroVerdict(NUMERICALLY_ZERO, samples=samples, max_abs=max_abs)
    return ZeroVerdict(UNDECIDED, samples=samples, max_abs=max_abs)
