"""Exact multivariate polynomial and rational-function arithmetic.

Polynomials live in Z[x_1..x_n], stored as a map from exponent tuples to
nonzero int coefficients with a graded-lexicographic term order.  Rational
functions are kept canonical: common polynomial gcd removed (including
integer content) and the leading denominator coefficient positive.

The gcd is computed by recursive content / primitive-part elimination over
one variable at a time (primitive pseudo-remainder sequence), with a fast
path when one operand is a monomial.  This is exact and adequate at desk
scale; cluster-variable denominators are monomials, so mutation sequences
stay on the fast path.
"""

from __future__ import annotations

from math import gcd as int_gcd

from .errors import ValidationError


def _grlex_key(exp):
    return (sum(exp), exp)


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        self.nvars = nvars
        self.terms = terms  # exponent tuple -> nonzero int

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Poly":
        return Poly(nvars, {})

    @staticmethod
    def const(nvars: int, c: int) -> "Poly":
        c = int(c)
        if c == 0:
            return Poly.zero(nvars)
        return Poly(nvars, {(0,) * nvars: c})

    @staticmethod
    def gen(nvars: int, i: int) -> "Poly":
        """The variable x_{i+1} (0-based index i)."""
        if not 0 <= i < nvars:
            raise ValidationError(f"variable index {i} out of range")
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return Poly(nvars, {exp: 1})

    @staticmethod
    def monomial(nvars: int, exp, c: int = 1) -> "Poly":
        c = int(c)
        if c == 0:
            return Poly.zero(nvars)
        return Poly(nvars, {tuple(exp): c})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.nvars: 1}

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * self.nvars}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- ring operations ---------------------------------------------------

    def _binop(self, other, sign):
        if self.nvars != other.nvars:
            raise ValidationError("polynomial arity mismatch")
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            c2 = terms.get(exp, 0) + sign * c
            if c2:
                terms[exp] = c2
            else:
                terms.pop(exp, None)
        return Poly(self.nvars, terms)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if self.nvars != other.nvars:
            raise ValidationError("polynomial arity mismatch")
        if len(self.terms) > len(other.terms):
            self, other = other, self
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                c = terms.get(exp, 0) + c1 * c2
                if c:
                    terms[exp] = c
                else:
                    del terms[exp]
        return Poly(self.nvars, terms)

    def scale(self, c: int) -> "Poly":
        c = int(c)
        if c == 0:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {e: k * c for e, k in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({poly_str(self)})"

    # -- term order helpers ---------------------------------------------

    def leading_exp(self):
        return max(self.terms, key=_grlex_key)

    def leading_coeff(self) -> int:
        return self.terms[self.leading_exp()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def content(self) -> int:
        """Positive integer gcd of the coefficients (0 for the zero poly)."""
        g = 0
        for c in self.terms.values():
            g = int_gcd(g, abs(c))
            if g == 1:
                return 1
        return g

    def min_exps(self):
        out = None
        for e in self.terms:
            out = e if out is None else tuple(map(min, out, e))
        return out

    def variables(self):
        """Indices of variables that actually occur."""
        out = set()
        for e in self.terms:
            for i, p in enumerate(e):
                if p:
                    out.add(i)
        return out


# -- exact division ----------------------------------------------------------

def div_exact(p: Poly, q: Poly) -> Poly:
    """Quotient p / q, raising if q does not divide p exactly."""
    if q.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if p.is_zero():
        return Poly.zero(p.nvars)
    if q.is_monomial():
        (qe, qc), = q.terms.items()
        terms = {}
        for e, c in p.terms.items():
            ne = tuple(a - b for a, b in zip(e, qe))
            if any(x < 0 for x in ne) or c % qc:
                raise ValidationError("inexact polynomial division")
            terms[ne] = c // qc
        return Poly(p.nvars, terms)
    quot = Poly.zero(p.nvars)
    rem = p
    qe, qc = q.leading_exp(), q.leading_coeff()
    while not rem.is_zero():
        re, rc = rem.leading_exp(), rem.leading_coeff()
        ne = tuple(a - b for a, b in zip(re, qe))
        if any(x < 0 for x in ne) or rc % qc:
            raise ValidationError("inexact polynomial division")
        t = Poly.monomial(p.nvars, ne, rc // qc)
        quot = quot + t
        rem = rem - t * q
    return quot


# -- gcd ---------------------------------------------------------------------

def _coeffs_in_var(p: Poly, var: int) -> dict:
    """View p as univariate in x_{var+1}: degree -> coefficient Poly."""
    out: dict = {}
    for e, c in p.terms.items():
        d = e[var]
        e0 = e[:var] + (0,) + e[var + 1:]
        coeff = out.setdefault(d, {})
        coeff[e0] = coeff.get(e0, 0) + c
    return {d: Poly(p.nvars, {e: c for e, c in t.items() if c}) for d, t in out.items()}


def _from_coeffs(nvars: int, var: int, coeffs: dict) -> Poly:
    terms = {}
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            exp = e[:var] + (d,) + e[var + 1:]
            terms[exp] = c
    return Poly(nvars, terms)


def _shift_var(p: Poly, var: int, d: int) -> Poly:
    return Poly(p.nvars, {e[:var] + (e[var] + d,) + e[var + 1:]: c for e, c in p.terms.items()})


def _content_in_var(p: Poly, var: int) -> Poly:
    c = Poly.zero(p.nvars)
    for coeff in _coeffs_in_var(p, var).values():
        c = poly_gcd(c, coeff)
        if c.is_constant() and abs(c.leading_coeff()) == 1:
            break
    return c


def _monomial_gcd(p: Poly, q: Poly) -> Poly:
    exp = tuple(map(min, p.min_exps(), q.min_exps()))
    return Poly.monomial(p.nvars, exp, int_gcd(p.content(), q.content()))


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Gcd in Z[x_1..x_n], normalized to a positive leading coefficient."""
    if p.is_zero():
        return _positive_lead(q)
    if q.is_zero():
        return _positive_lead(p)
    if p.is_monomial() or q.is_monomial():
        return _monomial_gcd(p, q)
    common = p.variables() & q.variables()
    if not common:
        return Poly.const(p.nvars, int_gcd(p.content(), q.content()))
    var = max(p.variables() | q.variables())
    if var not in p.variables() or var not in q.variables():
        # one operand is constant in the main variable: gcd divides its content
        if var not in p.variables():
            return poly_gcd(p, _content_in_var(q, var))
        return poly_gcd(_content_in_var(p, var), q)
    cp = _content_in_var(p, var)
    cq = _content_in_var(q, var)
    c = poly_gcd(cp, cq)
    a = div_exact(p, cp)
    b = div_exact(q, cq)
    # primitive pseudo-remainder sequence in the main variable
    if _deg(a, var) < _deg(b, var):
        a, b = b, a
    while not b.is_zero():
        r = _pseudo_rem(a, b, var)
        a, b = b, _primitive_part(r, var)
    return _positive_lead(c * a)


def _deg(p: Poly, var: int) -> int:
    return max((e[var] for e in p.terms), default=-1)


def _lead_in_var(p: Poly, var: int):
    d = _deg(p, var)
    coeffs = _coeffs_in_var(p, var)
    return d, coeffs[d]


def _pseudo_rem(a: Poly, b: Poly, var: int) -> Poly:
    db, lb = _lead_in_var(b, var)
    r = a
    while not r.is_zero():
        dr, lr = _lead_in_var(r, var)
        if dr < db:
            break
        r = lb * r - _shift_var(lr * b, var, dr - db)
    return r


def _primitive_part(p: Poly, var: int) -> Poly:
    if p.is_zero():
        return p
    return div_exact(p, _content_in_var(p, var))


def _positive_lead(p: Poly) -> Poly:
    if not p.is_zero() and p.leading_coeff() < 0:
        return -p
    return p


# -- rational functions --------------------------------------------------------

class RationalFunction:
    """Quotient of two polynomials, always kept in canonical form."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = Poly.zero(num.nvars), Poly.const(num.nvars, 1)
        else:
            g = poly_gcd(num, den)
            if not g.is_one():
                num, den = div_exact(num, g), div_exact(den, g)
            if den.leading_coeff() < 0:
                num, den = -num, -den
        self.num = num
        self.den = den

    @staticmethod
    def from_poly(p: Poly) -> "RationalFunction":
        return RationalFunction(p, Poly.const(p.nvars, 1))

    @staticmethod
    def generator(nvars: int, i: int) -> "RationalFunction":
        return RationalFunction.from_poly(Poly.gen(nvars, i))

    @staticmethod
    def constant(nvars: int, c: int) -> "RationalFunction":
        return RationalFunction.from_poly(Poly.const(nvars, c))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def __add__(self, other):
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({ratfun_str(self)})"

    def is_laurent(self) -> bool:
        """True iff the canonical denominator is a single monomial."""
        return self.den.is_monomial()

    def cross_equals(self, other) -> bool:
        """Equality by cross-multiplication, independent of canonicalization."""
        return self.num * other.den == other.num * self.den


def normalize(num: Poly, den: Poly) -> RationalFunction:
    return RationalFunction(num, den)


# -- canonical strings ----------------------------------------------------------

def default_names(nvars: int) -> list[str]:
    return [f"x_{i + 1}" for i in range(nvars)]


def poly_str(p: Poly, names=None) -> str:
    if p.is_zero():
        return "0"
    names = names or default_names(p.nvars)
    parts = []
    for exp, coeff in p.sorted_terms():
        factors = []
        for i, e in enumerate(exp):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        mag = abs(coeff)
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{mag}*{body}"
        else:
            body = str(mag)
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f"+{body}" if coeff > 0 else f"-{body}")
    return "".join(parts)


def _needs_parens_as_denominator(p: Poly, rendered: str) -> bool:
    if len(p.terms) > 1:
        return True
    return "*" in rendered


def ratfun_str(f: RationalFunction, names=None) -> str:
    num = poly_str(f.num, names)
    if f.den.is_one():
        return num
    den = poly_str(f.den, names)
    if len(f.num.terms) > 1:
        num = f"({num})"
    if _needs_parens_as_denominator(f.den, den):
        den = f"({den})"
    return f"{num}/{den}"
