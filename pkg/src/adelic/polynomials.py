"""Coefficient fields and sparse polynomials in one or two variables.

Polynomials are immutable dictionaries ``{exponent tuple: coefficient}``.
The monomial order is degree-lexicographic with ``x > y`` everywhere.
"""

from fractions import Fraction

import sympy

from .errors import InvalidExpr, UnsupportedRing

VAR_NAMES = ("x", "y")


class RationalField:
    characteristic = 0
    name = "QQ"

    def coerce(self, c):
        if isinstance(c, Fraction):
            return c
        if isinstance(c, int):
            return Fraction(c)
        if isinstance(c, str):
            return Fraction(c)
        if hasattr(c, "p") and hasattr(c, "q"):  # sympy Rational
            return Fraction(int(c.p), int(c.q))
        raise TypeError(f"cannot coerce {c!r} into QQ")

    def norm(self, c):
        return c

    def inv(self, c):
        if c == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / c

    def fmt(self, c):
        return str(c)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def to_json(self):
        return {"kind": "Rationals"}


class GFp:
    """The prime field with ``p`` elements; elements are ints in ``[0, p)``."""

    def __init__(self, p):
        if not sympy.isprime(p):
            raise UnsupportedRing(f"{p} is not prime")
        self.p = int(p)
        self.characteristic = self.p
        self.name = f"GF({p})"

    def coerce(self, c):
        if isinstance(c, Fraction):
            return (c.numerator * pow(c.denominator, -1, self.p)) % self.p
        if isinstance(c, str):
            return self.coerce(Fraction(c))
        if hasattr(c, "p") and hasattr(c, "q"):
            return self.coerce(Fraction(int(c.p), int(c.q)))
        return int(c) % self.p

    def norm(self, c):
        return c % self.p

    def inv(self, c):
        if c % self.p == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(c, -1, self.p)

    def fmt(self, c):
        return str(c)

    def __eq__(self, other):
        return isinstance(other, GFp) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return self.name

    def to_json(self):
        return {"kind": "PrimeField", "p": self.p}


QQ = RationalField()


def deglex_key(m):
    return (sum(m), m)


class Poly:
    __slots__ = ("field", "nvars", "terms", "_hash")

    def __init__(self, field, nvars, terms=None):
        self.field = field
        self.nvars = nvars
        clean = {}
        if terms:
            for m, c in terms.items():
                c = field.norm(c)
                if c != 0:
                    clean[tuple(m)] = c
        self.terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: field.coerce(c)})

    @classmethod
    def var(cls, field, nvars, i):
        m = [0] * nvars
        m[i] = 1
        return cls(field, nvars, {tuple(m): field.coerce(1)})

    @classmethod
    def monomial(cls, field, m, c=1):
        return cls(field, len(m), {tuple(m): field.coerce(c)})

    def _like(self, terms):
        return Poly(self.field, self.nvars, terms)

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.field != self.field or other.nvars != self.nvars:
                raise TypeError("polynomials over different rings")
            return other
        return Poly.const(self.field, self.nvars, other)

    # arithmetic
    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return self._like(t)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return self._like(t)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = Poly.const(self.field, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        return self._like({m: c * v for m, v in self.terms.items()})

    def mul_monomial(self, mono, c=None):
        c = self.field.coerce(1) if c is None else c
        return self._like({tuple(a + b for a, b in zip(m, mono)): c * v
                           for m, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = self._lift(other)
            except TypeError:
                return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(sum(m) == 0 for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def lead(self):
        """Leading (monomial, coefficient) under degree-lex."""
        m = max(self.terms, key=deglex_key)
        return m, self.terms[m]

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def monic(self):
        if not self.terms:
            return self
        return self.scale(self.field.inv(self.lead()[1]))

    def evaluate(self, point):
        total = 0
        for m, c in self.terms.items():
            v = c
            for a, e in zip(point, m):
                v = v * a ** e
            total += v
        return self.field.norm(total) if not isinstance(total, Fraction) else total

    # univariate Euclidean structure
    def divmod(self, other):
        if self.nvars != 1:
            raise UnsupportedRing("Euclidean division needs one variable")
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = {}
        r = self
        (dm,), dc = other.lead()
        inv = self.field.inv(dc)
        while r.terms:
            (rm,), rc = r.lead()
            if rm < dm:
                break
            c = self.field.norm(rc * inv)
            q[(rm - dm,)] = c
            r = r - other.mul_monomial((rm - dm,), c)
        return self._like(q), r

    def __floordiv__(self, other):
        return self.divmod(self._lift(other))[0]

    def __mod__(self, other):
        return self.divmod(self._lift(other))[1]

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=deglex_key, reverse=True):
            c = self.terms[m]
            mono = "*".join(VAR_NAMES[i] + (f"^{e}" if e > 1 else "")
                            for i, e in enumerate(m) if e)
            cs = self.field.fmt(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"


def parse_poly(text, field, nvars):
    """Parse a polynomial string such as ``"x^2 + 3*x*y - 1"``."""
    syms = sympy.symbols(VAR_NAMES[:nvars])
    try:
        expr = sympy.sympify(str(text).replace("^", "**"),
                             locals={n: s for n, s in zip(VAR_NAMES, syms)})
        sp = sympy.Poly(expr, *syms, domain="QQ")
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise InvalidExpr(f"cannot parse polynomial {text!r}: {exc}") from exc
    terms = {tuple(m): field.coerce(c) for m, c in sp.terms()}
    return Poly(field, nvars, terms)


def upoly_gcdex(a, b):
    """Return (g, s, t) with g = s*a + t*b and g monic (or zero)."""
    one = Poly.const(a.field, 1, 1)
    zero = Poly(a.field, 1)
    r0, r1, s0, s1, t0, t1 = a, b, one, zero, zero, one
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = a.field.inv(r0.lead()[1])
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def is_irreducible_univariate(f):
    if f.degree() < 1:
        return False
    return _sympy_irreducible(f, 1)


def is_irreducible_bivariate(f):
    if f.degree() < 1:
        return False
    return _sympy_irreducible(f, 2)


def _sympy_irreducible(f, nvars):
    syms = sympy.symbols(VAR_NAMES[:nvars])
    expr = sympy.Integer(0)
    for m, c in f.terms.items():
        coeff = sympy.Rational(int(Fraction(c).numerator), int(Fraction(c).denominator))
        expr += coeff * sympy.prod([s ** e for s, e in zip(syms, m)])
    if isinstance(f.field, GFp):
        sp = sympy.Poly(expr, *syms, modulus=f.field.p)
    else:
        sp = sympy.Poly(expr, *syms, domain="QQ")
    _, factors = sp.factor_list()
    return len(factors) == 1 and factors[0][1] == 1
