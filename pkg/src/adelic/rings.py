"""Computational cores: the concrete rings over which matrices live.

A core is a small object that knows how to coerce, normalise and take
Bezout gcds of its elements.  Elements themselves are plain Python values
(``int``, ``Fraction``, :class:`Poly`, :class:`Frac`) that support the usual
arithmetic operators, so matrix code can stay generic.

PID cores: :class:`IntegerCore`, :class:`FieldCore`, :class:`UPolyCore` and
:class:`SemilocalCore` (a Euclidean core with every element outside a finite
set of primes inverted).  :class:`BivariateCore` is the only non-PID core; it
is handled by :mod:`adelic.groebner`.
"""

from fractions import Fraction


from .errors import InvalidExpr, UnsupportedRing
from .polynomials import QQ, Poly, parse_poly, upoly_gcdex


def _int_valuation(n, p):
    if n == 0:
        return float("inf")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class IntegerCore:
    is_pid = True
    is_field = False
    euclidean = True

    def __init__(self):
        self.zero = 0
        self.one = 1
        self.key = ("ZZ",)

    def coerce(self, x):
        if isinstance(x, bool):
            return int(x)
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        if isinstance(x, str):
            try:
                return int(x)
            except ValueError as exc:
                raise InvalidExpr(f"{x!r} is not an integer") from exc
        raise InvalidExpr(f"{x!r} is not an integer")

    def is_zero(self, x):
        return x == 0

    def is_unit(self, x):
        return x in (1, -1)

    def normalize(self, x):
        """Return (associate, unit) with x == associate * unit."""
        if x < 0:
            return -x, -1
        return x, 1

    def inverse(self, u):
        if u not in (1, -1):
            raise ZeroDivisionError(f"{u} is not a unit in ZZ")
        return u

    def gcdex(self, a, b):
        # iterative extended Euclid, result normalised to g >= 0
        r0, r1, s0, s1, t0, t1 = a, b, 1, 0, 0, 1
        while r1 != 0:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0 < 0:
            r0, s0, t0 = -r0, -s0, -t0
        return r0, s0, t0

    def divmod(self, a, b):
        return divmod(a, b)

    def divides(self, a, b):
        if a == 0:
            return b == 0
        return b % a == 0

    def div(self, b, a):
        """Exact quotient b / a."""
        if a == 0 or b % a:
            raise ZeroDivisionError(f"{a} does not divide {b}")
        return b // a

    def valuation(self, x, p):
        return _int_valuation(x, p)

    def fmt(self, x):
        return str(x)

    def parse(self, text):
        return self.coerce(text)

    def __eq__(self, other):
        return isinstance(other, IntegerCore)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "ZZ"


class FieldCore:
    is_pid = True
    is_field = True
    euclidean = True

    def __init__(self, field):
        self.field = field
        self.zero = field.coerce(0)
        self.one = field.coerce(1)
        self.key = ("field", repr(field))

    def coerce(self, x):
        if isinstance(x, str):
            return self.field.coerce(Fraction(x))
        return self.field.coerce(x)

    def is_zero(self, x):
        return self.field.norm(x) == 0

    def is_unit(self, x):
        return not self.is_zero(x)

    def normalize(self, x):
        x = self.field.norm(x)
        if x == 0:
            return self.zero, self.one
        return self.one, x

    def inverse(self, u):
        return self.field.inv(u)

    def gcdex(self, a, b):
        a, b = self.field.norm(a), self.field.norm(b)
        if a != 0:
            return self.one, self.field.inv(a), self.zero
        if b != 0:
            return self.one, self.zero, self.field.inv(b)
        return self.zero, self.one, self.zero

    def divmod(self, a, b):
        return self.field.norm(a * self.field.inv(b)), self.zero

    def divides(self, a, b):
        return not self.is_zero(a) or self.is_zero(b)

    def div(self, b, a):
        return self.field.norm(b * self.field.inv(a))

    def valuation(self, x, p):
        return float("inf") if self.is_zero(x) else 0

    def fmt(self, x):
        return self.field.fmt(self.field.norm(x))

    def parse(self, text):
        return self.coerce(text)

    def __eq__(self, other):
        return isinstance(other, FieldCore) and other.field == self.field

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return repr(self.field)


class UPolyCore:
    """k[x] for a coefficient field k."""

    is_pid = True
    is_field = False
    euclidean = True

    def __init__(self, field):
        self.field = field
        self.zero = Poly(field, 1)
        self.one = Poly.const(field, 1, 1)
        self.key = ("k[x]", repr(field))

    def coerce(self, x):
        if isinstance(x, Poly):
            if x.nvars != 1 or x.field != self.field:
                raise InvalidExpr(f"{x} is not in {self}")
            return x
        if isinstance(x, str):
            return parse_poly(x, self.field, 1)
        return Poly.const(self.field, 1, x)

    def is_zero(self, x):
        return x.is_zero()

    def is_unit(self, x):
        return (not x.is_zero()) and x.degree() == 0

    def normalize(self, x):
        if x.is_zero():
            return x, self.one
        c = x.lead()[1]
        return x.scale(self.field.inv(c)), Poly.const(self.field, 1, c)

    def inverse(self, u):
        if not self.is_unit(u):
            raise ZeroDivisionError(f"{u} is not a unit")
        return Poly.const(self.field, 1, self.field.inv(u.constant_term()))

    def gcdex(self, a, b):
        return upoly_gcdex(a, b)

    def divmod(self, a, b):
        return a.divmod(b)

    def divides(self, a, b):
        if a.is_zero():
            return b.is_zero()
        return b.divmod(a)[1].is_zero()

    def div(self, b, a):
        q, r = b.divmod(a)
        if not r.is_zero():
            raise ZeroDivisionError(f"{a} does not divide {b}")
        return q

    def valuation(self, x, p):
        if x.is_zero():
            return float("inf")
        v = 0
        while True:
            q, r = x.divmod(p)
            if not r.is_zero():
                return v
            x = q
            v += 1

    def fmt(self, x):
        return str(x)

    def parse(self, text):
        return self.coerce(text)

    def __eq__(self, other):
        return isinstance(other, UPolyCore) and other.field == self.field

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{self.field!r}[x]"


class Frac:
    """Fraction num/den over a Euclidean core, kept in lowest terms."""

    __slots__ = ("core", "num", "den")

    def __init__(self, core, num, den=None):
        den = core.one if den is None else den
        if core.is_zero(den):
            raise ZeroDivisionError("zero denominator")
        g = core.gcdex(num, den)[0]
        if not core.is_zero(g) and not core.is_unit(g):
            num, den = core.div(num, g), core.div(den, g)
        den, u = core.normalize(den)
        num = num * core.inverse(u)
        self.core, self.num, self.den = core, num, den

    def _lift(self, other):
        if isinstance(other, Frac):
            return other
        return Frac(self.core, self.core.coerce(other))

    def __add__(self, other):
        o = self._lift(other)
        return Frac(self.core, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Frac(self.core, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Frac(self.core, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (InvalidExpr, TypeError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == self.core.one:
            return self.core.fmt(self.num)
        return f"({self.core.fmt(self.num)})/({self.core.fmt(self.den)})"

    __repr__ = __str__


class SemilocalCore:
    """A Euclidean core with every element outside the given primes inverted.

    ``primes`` are generators (ints or irreducible monic polynomials).  With an
    empty prime list this is the fraction field of the base.
    """

    is_pid = True
    euclidean = False

    def __init__(self, base, primes):
        if not base.euclidean or base.is_field:
            raise UnsupportedRing(f"cannot semilocalize {base!r}")
        self.base = base
        self.primes = tuple(sorted({base.normalize(base.coerce(p))[0] for p in primes},
                                   key=base.fmt))
        self.is_field = not self.primes
        self.zero = self._wrap(base.zero)
        self.one = self._wrap(base.one)
        self.key = ("semilocal", base.key, tuple(base.fmt(p) for p in self.primes))

    def _wrap(self, n, d=None):
        if isinstance(self.base, IntegerCore):
            return Fraction(n, 1 if d is None else d)
        return Frac(self.base, n, d)

    def _parts(self, x):
        if isinstance(x, Fraction):
            return x.numerator, x.denominator
        return x.num, x.den

    def coerce(self, x):
        if isinstance(x, str) and "/" in x and isinstance(self.base, IntegerCore):
            x = Fraction(x)
        elif isinstance(x, str):
            x = self.base.parse(x)
        if isinstance(x, Frac):
            n, d = x.num, x.den
        elif isinstance(x, Fraction):
            n, d = x.numerator, x.denominator
            if not isinstance(self.base, IntegerCore):
                raise InvalidExpr(f"{x} is not an element of {self}")
        else:
            n, d = self.base.coerce(x), self.base.one
        for p in self.primes:
            if self.base.valuation(d, p) > 0:
                raise InvalidExpr(f"denominator of {x} lies in the localizing prime {p}")
        return self._wrap(n, d)

    def s_part(self, x):
        """Product of the localizing primes dividing x, with multiplicity."""
        n, _ = self._parts(x)
        out = self.base.one
        for p in self.primes:
            v = self.base.valuation(n, p)
            out = out * p ** v
        return out

    def is_zero(self, x):
        return self._parts(x)[0] == self.base.zero

    def is_unit(self, x):
        n, _ = self._parts(x)
        if n == self.base.zero:
            return False
        return all(self.base.valuation(n, p) == 0 for p in self.primes)

    def normalize(self, x):
        if self.is_zero(x):
            return self.zero, self.one
        a = self._wrap(self.s_part(x))
        n, d = self._parts(x)
        ns, _ = self._parts(a)
        return a, self._wrap(self.base.div(n, ns), d)

    def inverse(self, u):
        n, d = self._parts(u)
        return self._wrap(d, n) if isinstance(self.base, IntegerCore) else Frac(self.base, d, n)

    def gcdex(self, a, b):
        if self.is_zero(a) and self.is_zero(b):
            return self.zero, self.one, self.zero
        if self.is_zero(a):
            bb, v = self.normalize(b)
            return bb, self.zero, self.inverse(v)
        if self.is_zero(b):
            aa, u = self.normalize(a)
            return aa, self.inverse(u), self.zero
        aa, u = self.normalize(a)
        bb, v = self.normalize(b)
        g, s, t = self.base.gcdex(self._parts(aa)[0], self._parts(bb)[0])
        return (self._wrap(g), self._wrap(s) * self.inverse(u),
                self._wrap(t) * self.inverse(v))

    def divides(self, a, b):
        if self.is_zero(a):
            return self.is_zero(b)
        if self.is_zero(b):
            return True
        na, nb = self._parts(a)[0], self._parts(b)[0]
        return all(self.base.valuation(na, p) <= self.base.valuation(nb, p)
                   for p in self.primes)

    def div(self, b, a):
        if not self.divides(a, b):
            raise ZeroDivisionError(f"{a} does not divide {b}")
        return b * self.inverse(a)

    def valuation(self, x, p):
        n, d = self._parts(x)
        if n == self.base.zero:
            return float("inf")
        return self.base.valuation(n, p) - self.base.valuation(d, p)

    def fmt(self, x):
        return str(x)

    def parse(self, text):
        return self.coerce(text)

    def __eq__(self, other):
        return isinstance(other, SemilocalCore) and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if not self.primes:
            return f"Frac({self.base!r})"
        return f"{self.base!r}_({','.join(self.base.fmt(p) for p in self.primes)})"


class BivariateCore:
    """k[x, y], optionally viewed through its localization at a prime.

    The localization is only a tag: elements stay polynomials and local
    questions are answered by :mod:`adelic.groebner`.
    """

    is_pid = False
    is_field = False
    euclidean = False

    def __init__(self, field, local_at=None):
        self.field = field
        self.local_at = local_at
        self.zero = Poly(field, 2)
        self.one = Poly.const(field, 2, 1)
        tag = None if local_at is None else tuple(str(g) for g in local_at.generators)
        self.key = ("k[x,y]", repr(field), tag)

    def coerce(self, x):
        if isinstance(x, Poly):
            if x.nvars != 2 or x.field != self.field:
                raise InvalidExpr(f"{x} is not in {self}")
            return x
        if isinstance(x, str):
            return parse_poly(x, self.field, 2)
        return Poly.const(self.field, 2, x)

    def is_zero(self, x):
        return x.is_zero()

    def is_unit(self, x):
        if x.is_zero():
            return False
        if self.local_at is None:
            return x.is_constant()
        return not self.local_at.contains(x)

    def inverse(self, u):
        if u.is_zero() or not u.is_constant():
            raise ZeroDivisionError(f"{u} has no polynomial inverse")
        return Poly.const(self.field, 2, self.field.inv(u.constant_term()))

    def fmt(self, x):
        return str(x)

    def parse(self, text):
        return self.coerce(text)

    def __eq__(self, other):
        return isinstance(other, BivariateCore) and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.local_at is None:
            return f"{self.field!r}[x,y]"
        return f"{self.field!r}[x,y]_{self.local_at}"


ZZ = IntegerCore()
QQ_CORE = FieldCore(QQ)


def fraction_field_core(core):
    """The core obtained by inverting every nonzero element."""
    if core.is_field:
        return core
    if isinstance(core, IntegerCore):
        return QQ_CORE
    if isinstance(core, SemilocalCore):
        return fraction_field_core(core.base)
    if isinstance(core, UPolyCore):
        return SemilocalCore(core, [])
    raise UnsupportedRing(f"no fraction-field core for {core!r}")


def localize_core(core, prime_gen):
    """Localize a PID core at the prime generated by ``prime_gen`` (None = (0))."""
    if prime_gen is None:
        return fraction_field_core(core)
    if core.is_field:
        raise UnsupportedRing("a field has no nonzero primes")
    if isinstance(core, SemilocalCore):
        g = core.base.normalize(core.base.coerce(prime_gen))[0]
        if g not in core.primes:
            raise UnsupportedRing(f"{g} is not a prime of {core!r}")
        return SemilocalCore(core.base, [g])
    return SemilocalCore(core, [prime_gen])


def coerce_between(x, src, dst):
    """Map an element along the canonical ring map src -> dst."""
    if src == dst:
        return x
    if isinstance(src, IntegerCore) and isinstance(dst, (SemilocalCore, FieldCore)):
        return dst.coerce(x)
    if isinstance(src, SemilocalCore) and isinstance(dst, (SemilocalCore, FieldCore)):
        if isinstance(x, Fraction):
            return dst.coerce(x)
        return dst.coerce(x)
    if isinstance(src, UPolyCore) and isinstance(dst, SemilocalCore):
        return dst.coerce(x)
    if isinstance(src, FieldCore) and isinstance(dst, FieldCore) and src.field == dst.field:
        return x
    if isinstance(src, BivariateCore) and isinstance(dst, BivariateCore):
        return x
    if isinstance(src, (IntegerCore, SemilocalCore)) and isinstance(dst, FieldCore):
        return dst.coerce(x)
    raise UnsupportedRing(f"no canonical map {src!r} -> {dst!r}")


