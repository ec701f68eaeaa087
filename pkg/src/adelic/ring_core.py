"""Base rings, algebraic primes, and symbolic ring expressions.

A :class:`RingExpr` is a tree of localizations, completions and products
over a base ring.  Completed rings are never given elements: a ``Complete``
node is a tag for flat base change from the matching local ring, and all
homology is computed over a computational core (see :func:`core_of`).

Infinite products are :class:`FamilyProduct` nodes indexed by a symbolic
:class:`PrimeFamily`.  They are only ever removed by the rewrite rules:

RW1  a Koszul factor distributes over finite and family products
RW2  a Koszul factor on a certified unit collapses its factor to zero
RW3  a family product with finitely many survivors becomes a finite product
RW4  Localize o Localize composes to the smaller prime
RW5  completion at the generic point is the identity
RW6  localization at a maximal ideal is absorbed by completion there
RW7  completion at p is invisible after tensoring with K_p
RW8  K_m L_m X is K_m X for maximal m, since K_m is already m-local

Localization and completion also distribute over finite products, which are
finite direct sums, and Koszul factors commute past localizations.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import sympy

from .errors import (FamilyProductRemains, InvalidExpr, InvalidPrime,
                     UnsupportedExpression, UnsupportedRing)
from .polynomials import (QQ, GFp, Poly, is_irreducible_bivariate,
                          is_irreducible_univariate, parse_poly)
from .rings import (ZZ, BivariateCore, FieldCore, SemilocalCore,
                    UPolyCore, localize_core, QQ_CORE)

KINDS = ("Integers", "Rationals", "PrimeField", "UnivariatePoly", "BivariatePoly")


def _field_from_json(data):
    if data is None or data == "QQ" or data.get("kind") == "Rationals":
        return QQ
    if data.get("kind") == "PrimeField":
        return GFp(int(data["p"]))
    raise InvalidExpr(f"unknown coefficient field {data!r}")


@dataclass(frozen=True)
class BaseRing:
    """One of Z (optionally semilocalized), Q, F_p, k[x] or k[x,y]."""

    kind: str
    field: object = None
    semilocal: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedRing(f"unknown ring kind {self.kind!r}")
        if self.kind == "PrimeField" and not isinstance(self.field, GFp):
            raise UnsupportedRing("PrimeField needs a verified prime characteristic")
        if self.kind in ("UnivariatePoly", "BivariatePoly"):
            if not isinstance(self.field, (GFp, type(QQ))):
                raise UnsupportedRing("polynomial coefficients must be Q or F_p")
        if self.semilocal:
            if self.kind != "Integers":
                raise UnsupportedRing("only Z may be semilocalized")
            for p in self.semilocal:
                if not sympy.isprime(p):
                    raise InvalidPrime(f"{p} is not prime")
            object.__setattr__(self, "semilocal", tuple(sorted(set(self.semilocal))))

    # constructors
    @classmethod
    def integers(cls, semilocal=()):
        return cls("Integers", None, tuple(semilocal))

    @classmethod
    def rationals(cls):
        return cls("Rationals", QQ)

    @classmethod
    def prime_field(cls, p):
        return cls("PrimeField", GFp(p))

    @classmethod
    def univariate(cls, fld=QQ):
        return cls("UnivariatePoly", fld)

    @classmethod
    def bivariate(cls, fld=QQ):
        return cls("BivariatePoly", fld)

    @cached_property
    def core(self):
        if self.kind == "Integers":
            return SemilocalCore(ZZ, self.semilocal) if self.semilocal else ZZ
        if self.kind == "Rationals":
            return QQ_CORE
        if self.kind == "PrimeField":
            return FieldCore(self.field)
        if self.kind == "UnivariatePoly":
            return UPolyCore(self.field)
        return BivariateCore(self.field)

    @property
    def krull_dim(self):
        return {"Integers": 1, "Rationals": 0, "PrimeField": 0,
                "UnivariatePoly": 1, "BivariatePoly": 2}[self.kind]

    @property
    def finite_spectrum(self):
        return self.kind in ("Rationals", "PrimeField") or bool(self.semilocal)

    @property
    def nvars(self):
        return {"UnivariatePoly": 1, "BivariatePoly": 2}.get(self.kind, 0)

    def element(self, x):
        """Coerce a Python value or string into the base ring."""
        if self.kind == "Integers":
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    if not self.semilocal:
                        raise InvalidExpr(f"{x} is not an integer")
                    return self.core.coerce(x)
                x = x.numerator
            return int(x)
        if self.kind in ("Rationals", "PrimeField"):
            return self.core.coerce(x)
        if isinstance(x, Poly):
            if x.nvars == self.nvars and x.field == self.field:
                return x
            raise InvalidExpr(f"{x} is not in {self}")
        if isinstance(x, str):
            return parse_poly(x, self.field, self.nvars)
        return Poly.const(self.field, self.nvars, x)

    def is_zero(self, e):
        return e == 0 if not isinstance(e, Poly) else e.is_zero()

    def fmt(self, e):
        return str(e)

    @property
    def name(self):
        if self.kind == "Integers":
            if self.semilocal:
                return "Z_(" + ",".join(map(str, self.semilocal)) + ")"
            return "Z"
        if self.kind == "Rationals":
            return "Q"
        if self.kind == "PrimeField":
            return self.field.name
        k = "Q" if self.field == QQ else self.field.name
        return f"{k}[x]" if self.kind == "UnivariatePoly" else f"{k}[x,y]"

    def __str__(self):
        return self.name

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind in ("PrimeField", "UnivariatePoly", "BivariatePoly"):
            out["field"] = self.field.to_json()
        if self.semilocal:
            out["semilocal"] = list(self.semilocal)
        return out

    @classmethod
    def from_json(cls, data):
        kind = data.get("kind")
        if kind == "Integers":
            return cls.integers(data.get("semilocal", ()))
        if kind == "Rationals":
            return cls.rationals()
        if kind == "PrimeField":
            return cls.prime_field(int(data["p"] if "p" in data else data["field"]["p"]))
        if kind in ("UnivariatePoly", "BivariatePoly"):
            return cls(kind, _field_from_json(data.get("field")))
        raise UnsupportedRing(f"unknown ring kind {kind!r}")


# --- primes -------------------------------------------------------------------

class AlgPrime:
    """A prime ideal of a base ring, validated at construction."""

    def __init__(self, ring, generators=(), height=None):
        self.ring = ring
        gens = [ring.element(g) for g in generators]
        gens = [g for g in gens if not ring.is_zero(g)]
        self.generators, h = self._validate(gens)
        if height is not None and height != h:
            raise InvalidPrime(f"declared height {height} but {self.key} has height {h}")
        self.height = h
        self._gb = None

    def _validate(self, gens):
        r = self.ring
        if not gens:
            return (), 0
        if r.kind in ("Rationals", "PrimeField"):
            raise InvalidPrime(f"a field has no nonzero prime {gens}")
        if r.kind == "Integers":
            if len(gens) != 1:
                raise InvalidPrime("a prime of Z is generated by one prime integer")
            p = abs(int(gens[0]))
            if not sympy.isprime(p):
                raise InvalidPrime(f"{p} is not a prime integer")
            if r.semilocal and p not in r.semilocal:
                raise InvalidPrime(f"({p}) is not a prime of {r}")
            return (p,), 1
        if r.kind == "UnivariatePoly":
            if len(gens) != 1 or not is_irreducible_univariate(gens[0]):
                raise InvalidPrime(f"{gens} is not a single irreducible polynomial")
            return (gens[0].monic(),), 1
        if len(gens) == 1:
            if not is_irreducible_bivariate(gens[0]):
                raise InvalidPrime(f"{gens[0]} is not irreducible")
            return (gens[0].monic(),), 1
        if len(gens) == 2:
            if not _certify_maximal(gens):
                raise InvalidPrime(f"cannot certify that {gens} generate a maximal ideal")
            return tuple(g.monic() for g in gens), 2
        raise InvalidPrime("bivariate primes use at most two generators")

    # identity
    @cached_property
    def key(self):
        if not self.generators:
            return "(0)"
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return self.key

    __str__ = lambda self: self.key

    def __eq__(self, other):
        return isinstance(other, AlgPrime) and self.ring == other.ring and self.key == other.key

    def __hash__(self):
        return hash((self.ring, self.key))

    def sort_key(self):
        return (self.height, self.key)

    @property
    def is_generic(self):
        return not self.generators

    @property
    def is_maximal(self):
        return self.height == self.ring.krull_dim

    @property
    def dim(self):
        """Balmer dimension: closed points have dimension 0."""
        return self.ring.krull_dim - self.height

    # membership
    def _groebner(self):
        if self._gb is None:
            from .groebner import ideal_basis
            self._gb = ideal_basis(list(self.generators))
        return self._gb

    def contains(self, e):
        """Algebraic membership e in p."""
        e = self.ring.element(e) if not isinstance(e, Poly) else e
        if self.ring.is_zero(e):
            return True
        if not self.generators:
            return False
        if self.ring.kind == "Integers":
            if isinstance(e, Fraction):
                return e.numerator % self.generators[0] == 0
            return e % self.generators[0] == 0
        if self.ring.kind == "UnivariatePoly":
            return (e % self.generators[0]).is_zero()
        from .groebner import ideal_contains
        return ideal_contains(self._groebner(), e)

    def contains_prime(self, q):
        """Whether q is contained in self (algebraically)."""
        return all(self.contains(g) for g in q.generators)

    def unit_modulo(self, e):
        """Whether e becomes a unit in R/p."""
        if not self.generators:
            return _is_base_unit(self.ring, e)
        if self.ring.kind == "Integers":
            n = e.numerator if isinstance(e, Fraction) else e
            return n % self.generators[0] != 0
        if self.is_maximal:
            return not self.contains(e)
        if self.ring.kind == "UnivariatePoly":
            return not self.contains(e)
        from .groebner import ideal_basis
        gb = ideal_basis(list(self.generators) + [e])
        return any(v.degree() == 0 for v in gb.basis)

    def to_json(self):
        return [str(g) for g in self.generators]


def _is_base_unit(ring, e):
    if ring.is_zero(e):
        return False
    return ring.core.is_unit(e)


def _certify_maximal(gens):
    """k[x,y]/(f, g) is a field: zero-dimensional with a cyclic irreducible generator."""
    from .groebner import ideal_basis, Vec, reduce, standard_monomial_counts
    from .linalg import ExactMatrix, kernel_basis
    fld = gens[0].field
    gb = ideal_basis(list(gens))
    if any(v.degree() == 0 for v in gb.basis):
        return False
    leads = [m for _, m in gb.leading_terms()]
    if not any(m[1] == 0 for m in leads) or not any(m[0] == 0 for m in leads):
        return False
    bound = max(sum(m) for m in leads)
    counts = standard_monomial_counts(gb, 1, 2 * bound + 2)
    n = counts[-1]
    core = FieldCore(fld)
    for c in range(0, 6):
        z = Poly.var(fld, 2, 1) + Poly.var(fld, 2, 0).scale(fld.coerce(c))
        powers, cols = [Poly.const(fld, 2, 1)], []
        for _ in range(n + 1):
            cols.append(reduce(Vec.from_polys(fld, [powers[-1]]), gb.basis)[1])
            powers.append(powers[-1] * z)
        monos = sorted({m for v in cols for (_, m) in v.terms}, key=lambda m: (sum(m), m))
        rows = [[v.terms.get((0, m), 0) for v in cols] for m in monos]
        M = ExactMatrix.from_rows(core, rows) if rows else ExactMatrix.zeros(core, 0, n + 1)
        ker = kernel_basis(M)
        if ker.cols == 0:
            continue
        # minimal polynomial of z: the kernel vector with the smallest support
        best = min((tuple(ker[i, j] for i in range(ker.rows)) for j in range(ker.cols)),
                   key=lambda v: max(i for i, a in enumerate(v) if a != 0))
        deg = max(i for i, a in enumerate(best) if a != 0)
        if deg != n:
            continue
        mu = Poly(fld, 1, {(i,): a for i, a in enumerate(best) if a != 0})
        return is_irreducible_univariate(mu)
    return False


def parse_prime(ring, text_or_list):
    """Build a prime from ``"(2)"``, ``"(x, y)"``, ``"(0)"`` or a generator list."""
    if isinstance(text_or_list, AlgPrime):
        return text_or_list
    if isinstance(text_or_list, str):
        s = text_or_list.strip()
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        parts = [t.strip() for t in _split_top(s) if t.strip()]
        parts = [t for t in parts if t != "0"]
        return AlgPrime(ring, parts)
    return AlgPrime(ring, list(text_or_list))


def _split_top(s):
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    out.append(cur)
    return out


# --- symbolic prime families ------------------------------------------------

@dataclass(frozen=True)
class PrimeFamily:
    """All primes of Balmer dimension ``dim`` containing every prime in ``within``.

    ``parent`` names an enclosing family variable whose value must also be
    contained in every member (the chain constraint ``p_i`` Balmer-below
    ``p_{i-1}``); it is replaced by a concrete prime on instantiation.
    """

    ring: BaseRing
    dim: int
    within: tuple = ()
    parent: str = None
    excluded: tuple = ()

    def admits(self, q):
        return (q.dim == self.dim and all(q.contains_prime(w) for w in self.within)
                and q not in self.excluded)

    def narrow(self, p):
        """Members q with p contained in q: ('empty'|'single'|'family', value)."""
        if p.is_generic:
            return "family", self
        if self.dim > p.dim:
            return "empty", f"no prime of dimension {self.dim} contains {p}"
        if self.dim == p.dim:
            if self.parent is None and self.admits(p):
                return "single", p
            if self.parent is not None and self.admits(p):
                return "single", p
            return "empty", f"{p} is not a member of the family"
        within = tuple(sorted(set(self.within) | {p}, key=AlgPrime.sort_key))
        return "family", PrimeFamily(self.ring, self.dim, within, self.parent, self.excluded)

    def bind_parent(self, q):
        if self.parent is None:
            return self
        within = tuple(sorted(set(self.within) | {q}, key=AlgPrime.sort_key))
        return PrimeFamily(self.ring, self.dim, within, None, self.excluded)

    def declared_members(self, primes):
        return sorted((q for q in primes if self.admits(q)), key=AlgPrime.sort_key)

    @property
    def key(self):
        parts = [f"dim={self.dim}"]
        if self.within:
            parts.append("contains " + ",".join(w.key for w in self.within))
        if self.parent:
            parts.append(f"contains {self.parent}")
        if self.excluded:
            parts.append("excluding " + ",".join(e.key for e in self.excluded))
        return "{" + "; ".join(parts) + "}"

    def describe(self):
        base = "closed points" if self.dim == 0 else f"primes of dimension {self.dim}"
        txt = base
        if self.within:
            txt += " containing " + " and ".join(w.key for w in self.within)
        if self.parent:
            txt += f" contained in {self.parent}"
        if self.excluded:
            txt += " other than " + ", ".join(e.key for e in self.excluded)
        return txt

    def to_json(self):
        out = {"dim": self.dim, "within": [w.to_json() for w in self.within]}
        if self.parent:
            out["parent"] = self.parent
        if self.excluded:
            out["excluded"] = [e.to_json() for e in self.excluded]
        return out


@dataclass(frozen=True)
class Var:
    """A bound prime variable inside a family-product template."""

    name: str

    @property
    def key(self):
        return self.name

    def to_json(self):
        return {"var": self.name}


def _at_key(at):
    return at.key


def _at_json(at):
    return at.to_json()


# --- expression nodes ---------------------------------------------------------

class RingExpr:
    """Base class; every node is immutable and hashable by its canonical key."""

    def __eq__(self, other):
        return isinstance(other, RingExpr) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.key

    def children(self):
        return ()

    @property
    def size(self):
        return 1 + sum(c.size for c in self.children())

    @property
    def family_count(self):
        own = 1 if isinstance(self, FamilyProduct) else 0
        return own + sum(c.family_count for c in self.children())

    @property
    def product_count(self):
        own = 1 if isinstance(self, (FamilyProduct, FiniteProduct)) else 0
        return own + sum(c.product_count for c in self.children())

    def contains_product(self):
        return self.product_count > 0


@dataclass(frozen=True, eq=False, repr=False)
class Base(RingExpr):
    ring: BaseRing

    @cached_property
    def key(self):
        return self.ring.name

    @property
    def base_ring(self):
        return self.ring

    def to_json(self):
        return {"node": "Base", "ring": self.ring.to_json()}


@dataclass(frozen=True, eq=False, repr=False)
class Localize(RingExpr):
    child: RingExpr
    at: object

    @cached_property
    def key(self):
        return f"L{_at_key(self.at)}({self.child.key})"

    def children(self):
        return (self.child,)

    @property
    def base_ring(self):
        return self.child.base_ring

    def to_json(self):
        return {"node": "Localize", "at": _at_json(self.at), "child": self.child.to_json()}


@dataclass(frozen=True, eq=False, repr=False)
class Complete(RingExpr):
    child: RingExpr
    at: object

    @cached_property
    def key(self):
        return f"C{_at_key(self.at)}({self.child.key})"

    def children(self):
        return (self.child,)

    @property
    def base_ring(self):
        return self.child.base_ring

    def to_json(self):
        return {"node": "Complete", "at": _at_json(self.at), "child": self.child.to_json()}


@dataclass(frozen=True, eq=False, repr=False)
class FiniteProduct(RingExpr):
    factors: tuple
    labels: tuple = None

    def __post_init__(self):
        labels = self.labels
        if labels is None:
            labels = tuple((_default_label(c),) for c in self.factors)
        labels = tuple(tuple(l) if isinstance(l, tuple) else (l,) for l in labels)
        if len(labels) != len(self.factors):
            raise InvalidExpr("one label per product factor is required")
        object.__setattr__(self, "labels", labels)

    @cached_property
    def key(self):
        inner = ", ".join(f"{'/'.join(_label_key(x) for x in l)}:{c.key}"
                          for l, c in zip(self.labels, self.factors))
        return f"Prod[{inner}]"

    def children(self):
        return tuple(self.factors)

    @property
    def base_ring(self):
        return self.factors[0].base_ring

    def to_json(self):
        return {"node": "FiniteProduct",
                "labels": [[_label_json(x) for x in l] for l in self.labels],
                "factors": [c.to_json() for c in self.factors]}


@dataclass(frozen=True, eq=False, repr=False)
class FamilyProduct(RingExpr):
    var: str
    family: PrimeFamily
    template: RingExpr

    @cached_property
    def key(self):
        return f"Prod_{self.var}{self.family.key}({self.template.key})"

    def children(self):
        return (self.template,)

    @property
    def base_ring(self):
        return self.family.ring

    def to_json(self):
        return {"node": "FamilyProduct", "var": self.var, "family": self.family.to_json(),
                "template": self.template.to_json()}


@dataclass(frozen=True, eq=False, repr=False)
class Koszul(RingExpr):
    """K_p tensored with a ring expression (a finite free complex over it)."""

    prime: AlgPrime
    child: RingExpr

    @cached_property
    def key(self):
        return f"K{self.prime.key}({self.child.key})"

    def children(self):
        return (self.child,)

    @property
    def base_ring(self):
        return self.child.base_ring

    def to_json(self):
        return {"node": "Koszul", "prime": self.prime.to_json(), "child": self.child.to_json()}


@dataclass(frozen=True, eq=False, repr=False)
class ZeroRing(RingExpr):
    ring: BaseRing = None

    key = "0"

    @property
    def base_ring(self):
        return self.ring

    def to_json(self):
        return {"node": "Zero"}


def _default_label(expr):
    at = None
    e = expr
    while isinstance(e, (Localize, Complete, Koszul)):
        if isinstance(e, (Localize, Complete)) and at is None:
            at = e.at
        e = e.child
    return at


def _label_key(x):
    return "-" if x is None else x.key


def _label_json(x):
    if x is None:
        return None
    return x.to_json()


def lambda_completion(ring, p):
    """L_p Lambda_p R as an expression (before any rewriting)."""
    return Localize(Complete(Base(ring), p), p)


# --- unit certificates ------------------------------------------------------------

@dataclass(frozen=True)
class UnitCertificate:
    element: object
    expr: RingExpr
    verdict: str  # "Unit" | "NonUnit" | "Zero"
    witness: str

    def check(self):
        """Re-derive the verdict from the witness independently."""
        return is_unit(self.element, self.expr).verdict == self.verdict

    def to_json(self):
        return {"element": str(self.element), "expr": self.expr.key,
                "verdict": self.verdict, "witness": self.witness}


def _unit(e, E, ring):
    """(is_unit, witness) for a product-free expression."""
    if isinstance(E, Base):
        r = E.ring
        ee = r.core.coerce(r.element(e) if r != ring else e)
        if r.core.is_unit(ee):
            return True, f"{e} is a unit of {r}"
        return False, f"{e} is not a unit of {r}"
    if isinstance(E, Localize):
        ok, why = _unit(e, E.child, ring)
        if ok:
            return ok, why
        at = E.at
        if isinstance(at, Var):
            return False, f"{e} may lie in {at.name}"
        if not at.contains(e):
            return True, f"{e} not in {at.key}"
        return False, f"{e} in {at.key}"
    if isinstance(E, Complete):
        ok, why = _unit(e, E.child, ring)
        if ok:
            return ok, why
        at = E.at
        if isinstance(at, Var):
            return False, f"{e} may lie in {at.name}"
        if at.is_generic:
            return ok, why
        if at.unit_modulo(e):
            return True, f"{e} invertible modulo {at.key}"
        return False, f"{e} not invertible modulo {at.key}"
    if isinstance(E, FiniteProduct):
        whys = []
        for c in E.factors:
            ok, why = _unit(e, c, ring)
            if not ok:
                return False, why
            whys.append(why)
        return True, "; ".join(whys)
    if isinstance(E, ZeroRing):
        return True, "every element is a unit of the zero ring"
    if isinstance(E, FamilyProduct):
        raise UnsupportedExpression("unit testing in a family product is per factor")
    raise InvalidExpr(f"is_unit is not defined on {E.key}")


def _contains_family(E):
    return E.family_count > 0


def is_unit(e, E):
    """Decide whether ``e`` is invertible in the ring denoted by ``E``."""
    if _contains_family(E):
        raise UnsupportedExpression("expression contains a family product; distribute first")
    ring = E.base_ring
    e = ring.element(e) if ring is not None else e
    if ring is not None and ring.is_zero(e) and not isinstance(E, ZeroRing):
        return UnitCertificate(e, E, "Zero", f"{e} is zero")
    ok, why = _unit(e, E, ring)
    return UnitCertificate(e, E, "Unit" if ok else "NonUnit", why)


# --- rewriting ------------------------------------------------------------------

@dataclass
class RewriteStep:
    rule: str
    before: str
    after: str
    certificate: str = ""


def _subst(E, var, q):
    """Instantiate the family variable ``var`` with the concrete prime q."""
    if isinstance(E, Base) or isinstance(E, ZeroRing):
        return E
    if isinstance(E, Localize):
        at = q if isinstance(E.at, Var) and E.at.name == var else E.at
        return Localize(_subst(E.child, var, q), at)
    if isinstance(E, Complete):
        at = q if isinstance(E.at, Var) and E.at.name == var else E.at
        return Complete(_subst(E.child, var, q), at)
    if isinstance(E, FiniteProduct):
        return FiniteProduct(tuple(_subst(c, var, q) for c in E.factors), E.labels)
    if isinstance(E, FamilyProduct):
        fam = E.family.bind_parent(q) if E.family.parent == var else E.family
        return FamilyProduct(E.var, fam, _subst(E.template, var, q))
    if isinstance(E, Koszul):
        return Koszul(E.prime, _subst(E.child, var, q))
    raise InvalidExpr(f"unknown node {E!r}")


def _le(q1, q2):
    """q1 contained in q2 (algebraically), for concrete primes."""
    return q2.contains_prime(q1)


def _already_local(ring, at):
    sl = ring.semilocal
    return len(sl) == 1 and not at.is_generic and at.generators[0] == sl[0]


def _is_maximal_at(at, ctx):
    if isinstance(at, Var):
        fam = ctx.get(at.name)
        return fam is not None and fam.dim == 0
    return at.is_maximal and not at.is_generic


def _same_at(a, b):
    return _at_key(a) == _at_key(b)


def _killed(p, E, ring):
    """A certificate string if some generator of p is a unit in E, else None."""
    if E.contains_product():
        # only the outer localizations/completions are visible
        node = E
        while isinstance(node, (Localize, Complete)):
            at = node.at
            if not isinstance(at, Var) and not at.is_generic:
                for g in p.generators:
                    ge = _coerce_gen(g, ring)
                    if ge is None:
                        continue
                    if isinstance(node, Localize) and not at.contains(ge):
                        return f"{g} is a unit after localizing at {at.key}"
            if isinstance(at, Var) is False and at.is_generic and isinstance(node, Localize):
                for g in p.generators:
                    return f"{g} is a unit in the fraction field"
            node = node.child
        return None
    for g in p.generators:
        ge = _coerce_gen(g, E.base_ring)
        if ge is None:
            continue
        ok, why = _unit(ge, E, E.base_ring)
        if ok:
            return why
    return None


def _coerce_gen(g, ring):
    try:
        return ring.element(g)
    except Exception:
        return None


class Rewriter:
    """Normalizes ring expressions; records every rule application."""

    def __init__(self, ctx=None):
        self.trace = []
        self.ctx = dict(ctx or {})

    def log(self, rule, before, after, cert=""):
        self.trace.append(RewriteStep(rule, before.key, after.key, cert))
        return after

    def norm(self, E):
        if isinstance(E, (Base, ZeroRing)):
            return E
        if isinstance(E, Localize):
            return self._localize(self.norm(E.child), E.at)
        if isinstance(E, Complete):
            return self._complete(self.norm(E.child), E.at)
        if isinstance(E, FiniteProduct):
            return self._finite(tuple(self.norm(c) for c in E.factors), E.labels)
        if isinstance(E, FamilyProduct):
            saved = self.ctx.get(E.var)
            self.ctx[E.var] = E.family
            t = self.norm(E.template)
            if saved is None:
                self.ctx.pop(E.var, None)
            else:
                self.ctx[E.var] = saved
            return self._family(E.var, E.family, t)
        if isinstance(E, Koszul):
            return self._koszul(E.prime, self.norm(E.child))
        raise InvalidExpr(f"unknown node {E!r}")

    # node rules
    def _localize(self, X, at):
        E = Localize(X, at)
        if isinstance(X, ZeroRing):
            return X
        if isinstance(X, Base) and not isinstance(at, Var) and _already_local(X.ring, at):
            return self.log("RW4", E, X, f"{X.ring.name} is already local at {at.key}")
        if isinstance(X, FiniteProduct):
            out = FiniteProduct(tuple(Localize(c, at) for c in X.factors), X.labels)
            self.log("RW3", E, out, "localization commutes with finite products")
            return self.norm(out)
        if isinstance(X, Localize):
            q1, q2 = X.at, at
            if _same_at(q1, q2):
                return self.log("RW4", E, X)
            if not isinstance(q1, Var) and not isinstance(q2, Var):
                if _le(q1, q2):
                    return self.log("RW4", E, X, f"{q1.key} is contained in {q2.key}")
                if _le(q2, q1):
                    return self.log("RW4", E, self._localize(X.child, q2),
                                    f"{q2.key} is contained in {q1.key}")
            elif isinstance(q1, Var) and not isinstance(q2, Var) and q2.is_generic:
                return self.log("RW4", E, self._localize(X.child, q2), "(0) is the smallest prime")
        if isinstance(X, Complete) and _same_at(X.at, at) and _is_maximal_at(at, self.ctx):
            return self.log("RW6", E, X, f"{_at_key(at)} is maximal")
        if isinstance(X, Koszul) and not isinstance(at, Var):
            cert = _killed(X.prime, Localize(X.child, at), X.child.base_ring)
            if cert:
                return self.log("RW2", E, ZeroRing(X.base_ring), cert)
        return E

    def _complete(self, X, at):
        E = Complete(X, at)
        if isinstance(X, ZeroRing):
            return X
        if not isinstance(at, Var) and at.is_generic:
            return self.log("RW5", E, X, "completion at the generic point")
        if isinstance(X, Localize) and _same_at(X.at, at) and _is_maximal_at(at, self.ctx):
            out = Complete(X.child, at)
            self.log("RW6", E, out, f"Lambda L = Lambda at the maximal {_at_key(at)}")
            return self._complete(X.child, at)
        if isinstance(X, FiniteProduct):
            out = FiniteProduct(tuple(Complete(c, at) for c in X.factors), X.labels)
            self.log("RW3", E, out, "completion commutes with finite products")
            return self.norm(out)
        return E

    def _finite(self, factors, labels):
        keep = [(l, c) for l, c in zip(labels, factors) if not isinstance(c, ZeroRing)]
        flat = []
        for l, c in keep:
            if isinstance(c, FiniteProduct):
                flat.extend((l + l2, c2) for l2, c2 in zip(c.labels, c.factors))
            else:
                flat.append((l, c))
        if not flat:
            ring = factors[0].base_ring if factors else None
            return ZeroRing(ring)
        return FiniteProduct(tuple(c for _, c in flat), tuple(l for l, _ in flat))

    def _family(self, var, fam, template):
        E = FamilyProduct(var, fam, template)
        if isinstance(template, ZeroRing):
            return self.log("RW2", E, ZeroRing(fam.ring), "every factor is zero")
        return E

    def _koszul(self, p, X):
        E = Koszul(p, X)
        if p.is_generic:
            return self.log("RW2", E, X, "K_(0) is the unit")
        if isinstance(X, ZeroRing):
            return X
        if isinstance(X, FiniteProduct):
            out = FiniteProduct(tuple(Koszul(p, c) for c in X.factors), X.labels)
            self.log("RW1", E, out)
            return self.norm(out)
        if isinstance(X, FamilyProduct):
            kind, val = X.family.narrow(p)
            if kind == "empty":
                return self.log("RW2", E, ZeroRing(X.family.ring), val)
            if kind == "single":
                inst = _subst(X.template, X.var, val)
                out = FiniteProduct((Koszul(p, inst),), ((val,),))
                self.log("RW3", E, out, f"only {val.key} survives K_{p.key}")
                return self.norm(out)
            out = FamilyProduct(X.var, val, Koszul(p, X.template))
            self.log("RW1", E, out, f"factors outside {val.describe()} are killed")
            saved = self.ctx.get(X.var)
            self.ctx[X.var] = val
            t = self.norm(out.template)
            if saved is None:
                self.ctx.pop(X.var, None)
            return self._family(X.var, val, t)
        cert = _killed(p, X, X.base_ring)
        if cert:
            return self.log("RW2", E, ZeroRing(X.base_ring), cert)
        if (isinstance(X, Localize) and _same_at(X.at, p) and p.is_maximal
                and not X.child.contains_product()):
            out = Koszul(p, X.child)
            self.log("RW8", E, out, f"K_{p.key} is {p.key}-local ({p.key} maximal)")
            return self._koszul(p, X.child)
        if isinstance(X, Complete) and _same_at(X.at, p):
            out = Koszul(p, X.child)
            self.log("RW7", E, out, f"K_{p.key} is {p.key}-complete")
            return self._koszul(p, X.child)
        if isinstance(X, Localize):
            # localization is smashing: K_p L_q Y = L_q K_p Y
            inner = self._koszul(p, X.child)
            self.log("RW1", E, Localize(inner, X.at), "K is small and commutes with L")
            return self._localize(inner, X.at)
        if isinstance(X, Complete) and X.child.contains_product():
            inner = self._koszul(p, X.child)
            self.log("RW1", E, Complete(inner, X.at), "K is small and passes inside")
            return self._complete(inner, X.at)
        return E


def measure(E):
    """Lexicographic termination measure (family products, tree size)."""
    return (E.family_count, E.size)


def rewrite(E, trace=None):
    """Normal form of E under RW1-RW7; ``trace`` (a list) receives the steps."""
    if not isinstance(E, RingExpr):
        raise InvalidExpr(f"{E!r} is not a ring expression")
    rw = Rewriter()
    out = rw.norm(E)
    # iterate to a fixed point; each pass strictly decreases the measure or stops
    for _ in range(E.size + E.family_count + 4):
        again = rw.norm(out)
        if again == out:
            break
        out = again
    if trace is not None:
        trace.extend(rw.trace)
    return out


def factors_of(E):
    """Flatten a normalized expression into (label, factor) pairs."""
    if isinstance(E, ZeroRing):
        return []
    if isinstance(E, FiniteProduct):
        return list(zip(E.labels, E.factors))
    return [((), E)]


def relevant_primes(E, tests, declared=()):
    """Primes indexing product factors that survive K_p for some test p.

    Surviving infinite families contribute their declared members; the
    undeclared remainder is reported by the verifier.
    """
    out = set()
    for p in tests:
        N = rewrite(Koszul(p, E))
        out |= _label_primes(N, declared)
    return sorted(out, key=AlgPrime.sort_key)


def _label_primes(N, declared):
    found = set()
    if isinstance(N, FiniteProduct):
        for l, c in zip(N.labels, N.factors):
            found |= {x for x in l if isinstance(x, AlgPrime)}
            found |= _label_primes(c, declared)
    elif isinstance(N, FamilyProduct):
        found |= set(N.family.declared_members(declared))
    else:
        for c in N.children():
            found |= _label_primes(c, declared)
    return found


def surviving_families(N):
    """Symbolic families left in a normalized expression."""
    if isinstance(N, FamilyProduct):
        return [N.family] + surviving_families(N.template)
    out = []
    for c in N.children():
        out.extend(surviving_families(c))
    return out


# --- computational cores ------------------------------------------------------------

@dataclass(frozen=True)
class CoreInfo:
    core: object
    completed: bool
    faithful: bool
    absorbed: str = ""


def _localize_core(core, at, ring):
    if at.is_generic:
        if isinstance(core, BivariateCore):
            # k(x,y) as k[x,y] with every nonzero polynomial a unit
            return BivariateCore(core.field, at)
        return localize_core(core, None)
    if isinstance(core, BivariateCore):
        if core.local_at is not None and not core.local_at.contains_prime(at):
            raise UnsupportedExpression(f"{core!r} localized at {at.key} is not local")
        return BivariateCore(core.field, at)
    if core.is_field:
        raise UnsupportedExpression(f"{at.key} is not a prime of a field")
    return localize_core(core, at.generators[0])


def core_of(E):
    """The core over which complexes carried by E are computed.

    Completions at maximal ideals use the local ring (faithfully flat).  A
    completion at a non-maximal prime keeps the global core and is only flat,
    so zero verdicts transfer but nonzero ones are not certified.
    """
    if E.family_count:
        raise FamilyProductRemains(f"{E.key} still contains a family product")
    if isinstance(E, ZeroRing):
        return None
    if isinstance(E, Base):
        return CoreInfo(E.ring.core, False, True)
    if isinstance(E, Localize):
        inner = core_of(E.child)
        return CoreInfo(_localize_core(inner.core, E.at, E.base_ring), inner.completed,
                        inner.faithful, inner.absorbed)
    if isinstance(E, Complete):
        inner = core_of(E.child)
        if E.at.is_maximal:
            c = inner.core
            local = _is_local_at(c, E.at)
            core = c if local else _localize_core(c, E.at, E.base_ring)
            return CoreInfo(core, True, inner.faithful, inner.absorbed)
        return CoreInfo(inner.core, True, False, inner.absorbed)
    if isinstance(E, Koszul):
        inner = core_of(E.child)
        p = E.prime
        if p.is_maximal and not _is_local_at(inner.core, p):
            core = _localize_core(inner.core, p, E.base_ring)
            return CoreInfo(core, inner.completed, inner.faithful,
                            f"K_{p.key} is {p.key}-local ({p.key} maximal)")
        return inner
    raise FamilyProductRemains(f"{E.key} has no single core")


def _is_local_at(core, p):
    if isinstance(core, SemilocalCore):
        return len(core.primes) == 1 and core.primes[0] == core.base.normalize(
            core.base.coerce(p.generators[0]))[0]
    if isinstance(core, BivariateCore):
        return core.local_at is not None and core.local_at == p
    return False


# --- JSON -------------------------------------------------------------------------

def expr_from_json(data, ring):
    """Parse the canonical JSON tree back into an expression over ``ring``."""
    if not isinstance(data, dict) or "node" not in data:
        raise InvalidExpr(f"malformed expression {data!r}")
    node = data["node"]

    def at_of(a):
        if isinstance(a, dict) and "var" in a:
            return Var(a["var"])
        return AlgPrime(ring, a)

    if node == "Base":
        r = BaseRing.from_json(data["ring"]) if "ring" in data else ring
        return Base(r)
    if node == "Localize":
        return Localize(expr_from_json(data["child"], ring), at_of(data["at"]))
    if node == "Complete":
        return Complete(expr_from_json(data["child"], ring), at_of(data["at"]))
    if node == "FiniteProduct":
        facs = tuple(expr_from_json(c, ring) for c in data["factors"])
        labels = data.get("labels")
        if labels is not None:
            labels = tuple(tuple(None if x is None else at_of(x) for x in l) for l in labels)
        return FiniteProduct(facs, labels)
    if node == "FamilyProduct":
        f = data["family"]
        fam = PrimeFamily(ring, int(f["dim"]), tuple(AlgPrime(ring, w) for w in f.get("within", [])),
                          f.get("parent"), tuple(AlgPrime(ring, w) for w in f.get("excluded", [])))
        return FamilyProduct(data["var"], fam, expr_from_json(data["template"], ring))
    if node == "Koszul":
        return Koszul(AlgPrime(ring, data["prime"]), expr_from_json(data["child"], ring))
    if node == "Zero":
        return ZeroRing(ring)
    raise InvalidExpr(f"unknown node kind {node!r}")
