"""Finite subposets of Spec(R) in Balmer coordinates.

The Balmer order reverses algebraic containment: q is Balmer-below p when
q contains p as an ideal.  Closed points (maximal ideals) have dimension 0
and the generic point of a domain has the top dimension.
"""

import itertools
import warnings
from dataclasses import dataclass

from .errors import InvalidPrime, UnknownPrime
from .ring_core import AlgPrime, BaseRing, parse_prime


@dataclass(frozen=True)
class Flag:
    """A strictly decreasing tuple of dimensions d_0 > d_1 > ... > d_s."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("a flag is nonempty")
        if any(a <= b for a, b in zip(dims, dims[1:])):
            raise ValueError(f"flag {dims} is not strictly decreasing")
        object.__setattr__(self, "dims", dims)

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, i):
        return self.dims[i]

    def omit(self, i):
        return Flag(self.dims[:i] + self.dims[i + 1:])

    @property
    def key(self):
        return ">".join(map(str, self.dims))

    def __str__(self):
        return "(" + self.key + ")"

    def sort_key(self):
        return (len(self.dims), tuple(-d for d in self.dims))


def all_flags(r):
    """Every nonempty flag in {0..r}, ordered by length then lexicographically."""
    out = []
    for k in range(1, r + 2):
        for combo in itertools.combinations(range(r, -1, -1), k):
            out.append(Flag(combo))
    return sorted(out, key=Flag.sort_key)


class SpectrumPoset:
    """A finite set of primes with containments and a dimension function."""

    def __init__(self, ring, primes, dims=None, containments=None):
        self.ring = ring
        uniq = []
        for p in primes:
            p = parse_prime(ring, p)
            if p not in uniq:
                uniq.append(p)
        if not uniq:
            raise InvalidPrime("a poset needs at least one prime")
        self.primes = tuple(sorted(uniq, key=lambda p: (-p.dim, p.key)))
        self.warnings = []
        declared = dict(dims or {})
        self._dim = {}
        for p in self.primes:
            d = declared.get(p.key, declared.get(p, p.dim))
            self._dim[p] = int(d)
        for a, b in containments or ():
            pa, pb = self.lookup(a), self.lookup(b)
            if not pb.contains_prime(pa):
                raise InvalidPrime(f"declared containment {pa.key} in {pb.key} is false")
        self._check_dims()

    def _check_dims(self):
        for p in self.primes:
            for q in self.primes:
                if q != p and q.contains_prime(p) and not self._dim[q] < self._dim[p]:
                    raise InvalidPrime(f"dim is not strictly monotone on {q.key} < {p.key}")
            chain = self._chain_length_below(p)
            if chain != self._dim[p]:
                msg = (f"declared dim {self._dim[p]} of {p.key} differs from the in-poset "
                       f"chain length {chain}")
                self.warnings.append(msg)
                warnings.warn(msg, stacklevel=3)

    def _chain_length_below(self, p):
        below = [q for q in self.primes if q != p and q.contains_prime(p)]
        if not below:
            return 0
        return 1 + max(self._chain_length_below(q) for q in below)

    # lookup
    def lookup(self, p):
        if isinstance(p, AlgPrime):
            if p in self._dim:
                return p
            raise UnknownPrime(f"{p.key} is not in the declared poset")
        q = parse_prime(self.ring, p)
        if q not in self._dim:
            raise UnknownPrime(f"{q.key} is not in the declared poset")
        return q

    def dim(self, p):
        return self._dim[self.lookup(p)]

    def __contains__(self, p):
        try:
            self.lookup(p)
            return True
        except (UnknownPrime, InvalidPrime):
            return False

    @property
    def r(self):
        return max(self._dim.values())

    @property
    def generic(self):
        top = [p for p in self.primes if self._dim[p] == self.r]
        return top[0] if len(top) == 1 else None

    def of_dim(self, d):
        return [p for p in self.primes if self._dim[p] == d]

    @property
    def closed_points(self):
        return self.of_dim(0)

    # Balmer order
    def balmer_le(self, q, p):
        """q <= p in the Balmer order, i.e. q contains p algebraically."""
        return q.contains_prime(p)

    def lambda_set(self, p):
        p = self.lookup(p)
        return [q for q in self.primes if self.balmer_le(q, p)]

    def v_set(self, p):
        p = self.lookup(p)
        return [q for q in self.primes if self.balmer_le(p, q)]

    def is_family(self, subset):
        """Downward closed in the Balmer order."""
        s = set(subset)
        return all(q in s for p in s for q in self.primes if self.balmer_le(q, p))

    def closure_has_closed_point(self, p):
        return any(self._dim[q] == 0 for q in self.lambda_set(p))

    def is_irreducible(self):
        g = self.generic
        return g is not None and all(self.balmer_le(p, g) for p in self.primes)

    # flags
    def chains(self, flag):
        """Prime chains p_0 >= p_1 >= ... (Balmer) with dim p_i = d_i."""
        out = []

        def extend(prefix, i):
            if i == len(flag):
                out.append(tuple(prefix))
                return
            for q in self.of_dim(flag[i]):
                if not prefix or self.balmer_le(q, prefix[-1]):
                    extend(prefix + [q], i + 1)

        extend([], 0)
        return sorted(out, key=lambda c: tuple(p.key for p in c))

    def enumerate_flags(self):
        """All flags of the ambient dimension with their realizing chains."""
        return [(f, self.chains(f)) for f in all_flags(self.r)]

    def restrict(self, primes):
        return SpectrumPoset(self.ring, [self.lookup(p) for p in primes],
                             {p.key: self._dim[p] for p in map(self.lookup, primes)})

    def to_json(self):
        return {"ring": self.ring.to_json(),
                "primes": [{"generators": p.to_json(), "dim": self._dim[p]} for p in self.primes]}

    @classmethod
    def from_json(cls, data, ring=None):
        ring = ring or BaseRing.from_json(data["ring"])
        primes, dims = [], {}
        for entry in data["primes"]:
            if isinstance(entry, dict):
                p = AlgPrime(ring, entry.get("generators", []))
                if "dim" in entry:
                    dims[p.key] = entry["dim"]
            else:
                p = parse_prime(ring, entry)
            primes.append(p)
        return cls(ring, primes, dims, data.get("containments"))

    def __repr__(self):
        return "Poset{" + ", ".join(f"{p.key}:{self._dim[p]}" for p in self.primes) + "}"
