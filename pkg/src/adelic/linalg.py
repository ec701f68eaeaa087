"""Exact matrices over computational cores and Smith normal form over PIDs.

Everything here is exact; there is no floating point anywhere.  Homology of
complexes over a PID core reduces to Smith normal forms of the differentials
because kernels of maps between free modules over a PID are direct summands.
"""

from dataclasses import dataclass, field

from .errors import CompositionNonzero, InvalidExpr, UnsupportedRing


class ExactMatrix:
    """Immutable ``rows x cols`` matrix with entries in a single core."""

    __slots__ = ("core", "rows", "cols", "entries")

    def __init__(self, core, rows, cols, entries=None):
        self.core = core
        self.rows = rows
        self.cols = cols
        if entries is None:
            entries = [[core.zero] * cols for _ in range(rows)]
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise InvalidExpr(f"entries do not form a {rows}x{cols} matrix")
        self.entries = tuple(tuple(core.coerce(e) for e in r) for r in entries)

    @classmethod
    def zeros(cls, core, rows, cols):
        return cls(core, rows, cols)

    @classmethod
    def identity(cls, core, n):
        return cls(core, n, n, [[core.one if i == j else core.zero for j in range(n)]
                                for i in range(n)])

    @classmethod
    def from_rows(cls, core, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(core, len(rows), ncols, rows)

    @classmethod
    def scalar(cls, core, c):
        return cls(core, 1, 1, [[c]])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def tolist(self):
        return [list(r) for r in self.entries]

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise InvalidExpr(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        z = self.core.zero
        out = []
        for i in range(self.rows):
            row = self.entries[i]
            out_row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = row[k]
                    if a != z:
                        b = other.entries[k][j]
                        if b != z:
                            acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return ExactMatrix(self.core, self.rows, other.cols, out)

    def __add__(self, other):
        self._same_shape(other)
        return ExactMatrix(self.core, self.rows, self.cols,
                           [[a + b for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ExactMatrix(self.core, self.rows, self.cols,
                           [[-a for a in r] for r in self.entries])

    def scale(self, c):
        return ExactMatrix(self.core, self.rows, self.cols,
                           [[c * a for a in r] for r in self.entries])

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InvalidExpr("shape mismatch")

    def transpose(self):
        return ExactMatrix(self.core, self.cols, self.rows,
                           [[self.entries[i][j] for i in range(self.rows)]
                            for j in range(self.cols)])

    @property
    def T(self):
        return self.transpose()

    def is_zero(self):
        return all(self.core.is_zero(a) for r in self.entries for a in r)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def map_entries(self, fn, core):
        return ExactMatrix(core, self.rows, self.cols,
                           [[fn(a) for a in r] for r in self.entries])

    def columns(self, idx):
        return ExactMatrix(self.core, self.rows, len(idx),
                           [[r[j] for j in idx] for r in self.entries])

    def hstack(self, other):
        if self.rows != other.rows:
            raise InvalidExpr("hstack row mismatch")
        return ExactMatrix(self.core, self.rows, self.cols + other.cols,
                           [list(a) + list(b) for a, b in zip(self.entries, other.entries)])

    def to_json(self):
        return [[self.core.fmt(a) for a in r] for r in self.entries]

    @classmethod
    def from_json(cls, core, data, rows=None, cols=None):
        data = [[core.parse(str(a)) for a in r] for r in data]
        rows = len(data) if rows is None else rows
        cols = (len(data[0]) if data else 0) if cols is None else cols
        if not data:
            return cls.zeros(core, rows, cols)
        return cls(core, rows, cols, data)

    def __repr__(self):
        body = "; ".join(", ".join(self.core.fmt(a) for a in r) for r in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols} over {self.core!r}: [{body}])"


def block_matrix(core, blocks, row_sizes, col_sizes):
    """Assemble a matrix from ``{(i, j): ExactMatrix}``; missing blocks are zero."""
    R, C = sum(row_sizes), sum(col_sizes)
    rows = [[core.zero] * C for _ in range(R)]
    r_off = [sum(row_sizes[:i]) for i in range(len(row_sizes))]
    c_off = [sum(col_sizes[:j]) for j in range(len(col_sizes))]
    for (i, j), blk in blocks.items():
        if (blk.rows, blk.cols) != (row_sizes[i], col_sizes[j]):
            raise InvalidExpr(f"block ({i},{j}) has shape {blk.rows}x{blk.cols}")
        for a in range(blk.rows):
            for b in range(blk.cols):
                rows[r_off[i] + a][c_off[j] + b] = blk.entries[a][b]
    return ExactMatrix(core, R, C, rows)


# --- Smith normal form ------------------------------------------------------

@dataclass
class SmithForm:
    left: ExactMatrix
    diagonal: ExactMatrix
    right: ExactMatrix
    left_inv: ExactMatrix
    rank: int

    def invariant_factors(self):
        return [self.diagonal[i, i] for i in range(self.rank)]


def _require_pid(core):
    if not getattr(core, "is_pid", False):
        raise UnsupportedRing(f"{core!r} is not a PID core; use groebner_homology")


def smith_normal_form(M):
    """Return :class:`SmithForm` with ``left @ M @ right == diagonal``.

    The diagonal entries are canonical associates forming a divisibility
    chain; ``left`` and ``right`` are invertible over the core.
    """
    core = M.core
    _require_pid(core)
    m, n = M.rows, M.cols
    A = [list(r) for r in M.entries]
    L = [[core.one if i == j else core.zero for j in range(m)] for i in range(m)]
    Li = [[core.one if i == j else core.zero for j in range(m)] for i in range(m)]
    R = [[core.one if i == j else core.zero for j in range(n)] for i in range(n)]
    Ri = [[core.one if i == j else core.zero for j in range(n)] for i in range(n)]
    isz = core.is_zero

    def row_op(i, j, a, b, c, d):
        # rows (i, j) <- [[a, b], [c, d]] @ rows (i, j); inverse applied to Li columns
        for X in (A, L):
            ri, rj = X[i], X[j]
            X[i] = [a * x + b * y for x, y in zip(ri, rj)]
            X[j] = [c * x + d * y for x, y in zip(ri, rj)]
        det_inv = core.inverse(a * d - b * c)
        ia, ib, ic, id_ = d * det_inv, -b * det_inv, -c * det_inv, a * det_inv
        for row in Li:
            x, y = row[i], row[j]
            row[i] = x * ia + y * ic
            row[j] = x * ib + y * id_

    def col_op(i, j, a, b, c, d):
        # cols (i, j) <- cols (i, j) @ [[a, c], [b, d]]
        for X in (A, R):
            for row in X:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + d * y
        det_inv = core.inverse(a * d - b * c)
        ia, ib, ic, id_ = d * det_inv, -b * det_inv, -c * det_inv, a * det_inv
        ri, rj = Ri[i], Ri[j]
        Ri[i] = [ia * x + ic * y for x, y in zip(ri, rj)]
        Ri[j] = [ib * x + id_ * y for x, y in zip(ri, rj)]

    def swap_rows(i, j):
        if i != j:
            row_op(i, j, core.zero, core.one, core.one, core.zero)

    def swap_cols(i, j):
        if i != j:
            col_op(i, j, core.zero, core.one, core.one, core.zero)

    t = 0
    while t < min(m, n):
        pivot = next(((i, j) for i in range(t, m) for j in range(t, n) if not isz(A[i][j])), None)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            changed = False
            for i in range(t + 1, m):
                b = A[i][t]
                if isz(b):
                    continue
                a = A[t][t]
                if core.divides(a, b):
                    row_op(t, i, core.one, core.zero, -core.div(b, a), core.one)
                else:
                    g, s, u = core.gcdex(a, b)
                    row_op(t, i, s, u, -core.div(b, g), core.div(a, g))
                changed = True
            for j in range(t + 1, n):
                b = A[t][j]
                if isz(b):
                    continue
                a = A[t][t]
                if core.divides(a, b):
                    col_op(t, j, core.one, core.zero, -core.div(b, a), core.one)
                else:
                    g, s, u = core.gcdex(a, b)
                    col_op(t, j, s, u, -core.div(b, g), core.div(a, g))
                changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if not core.divides(A[t][t], A[i][j])), None)
            if bad is None:
                break
            # fold the offending row into the pivot row and re-clear
            row_op(t, bad[0], core.one, core.one, core.zero, core.one)
        assoc, unit = core.normalize(A[t][t])
        if unit != core.one:
            uinv = core.inverse(unit)
            A[t] = [uinv * x for x in A[t]]
            L[t] = [uinv * x for x in L[t]]
            for row in Li:
                row[t] = row[t] * unit
        t += 1
    rank = t
    mk = lambda X, r, c: ExactMatrix(core, r, c, X)
    return SmithForm(mk(L, m, m), mk(A, m, n), mk(R, n, n), mk(Li, m, m), rank)


def rank(M):
    return smith_normal_form(M).rank


def kernel_basis(M):
    """Columns spanning ker(M) as a free direct summand of the source."""
    snf = smith_normal_form(M)
    return snf.right.columns(list(range(snf.rank, M.cols)))


def image_basis(M):
    """Columns forming a basis of the column span of ``M``."""
    snf = smith_normal_form(M)
    core = M.core
    d = snf.invariant_factors()
    Li = snf.left_inv
    cols = [[Li[i, j] * d[j] for j in range(snf.rank)] for i in range(M.rows)]
    return ExactMatrix(core, M.rows, snf.rank, cols)


# --- module invariants ------------------------------------------------------

@dataclass(frozen=True)
class ModuleInvariants:
    """Structure of a finitely generated module over a PID core."""

    free_rank: int
    torsion: tuple = ()
    core: object = field(default=None, compare=False)
    completed: bool = field(default=False, compare=False)

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def torsion_strings(self):
        fmt = self.core.fmt if self.core is not None else str
        return [fmt(t) for t in self.torsion]

    def to_json(self):
        out = {"free_rank": self.free_rank, "torsion": self.torsion_strings()}
        if self.completed:
            out["completed"] = True
        return out

    def key(self):
        return (self.free_rank, tuple(self.torsion_strings()))

    def __str__(self):
        if self.is_zero():
            return "0"
        R = repr(self.core) if self.core is not None else "R"
        parts = [R] * self.free_rank if self.free_rank <= 3 else [f"{R}^{self.free_rank}"]
        parts += [f"{R}/{t}" for t in self.torsion_strings()]
        return " + ".join(parts)


def invariants_from_factors(core, n_gens, factors, completed=False):
    """Module R^n_gens / (diagonal factors) as :class:`ModuleInvariants`."""
    nonzero = [f for f in factors if not core.is_zero(f)]
    torsion = tuple(f for f in nonzero if not core.is_unit(f))
    return ModuleInvariants(n_gens - len(nonzero), torsion, core, completed)


def cokernel_invariants(M, completed=False):
    snf = smith_normal_form(M)
    return invariants_from_factors(M.core, M.rows, snf.invariant_factors(), completed)


def homology_invariants(d_in, d_out, completed=False):
    """Invariants of ker(d_out)/im(d_in) for ``R^a -d_in-> R^n -d_out-> R^b``."""
    core = d_in.core
    _require_pid(core)
    if d_in.rows != d_out.cols:
        raise InvalidExpr(f"d_in has {d_in.rows} rows but d_out has {d_out.cols} columns")
    if d_in.cols and d_out.rows and not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out @ d_in is not zero")
    n = d_in.rows
    r_out = smith_normal_form(d_out).rank if d_out.rows and d_out.cols else 0
    snf_in = smith_normal_form(d_in) if d_in.rows and d_in.cols else None
    factors = snf_in.invariant_factors() if snf_in else []
    kernel_rank = n - r_out
    torsion = tuple(f for f in factors if not core.is_unit(f))
    return ModuleInvariants(kernel_rank - len(factors), torsion, core, completed)


def solve_in_basis(B, V):
    """Coordinates C with ``B @ C == V`` where B has independent columns."""
    core = B.core
    snf = smith_normal_form(B)
    if snf.rank != B.cols:
        raise InvalidExpr("basis columns are dependent")
    LV = snf.left @ V
    d = snf.invariant_factors()
    rows = []
    for i in range(B.cols):
        rows.append([core.div(LV[i, j], d[i]) for j in range(V.cols)])
    for i in range(B.cols, B.rows):
        if any(not core.is_zero(LV[i, j]) for j in range(V.cols)):
            raise InvalidExpr("vector not in the span of the basis")
    Cp = ExactMatrix(core, B.cols, V.cols, rows)
    return snf.right @ Cp


def subquotient_invariants(U, V, completed=False):
    """Invariants of span(U)/span(V) for column generators with span(V) in span(U)."""
    core = U.core
    if U.cols == 0:
        return ModuleInvariants(0, (), core, completed)
    BU = image_basis(U)
    if BU.cols == 0:
        return ModuleInvariants(0, (), core, completed)
    if V.cols == 0:
        return ModuleInvariants(BU.cols, (), core, completed)
    C = solve_in_basis(BU, V)
    snf = smith_normal_form(C)
    return invariants_from_factors(core, BU.cols, snf.invariant_factors(), completed)


def invert(M):
    """The inverse of a square matrix over its core, or None if it has none.

    Gauss-Jordan with unit pivots; PID cores fall back to Smith form so that
    unimodular matrices without unit entries are still inverted.
    """
    core = M.core
    n = M.rows
    if M.cols != n:
        return None
    A = [list(r) + [core.one if i == j else core.zero for j in range(n)]
         for i, r in enumerate(M.entries)]
    for c in range(n):
        piv = next((r for r in range(c, n) if core.is_unit(A[r][c])), None)
        if piv is None:
            break
        A[c], A[piv] = A[piv], A[c]
        u = core.inverse(A[c][c])
        A[c] = [u * x for x in A[c]]
        for r in range(n):
            if r != c and not core.is_zero(A[r][c]):
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    else:
        return ExactMatrix(core, n, n, [row[n:] for row in A])
    if not getattr(core, "is_pid", False):
        return None
    snf = smith_normal_form(M)
    d = snf.invariant_factors()
    if snf.rank < n or not all(core.is_unit(x) for x in d):
        return None
    D = ExactMatrix(core, n, n, [[core.inverse(d[i]) if i == j else core.zero
                                  for j in range(n)] for i in range(n)])
    return snf.right @ D @ snf.left
