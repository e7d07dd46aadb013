"""Exact linear algebra over Z and Q.

Matrices with arbitrary-precision integer or exact rational entries,
Smith normal form, and finitely presented abelian groups together with
the kernel / cokernel / image / tensor / hom calculus that the chain
and spectrum layers are built on.

A group is presented as R^n modulo the column span of a relation
matrix.  A map of groups is a matrix on generators that carries
relations into relations; this is checked eagerly at construction.

>>> G = canonicalize(Matrix([[2, 0], [0, 3]]), Z)
>>> str(G)
'Z/6'
>>> str(FpGroup(Z, 2))
'Z^2'
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

Z = "Z"
Q = "Q"


class RingMismatch(ValueError):
    """Operands live over different coefficient rings."""


def coerce_entry(x, ring):
    if ring == Q:
        return x if type(x) is Fraction else Fraction(x)
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError(f"non-integer entry {x} over Z")
        return int(x)
    return int(x)


class Matrix:
    """Dense exact matrix.  Maps act on column vectors, so a map
    target <- source is a (target x source) matrix."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, rows=None, cols=None):
        if rows is None:
            rows = len(data)
            cols = len(data[0]) if data else 0
        self.rows = rows
        self.cols = cols
        self.data = data
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged matrix")

    @staticmethod
    def zeros(rows, cols):
        return Matrix([[0] * cols for _ in range(rows)], rows, cols)

    @staticmethod
    def identity(n):
        return Matrix([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @staticmethod
    def from_cols(cols, nrows):
        data = [[c[i] for c in cols] for i in range(nrows)]
        return Matrix(data, nrows, len(cols))

    def col(self, j):
        return [row[j] for row in self.data]

    def column_list(self):
        return [self.col(j) for j in range(self.cols)]

    def copy(self):
        return Matrix([row[:] for row in self.data], self.rows, self.cols)

    def map(self, fn):
        return Matrix([[fn(x) for x in row] for row in self.data], self.rows, self.cols)

    def transpose(self):
        return Matrix([[self.data[i][j] for i in range(self.rows)]
                       for j in range(self.cols)], self.cols, self.rows)

    def is_zero(self):
        return all(all(x == 0 for x in row) for row in self.data)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            all(self.data[i][j] == other.data[i][j]
                for i in range(self.rows) for j in range(self.cols))

    def __hash__(self):
        return hash((self.rows, self.cols,
                     tuple(tuple(row) for row in self.data)))

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} * "
                             f"{other.rows}x{other.cols}")
        B = other.data
        out = [[0] * other.cols for _ in range(self.rows)]
        for i, arow in enumerate(self.data):
            orow = out[i]
            for k, a in enumerate(arow):
                if a:
                    brow = B[k]
                    for j, b in enumerate(brow):
                        if b:
                            orow[j] += a * b
        return Matrix(out, self.rows, other.cols)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in +")
        return Matrix([[a + b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.data, other.data)],
                      self.rows, self.cols)

    def __sub__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in -")
        return Matrix([[a - b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.data, other.data)],
                      self.rows, self.cols)

    def __neg__(self):
        return Matrix([[-a for a in row] for row in self.data], self.rows, self.cols)

    def scale(self, c):
        return Matrix([[c * a for a in row] for row in self.data], self.rows, self.cols)

    def mul_vec(self, v):
        return [sum(a * x for a, x in zip(row, v) if a) for row in self.data]

    def __repr__(self):
        return f"Matrix({self.data!r})"


def hstack(*mats):
    mats = [m for m in mats]
    if not mats:
        raise ValueError("hstack of nothing")
    rows = mats[0].rows
    for m in mats:
        if m.rows != rows:
            raise ValueError("hstack row mismatch")
    data = [sum((m.data[i] for m in mats), []) for i in range(rows)]
    return Matrix(data, rows, sum(m.cols for m in mats))


def vstack(*mats):
    cols = mats[0].cols
    for m in mats:
        if m.cols != cols:
            raise ValueError("vstack col mismatch")
    data = []
    for m in mats:
        data.extend(row[:] for row in m.data)
    return Matrix(data, sum(m.rows for m in mats), cols)


def block_diag(mats):
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = Matrix.zeros(rows, cols)
    i0 = j0 = 0
    for m in mats:
        for i in range(m.rows):
            row = out.data[i0 + i]
            mrow = m.data[i]
            for j in range(m.cols):
                row[j0 + j] = mrow[j]
        i0 += m.rows
        j0 += m.cols
    return out


def kron(A, B):
    """Kronecker product; generator (i, j) of a tensor corresponds to
    flat index i * (B side) + j throughout this package."""
    out = Matrix.zeros(A.rows * B.rows, A.cols * B.cols)
    od = out.data
    for i in range(A.rows):
        arow = A.data[i]
        for k in range(B.rows):
            orow = od[i * B.rows + k]
            brow = B.data[k]
            for j in range(A.cols):
                a = arow[j]
                if a:
                    base = j * B.cols
                    for l in range(B.cols):
                        b = brow[l]
                        if b:
                            orow[base + l] = a * b
    return out


def paste(dst, src, i0, j0):
    for i in range(src.rows):
        drow = dst.data[i0 + i]
        srow = src.data[i]
        for j in range(src.cols):
            drow[j0 + j] = srow[j]


# ---------------------------------------------------------------------------
# Smith normal form engine
# ---------------------------------------------------------------------------

class _SnfResult:
    __slots__ = ("S", "U", "V", "Uinv", "Vinv", "rank", "diag")


def _snf_engine(M, field=False, want_u=False, want_v=False,
                want_uinv=False, want_vinv=False):
    r, c = M.rows, M.cols
    S = [row[:] for row in M.data]
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)] if (want_u or want_uinv) else None
    Uinv = [row[:] for row in U] if want_uinv else None
    V = [[1 if i == j else 0 for j in range(c)] for i in range(c)] if (want_v or want_vinv) else None
    Vinv = [row[:] for row in V] if want_vinv else None

    def row_swap(i, j):
        if i == j:
            return
        S[i], S[j] = S[j], S[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if Uinv is not None:
            for row in Uinv:
                row[i], row[j] = row[j], row[i]

    def row_addmul(i, j, q):
        # row_i += q * row_j
        if q == 0:
            return
        Si, Sj = S[i], S[j]
        for k in range(c):
            v = Sj[k]
            if v:
                Si[k] += q * v
        if U is not None:
            Ui, Uj = U[i], U[j]
            for k in range(r):
                v = Uj[k]
                if v:
                    Ui[k] += q * v
        if Uinv is not None:
            for row in Uinv:
                v = row[i]
                if v:
                    row[j] -= q * v

    def row_scale(i, u):
        S[i] = [u * x for x in S[i]]
        if U is not None:
            U[i] = [u * x for x in U[i]]
        if Uinv is not None:
            inv = Fraction(1, 1) / u if field else (1 if u == 1 else -1)
            for row in Uinv:
                if row[i]:
                    row[i] = inv * row[i]

    def col_swap(i, j):
        if i == j:
            return
        for row in S:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]
        if Vinv is not None:
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def col_addmul(i, j, q):
        # col_i += q * col_j
        if q == 0:
            return
        for row in S:
            v = row[j]
            if v:
                row[i] += q * v
        if V is not None:
            for row in V:
                v = row[j]
                if v:
                    row[i] += q * v
        if Vinv is not None:
            Ri, Rj = Vinv[i], Vinv[j]
            for k in range(len(Rj)):
                v = Ri[k]
                if v:
                    Rj[k] -= q * v

    t = 0
    mn = min(r, c)
    while t < mn:
        # smallest-absolute-value pivot in the remaining block
        piv = None
        best = None
        for i in range(t, r):
            row = S[i]
            for j in range(t, c):
                v = row[j]
                if v:
                    a = abs(v) if not field else 1
                    if best is None or a < best:
                        best = a
                        piv = (i, j)
                        if a == 1:
                            break
            if best == 1:
                break
        if piv is None:
            break
        row_swap(t, piv[0])
        col_swap(t, piv[1])
        if field:
            p = S[t][t]
            for i in range(r):
                if i != t and S[i][t]:
                    row_addmul(i, t, -S[i][t] / p)
            for j in range(c):
                if j != t and S[t][j]:
                    col_addmul(j, t, -S[t][j] / p)
            t += 1
            continue
        while True:
            dirty = False
            for i in range(r):
                if i != t and S[i][t]:
                    q = S[i][t] // S[t][t]
                    row_addmul(i, t, -q)
                    if S[i][t]:
                        row_swap(i, t)
                        dirty = True
            if dirty:
                continue
            for j in range(c):
                if j != t and S[t][j]:
                    q = S[t][j] // S[t][t]
                    col_addmul(j, t, -q)
                    if S[t][j]:
                        col_swap(j, t)
                        dirty = True
            if dirty:
                continue
            break
        t += 1

    rank = t
    # normalize pivots: positive over Z, 1 over Q
    for i in range(rank):
        d = S[i][i]
        if field:
            if d != 1:
                row_scale(i, Fraction(1, 1) / d)
        elif d < 0:
            row_scale(i, -1)
    if not field:
        # enforce the divisibility chain d1 | d2 | ...
        changed = True
        while changed:
            changed = False
            for i in range(rank - 1):
                a, b = S[i][i], S[i + 1][i + 1]
                if b % a:
                    col_addmul(i, i + 1, 1)
                    # re-clear the disturbed 2x2 block
                    while True:
                        sub_dirty = False
                        for ii in range(r):
                            if ii != i and S[ii][i]:
                                q = S[ii][i] // S[i][i]
                                row_addmul(ii, i, -q)
                                if S[ii][i]:
                                    row_swap(ii, i)
                                    sub_dirty = True
                        if sub_dirty:
                            continue
                        for jj in range(c):
                            if jj != i and S[i][jj]:
                                q = S[i][jj] // S[i][i]
                                col_addmul(jj, i, -q)
                                if S[i][jj]:
                                    col_swap(jj, i)
                                    sub_dirty = True
                        if sub_dirty:
                            continue
                        break
                    for k in (i, i + 1):
                        if S[k][k] < 0:
                            row_scale(k, -1)
                    changed = True
    res = _SnfResult()
    res.S = Matrix(S, r, c)
    res.U = Matrix(U, r, r) if want_u else None
    res.Uinv = Matrix(Uinv, r, r) if want_uinv else None
    res.V = Matrix(V, c, c) if want_v else None
    res.Vinv = Matrix(Vinv, c, c) if want_vinv else None
    res.rank = rank
    res.diag = [res.S.data[i][i] for i in range(rank)]
    return res


def smith_normal_form(M):
    """Smith normal form of an integer matrix.

    Returns (U, S, V) with U*M*V = S, U and V unimodular and S diagonal
    with each diagonal entry dividing the next.

    >>> U, S, V = smith_normal_form(Matrix([[2, 0], [0, 3]]))
    >>> [S.data[0][0], S.data[1][1]]
    [1, 6]
    >>> U * Matrix([[2, 0], [0, 3]]) * V == S
    True
    """
    for row in M.data:
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                raise ValueError("smith_normal_form needs an integer matrix")
    res = _snf_engine(M, field=False, want_u=True, want_v=True)
    return res.U, res.S, res.V


def kernel_basis(M, field=False):
    """Basis of the kernel lattice (Z) or kernel subspace (Q) of M,
    returned as the columns of a matrix."""
    res = _snf_engine(M, field=field, want_v=True)
    cols = [res.V.col(j) for j in range(res.rank, M.cols)]
    return Matrix.from_cols(cols, M.cols)


def solve_matrix(M, B, field=False):
    """Solve M * X = B exactly; None when no solution exists."""
    res = _snf_engine(M, field=field, want_u=True, want_v=True)
    Y = res.U * B
    Xh = Matrix.zeros(M.cols, B.cols)
    for i in range(M.rows):
        d = res.S.data[i][i] if i < min(M.rows, M.cols) else 0
        for j in range(B.cols):
            y = Y.data[i][j]
            if i < res.rank:
                if field:
                    Xh.data[i][j] = y / d
                else:
                    if y % d:
                        return None
                    Xh.data[i][j] = y // d
            elif y != 0:
                return None
    return res.V * Xh


def matrix_rank(M, field=False):
    return _snf_engine(M, field=field).rank


# ---------------------------------------------------------------------------
# Finitely presented abelian groups
# ---------------------------------------------------------------------------

class FpGroup:
    """Abelian group presented as ring^ngens / column span of `relations`.

    The canonical form (free rank plus a divisibility chain of torsion
    coefficients) is computed once from Smith normal form and cached.

    >>> A = FpGroup(Z, 1, Matrix([[4]]))
    >>> A.canonical
    (0, (4,))
    >>> FpGroup(Q, 1, Matrix([[4]])).canonical
    (1, ())
    """

    __slots__ = ("ring", "ngens", "relations", "_snf", "_canonical")

    def __init__(self, ring, ngens, relations=None):
        if ring not in (Z, Q):
            raise ValueError(f"unknown ring {ring!r}")
        if relations is None:
            relations = Matrix.zeros(ngens, 0)
        if relations.rows != ngens:
            raise ValueError("relation matrix must have one row per generator")
        self.ring = ring
        self.ngens = ngens
        self.relations = relations.map(lambda x: coerce_entry(x, ring))
        self._snf = None
        self._canonical = None

    @staticmethod
    def free(ring, n):
        return FpGroup(ring, n)

    @staticmethod
    def zero(ring):
        return FpGroup(ring, 0)

    def _snf_full(self):
        if self._snf is None:
            self._snf = _snf_engine(self.relations, field=(self.ring == Q),
                                    want_u=True, want_v=True)
        return self._snf

    @property
    def canonical(self):
        """(free_rank, torsion divisor chain)."""
        if self._canonical is None:
            res = self._snf_full()
            if self.ring == Q:
                self._canonical = (self.ngens - res.rank, ())
            else:
                torsion = tuple(d for d in res.diag if d >= 2)
                self._canonical = (self.ngens - res.rank, torsion)
        return self._canonical

    @property
    def free_rank(self):
        return self.canonical[0]

    @property
    def torsion(self):
        return self.canonical[1]

    def is_trivial(self):
        return self.canonical == (0, ())

    def is_finite(self):
        return self.free_rank == 0

    def order(self):
        if not self.is_finite():
            raise ValueError("infinite group")
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def same_presentation(self, other):
        return (self.ring == other.ring and self.ngens == other.ngens
                and self.relations == other.relations)

    def contains_cols(self, B):
        """Do all columns of B lie in the span of the relations?"""
        if B.cols == 0 or self.ngens == 0:
            return True
        res = self._snf_full()
        Y = res.U * B
        field = self.ring == Q
        mn = min(self.relations.rows, self.relations.cols)
        for i in range(self.ngens):
            d = res.S.data[i][i] if i < mn else 0
            for j in range(B.cols):
                y = Y.data[i][j]
                if i < res.rank:
                    if not field and y % d:
                        return False
                elif y != 0:
                    return False
        return True

    def elements(self):
        """Generator-coordinate representatives of all elements.
        Only for finite groups."""
        if not self.is_finite():
            raise ValueError("cannot enumerate an infinite group")
        full = _snf_engine(self.relations, field=(self.ring == Q),
                           want_uinv=True)
        k = self.ngens
        ranges = []
        for i in range(k):
            d = full.S.data[i][i] if i < min(k, self.relations.cols) else 0
            ranges.append(range(int(d)) if d else range(1))
        for combo in product(*ranges):
            vec = Matrix.from_cols([list(combo)], k)
            yield (full.Uinv * vec).col(0)

    def __str__(self):
        free, tors = self.canonical
        parts = []
        if free == 1:
            parts.append("Z" if self.ring == Z else "Q")
        elif free > 1:
            parts.append(("Z" if self.ring == Z else "Q") + f"^{free}")
        parts.extend(f"Z/{d}" for d in tors)
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"<FpGroup {self} on {self.ngens} gens>"


def canonicalize(presentation, ring):
    """Group presented by the given relation matrix (rows = generators)."""
    return FpGroup(ring, presentation.rows, presentation)


class GroupMap:
    """Map of finitely presented groups, as a matrix on generators.

    Validated at construction: the matrix must carry source relations
    into the span of the target relations.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, check=True):
        if source.ring != target.ring:
            raise RingMismatch("map between groups over different rings")
        if matrix.rows != target.ngens or matrix.cols != source.ngens:
            raise ValueError(
                f"map matrix is {matrix.rows}x{matrix.cols}, expected "
                f"{target.ngens}x{source.ngens}")
        self.source = source
        self.target = target
        self.matrix = matrix.map(lambda x: coerce_entry(x, source.ring))
        if check and source.relations.cols:
            if not target.contains_cols(self.matrix * source.relations):
                raise ValueError("matrix does not carry relations into relations")

    @staticmethod
    def identity(G):
        return GroupMap(G, G, Matrix.identity(G.ngens), check=False)

    @staticmethod
    def zero(source, target):
        return GroupMap(source, target, Matrix.zeros(target.ngens, source.ngens),
                        check=False)

    def is_zero(self):
        return self.target.contains_cols(self.matrix)

    def __repr__(self):
        return f"<GroupMap {self.source} -> {self.target}>"


def compose(g, f):
    """g after f."""
    if not f.target.same_presentation(g.source):
        raise ValueError("compose: target/source mismatch")
    return GroupMap(f.source, g.target, g.matrix * f.matrix, check=False)


def maps_equal(f, g):
    if not (f.source.same_presentation(g.source)
            and f.target.same_presentation(g.target)):
        return False
    return f.target.contains_cols(f.matrix - g.matrix)


def direct_sum(groups):
    """Direct sum with injection and projection witnesses."""
    if not groups:
        raise ValueError("empty direct sum needs a ring; use FpGroup.zero")
    ring = groups[0].ring
    for g in groups:
        if g.ring != ring:
            raise RingMismatch("direct sum over mixed rings")
    total = sum(g.ngens for g in groups)
    rel = block_diag([g.relations for g in groups])
    S = FpGroup(ring, total, rel)
    injs, projs = [], []
    off = 0
    for g in groups:
        inj = Matrix.zeros(total, g.ngens)
        proj = Matrix.zeros(g.ngens, total)
        for i in range(g.ngens):
            inj.data[off + i][i] = 1
            proj.data[i][off + i] = 1
        injs.append(GroupMap(g, S, inj, check=False))
        projs.append(GroupMap(S, g, proj, check=False))
        off += g.ngens
    return S, injs, projs


def presented_subquotient(ring, P, Qgens):
    """Group lattice(P) / lattice(Qgens), presented on the columns of P.

    Requires lattice(Qgens) inside lattice(P).  The relation lattice is
    every coordinate vector z with P*z in the span of Qgens, which also
    absorbs dependencies among the columns of P.
    """
    if P.cols == 0:
        return FpGroup(ring, 0)
    field = ring == Q
    big = hstack(P, Qgens) if Qgens.cols else P
    ker = kernel_basis(big, field=field)
    rel = Matrix([ker.data[i] for i in range(P.cols)], P.cols, ker.cols)
    return FpGroup(ring, P.cols, rel)


def kernel(f):
    """Kernel subgroup with its inclusion witness."""
    A, B = f.source, f.target
    field = A.ring == Q
    big = hstack(f.matrix, B.relations) if B.relations.cols else f.matrix
    ker = kernel_basis(big, field=field)
    P = Matrix([ker.data[i] for i in range(A.ngens)], A.ngens, ker.cols)
    K = presented_subquotient(A.ring, P, A.relations)
    incl = GroupMap(K, A, P, check=False)
    return K, incl


def cokernel(f):
    """Cokernel with its projection witness."""
    B = f.target
    rel = hstack(f.matrix, B.relations) if B.relations.cols else f.matrix
    C = FpGroup(B.ring, B.ngens, rel)
    proj = GroupMap(B, C, Matrix.identity(B.ngens), check=False)
    return C, proj


def image(f):
    """Image of f in canonical-form-carrying presentation."""
    G, _ = image_with_inclusion(f)
    return G

def image_with_inclusion(f):
    A, B = f.source, f.target
    G = presented_subquotient(A.ring, f.matrix, B.relations) \
        if A.ngens else FpGroup(A.ring, 0)
    if A.ngens:
        # generators of G are the images of A's generators
        G2 = FpGroup(A.ring, A.ngens, G.relations)
        return G2, GroupMap(G2, B, f.matrix, check=False)
    return G, GroupMap(G, B, Matrix.zeros(B.ngens, 0), check=False)


def factor_through_injection(incl, g):
    """Given injective incl: K -> A and g: S -> A landing in its image,
    produce the unique h: S -> K with incl . h = g."""
    A = incl.target
    aug = hstack(incl.matrix, A.relations) if A.relations.cols else incl.matrix
    X = solve_matrix(aug, g.matrix, field=(A.ring == Q))
    if X is None:
        raise ValueError("map does not factor through the inclusion")
    H = Matrix([X.data[i] for i in range(incl.source.ngens)],
               incl.source.ngens, X.cols)
    return GroupMap(g.source, incl.source, H)


def descend_through_surjection(proj, g):
    """Given the canonical projection proj: A -> C (identity on
    generators, extra relations) and g: A -> B killing the new
    relations, return the induced map C -> B."""
    if proj.matrix != Matrix.identity(proj.source.ngens):
        raise ValueError("descend expects a canonical cokernel projection")
    return GroupMap(proj.target, g.target, g.matrix)


def tensor_group(A, B):
    """Tensor product with the standard presentation; generator (i, j)
    sits at flat index i * B.ngens + j."""
    if A.ring != B.ring:
        raise RingMismatch("tensor over mixed rings")
    a, b = A.ngens, B.ngens
    rels = []
    if A.relations.cols:
        rels.append(kron(A.relations, Matrix.identity(b)))
    if B.relations.cols:
        rels.append(kron(Matrix.identity(a), B.relations))
    rel = hstack(*rels) if rels else Matrix.zeros(a * b, 0)
    return FpGroup(A.ring, a * b, rel)


def tensor_map(f, g, source=None, target=None):
    if source is None:
        source = tensor_group(f.source, g.source)
    if target is None:
        target = tensor_group(f.target, g.target)
    return GroupMap(source, target, kron(f.matrix, g.matrix), check=False)


def coinvariants(A, action):
    """Largest quotient on which the given automorphisms act trivially:
    the cokernel of the stacked maps (g - id)."""
    for g in action:
        if not (g.source.same_presentation(A) and g.target.same_presentation(A)):
            raise ValueError("action maps must be endomorphisms of A")
        if not is_iso(g):
            raise ValueError("action map is not an automorphism")
    ident = Matrix.identity(A.ngens)
    pieces = [g.matrix - ident for g in action]
    pieces.append(A.relations)
    rel = hstack(*pieces) if A.ngens else Matrix.zeros(0, 0)
    return FpGroup(A.ring, A.ngens, rel)


def is_injective(f):
    K, _ = kernel(f)
    return K.is_trivial()


def is_surjective(f):
    C, _ = cokernel(f)
    return C.is_trivial()


def is_iso(f):
    return is_surjective(f) and is_injective(f)


def invert_iso(f):
    """Inverse of an isomorphism of presented groups."""
    A, B = f.source, f.target
    aug = hstack(f.matrix, B.relations) if B.relations.cols else f.matrix
    X = solve_matrix(aug, Matrix.identity(B.ngens), field=(A.ring == Q))
    if X is None:
        raise ValueError("map is not an isomorphism onto")
    M = Matrix([X.data[i] for i in range(A.ngens)], A.ngens, B.ngens)
    return GroupMap(B, A, M)


# ---------------------------------------------------------------------------
# Linear systems of maps: the engine behind Hom groups of every flavour
# ---------------------------------------------------------------------------

class MapLattice:
    """The abelian group of families {F_key} of generator matrices
    satisfying linear congruence constraints, e.g. commuting with
    differentials, simplicial operators, group actions or structure
    maps.

    blocks: list of (key, source FpGroup, target FpGroup); the unknown
      at `key` is a (target.ngens x source.ngens) matrix.
    constraints: list of (terms, tgt_group) where terms is a list of
      (P, key, Q); the constraint reads  sum_i P_i F_{key_i} Q_i = 0
      in tgt_group, i.e. modulo its relations.

    Well-definedness of each F_key (carrying source relations into
    target relations) is imposed automatically.
    """

    def __init__(self, ring, blocks, constraints):
        self.ring = ring
        self.blocks = list(blocks)
        self.keys = [k for k, _, _ in self.blocks]
        self.sources = {k: s for k, s, _ in self.blocks}
        self.targets = {k: t for k, _, t in self.blocks}
        self.offsets = {}
        off = 0
        for k, s, t in self.blocks:
            self.offsets[k] = off
            off += s.ngens * t.ngens
        self.nvars = off
        self.constraints = list(constraints)
        for k, s, t in self.blocks:
            if s.relations.cols:
                self.constraints.append(
                    ([(Matrix.identity(t.ngens), k, s.relations)], t))
        self._solve()

    def _var(self, key, i, j):
        # entry F[i][j], column-stacked
        t = self.targets[key]
        return self.offsets[key] + j * t.ngens + i

    def _solve(self):
        rows = []
        aux_cols = []          # relation-allowance columns, as (row_index, value) lists
        row0 = 0
        for terms, tgt in self.constraints:
            width = terms[0][2].cols
            height = tgt.ngens
            for P, key, Qm in terms:
                if Qm.cols != width or P.rows != height:
                    raise ValueError("inconsistent constraint block shapes")
            block_rows = [dict() for _ in range(height * width)]
            for P, key, Qm in terms:
                tn = self.targets[key].ngens
                sn = self.sources[key].ngens
                if P.cols != tn or Qm.rows != sn:
                    raise ValueError("constraint term has wrong inner shape")
                for out_c in range(width):
                    for j in range(sn):
                        q = Qm.data[j][out_c]
                        if not q:
                            continue
                        for out_r in range(height):
                            prow = P.data[out_r]
                            row = block_rows[out_c * height + out_r]
                            for kk in range(tn):
                                p = prow[kk]
                                if p:
                                    v = self._var(key, kk, j)
                                    row[v] = row.get(v, 0) + p * q
            # allowance columns: target relations per output column
            R = tgt.relations
            for out_c in range(width):
                for rc in range(R.cols):
                    col = [(row0 + out_c * height + i, R.data[i][rc])
                           for i in range(height) if R.data[i][rc]]
                    aux_cols.append(col)
            rows.extend(block_rows)
            row0 += height * width
        nrows = len(rows)
        naux = len(aux_cols)
        big = Matrix.zeros(nrows, self.nvars + naux)
        for i, row in enumerate(rows):
            brow = big.data[i]
            for v, val in row.items():
                brow[v] = val
        for a, col in enumerate(aux_cols):
            for i, val in col:
                big.data[i][self.nvars + a] = val
        ker = kernel_basis(big, field=(self.ring == Q))
        P = Matrix([ker.data[i] for i in range(self.nvars)], self.nvars, ker.cols)
        # prune all-zero witness columns (pure allowance solutions)
        keep = [j for j in range(P.cols) if any(P.data[i][j] for i in range(self.nvars))]
        P = Matrix.from_cols([P.col(j) for j in keep], self.nvars)
        # trivial families: one generator column replaced by a target relation
        triv = []
        for k, s, t in self.blocks:
            R = t.relations
            for j in range(s.ngens):
                for rc in range(R.cols):
                    col = [0] * self.nvars
                    for i in range(t.ngens):
                        if R.data[i][rc]:
                            col[self._var(k, i, j)] = R.data[i][rc]
                    triv.append(col)
        Qgens = Matrix.from_cols(triv, self.nvars) if triv else Matrix.zeros(self.nvars, 0)
        self.basis = P
        self.group = presented_subquotient(self.ring, P, Qgens)

    def witness(self, j):
        """The j-th basis family, as {key: Matrix}."""
        return self.family_from_coords([1 if i == j else 0
                                        for i in range(self.basis.cols)])

    def witnesses(self):
        return [self.witness(j) for j in range(self.basis.cols)]

    def family_from_coords(self, coords):
        vec = self.basis.mul_vec(coords)
        fam = {}
        for k, s, t in self.blocks:
            off = self.offsets[k]
            m = Matrix.zeros(t.ngens, s.ngens)
            for j in range(s.ngens):
                for i in range(t.ngens):
                    m.data[i][j] = vec[off + j * t.ngens + i]
            fam[k] = m
        return fam

    def all_families(self):
        """Every map family, for finite lattices."""
        for coords in self.group.elements():
            yield self.family_from_coords(coords)


def hom_group(A, B):
    """The group of homomorphisms A -> B in canonical form.

    >>> str(hom_group(FpGroup(Z, 1, Matrix([[4]])), FpGroup(Z, 1, Matrix([[6]]))))
    'Z/2'
    """
    if A.ring != B.ring:
        raise RingMismatch("hom over mixed rings")
    return MapLattice(A.ring, [("f", A, B)], []).group


def hom_maps(A, B):
    """Hom group together with GroupMap witnesses for its generators."""
    lat = MapLattice(A.ring, [("f", A, B)], [])
    gens = [GroupMap(A, B, fam["f"]) for fam in lat.witnesses()]
    return lat.group, gens
