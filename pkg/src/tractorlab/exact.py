"""
Exact rational linear algebra.

Matrices are stored sparsely as one ``{col: Fraction}`` dict per row.  Rank,
kernel and linear solves split a matrix into the connected components of
its row/column incidence graph and run fraction-free (Bareiss) elimination
on each block separately.  For the weight-homogeneous operators built in
this package the blocks are small, which is what keeps the large cochain
complexes exact and fast.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a reduced Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % (x,))
    return Fraction(x)


def fstr(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


class RatMatrix:
    """Sparse matrix over the rationals with exact entrywise equality."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        assert len(rows) == nrows
        self._rows = rows

    # -- construction ---------------------------------------------------

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def from_dense(cls, data, ncols=None):
        data = [list(r) for r in data]
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged row in dense matrix")
            rows.append({j: as_rational(v) for j, v in enumerate(r) if v != 0})
        return cls(nrows, ncols, rows)

    @classmethod
    def from_entries(cls, nrows, ncols, entries):
        A = cls(nrows, ncols)
        for (i, j), v in entries.items():
            A[i, j] = v
        return A

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows=None):
        if nrows is None:
            nrows = len(columns[0]) if columns else 0
        A = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise ValueError("column length mismatch")
            for i, v in enumerate(col):
                if v != 0:
                    A._rows[i][j] = as_rational(v)
        return A

    def copy(self):
        return RatMatrix(self.nrows, self.ncols, [dict(r) for r in self._rows])

    # -- access ---------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i].get(j, Fraction(0))

    def __setitem__(self, idx, value):
        i, j = idx
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(idx)
        value = as_rational(value)
        if value == 0:
            self._rows[i].pop(j, None)
        else:
            self._rows[i][j] = value

    def row(self, i) -> dict:
        return self._rows[i]

    def entries(self):
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                yield (i, j), v

    @property
    def nnz(self):
        return sum(len(r) for r in self._rows)

    def column(self, j) -> list:
        return [r.get(j, Fraction(0)) for r in self._rows]

    def to_dense(self) -> list:
        out = []
        for r in self._rows:
            row = [Fraction(0)] * self.ncols
            for j, v in r.items():
                row[j] = v
            out.append(row)
        return out

    def trace(self):
        assert self.nrows == self.ncols
        return sum((r.get(i, Fraction(0)) for i, r in enumerate(self._rows)), Fraction(0))

    def __repr__(self):
        return "RatMatrix(%d, %d, nnz=%d)" % (self.nrows, self.ncols, self.nnz)

    def __str__(self):
        cells = [[fstr(v) for v in row] for row in self.to_dense()]
        w = max([len(c) for row in cells for c in row] + [1])
        return "\n".join("[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells)

    # -- algebra --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    __hash__ = None

    def is_zero(self):
        return all(not r for r in self._rows)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch %s + %s" % (self.shape, other.shape))
        rows = []
        for a, b in zip(self._rows, other._rows):
            r = dict(a)
            for j, v in b.items():
                s = r.get(j, 0) + v
                if s:
                    r[j] = s
                else:
                    r.pop(j, None)
            rows.append(r)
        return RatMatrix(self.nrows, self.ncols, rows)

    def __neg__(self):
        return RatMatrix(self.nrows, self.ncols, [{j: -v for j, v in r.items()} for r in self._rows])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = as_rational(c)
        if c == 0:
            return RatMatrix(self.nrows, self.ncols)
        return RatMatrix(self.nrows, self.ncols, [{j: c * v for j, v in r.items()} for r in self._rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch %s @ %s" % (self.shape, other.shape))
            orows = other._rows
            rows = []
            for a in self._rows:
                r = {}
                for k, v in a.items():
                    for j, w in orows[k].items():
                        r[j] = r.get(j, 0) + v * w
                rows.append({j: v for j, v in r.items() if v})
            return RatMatrix(self.nrows, other.ncols, rows)
        return self.apply(other)

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.ncols:
            raise ValueError("vector length %d != %d columns" % (len(vec), self.ncols))
        out = []
        for r in self._rows:
            s = Fraction(0)
            for j, v in r.items():
                x = vec[j]
                if x:
                    s += v * x
            out.append(s)
        return out

    @property
    def T(self):
        rows = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                rows[j][i] = v
        return RatMatrix(self.ncols, self.nrows, rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]):
        cmap = {c: k for k, c in enumerate(cols)}
        out = []
        for i in rows:
            out.append({cmap[j]: v for j, v in self._rows[i].items() if j in cmap})
        return RatMatrix(len(rows), len(cols), out)

    @staticmethod
    def hstack(*mats):
        nrows = mats[0].nrows
        rows = [{} for _ in range(nrows)]
        off = 0
        for M in mats:
            if M.nrows != nrows:
                raise ValueError("hstack row mismatch")
            for i, r in enumerate(M._rows):
                for j, v in r.items():
                    rows[i][j + off] = v
            off += M.ncols
        return RatMatrix(nrows, off, rows)

    @staticmethod
    def vstack(*mats):
        ncols = mats[0].ncols
        rows = []
        for M in mats:
            if M.ncols != ncols:
                raise ValueError("vstack column mismatch")
            rows.extend(dict(r) for r in M._rows)
        return RatMatrix(len(rows), ncols, rows)

    def commutator(self, other):
        return self @ other - other @ self


# ---------------------------------------------------------------------------
# block decomposition


def _components(A: RatMatrix):
    """Connected components of the bipartite row/column graph.

    Returns a list of (rows, cols) pairs; zero rows and zero columns are
    omitted.
    """
    m, n = A.shape
    parent = list(range(m + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, r in enumerate(A._rows):
        ri = find(i)
        for j in r:
            cj = find(m + j)
            if cj != ri:
                parent[cj] = ri
                ri = find(i)
    groups = {}
    for i, r in enumerate(A._rows):
        if r:
            groups.setdefault(find(i), ([], []))[0].append(i)
    for j in range(n):
        root = find(m + j)
        if root in groups:
            groups[root][1].append(j)
    return list(groups.values())


def _integer_rows(A: RatMatrix, rows, cols):
    """Dense integer rows, each row scaled by the lcm of its denominators."""
    cmap = {c: k for k, c in enumerate(cols)}
    out = []
    for i in rows:
        r = A._rows[i]
        den = 1
        for v in r.values():
            den = lcm(den, v.denominator)
        row = [0] * len(cols)
        for j, v in r.items():
            k = cmap.get(j)
            if k is not None:
                row[k] = v.numerator * (den // v.denominator)
        out.append(row)
    return out


def bareiss_echelon(M: list, ncols: int):
    """In-place fraction-free row echelon form of an integer matrix.

    Returns (echelon_rows, pivot_columns).  Every intermediate entry is a
    minor of the input, so all divisions are exact.
    """
    M = [list(r) for r in M]
    nrows = len(M)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = None
        for i in range(r, nrows):
            if M[i][c]:
                p = i
                break
        if p is None:
            continue
        if p != r:
            M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        Mr = M[r]
        for i in range(r + 1, nrows):
            Mi = M[i]
            a = Mi[c]
            if a:
                for j in range(c + 1, ncols):
                    Mi[j] = (piv * Mi[j] - a * Mr[j]) // prev
            else:
                # the row still has to be rescaled to stay a minor
                for j in range(c + 1, ncols):
                    if Mi[j]:
                        Mi[j] = (piv * Mi[j]) // prev
            Mi[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return M[:r], pivots


def _block_echelon(A, rows, cols):
    M = _integer_rows(A, rows, cols)
    return bareiss_echelon(M, len(cols))


def rank(A: RatMatrix) -> int:
    total = 0
    for rows, cols in _components(A):
        if len(rows) == 1 or len(cols) == 1:
            total += 1
            continue
        _, piv = _block_echelon(A, rows, cols)
        total += len(piv)
    return total


def nullity(A: RatMatrix) -> int:
    return A.ncols - rank(A)


def _back_substitute(E, pivots, ncols, rhs=None, free_values=None):
    """Solve the echelon system E x = rhs (rhs defaults to 0)."""
    x = [Fraction(0)] * ncols
    if free_values:
        for j, v in free_values.items():
            x[j] = Fraction(v)
    for r in range(len(pivots) - 1, -1, -1):
        p = pivots[r]
        row = E[r]
        s = Fraction(rhs[r]) if rhs is not None else Fraction(0)
        for j in range(p + 1, ncols):
            if row[j] and x[j]:
                s -= row[j] * x[j]
        x[p] = s / row[p]
    return x


def nullspace(A: RatMatrix) -> list:
    """Exact basis of the kernel, one list of Fractions per vector.

    Vectors are supported on single blocks and ordered by their free column,
    so the output is deterministic.
    """
    n = A.ncols
    basis = []
    covered = set()
    for rows, cols in _components(A):
        covered.update(cols)
        E, piv = _block_echelon(A, rows, cols)
        pset = set(piv)
        for f in range(len(cols)):
            if f in pset:
                continue
            x = _back_substitute(E, piv, len(cols), free_values={f: 1})
            v = [Fraction(0)] * n
            for k, c in enumerate(cols):
                v[c] = x[k]
            basis.append((cols[f], v))
    for j in range(n):
        if j not in covered:
            v = [Fraction(0)] * n
            v[j] = Fraction(1)
            basis.append((j, v))
    basis.sort(key=lambda t: t[0])
    return [v for _, v in basis]


def pivot_columns(A: RatMatrix) -> list:
    """Indices of a set of columns forming a basis of the column space."""
    out = []
    for rows, cols in _components(A):
        _, piv = _block_echelon(A, rows, cols)
        out.extend(cols[p] for p in piv)
    return sorted(out)


def solve(A: RatMatrix, b: Sequence) -> list:
    """One exact solution of A x = b (free variables set to zero).

    Raises ValueError when b is not in the column space of A.
    """
    if len(b) != A.nrows:
        raise ValueError("right-hand side has length %d, expected %d" % (len(b), A.nrows))
    b = [as_rational(v) for v in b]
    x = [Fraction(0)] * A.ncols
    touched = set()
    for rows, cols in _components(A):
        touched.update(rows)
        aug_cols = list(cols) + [None]
        cmap = {c: k for k, c in enumerate(cols)}
        M = []
        for i in rows:
            r = A._rows[i]
            den = b[i].denominator
            for v in r.values():
                den = lcm(den, v.denominator)
            row = [0] * (len(cols) + 1)
            for j, v in r.items():
                row[cmap[j]] = v.numerator * (den // v.denominator)
            row[-1] = b[i].numerator * (den // b[i].denominator)
            M.append(row)
        E, piv = bareiss_echelon(M, len(aug_cols))
        if piv and piv[-1] == len(cols):
            raise ValueError("inconsistent linear system")
        xs = _back_substitute([r[:-1] for r in E], piv, len(cols), rhs=[r[-1] for r in E])
        for k, c in enumerate(cols):
            x[c] = xs[k]
    for i in range(A.nrows):
        if i not in touched and b[i] != 0:
            raise ValueError("inconsistent linear system")
    return x


def in_column_space(A: RatMatrix, b: Sequence) -> bool:
    try:
        solve(A, b)
    except ValueError:
        return False
    return True


def vec_is_zero(v: Iterable) -> bool:
    return all(x == 0 for x in v)


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_scale(c, v):
    c = as_rational(c)
    return [c * a for a in v]


def primitive_integer(v: Sequence) -> list:
    """Scale a rational vector to coprime integers (first nonzero positive)."""
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        return ints
    ints = [a // g for a in ints]
    for a in ints:
        if a:
            if a < 0:
                ints = [-t for t in ints]
            break
    return ints
