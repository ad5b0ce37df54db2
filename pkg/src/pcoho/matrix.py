"""Dense exact-rational matrices and fraction-free elimination.

Everything here works over Q via ``fractions.Fraction``: no floats, no
tolerances.  Reduced row echelon forms are computed with Bareiss-style
fraction-free forward elimination (integer arithmetic, exact divisions)
followed by a normalization pass, so results are the unique RREF over Q
and are bit-identical across runs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import StructureError

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# vectors (plain tuples of Fractions)


def vec(entries: Iterable) -> tuple:
    return tuple(frac(x) for x in entries)


def vec_zero(n: int) -> tuple:
    return (ZERO,) * n


def vec_add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def vec_scale(c, a: Sequence) -> tuple:
    c = frac(c)
    return tuple(c * x for x in a)


def vec_is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


class Matrix:
    """Immutable row-major matrix of exact rationals."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data):
        rows = tuple(tuple(frac(x) for x in row) for row in data)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise StructureError("ragged matrix rows")
        else:
            ncols = 0
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "data", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._raw(rows, cols, ((ZERO,) * cols,) * rows)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(n, n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def column(cls, entries: Iterable) -> "Matrix":
        return cls([[x] for x in entries])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: Optional[int] = None) -> "Matrix":
        if not columns:
            return cls.zeros(rows if rows is not None else 0, 0)
        n = len(columns[0])
        if rows is not None and rows != n:
            raise StructureError(f"columns have length {n}, expected {rows}")
        if n == 0:
            return cls.zeros(0, len(columns))
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(n)])

    @classmethod
    def _raw(cls, rows: int, cols: int, data: tuple) -> "Matrix":
        m = object.__new__(cls)
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "cols", cols)
        object.__setattr__(m, "data", data)
        return m

    # -- access --------------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def column_vector(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self):
        return [self.column_vector(j) for j in range(self.cols)]

    # -- algebra --------------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix._raw(
            self.rows, self.cols,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.data, other.data)),
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix._raw(
            self.rows, self.cols,
            tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.data, other.data)),
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.data))

    def scale(self, c) -> "Matrix":
        c = frac(c)
        return Matrix._raw(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise StructureError(f"cannot multiply {self.shape} by {other.shape}")
        ot = tuple(zip(*other.data)) if other.data else ()
        out = []
        for r in self.data:
            out.append(tuple(
                sum((a * b for a, b in zip(r, c) if a), ZERO) for c in ot
            ))
        return Matrix._raw(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector, returned as a tuple."""
        if self.cols != len(v):
            raise StructureError(f"cannot apply {self.shape} to vector of length {len(v)}")
        return tuple(sum((a * b for a, b in zip(r, v) if a), ZERO) for r in self.data)

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.cols, self.rows, tuple(zip(*self.data)) if self.data else ())

    # -- predicates -----------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(all(a == 0 for a in r) for r in self.data)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self.data)
        return f"Matrix({self.rows}x{self.cols}: {body})"

    def _same_shape(self, other: "Matrix"):
        if self.shape != other.shape:
            raise StructureError(f"shape mismatch {self.shape} vs {other.shape}")


def hstack(matrices: Sequence[Matrix]) -> Matrix:
    mats = [m for m in matrices]
    if not mats:
        return Matrix.zeros(0, 0)
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise StructureError("hstack: row counts differ")
    return Matrix([sum((list(m.data[i]) for m in mats), []) for i in range(rows)])


def vstack(matrices: Sequence[Matrix]) -> Matrix:
    mats = [m for m in matrices]
    if not mats:
        return Matrix.zeros(0, 0)
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise StructureError("vstack: column counts differ")
    out = []
    for m in mats:
        out.extend(m.data)
    return Matrix(out)


# ---------------------------------------------------------------------------
# elimination


def _integer_rows(m: Matrix):
    """Scale each row by the lcm of denominators and divide out the gcd.

    Row scalings do not change the row space, hence not the RREF.
    """
    out = []
    for r in m.data:
        den = 1
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in r]
        g = 0
        for x in ints:
            g = gcd(g, x)
        if g > 1:
            ints = [x // g for x in ints]
        out.append(ints)
    return out


def rref(m: Matrix):
    """Unique reduced row echelon form over Q.

    Returns ``(R, pivots, rank)``.  Forward elimination is fraction-free
    (Bareiss single-step: every interior division is exact by Sylvester's
    identity); pivots are the first nonzero entry in column order.
    """
    rows = _integer_rows(m)
    nr, nc = m.rows, m.cols
    pivots = []
    r = 0
    prev = 1
    for c in range(nc):
        k = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if k is None:
            continue
        if k != r:
            rows[r], rows[k] = rows[k], rows[r]
        p = rows[r][c]
        for i in range(r + 1, nr):
            ric = rows[i][c]
            new = []
            for j in range(nc):
                val = rows[i][j] * p - ric * rows[r][j]
                q, rem = divmod(val, prev)
                if rem:
                    raise ArithmeticError("Bareiss division not exact")
                new.append(q)
            rows[i] = new
        pivots.append(c)
        prev = p
        r += 1
        if r == nr:
            break
    # normalize pivot rows to Fractions and back-eliminate
    frows = [[ZERO] * nc for _ in range(nr)]
    for i in range(len(pivots)):
        p = rows[i][pivots[i]]
        frows[i] = [Fraction(x, p) for x in rows[i]]
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        for u in range(i):
            f = frows[u][c]
            if f:
                frows[u] = [a - f * b for a, b in zip(frows[u], frows[i])]
    R = Matrix(frows)
    return R, tuple(pivots), len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[2]


def kernel_basis(m: Matrix) -> Matrix:
    """Canonical basis of the right kernel (columns), one per free column.

    The basis carries the identity pattern on the free coordinates: entry
    ``free[j]`` of column ``j`` is 1 and every other free coordinate is 0.
    """
    R, pivots, rk = rref(m)
    nc = m.cols
    pivset = set(pivots)
    free = [c for c in range(nc) if c not in pivset]
    cols = []
    for f in free:
        v = [ZERO] * nc
        v[f] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -R[i, f]
        cols.append(v)
    return Matrix.from_columns(cols, rows=nc)


def solve(m: Matrix, b: Sequence) -> Optional[tuple]:
    """One exact solution of ``m x = b`` (free variables set to 0), or None."""
    if len(b) != m.rows:
        raise StructureError("solve: rhs length mismatch")
    aug = hstack([m, Matrix.column(b)])
    R, pivots, rk = rref(aug)
    if any(p == m.cols for p in pivots):
        return None
    x = [ZERO] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = R[i, m.cols]
    return tuple(x)


def solve_matrix(m: Matrix, b: Matrix) -> Optional[Matrix]:
    """Solve ``m X = b`` columnwise; None if any column is unsolvable."""
    cols = []
    for j in range(b.cols):
        x = solve(m, b.column_vector(j))
        if x is None:
            return None
        cols.append(x)
    return Matrix.from_columns(cols, rows=m.cols)


def inverse(m: Matrix) -> Optional[Matrix]:
    if not m.is_square():
        return None
    x = solve_matrix(m, Matrix.identity(m.rows))
    if x is None or x * m != Matrix.identity(m.rows):
        return None
    return x


def in_column_span(m: Matrix, v: Sequence) -> bool:
    return solve(m, v) is not None


def column_space_equal(a: Matrix, b: Matrix) -> bool:
    """Exact subspace equality of the column spans."""
    if a.rows != b.rows:
        return False
    ra, rb = rank(a), rank(b)
    return ra == rb == rank(hstack([a, b]))
