"""Cochain spaces of the Poisson bicomplex and their coboundary matrices.

A (m, n)-cochain is a linear map P^(tensor m) (x) Wedge^n P -> V killed by
all signed (i, m-i)-shuffle sums of its tensor arguments (0 < i < m).  The
total complex in degree k is the direct sum of the (m, n) blocks with
m + n = k and m != 1; the total coboundary combines a Harrison-type
differential on the tensor slots with a Chevalley-Eilenberg differential
on the wedge slots, the latter weighted by (-1)^m.

Ambient coordinates for a block are laid out with the tensor multi-index
outermost (lexicographic), then the strictly increasing wedge tuple, then
the module coordinate innermost.  Restricted bases are the canonical
reduced-echelon kernel bases of the shuffle constraints, which makes every
matrix here reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    PoissonAlgebra,
    Representation,
    ValidationReport,
    Violation,
    validate_representation,
)
from .errors import BidegreeError, CapacityError, InvalidInputError, StructureError
from .matrix import Matrix, ZERO, kernel_basis, solve, vec_is_zero

DEFAULT_MAX_DEGREE = 3
MAX_DEGREE_LIMIT = 4
AMBIENT_CAP = 20000
ENV_MAX_DEGREE = "PCOHO_MAX_DEGREE"


def resolve_max_degree(value: Optional[int] = None) -> int:
    if value is None:
        raw = os.environ.get(ENV_MAX_DEGREE)
        value = int(raw) if raw else DEFAULT_MAX_DEGREE
    if value < 0:
        raise CapacityError("max degree must be nonnegative")
    if value > MAX_DEGREE_LIMIT:
        raise CapacityError(f"max degree {value} exceeds the hard limit {MAX_DEGREE_LIMIT}")
    return value


def _perm_sign(seq: Sequence[int]) -> int:
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def shuffle_placements(i: int, m: int) -> tuple:
    """All (i, m-i)-shuffles as (sign, placement) with placement[k] the
    target position of argument k."""
    out = []
    for chosen in itertools.combinations(range(m), i):
        rest = [p for p in range(m) if p not in chosen]
        img = list(chosen) + rest
        out.append((_perm_sign(img), tuple(img)))
    return tuple(out)


def sort_wedge(args: Sequence[int]) -> Tuple[int, Optional[tuple]]:
    """Sign and sorted tuple of wedge arguments; (0, None) on a repeat."""
    items = list(args)
    if len(set(items)) != len(items):
        return 0, None
    sign = 1
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            if items[a] > items[b]:
                items[a], items[b] = items[b], items[a]
                sign = -sign
    return sign, tuple(items)


@lru_cache(maxsize=None)
def _tensor_shuffle_kernel(m: int, q: int):
    """Canonical kernel basis of the shuffle constraints on the bare tensor
    factor [q]^m; returns (columns, free_indices) with columns[j] a tuple."""
    tuples = list(itertools.product(range(q), repeat=m))
    index = {t: i for i, t in enumerate(tuples)}
    rows = []
    for i in range(1, m):
        for t in tuples:
            row = [0] * len(tuples)
            for sign, placement in shuffle_placements(i, m):
                shuffled = [0] * m
                for k in range(m):
                    shuffled[placement[k]] = t[k]
                row[index[tuple(shuffled)]] += sign
            rows.append(row)
    kb = kernel_basis(Matrix(rows))
    cols = [kb.column_vector(j) for j in range(kb.cols)]
    free = []
    for col in cols:
        ones = [i for i, x in enumerate(col) if x == 1]
        # canonical kernel columns carry the identity pattern on free slots
        free_slot = next(i for i in ones if all(c is col or c[i] == 0 for c in cols))
        free.append(free_slot)
    return tuple(cols), tuple(free)


class CochainSpace:
    """Index bookkeeping for the ambient space Hom(P^m (x) Wedge^n P, V)."""

    def __init__(self, p: PoissonAlgebra, v: Representation, m: int, n: int,
                 ambient_cap: int = AMBIENT_CAP):
        if m < 0 or n < 0:
            raise BidegreeError(f"negative bidegree ({m}, {n})")
        self.p, self.v, self.m, self.n = p, v, m, n
        self.tensors = list(itertools.product(range(p.dim), repeat=m))
        self.wedges = list(itertools.combinations(range(p.dim), n))
        self.tindex = {t: i for i, t in enumerate(self.tensors)}
        self.windex = {w: i for i, w in enumerate(self.wedges)}
        self.vdim = v.dim
        self.ambient_dim = len(self.tensors) * len(self.wedges) * v.dim
        if self.ambient_dim > ambient_cap:
            raise CapacityError(
                f"ambient dimension {self.ambient_dim} of block ({m}, {n}) exceeds cap {ambient_cap}")

    def idx(self, t: tuple, w: tuple, a: int) -> int:
        return (self.tindex[t] * len(self.wedges) + self.windex[w]) * self.vdim + a


class CochainBasis:
    """Restricted basis of the (m, n)-cochain space.

    For m >= 2 the columns expand the canonical shuffle-kernel basis of the
    tensor factor by the identity on wedge and module coordinates; for
    m in {0, 1} the space is the full ambient space.
    """

    def __init__(self, space: CochainSpace):
        self.space = space
        m, q = space.m, space.p.dim
        if m >= 2:
            cols, free = _tensor_shuffle_kernel(m, q)
            self._tcols, self._tfree = cols, free
        else:
            self._tcols = None
            self._tfree = tuple(range(len(space.tensors)))
        self.dim = len(self._tfree) * len(space.wedges) * space.vdim
        self._matrix = None

    @property
    def bidegree(self):
        return (self.space.m, self.space.n)

    @property
    def ambient_dim(self):
        return self.space.ambient_dim

    def _split(self, c):
        wcount, vdim = len(self.space.wedges), self.space.vdim
        kcol, rem = divmod(c, wcount * vdim)
        wi, a = divmod(rem, vdim)
        return kcol, wi, a

    def column_ambient(self, c: int) -> Dict[int, Fraction]:
        """Sparse ambient coordinates of restricted basis column c."""
        sp = self.space
        wcount, vdim = len(sp.wedges), sp.vdim
        kcol, wi, a = self._split(c)
        if self._tcols is None:
            return {(kcol * wcount + wi) * vdim + a: Fraction(1)}
        col = self._tcols[kcol]
        return {(ti * wcount + wi) * vdim + a: x for ti, x in enumerate(col) if x}

    def to_ambient(self, coords: Sequence) -> Dict[int, Fraction]:
        out = defaultdict(lambda: ZERO)
        for c, val in enumerate(coords):
            if val:
                for i, x in self.column_ambient(c).items():
                    out[i] += val * x
        return {i: x for i, x in out.items() if x}

    def from_ambient(self, vector: Dict[int, Fraction], verify: bool = True) -> tuple:
        """Coordinates of an ambient vector known to lie in the span.

        The canonical kernel basis is the identity on the free positions, so
        coordinates are read off directly; with ``verify`` the vector is
        reconstructed and compared exactly, catching anything outside the
        span (e.g. a coboundary image violating the shuffle constraints).
        """
        sp = self.space
        wcount, vdim = len(sp.wedges), sp.vdim
        coords = []
        for kcol in range(len(self._tfree)):
            base = self._tfree[kcol] * wcount
            for wi in range(wcount):
                off = (base + wi) * vdim
                for a in range(vdim):
                    coords.append(vector.get(off + a, ZERO))
        if verify:
            recon = self.to_ambient(coords)
            target = {i: x for i, x in vector.items() if x}
            if recon != target:
                raise InvalidInputError(
                    f"vector does not satisfy the ({sp.m}, {sp.n}) cochain constraints")
        return tuple(coords)

    @property
    def basis_matrix(self) -> Matrix:
        if self._matrix is None:
            cols = []
            for c in range(self.dim):
                dense = [ZERO] * self.space.ambient_dim
                for i, x in self.column_ambient(c).items():
                    dense[i] = x
                cols.append(dense)
            self._matrix = Matrix.from_columns(cols, rows=self.space.ambient_dim)
        return self._matrix


def shuffle_constraint_matrix(m: int, n: int, p_dim: int, v_dim: int,
                              ambient_cap: int = AMBIENT_CAP) -> Matrix:
    """Full ambient constraint matrix: one row per (i, input tuple, module
    coordinate) with 0 < i < m; its kernel is the (m, n)-cochain space."""
    ambient = (p_dim ** m) * _ncomb(p_dim, n) * v_dim
    if ambient > ambient_cap:
        raise CapacityError(f"ambient dimension {ambient} exceeds cap {ambient_cap}")
    tensors = list(itertools.product(range(p_dim), repeat=m))
    wedges = list(itertools.combinations(range(p_dim), n))
    tindex = {t: i for i, t in enumerate(tensors)}
    wcount = len(wedges)
    rows = []
    for i in range(1, m):
        for t in tensors:
            for wi in range(wcount):
                for a in range(v_dim):
                    row = [ZERO] * ambient
                    for sign, placement in shuffle_placements(i, m):
                        shuffled = [0] * m
                        for k in range(m):
                            shuffled[placement[k]] = t[k]
                        pos = (tindex[tuple(shuffled)] * wcount + wi) * v_dim + a
                        row[pos] += sign
                    rows.append(row)
    if not rows:
        return Matrix.zeros(0, ambient)
    return Matrix(rows)


def _ncomb(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


class DegreeSpace:
    """Ordered block decomposition of the space of total-degree-k cochains."""

    def __init__(self, k: int, blocks: Sequence[CochainBasis]):
        self.k = k
        self.blocks = tuple(blocks)
        self.offsets = {}
        off = 0
        for b in self.blocks:
            self.offsets[b.bidegree] = off
            off += b.dim
        self.total_dim = off

    def block(self, m: int, n: int) -> CochainBasis:
        for b in self.blocks:
            if b.bidegree == (m, n):
                return b
        raise BidegreeError(f"({m}, {n}) is not a block of degree {self.k}")

    def split(self, coords: Sequence) -> Dict[tuple, tuple]:
        out = {}
        for b in self.blocks:
            off = self.offsets[b.bidegree]
            out[b.bidegree] = tuple(coords[off:off + b.dim])
        return out

    def join(self, parts: Dict[tuple, Sequence]) -> tuple:
        coords = []
        for b in self.blocks:
            part = parts.get(b.bidegree)
            coords.extend(part if part is not None else (ZERO,) * b.dim)
        return tuple(coords)


class CoboundaryMatrix:
    def __init__(self, k: int, matrix: Matrix, block_layout: Dict[tuple, tuple],
                 source: DegreeSpace, target: DegreeSpace):
        self.k = k
        self.matrix = matrix
        self.block_layout = block_layout
        self.source = source
        self.target = target


def degree_blocks(k: int) -> List[tuple]:
    return [(m, k - m) for m in range(k + 1) if m != 1]


class PoissonComplex:
    """Memoizing builder for the cochain spaces and coboundaries of (P, V)."""

    def __init__(self, p: PoissonAlgebra, v: Representation,
                 max_degree: Optional[int] = None, ambient_cap: int = AMBIENT_CAP):
        p.require_valid()
        report = validate_representation(p, v)
        if not report.ok:
            raise InvalidInputError("representation axioms fail", report)
        self.p, self.v = p, v
        self.max_degree = resolve_max_degree(max_degree)
        self.ambient_cap = ambient_cap
        self._spaces: Dict[tuple, CochainSpace] = {}
        self._bases: Dict[tuple, CochainBasis] = {}
        self._ambient_h: Dict[tuple, dict] = {}
        self._ambient_ce: Dict[tuple, dict] = {}
        self._coboundaries: Dict[int, CoboundaryMatrix] = {}

    # -- spaces ---------------------------------------------------------------

    def space(self, m: int, n: int) -> CochainSpace:
        key = (m, n)
        if key not in self._spaces:
            self._spaces[key] = CochainSpace(self.p, self.v, m, n, self.ambient_cap)
        return self._spaces[key]

    def basis(self, m: int, n: int) -> CochainBasis:
        key = (m, n)
        if key not in self._bases:
            self._bases[key] = CochainBasis(self.space(m, n))
        return self._bases[key]

    def degree_space(self, k: int) -> DegreeSpace:
        return DegreeSpace(k, [self.basis(m, n) for m, n in degree_blocks(k)])

    # -- ambient differentials (sparse  {(row, col): Fraction}) ---------------

    def _delta_h_ambient(self, m: int, n: int) -> dict:
        """Harrison-type differential C^{m,n} -> C^{m+1,n} for m >= 1."""
        key = (m, n)
        if key in self._ambient_h:
            return self._ambient_h[key]
        if m < 1:
            raise BidegreeError("raw Harrison differential needs m >= 1")
        p, v = self.p, self.v
        src, tgt = self.space(m, n), self.space(m + 1, n)
        vdim = v.dim
        out: Dict[tuple, Fraction] = {}

        def add(r, c, val):
            if val:
                cur = out.get((r, c))
                new = val if cur is None else cur + val
                if new:
                    out[(r, c)] = new
                elif cur is not None:
                    del out[(r, c)]

        for t in tgt.tensors:
            for w in tgt.wedges:
                for a in range(vdim):
                    row = tgt.idx(t, w, a)
                    mu_first = v.mu[t[0]].row(a)
                    for b in range(vdim):
                        add(row, src.idx(t[1:], w, b), mu_first[b])
                    for i in range(1, m + 1):
                        sgn = -1 if i % 2 else 1
                        prod = p.mult[t[i - 1]][t[i]]
                        for k in range(p.dim):
                            if prod[k]:
                                t2 = t[:i - 1] + (k,) + t[i + 1:]
                                add(row, src.idx(t2, w, a), sgn * prod[k])
                    sgn = -1 if (m + 1) % 2 else 1
                    mu_last = v.mu[t[m]].row(a)
                    for b in range(vdim):
                        add(row, src.idx(t[:-1], w, b), sgn * mu_last[b])
        self._ambient_h[key] = out
        return out

    def _delta_h0_ambient(self, n: int) -> dict:
        """C^{0,n} -> C^{2,n-1}: wedge-to-tensor inclusion then the m=1 map."""
        if n < 1:
            raise BidegreeError("the m=0 Harrison differential needs n >= 1")
        src = self.space(0, n)
        mid = self.space(1, n - 1)
        vdim = self.v.dim
        inclusion: Dict[tuple, int] = {}
        for t in mid.tensors:           # t = (a,)
            for w in mid.wedges:
                sign, sw = sort_wedge((t[0],) + w)
                if sw is None:
                    continue
                for a in range(vdim):
                    inclusion[(mid.idx(t, w, a), src.idx((), sw, a))] = sign
        dh = self._delta_h_ambient(1, n - 1)
        by_col = defaultdict(list)
        for (r, c), val in dh.items():
            by_col[c].append((r, val))
        out: Dict[tuple, Fraction] = {}
        for (mid_row, src_col), isign in inclusion.items():
            for r, val in by_col[mid_row]:
                key = (r, src_col)
                new = out.get(key, ZERO) + isign * val
                if new:
                    out[key] = new
                elif key in out:
                    del out[key]
        return out

    def _delta_ce_ambient(self, m: int, n: int) -> dict:
        key = (m, n)
        if key in self._ambient_ce:
            return self._ambient_ce[key]
        p, v = self.p, self.v
        src, tgt = self.space(m, n), self.space(m, n + 1)
        vdim = v.dim
        out: Dict[tuple, Fraction] = {}

        def add(r, c, val):
            if val:
                cur = out.get((r, c))
                new = val if cur is None else cur + val
                if new:
                    out[(r, c)] = new
                elif cur is not None:
                    del out[(r, c)]

        for t in tgt.tensors:
            for w in tgt.wedges:
                for a in range(vdim):
                    row = tgt.idx(t, w, a)
                    for i in range(1, n + 2):
                        xi = w[i - 1]
                        w_rest = w[:i - 1] + w[i:]
                        sgn = 1 if (i + 1) % 2 == 0 else -1
                        rho_row = v.rho[xi].row(a)
                        for b in range(vdim):
                            add(row, src.idx(t, w_rest, b), sgn * rho_row[b])
                        for j in range(1, m + 1):
                            brk = p.bracket[xi][t[j - 1]]
                            for k in range(p.dim):
                                if brk[k]:
                                    t2 = t[:j - 1] + (k,) + t[j:]
                                    add(row, src.idx(t2, w_rest, a), -sgn * brk[k])
                    for i in range(1, n + 2):
                        for j in range(i + 1, n + 2):
                            xi, xj = w[i - 1], w[j - 1]
                            rest = tuple(x for kk, x in enumerate(w) if kk not in (i - 1, j - 1))
                            sgn = 1 if (i + j) % 2 == 0 else -1
                            brk = p.bracket[xi][xj]
                            for k in range(p.dim):
                                if brk[k]:
                                    ssign, sw = sort_wedge((k,) + rest)
                                    if sw is None:
                                        continue
                                    add(row, src.idx(t, sw, a), sgn * ssign * brk[k])
        self._ambient_ce[key] = out
        return out

    # -- restricted matrices ----------------------------------------------------

    def _restrict(self, sparse: dict, src: CochainBasis, tgt: CochainBasis) -> Matrix:
        by_col = defaultdict(list)
        for (r, c), val in sparse.items():
            by_col[c].append((r, val))
        cols = []
        for c in range(src.dim):
            img = defaultdict(lambda: ZERO)
            for amb_idx, amb_val in src.column_ambient(c).items():
                for r, val in by_col[amb_idx]:
                    img[r] += val * amb_val
            img = {i: x for i, x in img.items() if x}
            cols.append(tgt.from_ambient(img, verify=True))
        return Matrix.from_columns(cols, rows=tgt.dim) if cols else Matrix.zeros(tgt.dim, 0)

    def delta_h(self, m: int, n: int) -> Matrix:
        """Restricted Harrison block: (m,n)->(m+1,n) for m>=2, (0,n)->(2,n-1)."""
        if m == 1:
            raise BidegreeError("m=1 is not a complex source")
        if m == 0:
            if n == 0:
                raise BidegreeError("no Harrison differential out of (0, 0)")
            return self._restrict(self._delta_h0_ambient(n), self.basis(0, n), self.basis(2, n - 1))
        return self._restrict(self._delta_h_ambient(m, n), self.basis(m, n), self.basis(m + 1, n))

    def delta_h_intermediate(self, n: int) -> Matrix:
        """The m=1 Harrison map C^{1,n} -> C^{2,n} (internal intermediate)."""
        return self._restrict(self._delta_h_ambient(1, n), self.basis(1, n), self.basis(2, n))

    def delta_ce(self, m: int, n: int) -> Matrix:
        return self._restrict(self._delta_ce_ambient(m, n), self.basis(m, n), self.basis(m, n + 1))

    def coboundary(self, k: int) -> CoboundaryMatrix:
        if k < 0:
            raise BidegreeError("degree must be nonnegative")
        if k > self.max_degree:
            raise CapacityError(f"degree {k} exceeds the configured max degree {self.max_degree}")
        if k in self._coboundaries:
            return self._coboundaries[k]
        source = self.degree_space(k)
        target = self.degree_space(k + 1)
        rows = [[ZERO] * source.total_dim for _ in range(target.total_dim)]
        layout: Dict[tuple, tuple] = {}

        def place(block: Matrix, sb: tuple, tb: tuple, sign: int):
            if block.is_zero():
                return
            roff, coff = target.offsets[tb], source.offsets[sb]
            for i in range(block.rows):
                for j in range(block.cols):
                    val = block[i, j]
                    if val:
                        rows[roff + i][coff + j] += sign * val
            layout.setdefault(sb, ())
            layout[sb] = layout[sb] + (tb,)

        for m, n in degree_blocks(k):
            if self.basis(m, n).dim == 0:
                continue
            if m >= 2:
                place(self.delta_h(m, n), (m, n), (m + 1, n), 1)
            elif m == 0 and n >= 1:
                place(self.delta_h(0, n), (0, n), (2, n - 1), 1)
            ce_sign = 1 if m % 2 == 0 else -1
            place(self.delta_ce(m, n), (m, n), (m, n + 1), ce_sign)
        if target.total_dim == 0 or source.total_dim == 0:
            matrix = Matrix.zeros(target.total_dim, source.total_dim)
        else:
            matrix = Matrix(rows)
        cb = CoboundaryMatrix(k, matrix, layout, source, target)
        self._coboundaries[k] = cb
        return cb


# ---------------------------------------------------------------------------
# convenience wrappers


def cochain_basis(p: PoissonAlgebra, v: Representation, m: int, n: int) -> CochainBasis:
    return PoissonComplex(p, v).basis(m, n)


def delta_h(p: PoissonAlgebra, v: Representation, m: int, n: int) -> Matrix:
    return PoissonComplex(p, v).delta_h(m, n)


def delta_ce(p: PoissonAlgebra, v: Representation, m: int, n: int) -> Matrix:
    return PoissonComplex(p, v).delta_ce(m, n)


def coboundary(p: PoissonAlgebra, v: Representation, k: int,
               max_degree: Optional[int] = None) -> CoboundaryMatrix:
    return PoissonComplex(p, v, max_degree=max_degree).coboundary(k)


# ---------------------------------------------------------------------------
# degree-2 cocycle pairs (h, H)


def as_pair_tensor(data, n: int, vdim: int, antisymmetric: bool):
    """Normalize an n x n x v tensor and check its (anti)symmetry."""
    if len(data) != n:
        raise StructureError("pair tensor first axis mismatch")
    out = []
    for plane in data:
        if len(plane) != n:
            raise StructureError("pair tensor second axis mismatch")
        rows = []
        for row in plane:
            if len(row) != vdim:
                raise StructureError("pair tensor value dimension mismatch")
            rows.append(tuple(Fraction(x) for x in row))
        out.append(tuple(rows))
    t = tuple(out)
    for i in range(n):
        for j in range(n):
            for a in range(vdim):
                if antisymmetric:
                    if t[i][j][a] + t[j][i][a] != 0:
                        raise StructureError("tensor is not antisymmetric")
                elif t[i][j][a] != t[j][i][a]:
                    raise StructureError("tensor is not symmetric")
    return t


def zero_pair(n: int, vdim: int):
    z = tuple((((ZERO,) * vdim,) * n,) * n)
    return z, z


def pair_to_coords(cx: PoissonComplex, h, H) -> tuple:
    """Coordinates of the pair (h, H) in the degree-2 space (blocks (0,2), (2,0))."""
    n, vdim = cx.p.dim, cx.v.dim
    sp20, sp02 = cx.space(2, 0), cx.space(0, 2)
    amb20 = {}
    for i in range(n):
        for j in range(n):
            for a in range(vdim):
                if h[i][j][a]:
                    amb20[sp20.idx((i, j), (), a)] = h[i][j][a]
    amb02 = {}
    for i in range(n):
        for j in range(i + 1, n):
            for a in range(vdim):
                if H[i][j][a]:
                    amb02[sp02.idx((), (i, j), a)] = H[i][j][a]
    c20 = cx.basis(2, 0).from_ambient(amb20, verify=True)
    c02 = cx.basis(0, 2).from_ambient(amb02, verify=True)
    return cx.degree_space(2).join({(2, 0): c20, (0, 2): c02})


def coords_to_pair(cx: PoissonComplex, coords: Sequence):
    n, vdim = cx.p.dim, cx.v.dim
    parts = cx.degree_space(2).split(coords)
    amb20 = cx.basis(2, 0).to_ambient(parts[(2, 0)])
    amb02 = cx.basis(0, 2).to_ambient(parts[(0, 2)])
    sp20, sp02 = cx.space(2, 0), cx.space(0, 2)
    h = [[[ZERO] * vdim for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for a in range(vdim):
                h[i][j][a] = amb20.get(sp20.idx((i, j), (), a), ZERO)
    H = [[[ZERO] * vdim for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for a in range(vdim):
                val = amb02.get(sp02.idx((), (i, j), a), ZERO)
                H[i][j][a] = val
                H[j][i][a] = -val
    freeze = lambda t: tuple(tuple(tuple(row) for row in plane) for plane in t)
    return freeze(h), freeze(H)


def two_cocycle_residuals(p: PoissonAlgebra, v: Representation, h, H):
    """Exact residual tensors of the three degree-2 cocycle identities.

    Returns (r1, r2, r3), each indexed [x][y][z] with values in V: r1 is the
    product-side identity, r2 the bracket cyclic identity, r3 the mixed one.
    """
    p.require_valid()
    n, vdim = p.dim, v.dim
    h = as_pair_tensor(h, n, vdim, antisymmetric=False)
    H = as_pair_tensor(H, n, vdim, antisymmetric=True)

    def t_apply(t, coeffs, j):
        # t(vec, e_j) for a structure-constant expansion vec
        out = [ZERO] * vdim
        for s, cs in enumerate(coeffs):
            if cs:
                for a in range(vdim):
                    out[a] += cs * t[s][j][a]
        return tuple(out)

    r1 = [[[None] * n for _ in range(n)] for _ in range(n)]
    r2 = [[[None] * n for _ in range(n)] for _ in range(n)]
    r3 = [[[None] * n for _ in range(n)] for _ in range(n)]
    for x in range(n):
        for y in range(n):
            for z in range(n):
                acc = list(v.mu[x].apply(h[y][z]))
                for a, val in enumerate(t_apply(h, p.mult[x][y], z)):
                    acc[a] -= val
                for a, val in enumerate(t_apply(h, p.mult[y][z], x)):
                    acc[a] += val
                for a, val in enumerate(v.mu[z].apply(h[x][y])):
                    acc[a] -= val
                r1[x][y][z] = tuple(acc)

                acc = list(v.rho[x].apply(H[y][z]))
                for a, val in enumerate(v.rho[y].apply(H[z][x])):
                    acc[a] += val
                for a, val in enumerate(v.rho[z].apply(H[x][y])):
                    acc[a] += val
                for a, val in enumerate(t_apply(H, p.bracket[y][z], x)):
                    acc[a] -= val          # H(x, {y,z}) = -H({y,z}, x)
                for a, val in enumerate(t_apply(H, p.bracket[z][x], y)):
                    acc[a] -= val
                for a, val in enumerate(t_apply(H, p.bracket[x][y], z)):
                    acc[a] -= val
                r2[x][y][z] = tuple(acc)

                acc = list(v.rho[x].apply(h[y][z]))
                for a, val in enumerate(t_apply(h, p.bracket[x][y], z)):
                    acc[a] -= val
                for a, val in enumerate(t_apply(h, p.bracket[x][z], y)):
                    acc[a] -= val
                for a, val in enumerate(t_apply(H, p.mult[y][z], x)):
                    acc[a] -= val          # H(x, y.z) = -H(y.z, x)
                for a, val in enumerate(v.mu[y].apply(H[x][z])):
                    acc[a] -= val
                for a, val in enumerate(v.mu[z].apply(H[x][y])):
                    acc[a] -= val
                r3[x][y][z] = tuple(acc)
    freeze = lambda t: tuple(tuple(tuple(row) for row in plane) for plane in t)
    return freeze(r1), freeze(r2), freeze(r3)


def two_cocycle_report(p: PoissonAlgebra, v: Representation, h, H) -> ValidationReport:
    r1, r2, r3 = two_cocycle_residuals(p, v, h, H)
    bad = []
    n = p.dim
    for tag, res in (("pois-co1", r1), ("pois-co2", r2), ("pois-co3", r3)):
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if not vec_is_zero(res[x][y][z]):
                        bad.append(Violation(tag, (x, y, z), res[x][y][z]))
    return ValidationReport(bad)


def is_two_cocycle(p: PoissonAlgebra, v: Representation, h, H) -> bool:
    return two_cocycle_report(p, v, h, H).ok


def coboundary_pair_of(cx: PoissonComplex, phi: Matrix):
    """The degree-2 pair that is the total coboundary of a linear map phi: P -> V."""
    p, v = cx.p, cx.v
    n, vdim = p.dim, v.dim
    cols = [phi.column_vector(i) for i in range(n)]
    h = [[None] * n for _ in range(n)]
    H = [[None] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            hv = list(v.mu[x].apply(cols[y]))
            pr = p.mult[x][y]
            for s, cs in enumerate(pr):
                if cs:
                    for a in range(vdim):
                        hv[a] -= cs * cols[s][a]
            for a, val in enumerate(v.mu[y].apply(cols[x])):
                hv[a] += val
            h[x][y] = tuple(hv)
            Hv = list(v.rho[x].apply(cols[y]))
            br = p.bracket[x][y]
            for s, cs in enumerate(br):
                if cs:
                    for a in range(vdim):
                        Hv[a] -= cs * cols[s][a]
            for a, val in enumerate(v.rho[y].apply(cols[x])):
                Hv[a] -= val
            H[x][y] = tuple(Hv)
    return tuple(tuple(r) for r in h), tuple(tuple(r) for r in H)


def pair_sub(h1, H1, h2, H2):
    sub = lambda A, B: tuple(
        tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(p1, p2))
        for p1, p2 in zip(A, B))
    return sub(h1, h2), sub(H1, H2)


def cohomologous_witness(p: PoissonAlgebra, v: Representation, pair1, pair2) -> Optional[Matrix]:
    """A linear map phi with (h - h', H - H') equal to its coboundary, or None.

    Both inputs must be degree-2 cocycles.  Any witness found is re-verified
    by direct substitution into the defining identities, independently of
    the matrix route used to solve for it.
    """
    h1, H1 = pair1
    h2, H2 = pair2
    rep1 = two_cocycle_report(p, v, h1, H1)
    if not rep1.ok:
        raise InvalidInputError("first pair is not a cocycle", rep1)
    rep2 = two_cocycle_report(p, v, h2, H2)
    if not rep2.ok:
        raise InvalidInputError("second pair is not a cocycle", rep2)
    cx = PoissonComplex(p, v)
    dh, dH = pair_sub(h1, H1, h2, H2)
    target = pair_to_coords(cx, dh, dH)
    d1 = cx.coboundary(1).matrix
    x = solve(d1, target)
    if x is None:
        return None
    vdim, n = v.dim, p.dim
    phi = Matrix([[x[wi * vdim + a] for wi in range(n)] for a in range(vdim)])
    got_h, got_H = coboundary_pair_of(cx, phi)
    if (got_h, got_H) != (dh, dH):
        raise AssertionError("witness failed re-substitution")
    return phi
