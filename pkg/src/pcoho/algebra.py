"""Structure-constant models of Poisson algebras and their representations.

A Poisson algebra is stored as two rank-3 tensors over Q: ``mult[i][j][k]``
with e_i . e_j = sum_k mult[i][j][k] e_k, and ``bracket`` likewise for the
Lie bracket.  Validators check every axiom on every basis tuple and report
exact residuals; nothing is ever tested approximately.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

from .errors import CapacityError, InvalidInputError, StructureError
from .matrix import Matrix, ZERO, frac, inverse, vec_add, vec_is_zero, vec_sub, vec_zero

DIM_CAP = 16


class Violation(NamedTuple):
    identity: str            # stable tag, e.g. "jacobi" or "pois-co1"
    where: tuple             # basis indices the identity was evaluated at
    residual: tuple          # exact residual vector

    def to_dict(self):
        return {
            "identity": self.identity,
            "where": list(self.where),
            "residual": [format_scalar(x) for x in self.residual],
        }


class ValidationReport:
    """Outcome of an exhaustive axiom check."""

    def __init__(self, violations=()):
        self.violations = tuple(violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def first_per_identity(self):
        seen = {}
        for v in self.violations:
            seen.setdefault(v.identity, v)
        return seen

    def merged(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.violations + other.violations)

    def to_dict(self):
        return {
            "ok": self.ok,
            "violationCount": len(self.violations),
            "firstPerIdentity": {tag: v.to_dict() for tag, v in
                                 sorted(self.first_per_identity().items())},
            "violations": [v.to_dict() for v in self.violations],
        }

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok)"
        tags = sorted({v.identity for v in self.violations})
        return f"ValidationReport({len(self.violations)} violations: {', '.join(tags)})"


def format_scalar(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_scalar(s: Union[str, int]) -> Fraction:
    """Parse "p/q" or "p"; the denominator must be positive."""
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise StructureError(f"scalar must be a string, got {type(s).__name__}")
    txt = s.strip()
    if "/" in txt:
        num, _, den = txt.partition("/")
        try:
            n, d = int(num), int(den)
        except ValueError as e:
            raise StructureError(f"malformed rational {s!r}") from e
        if d <= 0:
            raise StructureError(f"denominator must be positive in {s!r}")
        return Fraction(n, d)
    try:
        return Fraction(int(txt))
    except ValueError as e:
        raise StructureError(f"malformed rational {s!r}") from e


def as_tensor3(data, d1: int, d2: int, d3: int):
    """Normalize nested data into a d1 x d2 x d3 tuple tensor of Fractions."""
    if len(data) != d1:
        raise StructureError(f"tensor first axis {len(data)} != {d1}")
    out = []
    for plane in data:
        if len(plane) != d2:
            raise StructureError(f"tensor second axis {len(plane)} != {d2}")
        rows = []
        for row in plane:
            if len(row) != d3:
                raise StructureError(f"tensor third axis {len(row)} != {d3}")
            rows.append(tuple(frac(x) for x in row))
        out.append(tuple(rows))
    return tuple(out)


def zero_tensor3(d1: int, d2: int, d3: int):
    return tuple((((ZERO,) * d3,) * d2,) * d1)


class PoissonAlgebra:
    """Finite-dimensional Poisson algebra given by structure constants.

    Construction checks shapes and the dimension cap only; axiom validity
    is computed eagerly into a cached report so invalid inputs can still be
    inspected.  Operations that need a valid algebra call ``require_valid``.
    """

    __slots__ = ("dim", "mult", "bracket", "labels", "_report")

    def __init__(self, dim: int, mult, bracket, labels=None):
        if dim < 0:
            raise StructureError("dimension must be nonnegative")
        if dim > DIM_CAP:
            raise CapacityError(f"dimension {dim} exceeds cap {DIM_CAP}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "mult", as_tensor3(mult, dim, dim, dim))
        object.__setattr__(self, "bracket", as_tensor3(bracket, dim, dim, dim))
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != dim:
                raise StructureError("labels length != dim")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_report", None)

    def __setattr__(self, name, value):
        raise AttributeError("PoissonAlgebra is immutable")

    @classmethod
    def abelian(cls, dim: int) -> "PoissonAlgebra":
        z = zero_tensor3(dim, dim, dim)
        return cls(dim, z, z)

    # products of coordinate vectors -----------------------------------------

    def product(self, x: Sequence, y: Sequence) -> tuple:
        return _contract(self.mult, x, y, self.dim)

    def bracket_of(self, x: Sequence, y: Sequence) -> tuple:
        return _contract(self.bracket, x, y, self.dim)

    def basis_vector(self, i: int) -> tuple:
        return tuple(Fraction(1) if j == i else ZERO for j in range(self.dim))

    # validity -----------------------------------------------------------------

    def validation(self) -> ValidationReport:
        if self._report is None:
            object.__setattr__(self, "_report", validate_poisson(self))
        return self._report

    def is_valid(self) -> bool:
        return self.validation().ok

    def require_valid(self):
        rep = self.validation()
        if not rep.ok:
            raise InvalidInputError("Poisson axioms fail", rep)
        return self

    def __eq__(self, other):
        return (
            isinstance(other, PoissonAlgebra)
            and self.dim == other.dim
            and self.mult == other.mult
            and self.bracket == other.bracket
        )

    def __hash__(self):
        return hash((self.dim, self.mult, self.bracket))

    def __repr__(self):
        return f"PoissonAlgebra(dim={self.dim})"


def _contract(tensor, x, y, dim):
    out = [ZERO] * dim
    for i, xi in enumerate(x):
        if not xi:
            continue
        ti = tensor[i]
        for j, yj in enumerate(y):
            if not yj:
                continue
            c = xi * yj
            row = ti[j]
            for k in range(dim):
                if row[k]:
                    out[k] += c * row[k]
    return tuple(out)


def validate_poisson(p: PoissonAlgebra) -> ValidationReport:
    """Check all five axioms on all basis tuples, with exact residuals."""
    n = p.dim
    c, b = p.mult, p.bracket
    bad = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if c[i][j][k] != c[j][i][k]:
                    bad.append(Violation("comm", (i, j), vec_sub(c[i][j], c[j][i])))
                    break
    for i in range(n):
        for j in range(n):
            if any(b[i][j][k] + b[j][i][k] != 0 for k in range(n)):
                bad.append(Violation("antisym", (i, j), vec_add(b[i][j], b[j][i])))
    ei = [p.basis_vector(i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            for l in range(n):
                r = vec_sub(p.product(p.product(ei[i], ei[j]), ei[l]),
                            p.product(ei[i], p.product(ei[j], ei[l])))
                if not vec_is_zero(r):
                    bad.append(Violation("assoc", (i, j, l), r))
                r = vec_add(
                    vec_add(p.bracket_of(ei[i], p.bracket_of(ei[j], ei[l])),
                            p.bracket_of(ei[j], p.bracket_of(ei[l], ei[i]))),
                    p.bracket_of(ei[l], p.bracket_of(ei[i], ei[j])))
                if not vec_is_zero(r):
                    bad.append(Violation("jacobi", (i, j, l), r))
                r = vec_sub(p.bracket_of(ei[i], p.product(ei[j], ei[l])),
                            vec_add(p.product(p.bracket_of(ei[i], ei[j]), ei[l]),
                                    p.product(ei[j], p.bracket_of(ei[i], ei[l]))))
                if not vec_is_zero(r):
                    bad.append(Violation("leibniz", (i, j, l), r))
    return ValidationReport(bad)


class Representation:
    """Module over the product plus Lie representation, with mixed axioms.

    ``mu[i]`` and ``rho[i]`` are v x v matrices giving the actions of the
    i-th algebra basis vector.
    """

    __slots__ = ("dim", "mu", "rho")

    def __init__(self, dim: int, mu: Sequence[Matrix], rho: Sequence[Matrix]):
        if dim < 0:
            raise StructureError("module dimension must be nonnegative")
        if dim > DIM_CAP:
            raise CapacityError(f"module dimension {dim} exceeds cap {DIM_CAP}")
        mu = tuple(mu)
        rho = tuple(rho)
        for m in (*mu, *rho):
            if m.shape != (dim, dim):
                raise StructureError(f"action matrix shape {m.shape} != ({dim}, {dim})")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "rho", rho)

    def __setattr__(self, name, value):
        raise AttributeError("Representation is immutable")

    def mu_of(self, x: Sequence) -> Matrix:
        """Action matrix of a coordinate vector under the module structure."""
        out = Matrix.zeros(self.dim, self.dim)
        for i, xi in enumerate(x):
            if xi:
                out = out + self.mu[i].scale(xi)
        return out

    def rho_of(self, x: Sequence) -> Matrix:
        out = Matrix.zeros(self.dim, self.dim)
        for i, xi in enumerate(x):
            if xi:
                out = out + self.rho[i].scale(xi)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Representation)
            and self.dim == other.dim
            and self.mu == other.mu
            and self.rho == other.rho
        )

    def __hash__(self):
        return hash((self.dim, self.mu, self.rho))

    def __repr__(self):
        return f"Representation(dim={self.dim}, over {len(self.mu)}-dim algebra)"


def validate_representation(p: PoissonAlgebra, v: Representation) -> ValidationReport:
    n = p.dim
    if len(v.mu) != n or len(v.rho) != n:
        raise StructureError("representation indexed by wrong algebra dimension")
    bad = []
    for i in range(n):
        for j in range(n):
            lhs = _combo(v.mu, p.mult[i][j], v.dim)
            r = lhs - v.mu[i] * v.mu[j]
            if not r.is_zero():
                bad.append(Violation("rep-module", (i, j), _flat(r)))
            lhs = _combo(v.rho, p.bracket[i][j], v.dim)
            r = lhs - (v.rho[i] * v.rho[j] - v.rho[j] * v.rho[i])
            if not r.is_zero():
                bad.append(Violation("rep-lie", (i, j), _flat(r)))
            lhs = _combo(v.mu, p.bracket[i][j], v.dim)
            r = lhs - (v.rho[i] * v.mu[j] - v.mu[j] * v.rho[i])
            if not r.is_zero():
                bad.append(Violation("rep-mixed-1", (i, j), _flat(r)))
            lhs = _combo(v.rho, p.mult[i][j], v.dim)
            r = lhs - (v.mu[i] * v.rho[j] + v.mu[j] * v.rho[i])
            if not r.is_zero():
                bad.append(Violation("rep-mixed-2", (i, j), _flat(r)))
    return ValidationReport(bad)


def _combo(mats, coeffs, dim) -> Matrix:
    out = Matrix.zeros(dim, dim)
    for k, ck in enumerate(coeffs):
        if ck:
            out = out + mats[k].scale(ck)
    return out


def _flat(m: Matrix) -> tuple:
    return tuple(x for row in m.data for x in row)


def adjoint_rep(p: PoissonAlgebra) -> Representation:
    """Action of the algebra on itself: mu by the product, rho by the bracket."""
    p.require_valid()
    n = p.dim
    mu = [Matrix([[p.mult[i][j][k] for j in range(n)] for k in range(n)]) for i in range(n)]
    rho = [Matrix([[p.bracket[i][j][k] for j in range(n)] for k in range(n)]) for i in range(n)]
    return Representation(n, mu, rho)


def coadjoint_rep(p: PoissonAlgebra) -> Representation:
    """Dual of the adjoint: transposes for mu, negative transposes for rho."""
    adj = adjoint_rep(p)
    mu = [m.transpose() for m in adj.mu]
    rho = [(-m).transpose() for m in adj.rho]
    return Representation(p.dim, mu, rho)


def trivial_rep(p: PoissonAlgebra, dim: int = 1) -> Representation:
    z = Matrix.zeros(dim, dim)
    return Representation(dim, [z] * p.dim, [z] * p.dim)


MAP_KINDS = ("poisson-hom", "poisson-auto", "poisson-derivation")


def check_map(kind: str, source: PoissonAlgebra, target, f: Matrix) -> ValidationReport:
    """Check f as homomorphism, automorphism, or derivation (into a representation).

    For kind "poisson-derivation" the target is a Representation of the
    source; otherwise it is a Poisson algebra (for "poisson-auto" it must
    be the source itself and f must be invertible).
    """
    if kind not in MAP_KINDS:
        raise StructureError(f"unknown map kind {kind!r}")
    n = source.dim
    ei = [source.basis_vector(i) for i in range(n)]
    bad = []
    if kind in ("poisson-hom", "poisson-auto"):
        if not isinstance(target, PoissonAlgebra):
            raise StructureError(f"{kind} needs a Poisson algebra target")
        if kind == "poisson-auto" and target is not source and target != source:
            raise StructureError("poisson-auto requires target == source")
        if f.shape != (target.dim, n):
            raise StructureError(f"map shape {f.shape} != ({target.dim}, {n})")
        fcols = [f.column_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                r = vec_sub(f.apply(source.product(ei[i], ei[j])),
                            target.product(fcols[i], fcols[j]))
                if not vec_is_zero(r):
                    bad.append(Violation("hom-mult", (i, j), r))
                r = vec_sub(f.apply(source.bracket_of(ei[i], ei[j])),
                            target.bracket_of(fcols[i], fcols[j]))
                if not vec_is_zero(r):
                    bad.append(Violation("hom-bracket", (i, j), r))
        if kind == "poisson-auto" and inverse(f) is None:
            bad.append(Violation("auto-invertible", (), ()))
    else:
        if not isinstance(target, Representation):
            raise StructureError("poisson-derivation needs a Representation target")
        if f.shape != (target.dim, n):
            raise StructureError(f"map shape {f.shape} != ({target.dim}, {n})")
        fcols = [f.column_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                r = vec_sub(f.apply(source.product(ei[i], ei[j])),
                            vec_add(target.mu[i].apply(fcols[j]), target.mu[j].apply(fcols[i])))
                if not vec_is_zero(r):
                    bad.append(Violation("der-mult", (i, j), r))
                r = vec_sub(f.apply(source.bracket_of(ei[i], ei[j])),
                            vec_sub(target.rho[i].apply(fcols[j]), target.rho[j].apply(fcols[i])))
                if not vec_is_zero(r):
                    bad.append(Violation("der-bracket", (i, j), r))
    return ValidationReport(bad)


def change_basis(p: PoissonAlgebra, g: Matrix) -> PoissonAlgebra:
    """Structure constants after the basis change f_i = sum_j g[j][i] e_j."""
    if g.shape != (p.dim, p.dim):
        raise StructureError("basis change must be square of the algebra dimension")
    ginv = inverse(g)
    if ginv is None:
        raise StructureError("basis change must be invertible")
    n = p.dim
    cols = [g.column_vector(i) for i in range(n)]

    def transform(tensor_op):
        out = []
        for i in range(n):
            plane = []
            for j in range(n):
                w = tensor_op(cols[i], cols[j])
                plane.append(ginv.apply(w))
            out.append(tuple(plane))
        return tuple(out)

    return PoissonAlgebra(n, transform(p.product), transform(p.bracket_of), labels=p.labels)


def direct_sum(p1: PoissonAlgebra, p2: PoissonAlgebra) -> PoissonAlgebra:
    n1, n2 = p1.dim, p2.dim
    n = n1 + n2
    mult = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    brk = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            for k in range(n1):
                mult[i][j][k] = p1.mult[i][j][k]
                brk[i][j][k] = p1.bracket[i][j][k]
    for i in range(n2):
        for j in range(n2):
            for k in range(n2):
                mult[n1 + i][n1 + j][n1 + k] = p2.mult[i][j][k]
                brk[n1 + i][n1 + j][n1 + k] = p2.bracket[i][j][k]
    return PoissonAlgebra(n, mult, brk)
