"""Cohomology reports: cocycles, coboundaries, and canonical representatives."""

from __future__ import annotations

from typing import Dict, Optional, Sequence

from .algebra import PoissonAlgebra, Representation, format_scalar
from .cochain import PoissonComplex
from .errors import InvalidInputError
from .matrix import Matrix, ZERO, hstack, kernel_basis, rank, solve, vec_is_zero


class DegreeReport:
    def __init__(self, k, cochain_dim, cocycle_dim, coboundary_dim, representatives):
        self.k = k
        self.cochain_dim = cochain_dim
        self.cocycle_dim = cocycle_dim
        self.coboundary_dim = coboundary_dim
        self.betti = cocycle_dim - coboundary_dim
        self.representatives = tuple(tuple(r) for r in representatives)

    def to_dict(self):
        return {
            "degree": self.k,
            "cochainDim": self.cochain_dim,
            "cocycleDim": self.cocycle_dim,
            "coboundaryDim": self.coboundary_dim,
            "betti": self.betti,
            "representatives": [[format_scalar(x) for x in r] for r in self.representatives],
        }


class CohomologyReport:
    def __init__(self, degrees: Sequence[DegreeReport]):
        self.degrees = {d.k: d for d in degrees}

    def betti(self, k: int) -> int:
        return self.degrees[k].betti

    def to_dict(self):
        return {"degrees": [self.degrees[k].to_dict() for k in sorted(self.degrees)]}

    def __eq__(self, other):
        return isinstance(other, CohomologyReport) and self.to_dict() == other.to_dict()


class CohomologyCalculator:
    """Shared state for cohomology of one (P, V): deltas, kernels, representatives."""

    def __init__(self, p: PoissonAlgebra, v: Representation, kmax: int,
                 max_degree: Optional[int] = None):
        if max_degree is None:
            max_degree = max(kmax, 0)
        self.complex = PoissonComplex(p, v, max_degree=max_degree)
        self.kmax = kmax
        self._deltas: Dict[int, Matrix] = {}
        self._kernels: Dict[int, Matrix] = {}
        self._reps: Dict[int, list] = {}

    def delta(self, k: int) -> Matrix:
        if k not in self._deltas:
            self._deltas[k] = self.complex.coboundary(k).matrix
        return self._deltas[k]

    def kernel(self, k: int) -> Matrix:
        if k not in self._kernels:
            self._kernels[k] = kernel_basis(self.delta(k))
        return self._kernels[k]

    def representatives(self, k: int) -> list:
        """Kernel basis vectors outside the coboundary span, greedy in order."""
        if k not in self._reps:
            ker = self.kernel(k)
            if k == 0:
                boundary_cols = []
            else:
                prev = self.delta(k - 1)
                boundary_cols = [prev.column_vector(j) for j in range(prev.cols)]
            chosen = []
            span = boundary_cols[:]
            current_rank = rank(Matrix.from_columns(span, rows=ker.rows)) if span else 0
            for j in range(ker.cols):
                cand = ker.column_vector(j)
                trial = span + [cand]
                r = rank(Matrix.from_columns(trial, rows=ker.rows))
                if r > current_rank:
                    chosen.append(cand)
                    span = trial
                    current_rank = r
            self._reps[k] = chosen
        return self._reps[k]

    def degree_report(self, k: int) -> DegreeReport:
        dim_k = self.complex.degree_space(k).total_dim
        cocycle = self.kernel(k).cols
        boundary = rank(self.delta(k - 1)) if k > 0 else 0
        return DegreeReport(k, dim_k, cocycle, boundary, self.representatives(k))

    def report(self) -> CohomologyReport:
        return CohomologyReport([self.degree_report(k) for k in range(self.kmax + 1)])

    def decompose(self, z: Sequence, k: int):
        """Write a k-cocycle as a combination of representatives plus a coboundary.

        Returns (coeffs, lower) with z = reps . coeffs + delta_{k-1}(lower).
        """
        dz = self.delta(k).apply(z)
        if not vec_is_zero(dz):
            raise InvalidInputError("input is not a cocycle")
        reps = self.representatives(k)
        dim_k = self.complex.degree_space(k).total_dim
        rep_mat = Matrix.from_columns(reps, rows=dim_k)
        prev = self.delta(k - 1) if k > 0 else Matrix.zeros(dim_k, 0)
        combined = hstack([rep_mat, prev])
        x = solve(combined, z)
        if x is None:
            raise AssertionError("cocycle not in representatives + coboundaries")
        coeffs = tuple(x[: len(reps)])
        lower = tuple(x[len(reps):])
        # exact re-verification of the decomposition
        recon = rep_mat.apply(coeffs)
        if prev.cols:
            recon = tuple(a + b for a, b in zip(recon, prev.apply(lower)))
        if recon != tuple(z):
            raise AssertionError("decomposition failed re-verification")
        return coeffs, lower

    def class_is_zero(self, z: Sequence, k: int) -> bool:
        return all(c == 0 for c in self.decompose(z, k)[0])


def cohomology(p: PoissonAlgebra, v: Representation, kmax: int,
               max_degree: Optional[int] = None) -> CohomologyReport:
    return CohomologyCalculator(p, v, kmax, max_degree=max_degree).report()


def class_decompose(p: PoissonAlgebra, v: Representation, z: Sequence, k: int):
    return CohomologyCalculator(p, v, k).decompose(z, k)
