"""Linear and formal deformations of a deformation map, their cohomology,
and rigidity probes.

A formal deformation is a truncated power series r_t = r_0 + t r_1 + ...
of maps P2 -> P1; every "for all t" condition is decided degreewise by
extracting exact polynomial coefficients in t (the identities have degree
at most 3), with evaluation at sample points kept as a redundant
cross-check.  All truncated composites are computed mod t^(N+1) with exact
coefficients.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import PoissonAlgebra, ValidationReport, Violation
from .cohomology import CohomologyCalculator, CohomologyReport
from .errors import InvalidInputError, StructureError
from .matrix import (
    Matrix,
    ZERO,
    inverse,
    kernel_basis,
    solve,
    vec_add,
    vec_is_zero,
    vec_sub,
)
from .prototwilled import (
    ProtoTwilled,
    _bilinear,
    _act,
    induced_algebra,
    induced_rep,
    is_deformation_map,
    require_deformation_map,
)

ONE = Fraction(1)


class FormalDeformation:
    """Truncated one-parameter family r_0 + t r_1 + ... + t^N r_N."""

    def __init__(self, terms: Sequence[Matrix]):
        if not terms:
            raise StructureError("a deformation needs at least the constant term")
        shape = terms[0].shape
        if any(t.shape != shape for t in terms):
            raise StructureError("all deformation terms must share one shape")
        self.terms = tuple(terms)

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    @property
    def base(self) -> Matrix:
        return self.terms[0]

    def truncated(self, order: int) -> "FormalDeformation":
        terms = list(self.terms[: order + 1])
        while len(terms) < order + 1:
            terms.append(Matrix.zeros(*self.terms[0].shape))
        return FormalDeformation(terms)

    def evaluate(self, t) -> Matrix:
        out = Matrix.zeros(*self.terms[0].shape)
        power = ONE
        for term in self.terms:
            out = out + term.scale(power)
            power = power * t
        return out


# ---------------------------------------------------------------------------
# truncated polynomial families of matrices


def poly_mul(a: Sequence[Matrix], b: Sequence[Matrix], trunc: int) -> List[Matrix]:
    """Coefficientwise product of matrix polynomials, kept mod t^(trunc+1)."""
    rows, cols = a[0].rows, b[0].cols
    out = [Matrix.zeros(rows, cols) for _ in range(trunc + 1)]
    for i, ai in enumerate(a):
        if i > trunc:
            break
        for j, bj in enumerate(b):
            if i + j > trunc:
                break
            out[i + j] = out[i + j] + ai * bj
    return out


def poly_inverse(a: Sequence[Matrix], trunc: int) -> List[Matrix]:
    """Inverse of a matrix polynomial with invertible constant term."""
    n = a[0].rows
    a0_inv = inverse(a[0])
    if a0_inv is None:
        raise StructureError("constant term is not invertible")
    out = [a0_inv]
    for k in range(1, trunc + 1):
        acc = Matrix.zeros(n, n)
        for j in range(1, k + 1):
            if j < len(a):
                acc = acc + a[j] * out[k - j]
        out.append((-a0_inv) * acc)
    return out


# ---------------------------------------------------------------------------
# residuals of the deformation-map identities for a concrete map


def defmap_residuals(pt: ProtoTwilled, r: Matrix):
    """Residual vectors of the two defining identities per basis pair."""
    n1, n2 = pt.n1, pt.n2
    rcols = [r.column_vector(a) for a in range(n2)]
    unit2 = [tuple(ONE if i == a else ZERO for i in range(n2)) for a in range(n2)]
    mult_res: Dict[tuple, tuple] = {}
    brk_res: Dict[tuple, tuple] = {}
    for a in range(n2):
        for b in range(n2):
            ru, rv = rcols[a], rcols[b]
            lhs = list(_bilinear(pt.dot1, ru, rv, n1))
            for k, val in enumerate(pt.nu[a].apply(rv)):
                lhs[k] += val
            for k, val in enumerate(pt.nu[b].apply(ru)):
                lhs[k] += val
            for k in range(n1):
                lhs[k] += pt.theta[a][b][k]
            inner = list(pt.dot2[a][b])
            for k, val in enumerate(_act(pt.mu, ru, unit2[b])):
                inner[k] += val
            for k, val in enumerate(_act(pt.mu, rv, unit2[a])):
                inner[k] += val
            for k, val in enumerate(_bilinear(pt.h, ru, rv, n2)):
                inner[k] += val
            mult_res[(a, b)] = vec_sub(lhs, r.apply(inner))

            lhs = list(_bilinear(pt.br1, ru, rv, n1))
            for k, val in enumerate(pt.psi[a].apply(rv)):
                lhs[k] += val
            for k, val in enumerate(pt.psi[b].apply(ru)):
                lhs[k] -= val
            for k in range(n1):
                lhs[k] += pt.bigtheta[a][b][k]
            inner = list(pt.br2[a][b])
            for k, val in enumerate(_act(pt.rho, ru, unit2[b])):
                inner[k] += val
            for k, val in enumerate(_act(pt.rho, rv, unit2[a])):
                inner[k] -= val
            for k, val in enumerate(_bilinear(pt.bigh, ru, rv, n2)):
                inner[k] += val
            brk_res[(a, b)] = vec_sub(lhs, r.apply(inner))
    return mult_res, brk_res


# ---------------------------------------------------------------------------
# linear deformations


def linear_deformation_check(pt: ProtoTwilled, r: Matrix, r1: Matrix) -> ValidationReport:
    """Whether r + t r1 is a deformation map for every parameter value.

    Evaluates the six degreewise identities directly, then cross-checks
    them against exact polynomial coefficients of the residuals of
    r + t r1 interpolated from t in {0, 1, 2, 3}; the two routes must
    agree coefficient for coefficient.
    """
    require_deformation_map(pt, r)
    if r1.shape != r.shape:
        raise StructureError("direction must have the same shape as the map")
    n1, n2 = pt.n1, pt.n2
    rc = [r.column_vector(a) for a in range(n2)]
    r1c = [r1.column_vector(a) for a in range(n2)]
    unit2 = [tuple(ONE if i == a else ZERO for i in range(n2)) for a in range(n2)]
    bad = []

    def mu_dot(x, u):
        return _act(pt.mu, x, u)

    def rho_dot(x, u):
        return _act(pt.rho, x, u)

    for a in range(n2):
        for b in range(n2):
            ru, rv = rc[a], rc[b]
            su, sv = r1c[a], r1c[b]
            u, v = unit2[a], unit2[b]

            prod_r = vec_add(vec_add(tuple(pt.dot2[a][b]), mu_dot(ru, v)),
                             vec_add(mu_dot(rv, u), _bilinear(pt.h, ru, rv, n2)))
            lhs = vec_add(vec_add(_bilinear(pt.dot1, ru, sv, n1), _bilinear(pt.dot1, su, rv, n1)),
                          vec_add(pt.nu[a].apply(sv), pt.nu[b].apply(su)))
            inner = vec_add(vec_add(mu_dot(su, v), mu_dot(sv, u)),
                            vec_add(_bilinear(pt.h, su, rv, n2), _bilinear(pt.h, ru, sv, n2)))
            res = vec_sub(lhs, vec_add(r.apply(inner), r1.apply(prod_r)))
            if not vec_is_zero(res):
                bad.append(Violation("eq-11", (a, b), res))

            lhs = _bilinear(pt.dot1, su, sv, n1)
            inner = vec_add(vec_add(mu_dot(su, v), mu_dot(sv, u)),
                            vec_add(_bilinear(pt.h, ru, sv, n2), _bilinear(pt.h, su, rv, n2)))
            res = vec_sub(lhs, vec_add(r1.apply(inner), r.apply(_bilinear(pt.h, su, sv, n2))))
            if not vec_is_zero(res):
                bad.append(Violation("eq-12", (a, b), res))

            res = r1.apply(_bilinear(pt.h, su, sv, n2))
            if not vec_is_zero(res):
                bad.append(Violation("eq-13", (a, b), res))

            brk_r = vec_add(vec_add(tuple(pt.br2[a][b]), rho_dot(ru, v)),
                            vec_add(tuple(-x for x in rho_dot(rv, u)),
                                    _bilinear(pt.bigh, ru, rv, n2)))
            lhs = vec_add(vec_add(_bilinear(pt.br1, ru, sv, n1), _bilinear(pt.br1, su, rv, n1)),
                          vec_sub(pt.psi[a].apply(sv), pt.psi[b].apply(su)))
            inner = vec_add(vec_sub(rho_dot(su, v), rho_dot(sv, u)),
                            vec_add(_bilinear(pt.bigh, su, rv, n2), _bilinear(pt.bigh, ru, sv, n2)))
            res = vec_sub(lhs, vec_add(r.apply(inner), r1.apply(brk_r)))
            if not vec_is_zero(res):
                bad.append(Violation("eq-14", (a, b), res))

            lhs = _bilinear(pt.br1, su, sv, n1)
            inner = vec_add(vec_sub(rho_dot(su, v), rho_dot(sv, u)),
                            vec_add(_bilinear(pt.bigh, ru, sv, n2), _bilinear(pt.bigh, su, rv, n2)))
            res = vec_sub(lhs, vec_add(r1.apply(inner), r.apply(_bilinear(pt.bigh, su, sv, n2))))
            if not vec_is_zero(res):
                bad.append(Violation("eq-15", (a, b), res))

            res = r1.apply(_bilinear(pt.bigh, su, sv, n2))
            if not vec_is_zero(res):
                bad.append(Violation("eq-16", (a, b), res))

    report = ValidationReport(bad)
    if not _linear_check_agrees(pt, r, r1, report):
        raise AssertionError("degreewise identities disagree with interpolation")
    return report


_NODE_COUNT = 4


def _poly_coeffs_from_samples(samples: Sequence[tuple]) -> List[tuple]:
    """Exact coefficients of a vector-valued cubic from values at t=0..3."""
    vm = Matrix([[Fraction(t) ** j for j in range(_NODE_COUNT)] for t in range(_NODE_COUNT)])
    vm_inv = inverse(vm)
    dim = len(samples[0])
    coeffs = []
    for k in range(_NODE_COUNT):
        row = vm_inv.row(k)
        coeffs.append(tuple(sum((row[t] * samples[t][i] for t in range(_NODE_COUNT)), ZERO)
                            for i in range(dim)))
    return coeffs


def _linear_check_agrees(pt: ProtoTwilled, r: Matrix, r1: Matrix,
                         report: ValidationReport) -> bool:
    """Interpolated residual coefficients vs the six identities, exactly."""
    n2 = pt.n2
    sampled_mult = {}
    sampled_brk = {}
    for t in range(_NODE_COUNT):
        mres, bres = defmap_residuals(pt, r + r1.scale(t))
        sampled_mult[t] = mres
        sampled_brk[t] = bres
    failed = {(v.identity, v.where) for v in report.violations}
    for a in range(n2):
        for b in range(n2):
            cm = _poly_coeffs_from_samples([sampled_mult[t][(a, b)] for t in range(_NODE_COUNT)])
            cb = _poly_coeffs_from_samples([sampled_brk[t][(a, b)] for t in range(_NODE_COUNT)])
            if not vec_is_zero(cm[0]) or not vec_is_zero(cb[0]):
                return False  # r itself must be a deformation map
            expect = {
                ("eq-11", (a, b)): not vec_is_zero(cm[1]),
                ("eq-12", (a, b)): not vec_is_zero(cm[2]),
                ("eq-13", (a, b)): not vec_is_zero(cm[3]),
                ("eq-14", (a, b)): not vec_is_zero(cb[1]),
                ("eq-15", (a, b)): not vec_is_zero(cb[2]),
                ("eq-16", (a, b)): not vec_is_zero(cb[3]),
            }
            for key, should_fail in expect.items():
                if should_fail != (key in failed):
                    return False
    return True


# ---------------------------------------------------------------------------
# the one-parameter conjugation maps attached to an element of P1


def bracket_with(pt: ProtoTwilled, x0: Sequence) -> Matrix:
    """The map {x0, -}_1 on P1 as a matrix."""
    n1 = pt.n1
    cols = []
    for j in range(n1):
        unit = tuple(ONE if i == j else ZERO for i in range(n1))
        cols.append(_bilinear(pt.br1, tuple(x0), unit, n1))
    return Matrix.from_columns(cols, rows=n1)


def fiber_shift(pt: ProtoTwilled, r: Matrix, x0: Sequence) -> Matrix:
    """The map u -> rho_{x0} u + H(x0, r(u)) on P2 as a matrix."""
    n1, n2 = pt.n1, pt.n2
    cols = []
    for a in range(n2):
        unit = tuple(ONE if i == a else ZERO for i in range(n2))
        acc = list(_act(pt.rho, tuple(x0), unit))
        ra = r.column_vector(a)
        for k, val in enumerate(_bilinear(pt.bigh, tuple(x0), ra, n2)):
            acc[k] += val
        cols.append(tuple(acc))
    return Matrix.from_columns(cols, rows=n2)


def one_coboundary(pt: ProtoTwilled, r: Matrix, x0: Sequence) -> Matrix:
    """The degree-1 coboundary of x0 in the complex of r, as a map P2 -> P1.

    Its column at u is the induced bracket-type action of u on x0.
    """
    psi = induced_rep(pt, r).rho
    cols = [psi[a].apply(tuple(x0)) for a in range(pt.n2)]
    return Matrix.from_columns(cols, rows=pt.n1)


def _block_diag(a: Matrix, b: Matrix) -> Matrix:
    n1, n2 = a.rows, b.rows
    rows = []
    for i in range(n1):
        rows.append(list(a.row(i)) + [ZERO] * n2)
    for i in range(n2):
        rows.append([ZERO] * n1 + list(b.row(i)))
    return Matrix(rows)


def _hom_defect_orders(pt: ProtoTwilled, phi_poly: Sequence[Matrix], trunc: int):
    """Per-order residuals of Phi_t being a homomorphism of both operations.

    Returns {order: [(op, alpha, beta, residual), ...]} for nonzero residuals.
    """
    alg = pt.algebra
    n = alg.dim
    basis = [alg.basis_vector(i) for i in range(n)]
    images = [[phi.apply(e) for e in basis] for phi in phi_poly]
    defects: Dict[int, list] = {}
    deg = len(phi_poly) - 1
    for alpha in range(n):
        for beta in range(n):
            prod = alg.product(basis[alpha], basis[beta])
            brk = alg.bracket_of(basis[alpha], basis[beta])
            for k in range(trunc + 1):
                res_p = phi_poly[k].apply(prod) if k <= deg else (ZERO,) * n
                res_b = phi_poly[k].apply(brk) if k <= deg else (ZERO,) * n
                for i in range(max(0, k - deg), min(k, deg) + 1):
                    res_p = vec_sub(res_p, alg.product(images[i][alpha], images[k - i][beta]))
                    res_b = vec_sub(res_b, alg.bracket_of(images[i][alpha], images[k - i][beta]))
                if not vec_is_zero(res_p):
                    defects.setdefault(k, []).append(("mult", alpha, beta, res_p))
                if not vec_is_zero(res_b):
                    defects.setdefault(k, []).append(("bracket", alpha, beta, res_b))
    return defects


def nijenhuis_check(pt: ProtoTwilled, r: Matrix, x0: Sequence, report: bool = False):
    """Whether x0 generates a one-parameter family of homomorphisms.

    Degreewise: the conjugation family on P1 (+) P2 must be a homomorphism
    of both operations for every t (coefficients of t^0, t^1, t^2 vanish),
    and the closing bracket condition must hold on every basis vector.
    """
    require_deformation_map(pt, r)
    x0 = tuple(x0)
    if len(x0) != pt.n1:
        raise StructureError("element must lie in the first summand")
    x1 = bracket_with(pt, x0)
    x2 = fiber_shift(pt, r, x0)
    big = _block_diag(x1, x2)
    n = pt.n1 + pt.n2
    phi_poly = [Matrix.identity(n), big]
    defects = _hom_defect_orders(pt, phi_poly, trunc=2)
    bad = []
    for order, items in sorted(defects.items()):
        for op, alpha, beta, res in items:
            bad.append(Violation(f"nij-hom-{op}-t{order}", (alpha, beta), res))
    # closing condition: {{r(u), x0}_1 - r(-rho_{x0} u + H(r(u), x0)), x0}_1 = 0
    n1, n2 = pt.n1, pt.n2
    for a in range(n2):
        unit = tuple(ONE if i == a else ZERO for i in range(n2))
        ra = r.column_vector(a)
        w = list(_bilinear(pt.br1, ra, x0, n1))
        inner = [-val for val in _act(pt.rho, x0, unit)]
        for k, val in enumerate(_bilinear(pt.bigh, ra, x0, n2)):
            inner[k] += val
        for k, val in enumerate(r.apply(inner)):
            w[k] -= val
        res = _bilinear(pt.br1, tuple(w), x0, n1)
        if not vec_is_zero(res):
            bad.append(Violation("eq-19", (a,), res))
    rep = ValidationReport(bad)
    return rep if report else rep.ok


# ---------------------------------------------------------------------------
# formal deformations


def formal_deformation_check(pt: ProtoTwilled, rt: FormalDeformation) -> ValidationReport:
    """The order-n identities for 1 <= n <= N; failures name (n, u, v)."""
    require_deformation_map(pt, rt.base)
    n1, n2 = pt.n1, pt.n2
    if rt.base.shape != (n1, n2):
        raise StructureError("deformation terms have the wrong shape")
    terms = rt.terms
    N = rt.order
    cols = [[t.column_vector(a) for a in range(n2)] for t in terms]
    unit2 = [tuple(ONE if i == a else ZERO for i in range(n2)) for a in range(n2)]
    bad = []
    for n in range(1, N + 1):
        for a in range(n2):
            for b in range(n2):
                res = [ZERO] * n1
                for i in range(n + 1):
                    j = n - i
                    for k, val in enumerate(_bilinear(pt.dot1, cols[i][a], cols[j][b], n1)):
                        res[k] += val
                for k, val in enumerate(pt.nu[a].apply(cols[n][b])):
                    res[k] += val
                for k, val in enumerate(pt.nu[b].apply(cols[n][a])):
                    res[k] += val
                for k, val in enumerate(terms[n].apply(pt.dot2[a][b])):
                    res[k] -= val
                for i in range(n + 1):
                    j = n - i
                    inner = vec_add(_act(pt.mu, cols[j][a], unit2[b]),
                                    _act(pt.mu, cols[j][b], unit2[a]))
                    for k, val in enumerate(terms[i].apply(inner)):
                        res[k] -= val
                for i in range(n + 1):
                    for j in range(n - i + 1):
                        k3 = n - i - j
                        inner = _bilinear(pt.h, cols[j][a], cols[k3][b], n2)
                        for k, val in enumerate(terms[i].apply(inner)):
                            res[k] -= val
                if not vec_is_zero(res):
                    bad.append(Violation("formal-mult", (n, a, b), tuple(res)))

                res = [ZERO] * n1
                for i in range(n + 1):
                    j = n - i
                    for k, val in enumerate(_bilinear(pt.br1, cols[i][a], cols[j][b], n1)):
                        res[k] += val
                for k, val in enumerate(pt.psi[a].apply(cols[n][b])):
                    res[k] += val
                for k, val in enumerate(pt.psi[b].apply(cols[n][a])):
                    res[k] -= val
                for k, val in enumerate(terms[n].apply(pt.br2[a][b])):
                    res[k] -= val
                for i in range(n + 1):
                    j = n - i
                    inner = vec_sub(_act(pt.rho, cols[j][a], unit2[b]),
                                    _act(pt.rho, cols[j][b], unit2[a]))
                    for k, val in enumerate(terms[i].apply(inner)):
                        res[k] -= val
                for i in range(n + 1):
                    for j in range(n - i + 1):
                        k3 = n - i - j
                        inner = _bilinear(pt.bigh, cols[j][a], cols[k3][b], n2)
                        for k, val in enumerate(terms[i].apply(inner)):
                            res[k] -= val
                if not vec_is_zero(res):
                    bad.append(Violation("formal-bracket", (n, a, b), tuple(res)))
    return ValidationReport(bad)


def infinitesimal(pt: ProtoTwilled, rt: FormalDeformation):
    """The first-order term as a degree-1 cochain, with its cocycle verdict."""
    if rt.order < 1:
        raise InvalidInputError("deformation has no first-order term")
    first = formal_deformation_check(pt, rt.truncated(1))
    if not first.ok:
        raise InvalidInputError("not a deformation to order 1", first)
    r, r1 = rt.base, rt.terms[1]
    alg = induced_algebra(pt, r)
    rep = induced_rep(pt, r)
    from .cochain import PoissonComplex
    cx = PoissonComplex(alg, rep, max_degree=1)
    coords = []
    for a in range(pt.n2):
        coords.extend(r1.column_vector(a))
    dz = cx.coboundary(1).matrix.apply(tuple(coords))
    return r1, vec_is_zero(dz)


def operator_cohomology(pt: ProtoTwilled, r: Matrix, kmax: int) -> CohomologyReport:
    """Cohomology of the deformation map: the induced algebra acting on P1."""
    require_deformation_map(pt, r)
    return CohomologyCalculator(induced_algebra(pt, r), induced_rep(pt, r), kmax).report()


# ---------------------------------------------------------------------------
# equivalence


class EquivalenceReport:
    def __init__(self, equivalent: bool, details: dict):
        self.equivalent = equivalent
        self.details = details

    def to_dict(self):
        out = {"equivalent": self.equivalent}
        out.update(self.details)
        return out


def equivalence_check(pt: ProtoTwilled, rt: FormalDeformation, rt2: FormalDeformation,
                      x0: Sequence) -> EquivalenceReport:
    """Whether x0 makes the prescribed one-parameter pair a homomorphism
    of deformation maps from rt to rt2.

    For order 1 the conditions are exact polynomial identities in t and the
    intertwining residuals are reported as the two classical coefficient
    identities.  For higher orders the first-order parts are fixed by x0
    and the higher correction maps are searched for by solving the
    truncated conditions order by order.
    """
    x0 = tuple(x0)
    for deformation in (rt, rt2):
        rep = formal_deformation_check(pt, deformation)
        if not rep.ok:
            raise InvalidInputError("input is not a formal deformation", rep)
    if rt.base != rt2.base:
        raise InvalidInputError("deformations of different base maps")
    r = rt.base
    N = max(rt.order, rt2.order)
    x1 = bracket_with(pt, x0)
    x2 = fiber_shift(pt, r, x0)

    if N <= 1:
        big = _block_diag(x1, x2)
        n = pt.n1 + pt.n2
        defects = _hom_defect_orders(pt, [Matrix.identity(n), big], trunc=2)
        hom_ok = not defects
        a = rt.truncated(1).terms
        b = rt2.truncated(1).terms
        r1, r1p = a[1], b[1]
        # order-1 coefficient of phi1 . r_t - r_t' . phi2
        first = (x1 * r + r1) - (r1p + r * x2)
        # order-2 coefficient
        second = x1 * r1 - r1p * x2
        details = {
            "homomorphismOk": hom_ok,
            "eq-17-ok": first.is_zero(),
            "eq-18-ok": second.is_zero(),
        }
        return EquivalenceReport(hom_ok and first.is_zero() and second.is_zero(), details)

    # higher order: solve for the free correction maps order by order
    n1, n2 = pt.n1, pt.n2
    n = n1 + n2
    phi1 = [Matrix.identity(n1), x1] + [None] * (N - 1)
    phi2 = [Matrix.identity(n2), x2] + [None] * (N - 1)
    a_terms = rt.truncated(N).terms
    b_terms = rt2.truncated(N).terms
    alg = pt.algebra
    basis = [alg.basis_vector(i) for i in range(n)]

    def hom_residual_at(order, phis):
        out = []
        deg = len(phis) - 1
        images = [[phis[i].apply(e) for e in basis] for i in range(len(phis))]
        for alpha in range(n):
            for beta in range(n):
                prod = alg.product(basis[alpha], basis[beta])
                brk = alg.bracket_of(basis[alpha], basis[beta])
                res_p = phis[order].apply(prod) if order <= deg else (ZERO,) * n
                res_b = phis[order].apply(brk) if order <= deg else (ZERO,) * n
                for i in range(max(0, order - deg), min(order, deg) + 1):
                    res_p = vec_sub(res_p, alg.product(images[i][alpha], images[order - i][beta]))
                    res_b = vec_sub(res_b, alg.bracket_of(images[i][alpha], images[order - i][beta]))
                out.extend(res_p)
                out.extend(res_b)
        return tuple(out)

    def intertwine_residual_at(order, p1, p2):
        acc = Matrix.zeros(n1, n2)
        for i in range(order + 1):
            j = order - i
            if i < len(p1) and j <= N:
                acc = acc + p1[i] * a_terms[j]
            if i <= N and j < len(p2):
                acc = acc - b_terms[i] * p2[j]
        return tuple(x for row in acc.data for x in row)

    solved_orders = {}
    for k in range(2, N + 1):
        # unknowns: entries of phi1[k] (n1 x n1) then phi2[k] (n2 x n2)
        base1 = [m if m is not None else Matrix.zeros(n1, n1) for m in phi1[:k]]
        base2 = [m if m is not None else Matrix.zeros(n2, n2) for m in phi2[:k]]

        def assemble(vec_unknown):
            m1 = Matrix([[vec_unknown[i * n1 + j] for j in range(n1)] for i in range(n1)])
            off = n1 * n1
            m2 = Matrix([[vec_unknown[off + i * n2 + j] for j in range(n2)] for i in range(n2)])
            return base1 + [m1], base2 + [m2]

        nunk = n1 * n1 + n2 * n2
        zero_vec = (ZERO,) * nunk
        p1z, p2z = assemble(zero_vec)
        big_phis_z = [_block_diag(a_, b_) for a_, b_ in zip(p1z, p2z)]
        rhs_hom = hom_residual_at(k, big_phis_z)
        rhs_int = intertwine_residual_at(k, p1z, p2z)
        rhs = tuple(-x for x in rhs_hom + rhs_int)
        cols = []
        for idx in range(nunk):
            unit = tuple(ONE if i == idx else ZERO for i in range(nunk))
            p1u, p2u = assemble(unit)
            big_phis = [_block_diag(a_, b_) for a_, b_ in zip(p1u, p2u)]
            col_hom = hom_residual_at(k, big_phis)
            col_int = intertwine_residual_at(k, p1u, p2u)
            full = tuple(x - y for x, y in zip(col_hom + col_int, rhs_hom + rhs_int))
            cols.append(full)
        system = Matrix.from_columns(cols, rows=len(rhs))
        sol = solve(system, rhs)
        if sol is None:
            return EquivalenceReport(False, {"failedAtOrder": k})
        p1s, p2s = assemble(sol)
        phi1[k] = p1s[-1]
        phi2[k] = p2s[-1]
        solved_orders[k] = True
    # final verification mod t^(N+1)
    big_phis = [_block_diag(a_, b_) for a_, b_ in zip(phi1, phi2)]
    ok = True
    for k in range(N + 1):
        if not vec_is_zero(hom_residual_at(k, big_phis)):
            ok = False
        if not vec_is_zero(intertwine_residual_at(k, phi1, phi2)):
            ok = False
    return EquivalenceReport(ok, {"solvedOrders": sorted(solved_orders)})


# ---------------------------------------------------------------------------
# rigidity


def _candidate_offsets(kernel: Matrix, limit: int):
    """Deterministic stream of integer combinations of the kernel basis."""
    d = kernel.cols
    yield (0,) * d
    if d == 0:
        return
    produced = 1
    for radius in (1, 2, 3):
        for combo in itertools.product(range(-radius, radius + 1), repeat=d):
            if max(abs(c) for c in combo) != radius:
                continue
            yield combo
            produced += 1
            if produced >= limit:
                return


def rigidity_probe(pt: ProtoTwilled, r: Matrix, rt: FormalDeformation,
                   max_steps: Optional[int] = None, candidate_limit: int = 64) -> dict:
    """Iterated trivialization of a formal deformation.

    At each step the lowest-order nonzero term is expressed as a degree-1
    coboundary of a Nijenhuis element when possible (linear solve plus a
    filtered search over the affine solution space), the corresponding
    truncated conjugation is applied, and the term is confirmed to vanish.
    Reports either full trivialization or the first obstructed order.
    """
    if any(not m.is_zero() for m in pt.psi):
        raise InvalidInputError("probe requires the psi-type action to vanish")
    if rt.base != r:
        raise StructureError("deformation does not start at the given map")
    check = formal_deformation_check(pt, rt)
    if not check.ok:
        raise InvalidInputError("input is not a formal deformation", check)
    require_deformation_map(pt, r)
    N = rt.order
    if max_steps is None:
        max_steps = N
    n1, n2 = pt.n1, pt.n2

    # matrix of x0 -> one_coboundary(pt, r, x0), vectorized by rows of the result
    psi_r = induced_rep(pt, r).rho
    cob_cols = []
    for x in range(n1):
        unit = tuple(ONE if i == x else ZERO for i in range(n1))
        img = Matrix.from_columns([psi_r[a].apply(unit) for a in range(n2)], rows=n1)
        cob_cols.append(tuple(v for row in img.data for v in row))
    cob_matrix = Matrix.from_columns(cob_cols, rows=n1 * n2)

    terms = list(rt.terms)
    steps = []
    for _ in range(max_steps):
        lowest = next((k for k in range(1, N + 1) if not terms[k].is_zero()), None)
        if lowest is None:
            break
        target = tuple(v for row in terms[lowest].data for v in row)
        particular = solve(cob_matrix, target)
        if particular is None:
            calc = CohomologyCalculator(induced_algebra(pt, r), induced_rep(pt, r), 1)
            coeffs, _ = calc.decompose(_vec_of_map(terms[lowest], pt), 1)
            steps.append({"order": lowest, "status": "obstructed",
                          "classCoords": [str(c) for c in coeffs]})
            return {"trivialized": False, "steps": steps, "obstructedAt": lowest}
        kn = kernel_basis(cob_matrix)
        x0 = None
        tried = 0
        for combo in _candidate_offsets(kn, candidate_limit):
            cand = list(particular)
            for ci, c in enumerate(combo):
                if c:
                    col = kn.column_vector(ci)
                    for i in range(n1):
                        cand[i] += c * col[i]
            tried += 1
            if nijenhuis_check(pt, r, tuple(cand)):
                x0 = tuple(cand)
                break
        if x0 is None:
            steps.append({"order": lowest, "status": "no-nijenhuis-preimage",
                          "candidatesTried": tried})
            return {"trivialized": False, "steps": steps, "obstructedAt": lowest}
        x1 = bracket_with(pt, x0)
        x2 = fiber_shift(pt, r, x0)
        phi1 = [Matrix.identity(n1)] + [Matrix.zeros(n1, n1)] * N
        phi2 = [Matrix.identity(n2)] + [Matrix.zeros(n2, n2)] * N
        if lowest <= N:
            phi1[lowest] = x1
            phi2[lowest] = x2
        phi2_inv = poly_inverse(phi2, N)
        new_terms = poly_mul(poly_mul(phi1, terms, N), phi2_inv, N)
        if not new_terms[lowest].is_zero():
            raise AssertionError("trivialization step failed to clear the lowest term")
        recheck = formal_deformation_check(pt, FormalDeformation(new_terms))
        if not recheck.ok:
            raise AssertionError("trivialization step broke formal validity")
        steps.append({"order": lowest, "status": "cleared"})
        terms = new_terms
    trivial = all(terms[k].is_zero() for k in range(1, N + 1))
    return {"trivialized": trivial, "steps": steps,
            "residualOrders": [k for k in range(1, N + 1) if not terms[k].is_zero()]}


def _vec_of_map(m: Matrix, pt: ProtoTwilled) -> tuple:
    """Coordinates of a map P2 -> P1 in the degree-1 block of the complex of r."""
    coords = []
    for a in range(pt.n2):
        coords.extend(m.column_vector(a))
    return tuple(coords)
