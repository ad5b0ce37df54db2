"""Exact-arithmetic cohomology of finite-dimensional Poisson algebras,
abelian-extension inducibility, and deformation maps."""

from .algebra import (
    PoissonAlgebra,
    Representation,
    ValidationReport,
    adjoint_rep,
    change_basis,
    check_map,
    coadjoint_rep,
    direct_sum,
    trivial_rep,
    validate_poisson,
    validate_representation,
)
from .cochain import (
    PoissonComplex,
    cochain_basis,
    coboundary,
    cohomologous_witness,
    delta_ce,
    delta_h,
    shuffle_constraint_matrix,
    two_cocycle_residuals,
)
from .cohomology import CohomologyCalculator, CohomologyReport, class_decompose, cohomology
from .deformations import (
    FormalDeformation,
    equivalence_check,
    formal_deformation_check,
    infinitesimal,
    linear_deformation_check,
    nijenhuis_check,
    operator_cohomology,
    rigidity_probe,
)
from .errors import (
    BidegreeError,
    CapacityError,
    InvalidInputError,
    PcohoError,
    StructureError,
)
from .extensions import (
    AbelianExtension,
    build_split_extension,
    build_twisted_extension,
    compat_pair_aut,
    compat_pair_der,
    derivation_sequence_probe,
    extract_cocycle,
    inducible_aut,
    inducible_der,
    restrict_and_project_aut,
    restrict_and_project_der,
    validate_extension,
    wells_aut,
    wells_der,
)
from .matrix import Matrix, kernel_basis, rank, rref, solve
from .prototwilled import (
    ActionData,
    OperatorSpec,
    ProtoTwilled,
    assemble,
    check_operator,
    construct,
    induced_algebra,
    induced_rep,
    is_deformation_map,
    operator_transforms,
    semiclassical,
    twist_by,
)

__version__ = "0.1.0"
