"""Numerical engine for cocycle deformations of graded matrix algebras.

Builds twisted group algebras, graded matrix bundles and their cocycle
deformations, crossed products with the untwisting conjugation, block
decompositions with K0 signatures, and equivariant spectral triples, and
verifies the finite-dimensional identities relating them to floating-point
tolerance.
"""

from .bundles import FellBundle, build_fell_bundle, coaction_matrix, spectral_component
from .cocycles import (
    BilinearCocycle,
    CoboundaryWitness,
    TwoCocycleReal,
    TwoCocycleU1,
    bilinear_cocycle,
    check_cohomologous,
    coboundary_solve,
    conjugate_cocycle,
    exp_cocycle,
    opposite_cocycle,
    product_cocycle,
    trivial_cocycle,
    validate_cocycle,
)
from .crossed import (
    crossed_product,
    dual_action,
    exterior_equivalence_check,
    iterated_crossed_product,
    untwist_isomorphism,
    v_multiplicativity_check,
    v_unitary,
    w_cocycle,
)
from .deformation import (
    DeformedAlgebra,
    braided_model_check,
    deform,
    deform_path,
    iterate_check,
    twisted_structure_constants,
)
from .groups import (
    FiniteGroup,
    FreeAbelianGroup,
    Subgroup,
    build_group,
    direct_product,
    folner_witness,
    subgroup_closure,
)
from .k0 import K0Signature, block_decompose, k0_along_path, k0_compare, morita_rank_check
from .scenarios import Report, Scenario, builtin_scenario, list_builtins, run_scenario
from .spectral import (
    EquivariantTriple,
    covariant_unitary,
    deform_triple,
    index_invariance_along_path,
    index_pairing,
)
from .star_algebra import StructureConstants
from .twisted import (
    TwistedGroupElement,
    fundamental_unitary,
    lambda_matrix,
    multiply,
    involute,
    relations_check,
    standard_trace,
    yetter_drinfeld_check,
)

__version__ = "0.1.0"
