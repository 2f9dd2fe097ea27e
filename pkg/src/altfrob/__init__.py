"""Exact computation with pre-Frobenius structures and quantum products.

The package is organized in layers:

``rings`` / ``linalg``   exact scalars (Laurent, rational functions, truncated
                         series) and dense matrices over them.
``presaito``             families of flat-bundle data, the relation checkers,
                         tensor/wedge constructions, and JSON interchange.
``projective``           the small quantum family of projective space.
``grassmann``            the alternate product on Grassmannian cohomology and
                         its rim-hook oracle.
``deform``               the Hertling-Manin extension recursion, the Frobenius
                         potential, and plane curve counts.
``mirror``               torus mirrors, Jacobian algebras, and the comparison
                         of wedge spectra with the quantum side.
``cli``                  the ``altfrob`` command-line front end.
"""

from .deform import (
    DeformationProblem,
    InvariantViolation,
    NotPrePrimitive,
    expand_trivial_in_log,
    gw_pn2,
    hm_extend,
    potential,
    potential_to_json,
    problem_from_json,
    problem_to_json,
    trivial_deformation_problem,
    universal_big_quantum,
    wdvv_oracle,
    word_basis,
)
from .grassmann import (
    PartitionMatrix,
    QLRTable,
    alt_metric,
    alt_structure_constants,
    alternant,
    bialternant_reduce,
    complement_partition,
    lr_count,
    rect_partitions,
    rimhook_oracle,
    rimhook_reduce,
    schur_poly,
    vandermonde,
)
from .linalg import (
    Mat,
    Ring,
    charpoly,
    det,
    kron,
    kron_sum,
    laurent_ring,
    qfrac_ring,
    wedge_indices,
    wedge_metric,
    wedge_of_sum,
)
from .mirror import (
    BrieskornPoint,
    JacobianAlgebra,
    LaurentPoly,
    compare_quantum_gm,
    convenience_witness,
    gm_wedge,
    is_convenient,
    jacobian_algebra,
    kouchnirenko_bound,
    mirror_brieskorn,
    mirror_f,
    mult_f_matrix,
    subset_sum_charpoly,
    torus_relations,
    ts_tensor,
)
from .presaito import (
    BaseVar,
    FrobeniusData,
    NotPrimitive,
    PointStructure,
    PreSaitoFamily,
    Report,
    check_metric,
    check_pre_saito,
    dumps_family,
    family_from_json,
    family_to_json,
    frobenius_data,
    loads_family,
    tensor,
    trivial_deformation,
    wedge_restrict,
)
from .projective import build_pn, pn_small_family
from .rings import Laurent, QFrac, Series

__version__ = "0.1.0"

__all__ = [
    "BaseVar",
    "BrieskornPoint",
    "DeformationProblem",
    "FrobeniusData",
    "InvariantViolation",
    "JacobianAlgebra",
    "Laurent",
    "LaurentPoly",
    "Mat",
    "NotPrePrimitive",
    "NotPrimitive",
    "PartitionMatrix",
    "PointStructure",
    "PreSaitoFamily",
    "QFrac",
    "QLRTable",
    "Report",
    "Ring",
    "Series",
    "alt_metric",
    "alt_structure_constants",
    "alternant",
    "bialternant_reduce",
    "build_pn",
    "charpoly",
    "check_metric",
    "check_pre_saito",
    "compare_quantum_gm",
    "complement_partition",
    "convenience_witness",
    "det",
    "dumps_family",
    "expand_trivial_in_log",
    "family_from_json",
    "family_to_json",
    "frobenius_data",
    "gm_wedge",
    "gw_pn2",
    "hm_extend",
    "is_convenient",
    "jacobian_algebra",
    "kouchnirenko_bound",
    "kron",
    "kron_sum",
    "laurent_ring",
    "loads_family",
    "lr_count",
    "mirror_brieskorn",
    "mirror_f",
    "mult_f_matrix",
    "pn_small_family",
    "potential",
    "potential_to_json",
    "problem_from_json",
    "problem_to_json",
    "qfrac_ring",
    "rect_partitions",
    "rimhook_oracle",
    "rimhook_reduce",
    "schur_poly",
    "subset_sum_charpoly",
    "tensor",
    "torus_relations",
    "trivial_deformation",
    "trivial_deformation_problem",
    "ts_tensor",
    "universal_big_quantum",
    "vandermonde",
    "wdvv_oracle",
    "wedge_indices",
    "wedge_metric",
    "wedge_of_sum",
    "wedge_restrict",
    "word_basis",
]
