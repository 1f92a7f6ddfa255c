"""f-attentive second-order analysis of prox-regular functions.

Catalog functions, truncated subgradient graphs, SC derivatives as (P, W)
pairs, variational convexity and tilt-stability bounds, and brute-force
oracles that check them.
"""
from .catalog import (
    CatalogError,
    DomainError,
    SubgradientSet,
    builtin,
    evaluate,
    load_spec,
    regular_subgradient_probe,
    subdifferential,
)
from .calculus import QuadraticPerturbation, Shifted, add_quadratic, transform_pw, transform_subspaces
from .criteria import (
    NotTiltStable,
    bound_report,
    coderivative_rayleigh_1d,
    test_neighborhood,
    test_pointbased,
    tilt_bound,
    tilt_rayleigh_1d,
    varco_bound,
)
from .graph import PreconditionError, Window, closedness_probe, localization, sample_truncated_graph
from .oracles import (
    build_affine_minorant,
    check_monotone,
    check_quadratic_growth,
    estimate_prox_regularity,
    tilt_probe,
    varco_empirical,
)
from .scderiv import (
    PWSet,
    attentive_coderivative_1d,
    estimate_tangent,
    hausdorff_dz,
    sc_derivative,
    sc_derivative_numeric,
)
from .subspace import (
    NotSelfAdjoint,
    PWPair,
    Subspace2n,
    adjoint,
    check_pw_axioms,
    dz_distance,
    projection_matrix,
    pw_from_subspace,
    subspace_from_pw,
)

__version__ = "0.1.0"

__all__ = [
    "QuadraticPerturbation",
    "Shifted",
    "add_quadratic",
    "transform_pw",
    "transform_subspaces",
    "PreconditionError",
    "Window",
    "closedness_probe",
    "localization",
    "sample_truncated_graph",
    "CatalogError",
    "DomainError",
    "SubgradientSet",
    "builtin",
    "evaluate",
    "load_spec",
    "regular_subgradient_probe",
    "subdifferential",
    "NotTiltStable",
    "bound_report",
    "coderivative_rayleigh_1d",
    "test_neighborhood",
    "test_pointbased",
    "tilt_bound",
    "tilt_rayleigh_1d",
    "varco_bound",
    "build_affine_minorant",
    "check_monotone",
    "check_quadratic_growth",
    "estimate_prox_regularity",
    "tilt_probe",
    "varco_empirical",
    "PWSet",
    "attentive_coderivative_1d",
    "estimate_tangent",
    "hausdorff_dz",
    "sc_derivative",
    "sc_derivative_numeric",
    "NotSelfAdjoint",
    "PWPair",
    "Subspace2n",
    "adjoint",
    "check_pw_axioms",
    "dz_distance",
    "projection_matrix",
    "pw_from_subspace",
    "subspace_from_pw",
    "__version__",
]
