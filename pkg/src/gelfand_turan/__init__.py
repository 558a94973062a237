"""Delsarte and Turan extremal constants for positive definite invariant kernels.

Finite Gelfand pairs are solved exactly by linear programming over
spherical coefficients; spheres get rigorous two-sided bounds.
"""

from .delsarte import (
    DelsarteInstance,
    DelsarteSolution,
    InstanceError,
    brute_force_delsarte,
    feasible_autocorrelation,
    make_instance,
    restrict_extend_roundtrip,
    solve_delsarte,
    verify_candidate,
)
from .gelfand import (
    BiInvariantFunction,
    DoubleCosetPartition,
    NotGelfandPairError,
    NotPositiveDefiniteError,
    SphericalCoeffs,
    SphericalTable,
    bochner_check,
    convolution_root,
    double_cosets,
    gram_check,
    inverse_spherical_transform,
    is_gelfand_pair,
    spherical_functions,
    spherical_transform,
)
from .groups import (
    AsymmetricFunctionError,
    FiniteGroup,
    GroupError,
    GroupSubset,
    Subgroup,
    as_subgroup,
    autocorrelate,
    build_group,
    convolve,
    cyclic,
    dihedral,
    direct_product,
    from_table,
    involution,
    is_positive_definite,
    project_K,
    subgroup_from_generators,
    symmetric,
    trivial_subgroup,
    whole_group,
)
from .homspace import CosetSpace, Kernel, coset_space, flatten_J, kernel_convolve, kernel_diagnostics, lift_J
from .lp import LPProblem, LPSolution, solve_lp, verify_certificate
from .sphere import (
    IsotropicCoeffs,
    SphereBounds,
    TuranSphereInstance,
    cap_volume,
    gegenbauer_values,
    isotropic_convolve,
    quadrature_convolve,
    solve_turan_sphere,
    sphere_convolution_root,
    turan_lower_bound,
)

__version__ = "0.1.0"
