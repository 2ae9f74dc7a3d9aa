"""formkit: exact finite-dimensional calculus for sesquilinear forms.

Forms on C^n are represented by matrices (linear in the first argument).
The library constructs scale/factor representations of a form relative to
a reference positive form, Lebesgue-type regular/singular splittings with
checkable witnesses, and solvability certificates driven by the numerical
range, together with generators for the standard diagonal, discrete
measure, and operator-pair example families.
"""

from .errors import (
    DominationFails,
    FormkitError,
    IncompatibleNorm,
    MathematicalRefusal,
    NoConvergence,
    NotAbsolutelyContinuous,
    NotHermitian,
    NotInClassM,
    NotPSD,
    NotSectorial,
    NotSolvable,
    ParseError,
    PreconditionFails,
    QuadraticBoundFails,
    TheoremViolation,
    ValidationError,
    WitnessResidualTooLarge,
)
from .forms import (
    Form,
    PositiveForm,
    QuotientEmbedding,
    adjoint,
    dominates,
    domination_operator,
    identity_form,
    kernel,
    quotient_embedding,
    re_im_split,
)
from .lebesgue import (
    LebesgueSplit,
    is_mutually_singular,
    lebesgue_decompose,
    maximality_check,
    parallel_sum,
    parallel_sum_limit,
    positive_lebesgue,
    regular_part_majorant,
    singularity_witness,
)
from .numerics import (
    DEFAULT_RANK_TOL,
    HermEig,
    hermitian_eig,
    kernel_projector,
    pinv,
    psd_sqrt,
)
from .regularity import (
    EpsilonBound,
    RNRepresentation,
    SectorialityCertificate,
    canonical_majorant,
    dominated_sequence,
    dominated_sequence_stabilization,
    epsilon_bound_check,
    in_class_M,
    is_absolutely_continuous,
    kato_S,
    radon_nikodym,
    representation_residuals,
    sectorial_parameters,
    sectorial_regularity,
)
from .solvable import (
    NormGram,
    NumericalRangeHull,
    ScalarSolvability,
    SolvabilityReport,
    numerical_radius,
    numerical_range_hull,
    represent_operator,
    scalar_solvability,
    solvability_with,
    validate_compatible_norm,
)
from .trunclab import (
    Instance,
    convergence_report,
    diag_family,
    measure_family,
    operator_pair_family,
)

__version__ = "0.1.0"

__all__ = [
    "DominationFails",
    "FormkitError",
    "IncompatibleNorm",
    "MathematicalRefusal",
    "NoConvergence",
    "NotAbsolutelyContinuous",
    "NotHermitian",
    "NotInClassM",
    "NotPSD",
    "NotSectorial",
    "NotSolvable",
    "ParseError",
    "PreconditionFails",
    "QuadraticBoundFails",
    "TheoremViolation",
    "ValidationError",
    "WitnessResidualTooLarge",
    "Form",
    "PositiveForm",
    "QuotientEmbedding",
    "adjoint",
    "dominates",
    "domination_operator",
    "identity_form",
    "kernel",
    "quotient_embedding",
    "re_im_split",
    "LebesgueSplit",
    "is_mutually_singular",
    "lebesgue_decompose",
    "maximality_check",
    "parallel_sum",
    "parallel_sum_limit",
    "positive_lebesgue",
    "regular_part_majorant",
    "singularity_witness",
    "DEFAULT_RANK_TOL",
    "HermEig",
    "hermitian_eig",
    "kernel_projector",
    "pinv",
    "psd_sqrt",
    "EpsilonBound",
    "RNRepresentation",
    "SectorialityCertificate",
    "canonical_majorant",
    "dominated_sequence",
    "dominated_sequence_stabilization",
    "epsilon_bound_check",
    "in_class_M",
    "is_absolutely_continuous",
    "kato_S",
    "radon_nikodym",
    "representation_residuals",
    "sectorial_parameters",
    "sectorial_regularity",
    "NormGram",
    "NumericalRangeHull",
    "ScalarSolvability",
    "SolvabilityReport",
    "numerical_radius",
    "numerical_range_hull",
    "represent_operator",
    "scalar_solvability",
    "solvability_with",
    "validate_compatible_norm",
    "Instance",
    "convergence_report",
    "diag_family",
    "measure_family",
    "operator_pair_family",
    "__version__",
]
