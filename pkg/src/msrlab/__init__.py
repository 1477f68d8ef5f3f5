"""Exact-arithmetic laboratory for regenerating-code linear algebra.

Everything runs over prime fields GF(p) with deterministic elimination, so
equal objects are byte-identical and every reported pass/fail is exact.
"""

from .errors import (
    AmbientMismatch,
    BadLambda,
    BadParams,
    CeilingExceeded,
    DivisionByZero,
    FieldTooSmall,
    IndexOutOfRange,
    LemmaViolation,
    MixedFields,
    MsrLabError,
    NotPrime,
    SchemeInvalid,
    ShapeMismatch,
    Singular,
    StructuralError,
    VerificationRequired,
)
from .field import FieldElement, FieldSpec, is_prime
from .invariant import (
    DecayTrace,
    MapConstraint,
    composition_isomorphism_check,
    decay_trace,
    invariant_dim,
    invariant_space,
)
from .matrix import Matrix
from .msr_family import (
    BoundReport,
    MsrSubspaceFamily,
    VerificationReport,
    compare_to_log_multiple,
    construct_tensor_family,
)
from .repair import (
    BandwidthReport,
    ConstantRepairScheme,
    GeneralRepairScheme,
    RepairResult,
    SchemeReport,
    VectorCodeSystematic,
    as_block,
    check_msr_scheme,
    cutset_bound,
    evenodd_code,
    evenodd_constant_instance,
    evenodd_repair,
    evenodd_scheme,
    extract_family,
    is_mds,
    random_constant_instance,
    repair_node,
    scheme_from_json_dict,
)
from .subspace import Subspace, intersect_all, is_direct_sum_full

__version__ = "0.1.0"

__all__ = [
    "AmbientMismatch",
    "BadLambda",
    "BadParams",
    "BandwidthReport",
    "BoundReport",
    "CeilingExceeded",
    "ConstantRepairScheme",
    "DecayTrace",
    "DivisionByZero",
    "FieldElement",
    "FieldSpec",
    "FieldTooSmall",
    "GeneralRepairScheme",
    "IndexOutOfRange",
    "LemmaViolation",
    "MapConstraint",
    "Matrix",
    "MixedFields",
    "MsrLabError",
    "MsrSubspaceFamily",
    "NotPrime",
    "RepairResult",
    "SchemeInvalid",
    "SchemeReport",
    "ShapeMismatch",
    "Singular",
    "StructuralError",
    "Subspace",
    "VectorCodeSystematic",
    "VerificationReport",
    "VerificationRequired",
    "as_block",
    "check_msr_scheme",
    "compare_to_log_multiple",
    "composition_isomorphism_check",
    "construct_tensor_family",
    "cutset_bound",
    "decay_trace",
    "evenodd_code",
    "evenodd_constant_instance",
    "evenodd_repair",
    "evenodd_scheme",
    "extract_family",
    "intersect_all",
    "invariant_dim",
    "invariant_space",
    "is_direct_sum_full",
    "is_mds",
    "is_prime",
    "random_constant_instance",
    "repair_node",
    "scheme_from_json_dict",
    "__version__",
]
