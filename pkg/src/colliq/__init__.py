"""Isometric colligations, their transfer functions, and factorizations."""

from .errors import (
    ArgumentError,
    ColliqError,
    DimensionError,
    DomainError,
    NoWitnessError,
    NotIsometricError,
    ParseError,
    SchemaError,
    SingularMatrixError,
    StructureError,
    VerificationError,
    ZeroConstantError,
)
from .colligation import (
    Colligation,
    GridReport,
    SpacePartition,
    assemble,
    flip_permutation,
    is_isometry,
    sample_polydisc,
    schur_bound_check,
    transfer_eval,
    transfer_eval_grid,
)
from .structure import (
    StructureReport,
    check_chain,
    check_fm,
    check_fn,
    check_zero_origin_case1,
    check_zero_origin_case2,
    check_zero_origin_nvar,
)
from .factorize import (
    FactorizationResult,
    check_and_factor_zero_origin_nvar,
    embed_fm_into_fn,
    factor_chain,
    factor_fm,
    factor_fn,
    factor_zero_origin_case1,
    factor_zero_origin_case2,
    kappa_pi_roundtrip,
    product_chain,
    product_fm,
    product_fn,
)
from .ball import BallColligation, ball_transfer_eval, check_ball_factor_structure
from .builders import (
    blaschke_colligation,
    constant_colligation,
    monomial_colligation,
    random_isometric_colligation,
    random_structured_colligation,
    shifted_blaschke_product_colligation,
)
from .document import load_document, parse_document, save_document, serialize_document

__version__ = "0.1.0"
