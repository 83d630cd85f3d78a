"""
Algebra representation, tuple codecs, terms and the two closure engines.
"""

from scripts.kernel.algebra import (
    AlgebraFormatError,
    FiniteAlgebra,
    Operation,
    dump_algebra,
    idempotent_basic_reduct,
    induced_algebra,
    is_idempotent_operation,
    is_idempotent_presentation,
    make_algebra,
    make_operation,
    parse_algebra,
    quotient_algebra,
)
from scripts.kernel.closure import (
    Closure,
    ImageClosure,
    InconsistencyError,
    Limits,
    ResourceLimitError,
    idempotent_image_closure,
    sg_power,
)
from scripts.kernel.subuniverses import (
    enumerate_idempotent_subuniverses,
    is_idempotent_subuniverse,
    subset_key,
)
from scripts.kernel.terms import (
    Apply,
    Term,
    Var,
    evaluate_term,
    parse_term,
    render_term,
    substitute,
    term_arity,
)
from scripts.kernel.tuples import ElementCode, TupleSet, decode_tuple, encode_tuple

__all__ = [
    "AlgebraFormatError",
    "Apply",
    "Closure",
    "ElementCode",
    "FiniteAlgebra",
    "ImageClosure",
    "InconsistencyError",
    "Limits",
    "Operation",
    "ResourceLimitError",
    "Term",
    "TupleSet",
    "Var",
    "decode_tuple",
    "dump_algebra",
    "encode_tuple",
    "enumerate_idempotent_subuniverses",
    "evaluate_term",
    "idempotent_basic_reduct",
    "idempotent_image_closure",
    "induced_algebra",
    "is_idempotent_operation",
    "is_idempotent_presentation",
    "is_idempotent_subuniverse",
    "make_algebra",
    "make_operation",
    "parse_algebra",
    "parse_term",
    "quotient_algebra",
    "render_term",
    "sg_power",
    "subset_key",
    "substitute",
    "term_arity",
]
