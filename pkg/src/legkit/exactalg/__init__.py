"""Exact rational linear algebra and Laurent polynomials."""

from .laurent import LaurentPoly, laurent_eval, laurent_eval_many, laurent_jacobian, polynomial_eval
from .matrix import (
    ONE,
    ZERO,
    Q,
    RatMatrix,
    det,
    dot,
    in_span,
    inverse,
    kernel_fraction,
    mat_kernel,
    pfaffian,
    rank,
    rat_from_json,
    rat_to_json,
    row_space_basis,
    rref,
    solve,
    SpanTester,
)

__all__ = [
    "ONE", "ZERO", "Q", "RatMatrix", "LaurentPoly", "det", "dot", "in_span", "inverse",
    "kernel_fraction", "mat_kernel", "pfaffian", "rank", "rat_from_json", "rat_to_json",
    "row_space_basis", "SpanTester", "rref", "solve", "laurent_eval", "laurent_eval_many", "laurent_jacobian", "polynomial_eval",
]
