"""Check 2: Q = iota_s is homological."""

from ..graded import bracket, interior_product
from . import CheckFailed, VerifyContext


def run(ctx: VerifyContext) -> str:
    Q = interior_product(ctx.problem.section)
    if Q and Q.degree != 1:
        raise CheckFailed(f"Q has degree parts {sorted(Q.degree_parts())}, expected +1 only")
    square = bracket(Q, Q)
    if square:
        raise CheckFailed(f"[Q, Q] = {square}")
    return "[Q, Q] = 0"
