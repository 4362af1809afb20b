"""Check 3: the cocycle computed from the definition equals the closed form."""

from ..atiyah import cocycle_closed_form, cocycle_definitional, format_row
from . import CheckFailed, VerifyContext


def run(ctx: VerifyContext) -> str:
    closed = cocycle_closed_form(ctx.problem)
    definitional = cocycle_definitional(ctx.problem)
    difference = definitional - closed
    if not difference.is_zero():
        row, value = next((r, v) for r, v in difference.rows() if v)
        raise CheckFailed(f"routes differ at {format_row(row)} by {value}")
    return f"{len(closed.entries)} nonzero entries"
