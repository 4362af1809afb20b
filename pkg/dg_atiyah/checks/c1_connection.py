"""Check 1: the connection triple is a torsion-free connection on E[-1].

Torsion-freeness of the base part (Gamma^M symmetric) and the beta
constraint beta(i, j) - beta(j, i) = -R(i, j) are checked for every i < j;
violations are listed with 1-based indices.
"""

from ..connection import validate
from . import CheckFailed, VerifyContext


def run(ctx: VerifyContext) -> str:
    triple = ctx.problem.connection
    violations = validate(triple)
    if violations:
        raise CheckFailed("; ".join(str(v) for v in violations))
    if triple.is_trivial():
        return "trivial connection"
    return f"connection of degree {triple.degree()}"
