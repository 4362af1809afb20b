"""Check 5: decide, then replay whatever the decision produced.

Vanishes replays its certificate through the matrices. NonVanishing re-solves
the jet system at the witness, checks every lower order is feasible and every
higher order up to jet_order stays infeasible. Unknown fails the check.
"""

from ..atiyah import (
    JetResult,
    NonVanishing,
    Unknown,
    Vanishes,
    build_operators,
    cocycle_closed_form,
    decide,
    jet_obstruction,
    replay_certificate,
)
from . import CheckFailed, VerifyContext


def run(ctx: VerifyContext) -> str:
    problem = ctx.problem
    verdict = decide(problem, workers=ctx.workers)
    ctx.verdict = verdict
    cocycle = cocycle_closed_form(problem)
    operators = build_operators(problem)

    if isinstance(verdict, Vanishes):
        if not replay_certificate(cocycle, operators, verdict.certificate):
            raise CheckFailed("certificate does not reproduce the cocycle")
        return f"Vanishes, certificate of degree {verdict.degree} replayed"

    if isinstance(verdict, NonVanishing):
        point = verdict.witness_point
        for order in range(problem.jet_order + 1):
            result = jet_obstruction(problem, cocycle, operators, point, order)
            expected = JetResult.INFEASIBLE if order >= verdict.jet_order else JetResult.FEASIBLE
            if result is not expected:
                raise CheckFailed(f"jet system at order {order} is {result.value}, expected {expected.value}")
        return f"NonVanishing, jet witness of order {verdict.jet_order} replayed"

    assert isinstance(verdict, Unknown)
    raise CheckFailed(
        f"Unknown after degree bound {verdict.degree_bound_tried} and jet order {verdict.jet_order_tried}"
    )
