"""Check 4: At for the given connection and for the trivial triple differ by a coboundary.

The difference certificate has d1 coefficients built from dGamma^E,
Gamma^E Gamma^E, beta and Gamma^M Gamma^E, d2 coefficients Gamma^E and d3
coefficients Gamma^M, so degree 2 * deg(connection) always suffices.
"""

import logging
from dataclasses import replace

from ..atiyah import build_operators, certificate_search, cocycle_closed_form, replay_certificate
from . import CheckFailed, CheckSkipped, VerifyContext

logger = logging.getLogger(__name__)


def difference_bound(ctx: VerifyContext) -> int:
    return max(ctx.problem.effective_degree_bound, 2 * ctx.problem.connection.degree())


def run(ctx: VerifyContext) -> str:
    problem = ctx.problem
    if problem.connection.is_trivial():
        raise CheckSkipped("trivial connection")
    trivial = replace(problem, connection=None)
    difference = cocycle_closed_form(problem) - cocycle_closed_form(trivial)
    if difference.is_zero():
        return "cocycles coincide"
    operators = build_operators(problem)
    bound = difference_bound(ctx)
    logger.info("searching a difference certificate up to degree %d", bound)
    certificate = certificate_search(problem, difference, operators, bound)
    if certificate is None:
        raise CheckFailed(f"no difference certificate up to degree {bound}")
    if not replay_certificate(difference, operators, certificate):
        raise CheckFailed("difference certificate does not replay")
    return f"difference certificate replayed (degree <= {bound})"
