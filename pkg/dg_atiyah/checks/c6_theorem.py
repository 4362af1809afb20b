"""Check 6: the Atiyah class vanishes exactly when the intersection is clean."""

from ..atiyah import Vanishes
from ..clean import Clean, CleanUnknown, clean_check
from ..derived import kernel_bound_check, tangent_clean_check, zero_locus_iso_check
from ..errors import MissingWitnessError
from . import CheckFailed, CheckSkipped, VerifyContext


def _clean_verdict(ctx: VerifyContext):
    pf = ctx.problem_file
    if pf.kind == "amp1":
        if pf.witness is None:
            raise CheckSkipped("no zero-locus witness")
        return clean_check(ctx.problem.section, pf.witness, workers=ctx.workers)

    report = zero_locus_iso_check(pf.derived, ctx.problem)
    if not report.consistent:
        raise CheckFailed("; ".join(report.mismatches))
    mismatches = kernel_bound_check(pf.derived)
    if mismatches:
        raise CheckFailed("; ".join(mismatches))
    try:
        return tangent_clean_check(pf.derived)
    except MissingWitnessError as exc:
        raise CheckSkipped(str(exc)) from None


def run(ctx: VerifyContext) -> str:
    if ctx.verdict is None:
        raise CheckSkipped("no verdict")
    clean = _clean_verdict(ctx)
    if isinstance(clean, CleanUnknown):
        raise CheckFailed(f"clean oracle is inconclusive: {clean.reason}")
    vanishes = isinstance(ctx.verdict, Vanishes)
    if vanishes != isinstance(clean, Clean):
        raise CheckFailed(f"{ctx.verdict.kind.value} but the oracle says {clean.kind.value}")
    return f"{ctx.verdict.kind.value} and {clean.kind.value}"
