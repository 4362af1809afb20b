"""Verify orchestrator -- runs the invariant checks in sequence, tracks state."""

import logging
import sys
from typing import Optional, TextIO

from .checks import CheckFailed, CheckSkipped, VerifyContext
from .checks.c1_connection import run as check_connection
from .checks.c2_homological import run as check_homological
from .checks.c3_routes import run as check_routes
from .checks.c4_independence import run as check_independence
from .checks.c5_verdict import run as check_verdict
from .checks.c6_theorem import run as check_theorem
from .errors import EngineError
from .state import CHECK_NAMES, CheckStatus, VerifyState

logger = logging.getLogger(__name__)

CHECK_RUNNERS = {
    "connection": check_connection,
    "homological": check_homological,
    "routes": check_routes,
    "independence": check_independence,
    "verdict": check_verdict,
    "theorem": check_theorem,
}


def run_checks(ctx: VerifyContext, progress: Optional[TextIO] = None) -> VerifyState:
    """Run every check in order; stop at the first failure.

    Banners go to ``progress`` (stderr by default) so stdout only carries the report.
    """
    out = sys.stderr if progress is None else progress
    state = VerifyState()

    for name in CHECK_NAMES:
        runner = CHECK_RUNNERS[name]
        print(f"\n{'=' * 60}", file=out)
        print(f"Check: {name}", file=out)
        print(f"{'=' * 60}", file=out)

        state.mark(name, CheckStatus.RUNNING)
        try:
            detail = runner(ctx)
        except CheckSkipped as exc:
            state.mark(name, CheckStatus.SKIPPED, str(exc))
            print(f"Check {name}: skipped -- {exc}", file=out)
            continue
        except (CheckFailed, EngineError) as exc:
            state.mark(name, CheckStatus.FAILED, str(exc))
            print(f"Check {name}: FAILED -- {exc}", file=out)
            logger.info("verify stopped at %s", name)
            break
        state.mark(name, CheckStatus.PASSED, detail)
        print(f"Check {name}: passed.", file=out)

    print(f"\n{state.summary()}", file=out)
    return state
