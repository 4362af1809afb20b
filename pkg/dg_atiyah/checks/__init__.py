"""Invariant checks run by the verify command.

Each module exposes ``run(ctx) -> str``: the returned text is the pass
detail, ``CheckFailed`` marks a failure and ``CheckSkipped`` a check that
does not apply to the problem.
"""

from dataclasses import dataclass
from typing import Optional

from ..atiyah import Amp1Problem, Verdict
from ..problem import ProblemFile


class CheckFailed(Exception):
    pass


class CheckSkipped(Exception):
    pass


@dataclass
class VerifyContext:
    problem_file: ProblemFile
    problem: Amp1Problem
    workers: int = 1
    verdict: Optional[Verdict] = None  # set by the verdict check
