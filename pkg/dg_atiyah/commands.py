"""Command implementations: each takes a loaded problem file and returns a Report."""

import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import report as rp
from .atiyah import (
    VERDICT_EXIT_CODES,
    Amp1Problem,
    NonVanishing,
    Vanishes,
    build_operators,
    cocycle_closed_form,
    cocycle_definitional,
    decide,
    format_row,
    replay_certificate,
    replay_witness,
)
from .checks import VerifyContext
from .clean import CLEAN_EXIT_CODES, CleanUnknown, clean_check
from .config import EngineConfig
from .derived import tangent_clean_check
from .errors import EngineError, MissingWitnessError
from .problem import ProblemFile, discover, load_problem
from .report import Report
from .verify import run_checks

logger = logging.getLogger(__name__)

ROUTES = ("closed", "definitional")
OPERATOR_CHOICES = ("d1", "d2", "d3", "all")


@dataclass
class RunOptions:
    """Per-invocation flags; ``None`` bounds fall through to the file, then the config."""

    degree_bound: Optional[int] = None
    jet_order: Optional[int] = None
    route: str = "closed"
    check_both: bool = False
    which: str = "all"


def _first(*values):
    return next((v for v in values if v is not None), None)


def resolve_problem(pf: ProblemFile, options: RunOptions, config: EngineConfig) -> Amp1Problem:
    return pf.problem(
        degree_bound=_first(options.degree_bound, pf.degree_bound, config.search.degree_bound),
        jet_order=_first(options.jet_order, pf.jet_order, config.search.jet_order),
    )


def _parameters(problem: Amp1Problem, **extra) -> dict:
    return {
        "degree_bound": problem.effective_degree_bound,
        "jet_order": problem.jet_order,
        **extra,
    }


def _problem_tree(pf: ProblemFile, problem: Amp1Problem) -> dict:
    tree = {
        "kind": pf.kind,
        "vars": list(problem.variables),
        "fiber_rank": problem.m,
        "section": [str(c) for c in problem.section.components],
        "points": [rp.point(p) for p in problem.zero_points],
    }
    if pf.description:
        tree["description"] = pf.description
    return tree


def cmd_decide(pf: ProblemFile, options: RunOptions, config: EngineConfig) -> Report:
    problem = resolve_problem(pf, options, config)
    verdict = decide(problem, workers=config.workers)
    payload = {"problem": _problem_tree(pf, problem), **rp.verdict_tree(verdict)}
    if isinstance(verdict, Vanishes):
        cocycle = cocycle_closed_form(problem)
        # certificates solve d.f = Cocycle.coefficients(), diagonal entries halved
        payload["replay"] = {
            "basis": "symmetric-coefficients",
            "certificate_reproduces_cocycle": replay_certificate(
                cocycle, build_operators(problem), verdict.certificate
            )
        }
    elif isinstance(verdict, NonVanishing):
        payload["replay"] = {"jet_system_infeasible": replay_witness(problem, verdict)}
    return Report(
        command="decide",
        source=pf.source,
        status=verdict.kind.value,
        exit_code=VERDICT_EXIT_CODES[verdict.kind],
        parameters=_parameters(problem),
        payload=payload,
    )


def cmd_cocycle(pf: ProblemFile, options: RunOptions, config: EngineConfig) -> Report:
    problem = resolve_problem(pf, options, config)
    if options.route not in ROUTES:
        raise EngineError(f"unknown route {options.route!r}")
    builders = {"closed": cocycle_closed_form, "definitional": cocycle_definitional}
    cocycle = builders[options.route](problem)
    payload = {
        "problem": _problem_tree(pf, problem),
        "route": options.route,
        "cocycle": rp.cocycle_tree(cocycle),
    }
    status, exit_code = "computed", 0
    if options.check_both:
        other_route = "definitional" if options.route == "closed" else "closed"
        difference = builders[other_route](problem) - cocycle
        mismatches = [format_row(row) for row, value in difference.rows() if value]
        payload["routes_agree"] = not mismatches
        if mismatches:
            payload["mismatched_rows"] = mismatches
            status, exit_code = "routes differ", 1
        else:
            status = "routes agree"
    return Report(
        command="cocycle",
        source=pf.source,
        status=status,
        exit_code=exit_code,
        parameters={"route": options.route, "check_both": options.check_both},
        payload=payload,
    )


def cmd_operators(pf: ProblemFile, options: RunOptions, config: EngineConfig) -> Report:
    if options.which not in OPERATOR_CHOICES:
        raise EngineError(f"unknown operator {options.which!r}")
    problem = resolve_problem(pf, options, config)
    operators = build_operators(problem)
    kinds = ("d1", "d2", "d3") if options.which == "all" else (options.which,)
    return Report(
        command="operators",
        source=pf.source,
        status="computed",
        exit_code=0,
        parameters={"which": options.which},
        payload={
            "problem": _problem_tree(pf, problem),
            "operators": {kind: rp.matrix_tree(operators.by_kind(kind)) for kind in kinds},
        },
    )


def cmd_clean(pf: ProblemFile, options: RunOptions, config: EngineConfig) -> Report:
    if pf.kind == "amp1":
        if pf.witness is None:
            verdict = CleanUnknown("no zero-locus witness supplied")
        else:
            verdict = clean_check(pf.amp1.section, pf.witness, workers=config.workers)
    else:
        try:
            verdict = tangent_clean_check(pf.derived)
        except MissingWitnessError as exc:
            verdict = CleanUnknown(str(exc))
    return Report(
        command="clean",
        source=pf.source,
        status=verdict.kind.value,
        exit_code=CLEAN_EXIT_CODES[verdict.kind],
        parameters={},
        payload=rp.clean_tree(verdict),
    )


def cmd_verify(
    pf: ProblemFile, options: RunOptions, config: EngineConfig, progress=None
) -> Report:
    problem = resolve_problem(pf, options, config)
    ctx = VerifyContext(pf, problem, workers=config.workers)
    state = run_checks(ctx, progress=progress)
    failure = state.first_failure()
    payload = {"checks": state.to_tree(), "first_failure": failure}
    if ctx.verdict is not None:
        payload["verdict"] = ctx.verdict.kind.value
    return Report(
        command="verify",
        source=pf.source,
        status="passed" if state.passed else f"failed: {failure}",
        exit_code=0 if state.passed else 1,
        parameters=_parameters(problem),
        payload=payload,
    )


def verify_corpus(directory: Path, options: RunOptions, config: EngineConfig) -> Report:
    """Verify every problem file under ``directory``; one table row per file."""
    paths = discover(directory)
    rows = []
    failed = 0
    for path in paths:
        logger.info("verifying %s", path)
        try:
            pf = load_problem(path)
            result = cmd_verify(pf, options, config, progress=io.StringIO())
            status = "pass" if result.exit_code == 0 else "fail"
            detail = result.payload.get("verdict") or ""
            if result.exit_code:
                detail = result.payload["first_failure"]
        except EngineError as exc:
            status, detail = "error", str(exc)
        if status != "pass":
            failed += 1
        rows.append({"file": str(path), "status": status, "detail": detail})
    return Report(
        command="verify",
        source=str(directory),
        status="passed" if not failed else f"{failed} of {len(rows)} failed",
        exit_code=0 if not failed else 1,
        parameters={},
        payload={"files": rows},
        table=[[row["status"].upper(), row["file"], row["detail"]] for row in rows],
    )


COMMANDS = {
    "decide": cmd_decide,
    "cocycle": cmd_cocycle,
    "operators": cmd_operators,
    "clean": cmd_clean,
    "verify": cmd_verify,
}
