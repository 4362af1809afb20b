"""Entry point: python -m dg_atiyah"""

import logging
import sys
from typing import Optional

from .cli import parse_args
from .commands import COMMANDS, verify_corpus
from .errors import EXIT_INTERNAL, EngineError
from .problem import load_problem

logger = logging.getLogger("dg_atiyah")


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[list[str]] = None) -> int:
    try:
        config, options, args = parse_args(argv)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    _configure_logging(args.verbose)

    try:
        if args.command == "verify" and args.corpus is not None:
            report = verify_corpus(args.corpus, options, config)
        else:
            problem_file = load_problem(args.file)
            report = COMMANDS[args.command](problem_file, options, config)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyboardInterrupt:
        print("\ninterrupted", file=sys.stderr)
        return 130
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL

    print(report.render(config.report.format))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
