# cli/main.py

import argparse
import importlib.metadata
import logging
import sys

from backend.errors import LabError
from backend.i18n.messages import error_text, msg
from cli.audit_cli import register_audit_subparser
from cli.common import config_from_args
from cli.forms_cli import register_forms_subparser
from cli.lifting_cli import register_lifting_subparser
from cli.lines_cli import register_lines_subparser
from cli.montecarlo_cli import register_montecarlo_subparser
from cli.states_cli import register_states_subparser

EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtlab",
        description="Grothendieck lab: finite-dimensional checks of cb-norm constructions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
            Examples:

            gtlab figure1
            gtlab lines --d-grid 1,2,4,8 --t-squared 1/3,3
            gtlab os-search --form scalar --length 1
            gtlab pipeline --form trace --n 2 --m 2
            gtlab audit --quick
            """
    )

    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--output-dir", dest="output_dir", help="Output root for run directories")
    parser.add_argument("--seed", type=int, default=None, help="Master seed")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    subparsers = parser.add_subparsers(
        dest="command",
        required=True
    )

    subparsers.add_parser(
        "version",
        help="Show gtlab version"
    )

    register_lines_subparser(subparsers)
    register_states_subparser(subparsers)
    register_forms_subparser(subparsers)
    register_lifting_subparser(subparsers)
    register_montecarlo_subparser(subparsers)
    register_audit_subparser(subparsers)
    return parser


def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="[%(asctime)s] %(levelname)s: %(message)s",
        datefmt="%Y-%m-%dT%H:%M:%S%z",
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "version":
        print(importlib.metadata.version("grothendieck-lab"))
        return 0

    _configure_logging(args)

    extra = {"quick": args.quick} if args.command == "audit" else {}
    try:
        cfg = config_from_args(args)
        result = args.func(cfg, **extra)
    except LabError as e:
        print(f"{msg('ERROR')}: {error_text(e)}", file=sys.stderr)
        return EXIT_USAGE

    print(f"{msg('REPORT_WRITTEN')}: {result.path}")
    checks = result.report["summary"]["checks"]
    print(msg("CHECKS_SUMMARY", **checks))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
