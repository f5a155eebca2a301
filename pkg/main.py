# main.py
"""
The main entry point for sharelogic.

Parses the command line, sets up logging and runs one command. Results go to
stdout, diagnostics to stderr, and the exit code tells the error category.
"""

import argparse
import logging
import sys

from cli import run
from config import config
from logger import setup_logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharelogic",
        description="Model checking, reduction and satisfiability for logics of information sharing.")
    parser.add_argument('--debug', action='store_true', help='Enable debug level logging on stderr.')
    parser.add_argument('--log-file', default=None, help='Also write the log to this file.')
    sub = parser.add_subparsers(dest="command", required=True)

    def with_events(p):
        p.add_argument('--events', action='append', default=[], metavar='PATH',
                       help='Event model file; its stem is the model id in formulas. Repeatable.')
        p.add_argument('--strict', action='store_true',
                       help='Reject read-sets that omit their reader instead of repairing them.')
        return p

    p = with_events(sub.add_parser("check", help="Evaluate a formula at a state."))
    p.add_argument('--model', required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--formula', required=True)

    p = sub.add_parser("update", help="Apply a semi-public action or an event model.")
    p.add_argument('--model', required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument('--action', help='Reading action, e.g. "!pub{a}".')
    how.add_argument('--event', metavar='PATH:EVENT', help='Event model file and event.')
    p.add_argument('--out', help='Write the result here instead of stdout.')
    p.add_argument('--dot', action='store_true', help='Emit Graphviz text instead of JSON.')
    p.add_argument('--strict', action='store_true')

    p = with_events(sub.add_parser("reduce", help="Compile a formula to a static one."))
    p.add_argument('--formula', required=True)
    p.add_argument('--agents', help='Comma separated agents; defaults to those of the formula.')

    for name, text in (("sat", "Decide satisfiability."), ("valid", "Decide validity.")):
        p = with_events(sub.add_parser(name, help=text))
        p.add_argument('--formula', required=True)
        p.add_argument('--agents', help='Comma separated agents; defaults to those of the formula.')
        p.add_argument('--witness', metavar='PATH', help='Write the witness pseudo-model here.')

    p = with_events(sub.add_parser("closure", help="List the closure of a formula."))
    p.add_argument('--formula', required=True)
    p.add_argument('--agents')
    p.add_argument('--lean', action='store_true', help='Omit family variants and D-unfoldings.')

    p = with_events(sub.add_parser("axioms", help="Print axiom instances."))
    p.add_argument('--agents', required=True)
    p.add_argument('--schema', action='append', default=[], help='Schema or set name. Repeatable.')
    p.add_argument('--budget', type=int, default=3, help='Instances per schema.')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--names', action='store_true', help='Prefix each instance with its schema name.')

    p = sub.add_parser("unravel", help="Unravel a pseudo-model to a bounded depth.")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--pseudo', metavar='PATH', help='Pseudo-model document.')
    source.add_argument('--model', metavar='PATH', help='Epistemic model document.')
    p.add_argument('--state', help='Root state; defaults to the designated or first state.')
    p.add_argument('--depth', type=int, default=None)
    return parser


def main(argv=None) -> int:
    """
    Runs one command.
    """
    args = build_parser().parse_args(argv)

    log_file = args.log_file or config.get("log_file") or None
    logger = setup_logger(debug=args.debug, level=config.get("log_level"), log_file=log_file)
    logger.info(f"Running command {args.command}")

    exit_code = run(args)
    logging.shutdown()
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
