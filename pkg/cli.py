# cli.py
"""
Command handlers behind main.py.

Each cmd_* function takes the parsed argparse namespace, prints its result to
stdout and returns the process exit code. Errors are raised as ShareLogicError
subclasses; run() turns them into a one-line diagnostic and their exit code.
"""

import logging
import sys

from axioms import named_instances
from checker import check
from config import config
from decision import fl_closure, sat, unravel, unravelling_problems
from documents import dump_json, read_json, write_json
from dynamics import load_event_model, load_event_registry, product_update, resolve_action, semi_public_update
from errors import InputError, ShareLogicError
from models import load_model, load_pseudo, model_as_pseudo, model_to_document, model_to_dot, pseudo_to_document
from reducer import reduce
from syntax import (Not, desugar, formula_sort_key, is_static, make_group, parse_action, parse_formula,
                    render_formula, resugar)

logger = logging.getLogger(__name__)


def _strict(args) -> bool:
    return bool(getattr(args, "strict", False) or config.get("strict_reads", False))


def _registry(args) -> dict:
    return load_event_registry(getattr(args, "events", None) or [], strict=_strict(args))


def _agents(text: str | None):
    """Parses "a,b,c" into a group; None when the option was not given."""
    if text is None:
        return None
    names = [n.strip() for n in text.split(",") if n.strip()]
    return make_group(names)


def _load_model(path: str):
    return load_model(read_json(path))


def cmd_check(args) -> int:
    """Prints whether the formula holds at the state."""
    m = _load_model(args.model)
    registry = _registry(args)
    f = parse_formula(args.formula, m.universe, registry)
    print("true" if check(m, args.state, f, registry) else "false")
    return 0


def cmd_update(args) -> int:
    """
    Applies a semi-public action or a product update and prints the new model.

    --event takes PATH:EVENT. The product contains every event of the model;
    EVENT must exist in it and its states are the ones named "s@EVENT".
    """
    m = _load_model(args.model)
    if args.action:
        action = parse_action(args.action, m.universe)
        updated = semi_public_update(m, resolve_action(action, m.universe))
        logger.info(f"Applied !{action.render()}")
    else:
        path, sep, event = args.event.rpartition(":")
        if not sep or not path or not event:
            raise InputError(f"--event expects PATH:EVENT, got {args.event!r}")
        em = load_event_model(read_json(path), strict=_strict(args))
        em.require_event(event)
        updated = product_update(m, em)
    if args.dot:
        output = model_to_dot(updated)
    else:
        output = dump_json(model_to_document(updated))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(output + "\n")
        logger.info(f"Wrote updated model to {args.out}")
    else:
        print(output)
    return 0


def cmd_reduce(args) -> int:
    """Prints the static equivalent of the formula."""
    registry = _registry(args)
    universe = _agents(args.agents)
    f = parse_formula(args.formula, universe, registry)
    print(render_formula(resugar(reduce(f, registry, universe))))
    return 0


def _decide(args, negate: bool):
    registry = _registry(args)
    universe = _agents(args.agents)
    f = parse_formula(args.formula, universe, registry)
    result = sat(Not(f) if negate else f, universe, registry)
    if result.satisfiable and args.witness:
        write_json(args.witness, pseudo_to_document(result.witness, result.state))
    return result


def cmd_sat(args) -> int:
    """Prints sat or unsat; --witness writes the pseudo-model when sat."""
    result = _decide(args, negate=False)
    print("sat" if result.satisfiable else "unsat")
    return 0


def cmd_valid(args) -> int:
    """Prints valid or invalid; --witness writes a countermodel when invalid."""
    result = _decide(args, negate=True)
    print("invalid" if result.satisfiable else "valid")
    return 0


def cmd_closure(args) -> int:
    """Prints the closure, a count header first, then one formula per line."""
    registry = _registry(args)
    universe = _agents(args.agents)
    f = parse_formula(args.formula, universe, registry)
    f = desugar(f)
    if not is_static(f):
        f = reduce(f, registry, universe)
    closure = fl_closure(f, universe or frozenset(), full=not args.lean)
    print(f"count: {len(closure)}")
    for member in sorted(closure.members, key=formula_sort_key):
        print(render_formula(member))
    return 0


def cmd_axioms(args) -> int:
    """Prints instantiated axiom schemas, one per line."""
    universe = _agents(args.agents)
    registry = _registry(args)
    for name, f in named_instances(universe, args.schema or None, args.budget, args.seed, registry or None):
        print(f"{name}\t{render_formula(f)}" if args.names else render_formula(f))
    return 0


def cmd_unravel(args) -> int:
    """
    Prints history counts per depth and the result of the prefix checks.

    Returns 1 when a prefix property fails.
    """
    if args.pseudo:
        pm, designated = load_pseudo(read_json(args.pseudo))
    else:
        pm, designated = model_as_pseudo(_load_model(args.model)), None
    root = args.state or designated or pm.states[0]
    depth = args.depth if args.depth is not None else int(config.get("unravel_depth", 3))
    forest = unravel(pm, root, depth)
    for k, count in enumerate(forest.count_by_length()):
        print(f"depth {k}: {count}")
    print(f"edges: {len(forest.edges)}")
    print(f"tilde edges: {len(forest.tilde_edges)}")
    problems = unravelling_problems(pm, forest)
    if problems:
        for problem in problems:
            print(f"violation: {problem}")
        return 1
    print("prefix properties: ok")
    return 0


COMMANDS = {
    "check": cmd_check,
    "update": cmd_update,
    "reduce": cmd_reduce,
    "sat": cmd_sat,
    "valid": cmd_valid,
    "closure": cmd_closure,
    "axioms": cmd_axioms,
    "unravel": cmd_unravel,
}


def run(args) -> int:
    """Dispatches to the command handler and maps errors to exit codes."""
    try:
        return COMMANDS[args.command](args)
    except ShareLogicError as e:
        logger.debug(f"{type(e).__name__} in {args.command}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
