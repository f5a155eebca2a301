# syntax.py
"""
Formula language: AST, lark grammar, parser, printer and desugaring.

Groups are frozensets of agent ids and families are frozensets of groups, so
two formulas that differ only in the order agents or groups were written
compare equal. The printer emits groups and families in sorted order and
parenthesizes exactly where the grammar needs it, so parse(render(f)) == f.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from errors import EmptyGroup, ParseError, UnknownAgent, UnknownEvent, UnknownEventModel

logger = logging.getLogger(__name__)

Group = frozenset   # frozenset[str]
Family = frozenset  # frozenset[frozenset[str]]

AGENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
PROP_RE = re.compile(r"[p-z][a-z0-9_]*\Z")


# --- groups and families -------------------------------------------------

def make_group(agents: Iterable[str]) -> frozenset:
    group = frozenset(agents)
    if not group:
        raise EmptyGroup("groups must contain at least one agent")
    for agent in group:
        if not isinstance(agent, str) or not AGENT_RE.match(agent):
            raise UnknownAgent(f"not an agent identifier: {agent!r}")
    return group


def make_family(groups: Iterable[Iterable[str]]) -> frozenset:
    family = frozenset(make_group(g) for g in groups)
    if not family:
        raise EmptyGroup("group families must contain at least one group")
    return family


def group_sort_key(group: frozenset) -> tuple:
    return tuple(sorted(group))


def sorted_groups(groups: Iterable[frozenset]) -> list[frozenset]:
    return sorted(groups, key=lambda g: (len(g), group_sort_key(g)))


def group_key(group: frozenset) -> str:
    """Document key of a group: sorted agent ids joined by commas."""
    return ",".join(sorted(group))


def render_group(group: frozenset) -> str:
    return "{" + ",".join(sorted(group)) + "}"


def render_family(family: frozenset) -> str:
    ordered = sorted(family, key=group_sort_key)
    return "{" + ",".join(render_group(g) for g in ordered) + "}"


# --- reading actions -----------------------------------------------------

ACTION_KINDS = ("pub", "res", "grp", "share", "map")


@dataclass(frozen=True)
class ReadingAction:
    """
    Written form of a semi-public reading action.

    kind is one of pub, res, grp, share, map. args holds:
      pub/res: (G,)
      grp:     (G1, ..., Gn) sorted
      share:   (G, H)
      map:     ((agent, G), ...) sorted by agent
    The action is universe independent; dynamics.resolve_action turns it into a
    ReadingMap over a concrete universe.
    """
    kind: str
    args: tuple

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ParseError(f"unknown reading action {self.kind!r}")
        if self.kind in ("pub", "res"):
            if len(self.args) != 1:
                raise ParseError(f"{self.kind} takes exactly one group")
            args = (make_group(self.args[0]),)
        elif self.kind == "grp":
            args = tuple(sorted({make_group(g) for g in self.args}, key=group_sort_key))
            if not args:
                raise EmptyGroup("grp needs at least one group")
        elif self.kind == "share":
            if len(self.args) != 2:
                raise ParseError("share takes two groups")
            args = (make_group(self.args[0]), make_group(self.args[1]))
        else:
            assignments = {}
            for agent, group in self.args:
                make_group([agent])
                if agent in assignments:
                    raise ParseError(f"agent {agent!r} assigned twice in map")
                assignments[agent] = make_group(group)
            if not assignments:
                raise EmptyGroup("map needs at least one assignment")
            args = tuple(sorted(assignments.items()))
        object.__setattr__(self, "args", args)

    def agents(self) -> frozenset:
        if self.kind == "map":
            found = set()
            for agent, group in self.args:
                found.add(agent)
                found |= group
            return frozenset(found)
        return frozenset().union(*self.args)

    def render(self) -> str:
        if self.kind in ("pub", "res"):
            return f"{self.kind}{render_group(self.args[0])}"
        if self.kind == "grp":
            return "grp(" + ";".join(render_group(g) for g in self.args) + ")"
        if self.kind == "share":
            return f"share({render_group(self.args[0])}:{render_group(self.args[1])})"
        return "map(" + ",".join(f"{a}:{render_group(g)}" for a, g in self.args) + ")"

    @classmethod
    def from_reads(cls, reads: Mapping[str, frozenset]) -> "ReadingAction":
        """
        Writes an arbitrary agent -> read-set assignment as a map(...) action.

        Agents reading only themselves are left out; the identity is written as
        the smallest agent reading itself.
        """
        changed = tuple((a, frozenset(g)) for a, g in sorted(reads.items()) if frozenset(g) != {a})
        if not changed:
            first = min(reads)
            changed = ((first, frozenset([first])),)
        return cls("map", changed)

    def __str__(self):
        return self.render()


# --- formula AST ---------------------------------------------------------

class Formula:
    """Base class of all formula nodes."""

    def __str__(self):
        return render_formula(self)


@dataclass(frozen=True, eq=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Comp(Formula):
    """B <= C: at the current state B's information entails C's."""
    left: frozenset
    right: frozenset

    def __post_init__(self):
        object.__setattr__(self, "left", make_group(self.left))
        object.__setattr__(self, "right", make_group(self.right))


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    sub: Formula

    def __post_init__(self):
        make_group([self.agent])


@dataclass(frozen=True)
class Dist(Formula):
    group: frozenset
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "group", make_group(self.group))


@dataclass(frozen=True)
class Common(Formula):
    group: frozenset
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "group", make_group(self.group))


@dataclass(frozen=True)
class Cd(Formula):
    """Common distributed knowledge of a family of groups."""
    family: frozenset
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "family", make_family(self.family))


@dataclass(frozen=True)
class SemiPub(Formula):
    action: ReadingAction
    sub: Formula


@dataclass(frozen=True)
class Event(Formula):
    model: str
    event: str
    sub: Formula


TRUE = Const(True)
FALSE = Const(False)

BINARY = (And, Or, Implies, Iff)
SUGAR = (Or, Implies, Iff, Know, Dist, Common)


def conjunction(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; `true` for an empty input."""
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def single_negation(f: Formula) -> Formula:
    """~f: strips one outer negation, or adds one."""
    return f.sub if isinstance(f, Not) else Not(f)


def children(f: Formula) -> tuple:
    if isinstance(f, (Const, Atom, Comp)):
        return ()
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return (f.sub,)


def subformulas(f: Formula) -> set:
    """All syntactic subformulas of f, f included."""
    found = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in found:
            continue
        found.add(g)
        stack.extend(children(g))
    return found


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def modal_depth(f: Formula) -> int:
    inner = max((modal_depth(c) for c in children(f)), default=0)
    if isinstance(f, (Know, Dist, Common, Cd, SemiPub, Event)):
        return inner + 1
    return inner


def agents(f: Formula) -> frozenset:
    """Agents mentioned anywhere in f, reading actions included."""
    found = set()
    for g in subformulas(f):
        if isinstance(g, Comp):
            found |= g.left | g.right
        elif isinstance(g, Know):
            found.add(g.agent)
        elif isinstance(g, (Dist, Common)):
            found |= g.group
        elif isinstance(g, Cd):
            for group in g.family:
                found |= group
        elif isinstance(g, SemiPub):
            found |= g.action.agents()
    return frozenset(found)


def props(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def event_refs(f: Formula) -> frozenset:
    return frozenset((g.model, g.event) for g in subformulas(f) if isinstance(g, Event))


def is_static(f: Formula) -> bool:
    return not any(isinstance(g, (SemiPub, Event)) for g in subformulas(f))


def desugar(f: Formula) -> Formula:
    """
    Rewrites derived connectives and K/D/C into Not/And/Cd.

    Args:
        f: Any formula.

    Returns:
        An equivalent formula built from Const, Atom, Comp, Not, And, Cd,
        SemiPub and Event nodes only.
    """
    if isinstance(f, (Const, Atom, Comp)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.sub))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return Not(And(desugar(f.left), Not(desugar(f.right))))
    if isinstance(f, Iff):
        left, right = desugar(f.left), desugar(f.right)
        return And(Not(And(left, Not(right))), Not(And(right, Not(left))))
    if isinstance(f, Know):
        return Cd(frozenset([frozenset([f.agent])]), desugar(f.sub))
    if isinstance(f, Dist):
        return Cd(frozenset([f.group]), desugar(f.sub))
    if isinstance(f, Common):
        return Cd(frozenset(frozenset([b]) for b in f.group), desugar(f.sub))
    if isinstance(f, Cd):
        return Cd(f.family, desugar(f.sub))
    if isinstance(f, SemiPub):
        return SemiPub(f.action, desugar(f.sub))
    if isinstance(f, Event):
        return Event(f.model, f.event, desugar(f.sub))
    raise TypeError(f"not a formula: {f!r}")


def is_desugared(f: Formula) -> bool:
    return not any(isinstance(g, SUGAR) for g in subformulas(f))


# --- printer -------------------------------------------------------------

PREC_IFF, PREC_IMPL, PREC_DISJ, PREC_CONJ, PREC_UNARY = range(5)


def render_formula(f: Formula) -> str:
    """Renders f in the concrete grammar with minimal parentheses."""
    return _render(f, PREC_IFF)


def _wrap(text: str, own: int, context: int) -> str:
    return f"({text})" if own < context else text


def _render_unary_body(f: Formula) -> str:
    text = _render(f, PREC_UNARY)
    return f"({text})" if isinstance(f, Comp) else text


def _render(f: Formula, context: int) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Comp):
        return f"{render_group(f.left)} <= {render_group(f.right)}"
    if isinstance(f, Iff):
        text = f"{_render(f.left, PREC_IFF)} <-> {_render(f.right, PREC_IMPL)}"
        return _wrap(text, PREC_IFF, context)
    if isinstance(f, Implies):
        text = f"{_render(f.left, PREC_DISJ)} -> {_render(f.right, PREC_IMPL)}"
        return _wrap(text, PREC_IMPL, context)
    if isinstance(f, Or):
        text = f"{_render(f.left, PREC_DISJ)} | {_render(f.right, PREC_CONJ)}"
        return _wrap(text, PREC_DISJ, context)
    if isinstance(f, And):
        text = f"{_render(f.left, PREC_CONJ)} & {_render(f.right, PREC_UNARY)}"
        return _wrap(text, PREC_CONJ, context)
    if isinstance(f, Not):
        return "~" + _render_unary_body(f.sub)
    body = _render_unary_body(f.sub)
    if isinstance(f, Know):
        return f"K {f.agent} {body}"
    if isinstance(f, Dist):
        return f"D{render_group(f.group)} {body}"
    if isinstance(f, Common):
        return f"C{render_group(f.group)} {body}"
    if isinstance(f, Cd):
        return f"Cd{render_family(f.family)} {body}"
    if isinstance(f, SemiPub):
        return f"[!{f.action.render()}] {body}"
    if isinstance(f, Event):
        return f"[{f.model}.{f.event}] {body}"
    raise TypeError(f"not a formula: {f!r}")


def formula_sort_key(f: Formula) -> tuple:
    return (size(f), render_formula(f))


# --- parser --------------------------------------------------------------

GRAMMAR = r"""
?start: formula

?formula: iff

?iff: impl
    | iff "<->" impl            -> iff_node

?impl: disj
    | disj "->" impl            -> implies_node

?disj: conj
    | disj "|" conj             -> or_node

?conj: unary
    | conj "&" unary            -> and_node

?unary: "~" unary               -> not_node
    | "true"                    -> true_node
    | "false"                   -> false_node
    | NAME                      -> prop_node
    | group "<=" group          -> comp_node
    | "K" NAME unary            -> know_node
    | "D" group unary           -> dist_node
    | "C" group unary           -> common_node
    | "Cd" family unary         -> cd_node
    | "[" action "]" unary      -> modal_node
    | "<" action ">" unary      -> modal_node
    | "(" formula ")"

group: "{" NAME ("," NAME)* "}"
family: "{" group ("," group)* "}"

?action: "!" readmap
    | EVENT_REF                 -> event_action

readmap: "pub" group                        -> pub_action
    | "res" group                           -> res_action
    | "grp" "(" group (";" group)* ")"      -> grp_action
    | "share" "(" group ":" group ")"       -> share_action
    | "map" "(" assign ("," assign)* ")"    -> map_action

assign: NAME ":" group

NAME: /[a-z][a-z0-9_]*/
EVENT_REF: /[A-Za-z_][A-Za-z0-9_]*\.[A-Za-z_][A-Za-z0-9_]*/

%import common.WS
%ignore WS
"""

_parser = Lark(GRAMMAR, parser="lalr", maybe_placeholders=False)


@v_args(inline=True)
class FormulaBuilder(Transformer):
    """Turns a parse tree into Formula nodes, checking names as it goes."""

    def __init__(self, universe=None, registry=None):
        super().__init__()
        self.universe = frozenset(universe) if universe is not None else None
        self.registry = registry

    def _agent(self, token) -> str:
        name = str(token)
        if self.universe is not None and name not in self.universe:
            raise UnknownAgent(
                f"unknown agent {name!r} at line {token.line}, column {token.column}")
        return name

    def group(self, *names):
        return frozenset(self._agent(n) for n in names)

    def family(self, *groups):
        return frozenset(groups)

    def true_node(self):
        return TRUE

    def false_node(self):
        return FALSE

    def prop_node(self, token):
        name = str(token)
        declared_agent = self.universe is not None and name in self.universe
        if declared_agent or not PROP_RE.match(name):
            raise ParseError(f"{name!r} is not a proposition", token.line, token.column,
                             ["proposition starting with p-z"])
        return Atom(name)

    def comp_node(self, left, right):
        return Comp(left, right)

    def not_node(self, sub):
        return Not(sub)

    def and_node(self, left, right):
        return And(left, right)

    def or_node(self, left, right):
        return Or(left, right)

    def implies_node(self, left, right):
        return Implies(left, right)

    def iff_node(self, left, right):
        return Iff(left, right)

    def know_node(self, agent, sub):
        return Know(self._agent(agent), sub)

    def dist_node(self, group, sub):
        return Dist(group, sub)

    def common_node(self, group, sub):
        return Common(group, sub)

    def cd_node(self, family, sub):
        return Cd(family, sub)

    def modal_node(self, action, sub):
        if isinstance(action, ReadingAction):
            return SemiPub(action, sub)
        model, event = action
        return Event(model, event, sub)

    def pub_action(self, group):
        return ReadingAction("pub", (group,))

    def res_action(self, group):
        return ReadingAction("res", (group,))

    def grp_action(self, *groups):
        return ReadingAction("grp", groups)

    def share_action(self, source, readers):
        return ReadingAction("share", (source, readers))

    def assign(self, agent, group):
        return (self._agent(agent), group)

    def map_action(self, *assignments):
        return ReadingAction("map", assignments)

    def event_action(self, token):
        model, event = str(token).split(".")
        if self.registry is None or model not in self.registry:
            raise UnknownEventModel(f"unknown event model {model!r}")
        if event not in self.registry[model].events:
            raise UnknownEvent(f"event model {model!r} has no event {event!r}")
        return (model, event)


def _expected(error: UnexpectedInput) -> list[str]:
    if isinstance(error, UnexpectedToken):
        return list(error.expected)
    if isinstance(error, UnexpectedCharacters):
        return list(error.allowed or [])
    return []


def parse_formula(text: str, universe: Iterable[str] | None = None, registry=None) -> Formula:
    """
    Parses a formula.

    Args:
        text: Formula source text.
        universe: Declared agents. None skips agent checks.
        registry: Mapping of event-model id to event model, used to resolve
            [E.e] modalities.

    Returns:
        The formula AST, sugar preserved as written.
    """
    if not text or not text.strip():
        raise ParseError("empty formula")
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        raise ParseError("syntax error", e.line, e.column, _expected(e)) from None
    try:
        return FormulaBuilder(universe, registry).transform(tree)
    except VisitError as e:
        raise e.orig_exc from None


def resugar(f: Formula) -> Formula:
    """Writes single-group Cd as D, for display. Booleans are left alone."""
    if isinstance(f, (Const, Atom, Comp)):
        return f
    if isinstance(f, BINARY):
        return type(f)(resugar(f.left), resugar(f.right))
    if isinstance(f, Cd):
        if len(f.family) == 1:
            (group,) = f.family
            return Dist(group, resugar(f.sub))
        return Cd(f.family, resugar(f.sub))
    if isinstance(f, SemiPub):
        return SemiPub(f.action, resugar(f.sub))
    if isinstance(f, Event):
        return Event(f.model, f.event, resugar(f.sub))
    return type(f)(*(getattr(f, name) for name in f.__dataclass_fields__ if name != "sub"), resugar(f.sub))


def parse_action(text: str, universe: Iterable[str] | None = None) -> ReadingAction:
    """Parses a written reading action such as "!pub{a}" (the "!" is optional)."""
    text = (text or "").strip()
    if not text:
        raise ParseError("empty action")
    if not text.startswith("!"):
        text = "!" + text
    f = parse_formula(f"[{text}] true", universe)
    if not isinstance(f, SemiPub):
        raise ParseError(f"not a reading action: {text!r}")
    return f.action
