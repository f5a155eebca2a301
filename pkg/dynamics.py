# dynamics.py
"""
Reading maps, semi-public updates, reading event models and product update.

A reading map sends every agent to the set of agents whose information it
reads; every agent always reads itself. A semi-public update replaces each
agent's relation by the distributed knowledge relation of its read-set. Event
models attach a reading map to each event and let agents be uncertain which
event happened.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from config import config
from documents import EventModelDocument, read_json, validate_document
from errors import EventModelError, UniverseMismatch, UnknownAgent, UnknownEvent, PartitionError
from models import EpistemicModel, Relation, meet_all
from syntax import ReadingAction, make_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReadingMap:
    """Total map agent -> read-set over a fixed universe."""
    universe: frozenset
    reads: tuple  # ((agent, frozenset), ...) sorted by agent

    def __post_init__(self):
        table = dict(self.reads)
        if set(table) != set(self.universe):
            raise UniverseMismatch("a reading map must assign every agent of its universe")
        for agent, group in table.items():
            if agent not in group:
                raise EventModelError(f"agent {agent!r} must read its own information")
            unknown = group - self.universe
            if unknown:
                raise UnknownAgent(f"read-set of {agent!r} mentions unknown agents {sorted(unknown)}")
        object.__setattr__(self, "reads", tuple(sorted(table.items())))
        object.__setattr__(self, "_table", table)

    @classmethod
    def from_dict(cls, universe: Iterable[str], table: Mapping[str, Iterable[str]]) -> ReadingMap:
        return cls(frozenset(universe), tuple((a, frozenset(g)) for a, g in table.items()))

    def __call__(self, agent: str) -> frozenset:
        try:
            return self._table[agent]
        except KeyError:
            raise UnknownAgent(f"unknown agent {agent!r}") from None

    def as_dict(self) -> dict:
        return dict(self.reads)

    def lift(self, group: Iterable[str]) -> frozenset:
        return lift_reading(self, group)

    def is_identity(self) -> bool:
        return all(group == {a} for a, group in self.reads)

    def to_action(self) -> ReadingAction:
        return ReadingAction.from_reads(self.as_dict())

    def __str__(self):
        return self.to_action().render()


def identity(universe: Iterable[str]) -> ReadingMap:
    universe = frozenset(universe)
    return ReadingMap.from_dict(universe, {a: {a} for a in universe})


def public(universe: Iterable[str], group: Iterable[str]) -> ReadingMap:
    """Everybody reads the whole group."""
    universe, group = frozenset(universe), make_group(group)
    return ReadingMap.from_dict(universe, {a: group | {a} for a in universe})


def resolution(universe: Iterable[str], group: Iterable[str]) -> ReadingMap:
    """Members of the group read each other; outsiders read only themselves."""
    universe, group = frozenset(universe), make_group(group)
    return ReadingMap.from_dict(universe, {a: group if a in group else {a} for a in universe})


def within(universe: Iterable[str], groups: Iterable[Iterable[str]]) -> ReadingMap:
    """Each agent reads every listed group it belongs to."""
    universe = frozenset(universe)
    groups = [make_group(g) for g in groups]
    table = {}
    for a in universe:
        table[a] = frozenset({a}).union(*(g for g in groups if a in g))
    return ReadingMap.from_dict(universe, table)


def sharing(universe: Iterable[str], source: Iterable[str], readers: Iterable[str]) -> ReadingMap:
    """Members of readers additionally read the agents of source."""
    universe, source, readers = frozenset(universe), make_group(source), make_group(readers)
    return ReadingMap.from_dict(universe, {a: source | {a} if a in readers else {a} for a in universe})


def assigned(universe: Iterable[str], assignments: Iterable[tuple]) -> ReadingMap:
    """Listed agents read their group plus themselves; the rest read themselves."""
    universe = frozenset(universe)
    table = {a: {a} for a in universe}
    for agent, group in assignments:
        table[agent] = frozenset(group) | {agent}
    return ReadingMap.from_dict(universe, table)


def resolve_action(action: ReadingAction, universe: Iterable[str]) -> ReadingMap:
    """
    Interprets a written action over a concrete universe.

    Args:
        action: The parsed action.
        universe: Agents of the model the action is applied to.
    """
    universe = frozenset(universe)
    unknown = action.agents() - universe
    if unknown:
        raise UnknownAgent(f"action {action} mentions unknown agents {sorted(unknown)}")
    if action.kind == "pub":
        return public(universe, action.args[0])
    if action.kind == "res":
        return resolution(universe, action.args[0])
    if action.kind == "grp":
        return within(universe, action.args)
    if action.kind == "share":
        return sharing(universe, *action.args)
    return assigned(universe, action.args)


def lift_reading(alpha: ReadingMap, group: Iterable[str]) -> frozenset:
    """alpha(B): union of the read-sets of B's members."""
    group = make_group(group)
    unknown = group - alpha.universe
    if unknown:
        raise UnknownAgent(f"unknown agents {sorted(unknown)}")
    return frozenset().union(*(alpha(b) for b in group))


def compose_reading(alpha: ReadingMap, beta: ReadingMap) -> ReadingMap:
    """alpha after beta: each agent reads alpha(beta(a))."""
    if alpha.universe != beta.universe:
        raise UniverseMismatch("cannot compose reading maps over different universes")
    return ReadingMap.from_dict(alpha.universe, {a: lift_reading(alpha, beta(a)) for a in alpha.universe})


def lift_resolution_chain(universe: Iterable[str], groups: list, group: Iterable[str]) -> frozenset:
    """
    Image of a group under the composition of resolutions (G1)o...o(Gn).

    The innermost resolution (Gn) is applied first.
    """
    current = make_group(group)
    for g in reversed(groups):
        current = lift_reading(resolution(universe, g), current)
    return current


def reading_closure(maps: Iterable[ReadingMap]) -> set:
    """
    Least superset of maps closed under composition.

    Returns:
        A set of ReadingMap values.
    """
    closed = set(maps)
    universes = {m.universe for m in closed}
    if len(universes) > 1:
        raise UniverseMismatch("reading maps over different universes")
    frontier = set(closed)
    while frontier:
        found = set()
        for alpha in closed:
            for beta in frontier:
                for composed in (compose_reading(alpha, beta), compose_reading(beta, alpha)):
                    if composed not in closed:
                        found.add(composed)
        closed |= found
        frontier = found
    logger.debug(f"Reading closure has {len(closed)} maps")
    return closed


def semi_public_update(m: EpistemicModel, alpha: ReadingMap) -> EpistemicModel:
    """Each agent b ends up with the distributed knowledge relation of alpha(b)."""
    if alpha.universe != m.universe:
        raise UniverseMismatch("reading map and model have different agents")
    relations = {b: m.group_rel(alpha(b)) for b in sorted(m.universe)}
    return EpistemicModel(m.universe, m.states, relations, dict(m.valuation), m.projection)


# --- event models --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReadingEventModel:
    """Events, one partition of events per agent and a reading map per event."""
    universe: frozenset
    events: tuple
    erel: dict
    reads: dict
    _group_cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if not self.events:
            raise EventModelError("an event model needs at least one event")
        for agent in self.universe:
            if agent not in self.erel:
                raise EventModelError(f"no event relation for agent {agent!r}")
            if set(self.erel[agent].carrier) != set(self.events):
                raise EventModelError(f"event relation of {agent!r} is not over the events")
        for agent in self.erel:
            if agent not in self.universe:
                raise UnknownAgent(f"event relation given for undeclared agent {agent!r}")
        if set(self.reads) != set(self.events):
            raise EventModelError("every event needs a reading map")
        for event, alpha in self.reads.items():
            if alpha.universe != self.universe:
                raise UniverseMismatch(f"reading map of event {event!r} has a different universe")
        for agent in sorted(self.universe):
            for block in self.erel[agent].blocks:
                seen = {self.reads[e](agent) for e in block}
                if len(seen) > 1:
                    raise EventModelError(
                        f"agent {agent!r} cannot tell events {sorted(block)} apart "
                        f"but reads differently in them")

    def require_event(self, event: str):
        if event not in self.reads:
            raise UnknownEvent(f"unknown event {event!r}")

    def group_rel(self, group: Iterable[str]) -> Relation:
        group = make_group(group)
        cached = self._group_cache.get(group)
        if cached is None:
            unknown = group - self.universe
            if unknown:
                raise UnknownAgent(f"unknown agents {sorted(unknown)}")
            cached = meet_all(self.events, (self.erel[a] for a in sorted(group)))
            self._group_cache[group] = cached
        return cached


def event_model_from_map(alpha: ReadingMap, event: str = "e") -> ReadingEventModel:
    """Single-event model whose event performs alpha."""
    events = (event,)
    erel = {a: Relation.total(events) for a in alpha.universe}
    return ReadingEventModel(alpha.universe, events, erel, {event: alpha})


def load_event_model(document, strict: bool | None = None) -> ReadingEventModel:
    """
    Builds a ReadingEventModel from its document.

    Args:
        document: Parsed JSON or an EventModelDocument. reads lists deltas from
            the identity map.
        strict: Error instead of warning when a listed read-set omits its
            reader. Defaults to the strict_reads setting.
    """
    if strict is None:
        strict = bool(config.get("strict_reads", False))
    doc = validate_document(EventModelDocument, document)
    universe = frozenset(doc.agents)
    for agent in universe:
        make_group([agent])
    events = tuple(doc.events)
    erel = {}
    for agent, blocks in doc.relations.items():
        if agent not in universe:
            raise UnknownAgent(f"event relation given for undeclared agent {agent!r}")
        try:
            erel[agent] = Relation(events, blocks)
        except PartitionError as e:
            raise EventModelError(f"event relation of {agent!r}: {e}") from None
    reads = {}
    for event in events:
        table = {a: {a} for a in universe}
        for agent, group in doc.reads.get(event, {}).items():
            if agent not in universe:
                raise UnknownAgent(f"event {event!r} assigns a read-set to unknown agent {agent!r}")
            group = set(group)
            if agent not in group:
                if strict:
                    raise EventModelError(f"read-set of {agent!r} in event {event!r} omits {agent!r}")
                logger.warning(f"Read-set of {agent!r} in event {event!r} omits the reader; adding it")
                group.add(agent)
            table[agent] = group
        reads[event] = ReadingMap.from_dict(universe, table)
    for event in doc.reads:
        if event not in reads:
            raise UnknownEvent(f"reads given for unknown event {event!r}")
    model = ReadingEventModel(universe, events, erel, reads)
    logger.info(f"Loaded event model with events {list(events)}")
    return model


def event_model_to_document(em: ReadingEventModel) -> dict:
    reads = {}
    for event in em.events:
        delta = {a: sorted(g) for a, g in em.reads[event].reads if g != {a}}
        reads[event] = delta
    return {
        "agents": sorted(em.universe),
        "events": list(em.events),
        "relations": {a: em.erel[a].as_lists() for a in sorted(em.universe)},
        "reads": reads,
    }


def load_event_registry(paths: Iterable[str], strict: bool | None = None) -> dict:
    """Loads event-model files keyed by file stem (hack.json -> "hack")."""
    registry = {}
    for path in paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        if stem in registry:
            raise EventModelError(f"two event models named {stem!r}")
        registry[stem] = load_event_model(read_json(path), strict=strict)
    return registry


def product_state(s: str, e: str) -> str:
    return f"{s}@{e}"


def product_update(m: EpistemicModel, em: ReadingEventModel) -> EpistemicModel:
    """
    Product of a model with a reading event model.

    (s,e) ~a (t,f) iff s ~G t for G the read-set of a in e, and e ~a f.
    States are named "s@e" and projection maps each name back to (s, e).
    """
    if m.universe != em.universe:
        raise UniverseMismatch("event model and model have different agents")
    pairs = [(s, e) for s in m.states for e in em.events]
    projection = {product_state(s, e): (s, e) for s, e in pairs}
    if len(projection) != len(pairs):
        raise EventModelError("product state names collide")
    states = tuple(projection)

    relations = {}
    for agent in sorted(m.universe):
        event_rel = em.erel[agent]
        for block in event_rel.blocks:
            if len({em.reads[e](agent) for e in block}) > 1:
                raise EventModelError(f"agent {agent!r} reads differently in indistinguishable events")

        def key(state, agent=agent, event_rel=event_rel):
            s, e = projection[state]
            group = em.reads[e](agent)
            return (event_rel.block_of(e), m.group_rel(group).block_of(s))

        relations[agent] = Relation.by_key(states, key)

    valuation = {p: frozenset(x for x in states if projection[x][0] in ext) for p, ext in m.valuation.items()}
    logger.info(f"Product update: {len(m.states)} states x {len(em.events)} events")
    return EpistemicModel(m.universe, states, relations, valuation, projection)


def compose_events(first: ReadingEventModel, second: ReadingEventModel, separator: str = ";") -> ReadingEventModel:
    """
    Sequential composition: first happens, then second.

    e;f ~a e';f' iff e ~G e' for G the read-set of a in f, and f ~a f'.
    The composite event reads as (e;f)(a) = e(f(a)). separator joins the two
    event names; use "_" when the composite must be addressable from formulas.
    """
    if first.universe != second.universe:
        raise UniverseMismatch("cannot compose event models over different universes")
    names = {(e, f): f"{e}{separator}{f}" for e in first.events for f in second.events}
    if len(set(names.values())) != len(names):
        raise EventModelError("composed event names collide")
    events = tuple(names.values())
    pair_of = {name: pair for pair, name in names.items()}

    erel = {}
    for agent in sorted(first.universe):
        def key(name, agent=agent):
            e, f = pair_of[name]
            group = second.reads[f](agent)
            return (second.erel[agent].block_of(f), first.group_rel(group).block_of(e))

        erel[agent] = Relation.by_key(events, key)

    reads = {name: compose_reading(first.reads[e], second.reads[f]) for (e, f), name in names.items()}
    return ReadingEventModel(first.universe, events, erel, reads)
