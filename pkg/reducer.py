# reducer.py
"""
Compiles dynamic formulas into equivalent static ones.

Rewriting is innermost-first: the body of a dynamic modality is reduced to a
static formula before the modality is pushed through it, so every push sees
only Const, Atom, Comp, Not, And and Cd nodes.

Semi-public actions distribute over every static connective. Reading events
distribute over the Booleans, turn comparatives into comparatives or `false`,
and turn distributed knowledge into a conjunction over the events the group
cannot tell apart. Events have no law for Cd over several groups.
"""

import logging

from config import config
from dynamics import ReadingEventModel, ReadingMap, lift_reading, resolve_action
from errors import EventOperatorPresent, ReductionError, UnknownEventModel, UnsupportedFragment
from syntax import (FALSE, And, Atom, Cd, Comp, Const, Event, Formula, Not, SemiPub, agents,
                    conjunction, desugar, render_formula, subformulas)

logger = logging.getLogger(__name__)


class Reducer:
    """
    One reduction pass.

    Args:
        registry: Mapping of event-model id to ReadingEventModel.
        universe: Agents used to interpret reading actions. Lifting a group
            through any written action does not depend on agents outside the
            formula, so the formula's own agents suffice.
        max_steps: Bound on push steps; defaults to the reduce_max_steps setting.
    """

    def __init__(self, registry=None, universe=frozenset(), max_steps: int | None = None):
        self.registry = registry or {}
        self.universe = frozenset(universe)
        self.max_steps = max_steps if max_steps is not None else int(config.get("reduce_max_steps", 200000))
        self.steps = 0
        self._maps = {}
        self._pushed = {}

    def _tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise ReductionError(f"reduction exceeded {self.max_steps} steps")

    def reading_map(self, action) -> ReadingMap:
        alpha = self._maps.get(action)
        if alpha is None:
            alpha = resolve_action(action, self.universe | action.agents())
            self._maps[action] = alpha
        return alpha

    def event_model(self, model_id: str) -> ReadingEventModel:
        try:
            return self.registry[model_id]
        except KeyError:
            raise UnknownEventModel(f"unknown event model {model_id!r}") from None

    def static(self, f: Formula) -> Formula:
        """Reduces a desugared formula to a static one."""
        if isinstance(f, (Const, Atom, Comp)):
            return f
        if isinstance(f, Not):
            return Not(self.static(f.sub))
        if isinstance(f, And):
            return And(self.static(f.left), self.static(f.right))
        if isinstance(f, Cd):
            return Cd(f.family, self.static(f.sub))
        if isinstance(f, SemiPub):
            return self.push_map(self.reading_map(f.action), self.static(f.sub))
        if isinstance(f, Event):
            em = self.event_model(f.model)
            em.require_event(f.event)
            return self.push_event(em, f.model, f.event, self.static(f.sub))
        raise TypeError(f"formula is not desugared: {f!r}")

    def push_map(self, alpha: ReadingMap, f: Formula) -> Formula:
        key = (alpha, f)
        if key in self._pushed:
            return self._pushed[key]
        self._tick()
        if isinstance(f, (Const, Atom)):
            result = f
        elif isinstance(f, Not):
            result = Not(self.push_map(alpha, f.sub))
        elif isinstance(f, And):
            result = And(self.push_map(alpha, f.left), self.push_map(alpha, f.right))
        elif isinstance(f, Comp):
            result = Comp(lift_reading(alpha, f.left), lift_reading(alpha, f.right))
        elif isinstance(f, Cd):
            family = frozenset(lift_reading(alpha, g) for g in f.family)
            result = Cd(family, self.push_map(alpha, f.sub))
        else:
            raise TypeError(f"cannot push a reading action through {f!r}")
        self._pushed[key] = result
        return result

    def push_event(self, em: ReadingEventModel, model_id: str, event: str, f: Formula) -> Formula:
        key = (model_id, event, f)
        if key in self._pushed:
            return self._pushed[key]
        self._tick()
        reads = em.reads[event]
        if isinstance(f, (Const, Atom)):
            result = f
        elif isinstance(f, Not):
            result = Not(self.push_event(em, model_id, event, f.sub))
        elif isinstance(f, And):
            result = And(self.push_event(em, model_id, event, f.left),
                         self.push_event(em, model_id, event, f.right))
        elif isinstance(f, Comp):
            left_block = em.group_rel(f.left).block_of(event)
            right_block = em.group_rel(f.right).block_of(event)
            if left_block <= right_block:
                result = Comp(lift_reading(reads, f.left), lift_reading(reads, f.right))
            else:
                result = FALSE
        elif isinstance(f, Cd):
            if len(f.family) != 1:
                raise UnsupportedFragment(
                    f"no reduction for common distributed knowledge after event {model_id}.{event}: "
                    f"{render_formula(f)}")
            (group,) = f.family
            lifted = frozenset([lift_reading(reads, group)])
            alternatives = [e for e in em.events if e in em.group_rel(group).block_of(event)]
            result = conjunction(Cd(lifted, self.push_event(em, model_id, alt, f.sub)) for alt in alternatives)
        else:
            raise TypeError(f"cannot push an event through {f!r}")
        self._pushed[key] = result
        return result


def _universe_for(f: Formula, registry, universe) -> frozenset:
    found = set(agents(f))
    if universe is not None:
        found |= set(universe)
    for em in (registry or {}).values():
        found |= em.universe
    return frozenset(found)


def reduce_semipublic(f: Formula, universe=None) -> Formula:
    """
    Removes every [!a] modality.

    Args:
        f: Formula without [E.e] modalities.
        universe: Optional extra agents.

    Returns:
        An equivalent static, desugared formula.
    """
    if any(isinstance(g, Event) for g in subformulas(f)):
        raise EventOperatorPresent("formula contains event modalities; use reduce_event or reduce")
    reducer = Reducer(universe=_universe_for(f, None, universe))
    return reducer.static(desugar(f))


def reduce_event(f: Formula, registry, universe=None) -> Formula:
    """
    Removes every [E.e] modality from a formula without [!a] modalities.

    Raises:
        UnsupportedFragment: a Cd over several groups (or C over several
            agents) occurs under an event modality.
    """
    if any(isinstance(g, SemiPub) for g in subformulas(f)):
        raise UnsupportedFragment("formula contains semi-public actions; use reduce")
    reducer = Reducer(registry, _universe_for(f, registry, universe))
    return reducer.static(desugar(f))


def reduce(f: Formula, registry=None, universe=None) -> Formula:
    """
    Compiles any formula to an equivalent static one.

    Static input comes back desugared but otherwise unchanged.
    """
    reducer = Reducer(registry, _universe_for(f, registry, universe))
    result = reducer.static(desugar(f))
    logger.info(f"Reduced formula in {reducer.steps} steps")
    return result
