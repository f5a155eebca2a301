# checker.py
"""
Model checking on epistemic models and on pseudo-models.

Evaluation is bottom-up: every subformula gets its extension (the set of
states where it holds). Knowledge operators are boxes over partitions, so a
state satisfies them exactly when its whole block lies in the extension of
the body. Dynamic modalities build the updated model and evaluate there.
"""

import logging

from dynamics import product_state, product_update, resolve_action, semi_public_update
from errors import DynamicOperatorOnPseudoModel, UnknownEventModel
from models import EpistemicModel, PseudoModel, Relation, comparative_extension, family_rel
from syntax import (And, Atom, Cd, Common, Comp, Const, Dist, Event, Formula, Iff, Implies,
                    Know, Not, Or, SemiPub)

logger = logging.getLogger(__name__)


def box(relation: Relation, extension: frozenset) -> frozenset:
    """States whose whole block lies inside extension."""
    result = set()
    for block in relation.blocks:
        if block <= extension:
            result |= block
    return frozenset(result)


class ModelChecker:
    """
    Evaluates formulas on epistemic models.

    One instance is one evaluation pass: extensions and updated models are
    memoized per (model, formula) and (model, action) for its lifetime.

    Args:
        registry: Mapping of event-model id to ReadingEventModel.
    """

    def __init__(self, registry=None):
        self.registry = registry or {}
        self._extensions = {}
        self._updates = {}

    def check(self, m: EpistemicModel, s: str, f: Formula) -> bool:
        m.require_state(s)
        return s in self.extension(m, f)

    def valid_on(self, m: EpistemicModel, f: Formula) -> bool:
        return self.extension(m, f) == frozenset(m.states)

    def extension(self, m: EpistemicModel, f: Formula) -> frozenset:
        key = (m, f)
        cached = self._extensions.get(key)
        if cached is None:
            cached = self._evaluate(m, f)
            self._extensions[key] = cached
        return cached

    def _evaluate(self, m: EpistemicModel, f: Formula) -> frozenset:
        everything = frozenset(m.states)
        if isinstance(f, Const):
            return everything if f.value else frozenset()
        if isinstance(f, Atom):
            return frozenset(m.valuation.get(f.name, ()))
        if isinstance(f, Comp):
            return comparative_extension(m, f.left, f.right)
        if isinstance(f, Not):
            return everything - self.extension(m, f.sub)
        if isinstance(f, And):
            return self.extension(m, f.left) & self.extension(m, f.right)
        if isinstance(f, Or):
            return self.extension(m, f.left) | self.extension(m, f.right)
        if isinstance(f, Implies):
            return (everything - self.extension(m, f.left)) | self.extension(m, f.right)
        if isinstance(f, Iff):
            left, right = self.extension(m, f.left), self.extension(m, f.right)
            return everything - (left ^ right)
        if isinstance(f, Know):
            return box(m.group_rel([f.agent]), self.extension(m, f.sub))
        if isinstance(f, Dist):
            return box(m.group_rel(f.group), self.extension(m, f.sub))
        if isinstance(f, Common):
            return box(family_rel(m, ([a] for a in f.group)), self.extension(m, f.sub))
        if isinstance(f, Cd):
            return box(family_rel(m, f.family), self.extension(m, f.sub))
        if isinstance(f, SemiPub):
            return self.extension(self.semi_public(m, f.action), f.sub)
        if isinstance(f, Event):
            product = self.product(m, f.model)
            self.registry[f.model].require_event(f.event)
            inner = self.extension(product, f.sub)
            return frozenset(s for s in m.states if product_state(s, f.event) in inner)
        raise TypeError(f"not a formula: {f!r}")

    def semi_public(self, m: EpistemicModel, action) -> EpistemicModel:
        key = (m, action)
        updated = self._updates.get(key)
        if updated is None:
            updated = semi_public_update(m, resolve_action(action, m.universe))
            self._updates[key] = updated
        return updated

    def product(self, m: EpistemicModel, model_id: str) -> EpistemicModel:
        key = (m, ("event", model_id))
        updated = self._updates.get(key)
        if updated is None:
            if model_id not in self.registry:
                raise UnknownEventModel(f"unknown event model {model_id!r}")
            updated = product_update(m, self.registry[model_id])
            self._updates[key] = updated
            logger.debug(f"Built product with event model {model_id!r}: {len(updated.states)} states")
        return updated


def check(m: EpistemicModel, s: str, f: Formula, registry=None) -> bool:
    """
    Truth of f at state s of m.

    Args:
        m: The model.
        s: A state id of m.
        f: Any formula; [E.e] modalities resolve against registry.
        registry: Mapping of event-model id to ReadingEventModel.

    Returns:
        True when f holds at s.
    """
    return ModelChecker(registry).check(m, s, f)


def extension(m: EpistemicModel, f: Formula, registry=None) -> frozenset:
    return ModelChecker(registry).extension(m, f)


def valid_on(m: EpistemicModel, f: Formula, registry=None) -> bool:
    return ModelChecker(registry).valid_on(m, f)


def superior(m: EpistemicModel, s: str, left, right) -> bool:
    """Strict epistemic superiority: left <= right holds at s and right <= left does not."""
    m.require_state(s)
    return (s in comparative_extension(m, frozenset(left), frozenset(right))
            and s not in comparative_extension(m, frozenset(right), frozenset(left)))


# --- pseudo-models -------------------------------------------------------

def pseudo_extension(pm: PseudoModel, f: Formula, _cache=None) -> frozenset:
    """
    Extension of a static formula on a pseudo-model.

    Comparatives are read from the extended valuation and knowledge operators
    use the stored group relations as given.
    """
    cache = {} if _cache is None else _cache
    if f in cache:
        return cache[f]
    everything = frozenset(pm.states)

    def sub(g):
        return pseudo_extension(pm, g, cache)

    if isinstance(f, (SemiPub, Event)):
        raise DynamicOperatorOnPseudoModel(f"dynamic operator in {f} cannot be evaluated on a pseudo-model")
    if isinstance(f, Const):
        result = everything if f.value else frozenset()
    elif isinstance(f, Atom):
        result = frozenset(pm.xval.get(f.name, ()))
    elif isinstance(f, Comp):
        pm.group_rel(f.left)
        pm.group_rel(f.right)
        result = frozenset(pm.xval.get(f, ()))
    elif isinstance(f, Not):
        result = everything - sub(f.sub)
    elif isinstance(f, And):
        result = sub(f.left) & sub(f.right)
    elif isinstance(f, Or):
        result = sub(f.left) | sub(f.right)
    elif isinstance(f, Implies):
        result = (everything - sub(f.left)) | sub(f.right)
    elif isinstance(f, Iff):
        result = everything - (sub(f.left) ^ sub(f.right))
    elif isinstance(f, Know):
        result = box(pm.group_rel([f.agent]), sub(f.sub))
    elif isinstance(f, Dist):
        result = box(pm.group_rel(f.group), sub(f.sub))
    elif isinstance(f, Common):
        result = box(family_rel(pm, ([a] for a in f.group)), sub(f.sub))
    elif isinstance(f, Cd):
        result = box(family_rel(pm, f.family), sub(f.sub))
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[f] = result
    return result


def check_pseudo(pm: PseudoModel, s: str, f: Formula) -> bool:
    """
    Truth of a static formula at a pseudo-model state.

    Raises:
        DynamicOperatorOnPseudoModel: f contains [!a] or [E.e].
        UnknownGroup: f uses a group the pseudo-model stores no relation for.
    """
    pm.require_state(s)
    return s in pseudo_extension(pm, f)

