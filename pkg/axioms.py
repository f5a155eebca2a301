# axioms.py
"""
Catalogue of axiom and reduction-law schemas, instantiated over concrete agents.

Each schema is a function (rng, universe, fillers, registry) -> formula or
None; None means the schema has no instance in this setting (for example a
schema that needs two distinct groups over a one-agent universe). Every
instance is meant to be valid, which is how the test suite uses them.
"""

import logging
import random
from typing import Iterator

from dynamics import compose_events, compose_reading, lift_reading, resolve_action
from errors import InputError
from models import nonempty_groups
from syntax import (And, Atom, Cd, Common, Comp, Dist, Event, Formula, Iff, Implies, Know, Not,
                    SemiPub, ReadingAction, conjunction)
from generators import random_action, random_family

logger = logging.getLogger(__name__)

FILLERS = (Atom("p"), Atom("q"), Not(Atom("p")))


def _group(rng, universe):
    return rng.choice(nonempty_groups(universe))


def _pick(rng, fillers):
    return rng.choice(fillers)


# --- knowledge (S5 for D, common knowledge) ------------------------------

def d_distribution(rng, universe, fillers, registry):
    b, phi, psi = _group(rng, universe), _pick(rng, fillers), _pick(rng, fillers)
    return Implies(Dist(b, Implies(phi, psi)), Implies(Dist(b, phi), Dist(b, psi)))


def veracity(rng, universe, fillers, registry):
    b, phi = _group(rng, universe), _pick(rng, fillers)
    return Implies(Dist(b, phi), phi)


def positive_introspection(rng, universe, fillers, registry):
    b, phi = _group(rng, universe), _pick(rng, fillers)
    return Implies(Dist(b, phi), Dist(b, Dist(b, phi)))


def negative_introspection(rng, universe, fillers, registry):
    b, phi = _group(rng, universe), _pick(rng, fillers)
    return Implies(Not(Dist(b, phi)), Dist(b, Not(Dist(b, phi))))


def monotonicity(rng, universe, fillers, registry):
    c = _group(rng, universe)
    subgroups = [g for g in nonempty_groups(c)]
    b, phi = rng.choice(subgroups), _pick(rng, fillers)
    return Implies(Dist(b, phi), Dist(c, phi))


def c_distribution(rng, universe, fillers, registry):
    b, phi, psi = _group(rng, universe), _pick(rng, fillers), _pick(rng, fillers)
    return Implies(Common(b, Implies(phi, psi)), Implies(Common(b, phi), Common(b, psi)))


def c_fixed_point(rng, universe, fillers, registry):
    b, phi = _group(rng, universe), _pick(rng, fillers)
    common = Common(b, phi)
    return Implies(common, And(phi, conjunction(Know(a, common) for a in sorted(b))))


def c_induction(rng, universe, fillers, registry):
    b, phi = _group(rng, universe), _pick(rng, fillers)
    step = Implies(phi, conjunction(Know(a, phi) for a in sorted(b)))
    return Implies(Common(b, step), Implies(phi, Common(b, phi)))


# --- comparatives --------------------------------------------------------

def inclusion(rng, universe, fillers, registry):
    b = _group(rng, universe)
    return Comp(b, rng.choice(nonempty_groups(b)))


def additivity(rng, universe, fillers, registry):
    b, c, e = (_group(rng, universe) for _ in range(3))
    return Implies(And(Comp(b, c), Comp(b, e)), Comp(b, c | e))


def transitivity(rng, universe, fillers, registry):
    b, c, e = (_group(rng, universe) for _ in range(3))
    return Implies(And(Comp(b, c), Comp(c, e)), Comp(b, e))


def known_superiority(rng, universe, fillers, registry):
    b, c = _group(rng, universe), _group(rng, universe)
    return Implies(Comp(b, c), Dist(b, Comp(b, c)))


def known_inferiority(rng, universe, fillers, registry):
    b, c = _group(rng, universe), _group(rng, universe)
    return Implies(Not(Comp(b, c)), Dist(b, Not(Comp(b, c))))


def knowledge_transfer(rng, universe, fillers, registry):
    b, c, phi = _group(rng, universe), _group(rng, universe), _pick(rng, fillers)
    return Implies(Comp(b, c), Implies(Dist(c, phi), Dist(b, phi)))


# --- common distributed knowledge ---------------------------------------

def cd_distribution(rng, universe, fillers, registry):
    family, phi, psi = random_family(rng, sorted(universe)), _pick(rng, fillers), _pick(rng, fillers)
    return Implies(Cd(family, Implies(phi, psi)), Implies(Cd(family, phi), Cd(family, psi)))


def cd_fixed_point(rng, universe, fillers, registry):
    family, phi = random_family(rng, sorted(universe)), _pick(rng, fillers)
    cd = Cd(family, phi)
    return Implies(cd, And(phi, conjunction(Dist(b, cd) for b in sorted(family, key=sorted))))


def cd_induction(rng, universe, fillers, registry):
    family, phi = random_family(rng, sorted(universe)), _pick(rng, fillers)
    step = Implies(phi, conjunction(Dist(b, phi) for b in sorted(family, key=sorted)))
    return Implies(Cd(family, step), Implies(phi, Cd(family, phi)))


def cd_negative_introspection(rng, universe, fillers, registry):
    family, phi = random_family(rng, sorted(universe)), _pick(rng, fillers)
    cd = Cd(family, phi)
    return Implies(Not(cd), Cd(family, Not(cd)))


# --- semi-public reduction laws -----------------------------------------

def _action_and_map(rng, universe):
    action = random_action(rng, sorted(universe))
    return action, resolve_action(action, universe)


def semipub_atom(rng, universe, fillers, registry):
    action, _ = _action_and_map(rng, universe)
    return Iff(SemiPub(action, Atom("p")), Atom("p"))


def semipub_negation(rng, universe, fillers, registry):
    action, _ = _action_and_map(rng, universe)
    phi = _pick(rng, fillers)
    return Iff(SemiPub(action, Not(phi)), Not(SemiPub(action, phi)))


def semipub_conjunction(rng, universe, fillers, registry):
    action, _ = _action_and_map(rng, universe)
    phi, psi = _pick(rng, fillers), _pick(rng, fillers)
    return Iff(SemiPub(action, And(phi, psi)), And(SemiPub(action, phi), SemiPub(action, psi)))


def semipub_comparative(rng, universe, fillers, registry):
    action, alpha = _action_and_map(rng, universe)
    b, c = _group(rng, universe), _group(rng, universe)
    return Iff(SemiPub(action, Comp(b, c)), Comp(lift_reading(alpha, b), lift_reading(alpha, c)))


def semipub_cd(rng, universe, fillers, registry):
    action, alpha = _action_and_map(rng, universe)
    family, phi = random_family(rng, sorted(universe)), _pick(rng, fillers)
    lifted = frozenset(lift_reading(alpha, b) for b in family)
    return Iff(SemiPub(action, Cd(family, phi)), Cd(lifted, SemiPub(action, phi)))


def semipub_composition(rng, universe, fillers, registry):
    first, alpha = _action_and_map(rng, universe)
    second, beta = _action_and_map(rng, universe)
    phi = rng.choice((Dist(_group(rng, universe), _pick(rng, fillers)), _pick(rng, fillers),
                      Comp(_group(rng, universe), _group(rng, universe))))
    composite = compose_reading(alpha, beta).to_action()
    return Iff(SemiPub(first, SemiPub(second, phi)), SemiPub(composite, phi))


# --- bridges between actions and group knowledge ------------------------

def announced_superiority(rng, universe, fillers, registry):
    g, b = _group(rng, universe), _group(rng, universe)
    return SemiPub(ReadingAction("pub", (g,)), Comp(b, g))


def public_reading(rng, universe, fillers, registry):
    g, b = _group(rng, universe), rng.choice(sorted(universe))
    p = Atom("p")
    return Implies(Dist(g | {b}, p), SemiPub(ReadingAction("pub", (g,)), Know(b, p)))


def resolution_bridge(rng, universe, fillers, registry):
    g = _group(rng, universe)
    p = Atom("p")
    return Iff(Dist(g, p), SemiPub(ReadingAction("res", (g,)), Common(g, p)))


def grouped_resolution_bridge(rng, universe, fillers, registry):
    """Sharing within mutually disjoint groups yields common knowledge of the union."""
    agents = sorted(universe)
    rng.shuffle(agents)
    cuts = sorted(rng.sample(range(1, len(agents)), rng.randint(0, len(agents) - 1)))
    chunks = [frozenset(agents[i:j]) for i, j in zip([0] + cuts, cuts + [len(agents)])]
    family = frozenset(rng.sample(chunks, rng.randint(1, len(chunks))))
    p = Atom("p")
    everyone = frozenset().union(*family)
    return Iff(Cd(family, p), SemiPub(ReadingAction("grp", tuple(family)), Common(everyone, p)))


# --- event laws ----------------------------------------------------------

def _event(rng, registry):
    model_id = rng.choice(sorted(registry))
    em = registry[model_id]
    return model_id, em, rng.choice(em.events)


def event_atom(rng, universe, fillers, registry):
    model_id, _, e = _event(rng, registry)
    return Iff(Event(model_id, e, Atom("p")), Atom("p"))


def event_negation(rng, universe, fillers, registry):
    model_id, _, e = _event(rng, registry)
    phi = _pick(rng, fillers)
    return Iff(Event(model_id, e, Not(phi)), Not(Event(model_id, e, phi)))


def event_conjunction(rng, universe, fillers, registry):
    model_id, _, e = _event(rng, registry)
    phi, psi = _pick(rng, fillers), _pick(rng, fillers)
    return Iff(Event(model_id, e, And(phi, psi)), And(Event(model_id, e, phi), Event(model_id, e, psi)))


def event_comparative(rng, universe, fillers, registry):
    model_id, em, e = _event(rng, registry)
    b, c = _group(rng, em.universe), _group(rng, em.universe)
    lhs = Event(model_id, e, Comp(b, c))
    if em.group_rel(b).block_of(e) <= em.group_rel(c).block_of(e):
        reads = em.reads[e]
        return Iff(lhs, Comp(lift_reading(reads, b), lift_reading(reads, c)))
    return Not(lhs)


def event_distributed(rng, universe, fillers, registry):
    model_id, em, e = _event(rng, registry)
    b, phi = _group(rng, em.universe), _pick(rng, fillers)
    lifted = lift_reading(em.reads[e], b)
    alternatives = [f for f in em.events if f in em.group_rel(b).block_of(e)]
    return Iff(Event(model_id, e, Dist(b, phi)),
               conjunction(Dist(lifted, Event(model_id, f, phi)) for f in alternatives))


def event_composition(rng, universe, fillers, registry):
    """[E.e][F.f] phi <-> [E_F.e_f] phi; registers the composite model."""
    first_id, first, e = _event(rng, registry)
    second_id, second, f = _event(rng, registry)
    if first.universe != second.universe:
        return None
    composite_id = f"{first_id}_{second_id}"
    if composite_id not in registry:
        registry[composite_id] = compose_events(first, second, separator="_")
    phi = rng.choice((_pick(rng, fillers), Dist(_group(rng, first.universe), _pick(rng, fillers))))
    return Iff(Event(first_id, e, Event(second_id, f, phi)), Event(composite_id, f"{e}_{f}", phi))


SCHEMAS = {
    "d_distribution": d_distribution,
    "veracity": veracity,
    "positive_introspection": positive_introspection,
    "negative_introspection": negative_introspection,
    "monotonicity": monotonicity,
    "c_distribution": c_distribution,
    "c_fixed_point": c_fixed_point,
    "c_induction": c_induction,
    "inclusion": inclusion,
    "additivity": additivity,
    "transitivity": transitivity,
    "known_superiority": known_superiority,
    "known_inferiority": known_inferiority,
    "knowledge_transfer": knowledge_transfer,
    "cd_distribution": cd_distribution,
    "cd_fixed_point": cd_fixed_point,
    "cd_induction": cd_induction,
    "cd_negative_introspection": cd_negative_introspection,
    "semipub_atom": semipub_atom,
    "semipub_negation": semipub_negation,
    "semipub_conjunction": semipub_conjunction,
    "semipub_comparative": semipub_comparative,
    "semipub_cd": semipub_cd,
    "semipub_composition": semipub_composition,
    "announced_superiority": announced_superiority,
    "public_reading": public_reading,
    "resolution_bridge": resolution_bridge,
    "grouped_resolution_bridge": grouped_resolution_bridge,
}

EVENT_SCHEMAS = {
    "event_atom": event_atom,
    "event_negation": event_negation,
    "event_conjunction": event_conjunction,
    "event_comparative": event_comparative,
    "event_distributed": event_distributed,
    "event_composition": event_composition,
}

SCHEMA_SETS = {
    "knowledge": ["d_distribution", "veracity", "positive_introspection", "negative_introspection",
                  "monotonicity", "c_distribution", "c_fixed_point", "c_induction"],
    "comparative": ["inclusion", "additivity", "transitivity", "known_superiority", "known_inferiority",
                    "knowledge_transfer"],
    "cd": ["cd_distribution", "cd_fixed_point", "cd_induction", "cd_negative_introspection"],
    "semipub": ["semipub_atom", "semipub_negation", "semipub_conjunction", "semipub_comparative",
                "semipub_cd", "semipub_composition"],
    "bridge": ["announced_superiority", "public_reading", "resolution_bridge", "grouped_resolution_bridge"],
    "event": list(EVENT_SCHEMAS),
}


def schema_names(selection=None, with_events: bool = False) -> list[str]:
    """
    Expands a selection of schema and set names.

    Args:
        selection: Names from SCHEMAS, EVENT_SCHEMAS or SCHEMA_SETS; None
            selects every schema (event schemas only when with_events).
    """
    if selection is None:
        return list(SCHEMAS) + (list(EVENT_SCHEMAS) if with_events else [])
    names = []
    for name in selection:
        if name in SCHEMA_SETS:
            names.extend(SCHEMA_SETS[name])
        elif name in SCHEMAS or name in EVENT_SCHEMAS:
            names.append(name)
        else:
            raise InputError(f"unknown axiom schema {name!r}")
    return list(dict.fromkeys(names))


def named_instances(universe, schemas=None, budget: int = 3, seed: int = 0,
                    registry: dict | None = None, fillers=FILLERS) -> Iterator[tuple[str, Formula]]:
    """
    Yields (schema name, instance) pairs, budget instances per schema.

    Event schemas need a registry and are skipped without one; the event
    composition schema adds composite models to the registry it is given.
    """
    universe = frozenset(universe)
    if not universe:
        raise ValueError("axiom instances need at least one agent")
    rng = random.Random(seed)
    for name in schema_names(schemas, with_events=bool(registry)):
        schema = SCHEMAS.get(name) or EVENT_SCHEMAS[name]
        if name in EVENT_SCHEMAS and not registry:
            logger.debug(f"Skipping {name}: no event models loaded")
            continue
        seen = set()
        for _ in range(budget):
            instance = schema(rng, universe, list(fillers), registry)
            if instance is None or instance in seen:
                continue
            seen.add(instance)
            yield name, instance


def instantiate_axioms(universe, schemas=None, budget: int = 3, seed: int = 0,
                       registry: dict | None = None) -> list[Formula]:
    """
    Concrete instances of the selected schemas over the given agents.

    Args:
        universe: Agents to instantiate groups and families from.
        schemas: Schema or set names; every schema by default.
        budget: Instances drawn per schema (duplicates are dropped).
        seed: Seed for the random choice of groups, actions and fillers.
        registry: Event models; enables the event-law schemas.

    Returns:
        The instances in schema order.
    """
    return [f for _, f in named_instances(universe, schemas, budget, seed, registry)]
