# generators.py
"""
Random generators of models, pseudo-models, event models and formulas.

Everything takes an explicit random.Random so property tests can replay a
failing case from its seed.
"""

import random
from typing import Sequence

from dynamics import ReadingEventModel, ReadingMap
from models import (EpistemicModel, PseudoModel, Relation, comparative_extension, meet_all, nonempty_groups,
                    validate_pseudo)
from syntax import (And, Atom, Cd, Common, Comp, Dist, Event, Formula, Iff, Implies, Know, Not, Or,
                    ReadingAction, SemiPub, TRUE)

AGENTS = ("a", "b", "c", "d")
PROPS = ("p", "q", "r")


def random_partition(rng: random.Random, carrier: Sequence[str]) -> Relation:
    """Each element joins a random earlier block or opens a new one."""
    blocks = []
    for s in carrier:
        choice = rng.randrange(len(blocks) + 1)
        if choice == len(blocks):
            blocks.append([s])
        else:
            blocks[choice].append(s)
    return Relation(carrier, blocks)


def random_group(rng: random.Random, universe: Sequence[str], containing: str | None = None) -> frozenset:
    agents = sorted(universe)
    group = {a for a in agents if rng.random() < 0.5}
    if containing is not None:
        group.add(containing)
    if not group:
        group.add(rng.choice(agents))
    return frozenset(group)


def random_model(rng: random.Random, agents: Sequence[str] = AGENTS[:3], props: Sequence[str] = PROPS[:2],
                 max_states: int = 6) -> EpistemicModel:
    states = tuple(f"s{i}" for i in range(rng.randint(1, max_states)))
    relations = {a: random_partition(rng, states) for a in agents}
    valuation = {p: frozenset(s for s in states if rng.random() < 0.5) for p in props}
    return EpistemicModel(frozenset(agents), states, relations, valuation)


def random_pseudo_model(rng: random.Random, agents: Sequence[str] = AGENTS[:2], props: Sequence[str] = PROPS[:1],
                        max_states: int = 4, refine: float = 0.5) -> PseudoModel:
    """
    A random pseudo-model, usually not induced by any epistemic model.

    Larger groups start from the meet of their subgroups' relations and, with
    probability refine, get split further by a random partition. Comparatives
    are read off the group relations when that passes every condition;
    otherwise only the inclusion pattern (B <= C for C within B) holds.
    """
    m = random_model(rng, agents, props, max_states)
    groups = nonempty_groups(m.universe)
    grel = {}
    for group in groups:
        if len(group) == 1:
            grel[group] = m.relations[next(iter(group))]
            continue
        relation = meet_all(m.states, (grel[group - {a}] for a in group))
        if rng.random() < refine:
            relation = relation.meet(random_partition(rng, m.states))
        grel[group] = relation

    xval = {p: frozenset(ext) for p, ext in m.valuation.items()}
    bare = PseudoModel(m.universe, m.states, grel, xval)
    read_off = {Comp(left, right): comparative_extension(bare, left, right) for left in groups for right in groups}
    pm = PseudoModel(m.universe, m.states, grel, {**xval, **read_off})
    if validate_pseudo(pm).ok:
        return pm
    everything = frozenset(m.states)
    inclusion = {Comp(left, right): everything if right <= left else frozenset()
                 for left in groups for right in groups}
    return PseudoModel(m.universe, m.states, grel, {**xval, **inclusion})


def random_event_model(rng: random.Random, agents: Sequence[str] = AGENTS[:3],
                       max_events: int = 2) -> ReadingEventModel:
    """
    A random reading event model.

    Read-sets are drawn per block of each agent's event partition, so an agent
    reads the same way in events it cannot tell apart.
    """
    universe = frozenset(agents)
    events = tuple(f"e{i}" for i in range(rng.randint(1, max_events)))
    erel = {a: random_partition(rng, events) for a in sorted(universe)}
    tables = {e: {} for e in events}
    for agent in sorted(universe):
        for block in erel[agent].blocks:
            group = random_group(rng, agents, containing=agent) if rng.random() < 0.6 else frozenset([agent])
            for e in block:
                tables[e][agent] = group
    reads = {e: ReadingMap.from_dict(universe, tables[e]) for e in events}
    return ReadingEventModel(universe, events, erel, reads)


def random_action(rng: random.Random, agents: Sequence[str]) -> ReadingAction:
    kind = rng.choice(("pub", "res", "grp", "share", "map"))
    if kind in ("pub", "res"):
        return ReadingAction(kind, (random_group(rng, agents),))
    if kind == "grp":
        return ReadingAction(kind, tuple(random_group(rng, agents) for _ in range(rng.randint(1, 2))))
    if kind == "share":
        return ReadingAction(kind, (random_group(rng, agents), random_group(rng, agents)))
    chosen = rng.sample(sorted(agents), rng.randint(1, len(agents)))
    return ReadingAction(kind, tuple((a, random_group(rng, agents)) for a in chosen))


def random_family(rng: random.Random, agents: Sequence[str]) -> frozenset:
    return frozenset(random_group(rng, agents) for _ in range(rng.randint(1, 2)))


def random_formula(rng: random.Random, depth: int, agents: Sequence[str] = AGENTS[:3],
                   props: Sequence[str] = PROPS[:2], registry: dict | None = None,
                   dynamic: bool = True, sugar: bool = True) -> Formula:
    """
    A random formula of modal depth at most depth.

    Args:
        registry: Event models available for [E.e]; none are used when empty.
        dynamic: Allow [!a] and [E.e] modalities.
        sugar: Allow Or, Implies, Iff, K, D and C nodes.
    """
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return Atom(rng.choice(props))
        return Comp(random_group(rng, agents), random_group(rng, agents))

    def sub():
        return random_formula(rng, depth - 1, agents, props, registry, dynamic, sugar)

    kinds = ["not", "and", "cd"]
    if sugar:
        kinds += ["or", "implies", "iff", "know", "dist", "common"]
    if dynamic:
        kinds.append("semipub")
        if registry:
            kinds.append("event")
    kind = rng.choice(kinds)
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "or":
        return Or(sub(), sub())
    if kind == "implies":
        return Implies(sub(), sub())
    if kind == "iff":
        return Iff(sub(), sub())
    if kind == "know":
        return Know(rng.choice(sorted(agents)), sub())
    if kind == "dist":
        return Dist(random_group(rng, agents), sub())
    if kind == "common":
        return Common(random_group(rng, agents), sub())
    if kind == "cd":
        return Cd(random_family(rng, agents), sub())
    if kind == "semipub":
        return SemiPub(random_action(rng, agents), sub())
    model_id = rng.choice(sorted(registry))
    return Event(model_id, rng.choice(registry[model_id].events), sub())


def event_safe_formula(rng: random.Random, depth: int, agents: Sequence[str], props: Sequence[str],
                       registry: dict) -> Formula:
    """
    A random dynamic formula the reducer accepts.

    Under an event modality only singleton-family Cd (D and K) may occur, so
    event bodies are drawn without C and multi-group Cd.
    """
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return Atom(rng.choice(props))
        return Comp(random_group(rng, agents), random_group(rng, agents))

    def sub():
        return event_safe_formula(rng, depth - 1, agents, props, registry)

    kind = rng.choice(("not", "and", "implies", "know", "dist", "event", "semipub"))
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "implies":
        return Implies(sub(), sub())
    if kind == "know":
        return Know(rng.choice(sorted(agents)), sub())
    if kind == "dist":
        return Dist(random_group(rng, agents), sub())
    if kind == "semipub":
        return SemiPub(random_action(rng, agents), sub())
    model_id = rng.choice(sorted(registry))
    return Event(model_id, rng.choice(registry[model_id].events), sub())


def formula_pool(agents: Sequence[str] = ("a", "b"), prop: str = "p", max_depth: int = 2,
                 count: int = 500, seed: int = 0) -> list[Formula]:
    """
    Distinct static formulas over one proposition, deduplicated and ordered.

    Mixes every depth-one shape over the agents' groups with random formulas
    up to max_depth.
    """
    rng = random.Random(seed)
    groups = nonempty_groups(agents)
    atom = Atom(prop)
    pool = {atom, Not(atom), TRUE}
    for g in groups:
        for body in (atom, Not(atom)):
            pool.add(Dist(g, body))
            pool.add(Not(Dist(g, body)))
            pool.add(Common(g, body))
        for h in groups:
            pool.add(Comp(g, h))
            pool.add(Not(Comp(g, h)))
    attempts = 0
    while len(pool) < count and attempts < count * 20:
        attempts += 1
        pool.add(random_formula(rng, max_depth, agents, (prop,), dynamic=False))
    return sorted(pool, key=lambda f: (len(str(f)), str(f)))
