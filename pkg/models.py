# models.py
"""
Finite epistemic models, pseudo-models and the partition algebra behind them.

Every equivalence relation is stored as a partition of an ordered carrier.
Group relations of an epistemic model are meets of the agents' partitions;
family relations are joins, computed with a union-find.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx
from pydantic import BaseModel

from documents import ModelDocument, PseudoModelDocument, validate_document
from errors import PartitionError, UnknownAgent, UnknownGroup, UnknownState
from syntax import Comp, group_key, make_group, sorted_groups

logger = logging.getLogger(__name__)


class UnionFind:
    """Disjoint sets with path compression and union by rank."""

    def __init__(self):
        self.parent = {}
        self.rank = Counter()

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            return x
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        px, py = self.find(x), self.find(y)
        if px == py:
            return
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1


class Relation:
    """
    An equivalence relation on an ordered carrier, held as its blocks.

    Blocks are ordered by the carrier position of their first element, so two
    equal relations print identically.
    """

    __slots__ = ("carrier", "blocks", "_block_of", "_position")

    def __init__(self, carrier: Sequence[str], blocks: Iterable[Iterable[str]]):
        self.carrier = tuple(carrier)
        self._position = {s: i for i, s in enumerate(self.carrier)}
        if len(self._position) != len(self.carrier):
            raise PartitionError("carrier lists a state twice")
        block_of = {}
        collected = []
        for raw in blocks:
            block = frozenset(raw)
            if not block:
                raise PartitionError("empty block")
            for s in block:
                if s not in self._position:
                    raise PartitionError(f"block mentions unknown state {s!r}")
                if s in block_of:
                    raise PartitionError(f"state {s!r} appears in two blocks")
                block_of[s] = block
            collected.append(block)
        missing = [s for s in self.carrier if s not in block_of]
        if missing:
            raise PartitionError(f"states not covered by any block: {', '.join(missing)}")
        self._block_of = block_of
        self.blocks = tuple(sorted(collected, key=lambda b: min(self._position[s] for s in b)))

    @classmethod
    def discrete(cls, carrier: Sequence[str]) -> Relation:
        return cls(carrier, ([s] for s in carrier))

    @classmethod
    def total(cls, carrier: Sequence[str]) -> Relation:
        return cls(carrier, [carrier] if carrier else [])

    @classmethod
    def by_key(cls, carrier: Sequence[str], key) -> Relation:
        """Groups states with equal key(s)."""
        grouped = {}
        for s in carrier:
            grouped.setdefault(key(s), []).append(s)
        return cls(carrier, grouped.values())

    def block_of(self, s: str) -> frozenset:
        try:
            return self._block_of[s]
        except KeyError:
            raise UnknownState(f"unknown state {s!r}") from None

    def related(self, s: str, t: str) -> bool:
        return t in self.block_of(s)

    def _same_carrier(self, other: Relation):
        if set(self.carrier) != set(other.carrier):
            raise PartitionError("relations over different carriers")

    def meet(self, other: Relation) -> Relation:
        """Common refinement (intersection of the two equivalences)."""
        self._same_carrier(other)
        index_self = {b: i for i, b in enumerate(self.blocks)}
        index_other = {b: i for i, b in enumerate(other.blocks)}
        return Relation.by_key(
            self.carrier, lambda s: (index_self[self._block_of[s]], index_other[other._block_of[s]]))

    def join(self, other: Relation) -> Relation:
        """Finest equivalence containing both."""
        self._same_carrier(other)
        return join_all(self.carrier, (self, other))

    def refines(self, other: Relation) -> bool:
        """True when every block of self lies inside a block of other."""
        self._same_carrier(other)
        return all(block <= other._block_of[next(iter(block))] for block in self.blocks)

    def as_lists(self) -> list[list[str]]:
        return [sorted(b, key=self._position.__getitem__) for b in self.blocks]

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return set(self.carrier) == set(other.carrier) and set(self.blocks) == set(other.blocks)

    def __hash__(self):
        return hash(frozenset(self.blocks))

    def __repr__(self):
        return f"Relation({self.as_lists()!r})"


def join_all(carrier: Sequence[str], relations: Iterable[Relation]) -> Relation:
    uf = UnionFind()
    for s in carrier:
        uf.find(s)
    for relation in relations:
        for block in relation.blocks:
            first, *rest = block
            for s in rest:
                uf.union(first, s)
    return Relation.by_key(carrier, uf.find)


def meet_all(carrier: Sequence[str], relations: Iterable[Relation]) -> Relation:
    result = Relation.total(carrier)
    for relation in relations:
        result = result.meet(relation)
    return result


@dataclass(frozen=True, eq=False)
class EpistemicModel:
    """
    States, one partition per agent and an atomic valuation.

    projection is only set on product models and maps each product state id to
    its (state, event) pair.
    """
    universe: frozenset
    states: tuple
    relations: dict
    valuation: dict
    projection: dict | None = None
    _group_cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if not self.states:
            raise PartitionError("a model needs at least one state")
        for agent in self.universe:
            if agent not in self.relations:
                raise PartitionError(f"no relation given for agent {agent!r}")
        for agent, relation in self.relations.items():
            if agent not in self.universe:
                raise UnknownAgent(f"relation given for undeclared agent {agent!r}")
            if set(relation.carrier) != set(self.states):
                raise PartitionError(f"relation of {agent!r} is not over the model's states")
        known = set(self.states)
        for prop, extension in self.valuation.items():
            unknown = set(extension) - known
            if unknown:
                raise UnknownState(f"valuation of {prop!r} mentions unknown states: {sorted(unknown)}")

    @property
    def props(self) -> list[str]:
        return sorted(self.valuation)

    def require_state(self, s: str):
        if s not in self.states:
            raise UnknownState(f"unknown state {s!r}")

    def holds(self, prop: str, s: str) -> bool:
        return s in self.valuation.get(prop, ())

    def group_rel(self, group: Iterable[str]) -> Relation:
        """The relation of the group's distributed knowledge: meet of its members."""
        group = make_group(group)
        cached = self._group_cache.get(group)
        if cached is not None:
            return cached
        unknown = group - self.universe
        if unknown:
            raise UnknownAgent(f"unknown agents: {', '.join(sorted(unknown))}")
        result = meet_all(self.states, (self.relations[a] for a in sorted(group)))
        self._group_cache[group] = result
        return result


@dataclass(frozen=True, eq=False)
class PseudoModel:
    """
    States, a primitive relation per stored group and an extended valuation.

    xval is keyed by proposition names (str) and by Comp nodes.
    """
    universe: frozenset
    states: tuple
    grel: dict
    xval: dict

    def group_rel(self, group: Iterable[str]) -> Relation:
        group = frozenset(group)
        try:
            return self.grel[group]
        except KeyError:
            raise UnknownGroup(f"pseudo-model stores no relation for group {{{group_key(group)}}}") from None

    def require_state(self, s: str):
        if s not in self.states:
            raise UnknownState(f"unknown state {s!r}")

    def holds(self, key, s: str) -> bool:
        return s in self.xval.get(key, ())


def family_rel(provider, family: Iterable[Iterable[str]]) -> Relation:
    """
    Reflexive-transitive closure of the union of the family's group relations.

    Args:
        provider: An EpistemicModel or PseudoModel (anything with group_rel and states).
        family: Nonempty collection of nonempty groups.
    """
    return join_all(provider.states, (provider.group_rel(g) for g in family))


def group_closure_rel(m: EpistemicModel, group: Iterable[str]) -> Relation:
    """Closure of the members' individual relations (the common knowledge relation)."""
    return family_rel(m, ([a] for a in group))


def nonempty_groups(universe: Iterable[str]) -> list[frozenset]:
    agents = sorted(universe)
    groups = [frozenset(c) for r in range(1, len(agents) + 1) for c in itertools.combinations(agents, r)]
    return sorted_groups(groups)


def comparative_extension(provider, left: frozenset, right: frozenset) -> frozenset:
    """States whose left-block is contained in their right-block."""
    rel_left, rel_right = provider.group_rel(left), provider.group_rel(right)
    return frozenset(s for s in provider.states if rel_left.block_of(s) <= rel_right.block_of(s))


def model_as_pseudo(m: EpistemicModel) -> PseudoModel:
    groups = nonempty_groups(m.universe)
    grel = {g: m.group_rel(g) for g in groups}
    xval = {p: frozenset(ext) for p, ext in m.valuation.items()}
    for left in groups:
        for right in groups:
            xval[Comp(left, right)] = comparative_extension(m, left, right)
    return PseudoModel(m.universe, m.states, grel, xval)


class PseudoModelReport(BaseModel):
    """Outcome of validate_pseudo; condition is None when every check passed."""
    ok: bool
    condition: int | None = None
    message: str = ""
    states: list[str] = []
    groups: list[str] = []


def _violation(condition: int, message: str, states=(), groups=()) -> PseudoModelReport:
    return PseudoModelReport(ok=False, condition=condition, message=message,
                             states=list(states), groups=[group_key(g) for g in groups])


def validate_pseudo(pm: PseudoModel) -> PseudoModelReport:
    """
    Checks the five pseudo-model conditions in order.

    Only stored groups are checked: additivity of B <= C and B <= E is skipped
    when the pseudo-model has no relation for the union of C and E.

    Returns:
        A report naming the first violated condition with witnessing states and
        groups, or an ok report.
    """
    everything = frozenset(pm.states)

    for group, relation in pm.grel.items():
        if set(relation.carrier) != everything:
            return _violation(1, "relation is not over the pseudo-model's states", groups=[group])
    for key, extension in pm.xval.items():
        stray = set(extension) - everything
        if stray:
            return _violation(1, f"valuation of {key} mentions unknown states", states=sorted(stray))
        if isinstance(key, Comp):
            for group in (key.left, key.right):
                if group not in pm.grel:
                    return _violation(1, f"comparative {key} uses a group without relation", groups=[group])

    def ext(left, right):
        return pm.xval.get(Comp(left, right), frozenset())

    for key, extension in pm.xval.items():
        if not isinstance(key, Comp):
            continue
        rel_left, rel_right = pm.grel[key.left], pm.grel[key.right]
        for s in sorted(extension):
            for t in sorted(rel_left.block_of(s)):
                if not rel_right.related(s, t):
                    return _violation(2, f"{key} holds at {s} but {s} ~B {t} without {s} ~C {t}",
                                      states=[s, t], groups=[key.left, key.right])
                if t not in extension:
                    return _violation(2, f"{key} holds at {s} but not at its B-neighbour {t}",
                                      states=[s, t], groups=[key.left, key.right])

    groups = sorted_groups(pm.grel)
    for left in groups:
        for right in groups:
            if right <= left and ext(left, right) != everything:
                missing = sorted(everything - ext(left, right))
                return _violation(3, f"{Comp(left, right)} must hold everywhere", missing, [left, right])

    for left in groups:
        for c, e in itertools.combinations_with_replacement(groups, 2):
            if (c | e) not in pm.grel:
                continue
            bad = (ext(left, c) & ext(left, e)) - ext(left, c | e)
            if bad:
                return _violation(4, f"{Comp(left, c)} and {Comp(left, e)} without {Comp(left, c | e)}",
                                  sorted(bad), [left, c, e])

    for left in groups:
        for c in groups:
            for e in groups:
                bad = (ext(left, c) & ext(c, e)) - ext(left, e)
                if bad:
                    return _violation(5, f"{Comp(left, c)} and {Comp(c, e)} without {Comp(left, e)}",
                                      sorted(bad), [left, c, e])

    return PseudoModelReport(ok=True)


# --- documents -----------------------------------------------------------

def _relation_from_lists(carrier, blocks, owner: str) -> Relation:
    try:
        return Relation(carrier, blocks)
    except PartitionError as e:
        raise PartitionError(f"relation of {owner}: {e}") from None


def _declared_agents(names) -> frozenset:
    agents = frozenset(names)
    for agent in agents:
        make_group([agent])
    if len(agents) != len(names):
        raise PartitionError("agent declared twice")
    return agents


def load_model(document) -> EpistemicModel:
    """
    Builds a validated EpistemicModel from a model document.

    Args:
        document: Parsed JSON (dict) or a ModelDocument.
    """
    doc = validate_document(ModelDocument, document)
    universe = _declared_agents(doc.agents)
    states = tuple(doc.states)
    for agent in doc.relations:
        if agent not in universe:
            raise UnknownAgent(f"relation given for undeclared agent {agent!r}")
    relations = {a: _relation_from_lists(states, blocks, repr(a)) for a, blocks in doc.relations.items()}
    valuation = {p: frozenset(ext) for p, ext in doc.valuation.items()}
    model = EpistemicModel(universe, states, relations, valuation)
    logger.info(f"Loaded model with {len(states)} states over agents {sorted(universe)}")
    return model


def model_to_document(m: EpistemicModel) -> dict:
    position = {s: i for i, s in enumerate(m.states)}
    return {
        "agents": sorted(m.universe),
        "states": list(m.states),
        "relations": {a: m.relations[a].as_lists() for a in sorted(m.universe)},
        "valuation": {p: sorted(m.valuation[p], key=position.__getitem__) for p in sorted(m.valuation)},
    }


def _parse_group_key(text: str, universe: frozenset) -> frozenset:
    group = make_group(part.strip() for part in text.split(",") if part.strip())
    unknown = group - universe
    if unknown:
        raise UnknownAgent(f"group {text!r} mentions unknown agents {sorted(unknown)}")
    return group


def load_pseudo(document) -> tuple[PseudoModel, str | None]:
    """
    Builds a PseudoModel from its document.

    Returns:
        The pseudo-model and the designated state (None when absent). No
        pseudo-model conditions are checked here; use validate_pseudo.
    """
    doc = validate_document(PseudoModelDocument, document)
    universe = _declared_agents(doc.agents)
    states = tuple(doc.states)
    grel = {}
    for key, blocks in doc.groups.items():
        group = _parse_group_key(key, universe)
        grel[group] = _relation_from_lists(states, blocks, f"group {{{key}}}")
    xval = {}
    for prop, ext in doc.valuation.items():
        xval[prop] = frozenset(ext)
    for key, ext in doc.comparatives.items():
        left, sep, right = key.partition("<=")
        if not sep:
            raise PartitionError(f"comparative key {key!r} lacks '<='")
        xval[Comp(_parse_group_key(left, universe), _parse_group_key(right, universe))] = frozenset(ext)
    if doc.designated is not None and doc.designated not in states:
        raise UnknownState(f"designated state {doc.designated!r} is not a state")
    return PseudoModel(universe, states, grel, xval), doc.designated


def pseudo_to_document(pm: PseudoModel, designated: str | None = None) -> dict:
    position = {s: i for i, s in enumerate(pm.states)}

    def ordered(ext):
        return sorted(ext, key=position.__getitem__)

    props = sorted(k for k in pm.xval if isinstance(k, str))
    comps = sorted((k for k in pm.xval if isinstance(k, Comp)),
                   key=lambda c: (len(c.left), sorted(c.left), len(c.right), sorted(c.right)))
    document = {
        "agents": sorted(pm.universe),
        "states": list(pm.states),
        "groups": {group_key(g): pm.grel[g].as_lists() for g in sorted_groups(pm.grel)},
        "valuation": {p: ordered(pm.xval[p]) for p in props},
        "comparatives": {f"{group_key(c.left)}<={group_key(c.right)}": ordered(pm.xval[c]) for c in comps},
    }
    if designated is not None:
        document["designated"] = designated
    return document


def model_to_graph(m: EpistemicModel) -> nx.MultiGraph:
    """One node per state, one undirected edge keyed by agent per related pair."""
    graph = nx.MultiGraph()
    for s in m.states:
        true_props = ",".join(p for p in m.props if m.holds(p, s))
        graph.add_node(s, label=f'"{s}\\n{true_props}"')
    for agent in sorted(m.universe):
        for block in m.relations[agent].as_lists():
            for s, t in itertools.combinations(block, 2):
                graph.add_edge(s, t, key=agent, label=agent)
    return graph


def model_to_dot(m: EpistemicModel, name: str = "model") -> str:
    """Graphviz text of model_to_graph."""
    dot = nx.nx_pydot.to_pydot(model_to_graph(m))
    dot.set_name(name)
    return dot.to_string()


# --- isomorphism ---------------------------------------------------------

def is_isomorphism(m1: EpistemicModel, m2: EpistemicModel, mapping: dict) -> bool:
    """True when mapping is a bijection preserving every relation and the valuation."""
    if m1.universe != m2.universe or len(m1.states) != len(m2.states):
        return False
    if set(mapping) != set(m1.states) or set(mapping.values()) != set(m2.states):
        return False
    props = set(m1.valuation) | set(m2.valuation)
    for s in m1.states:
        if any(m1.holds(p, s) != m2.holds(p, mapping[s]) for p in props):
            return False
    for agent in m1.universe:
        image = {frozenset(mapping[s] for s in block) for block in m1.relations[agent].blocks}
        if image != set(m2.relations[agent].blocks):
            return False
    return True


def find_isomorphism(m1: EpistemicModel, m2: EpistemicModel) -> dict | None:
    """Backtracking search for an isomorphism; meant for small models."""
    if m1.universe != m2.universe or len(m1.states) != len(m2.states):
        return None
    props = sorted(set(m1.valuation) | set(m2.valuation))
    agents = sorted(m1.universe)

    def signature(m, s):
        return (tuple(m.holds(p, s) for p in props),
                tuple(len(m.relations[a].block_of(s)) for a in agents))

    candidates = {s: [t for t in m2.states if signature(m2, t) == signature(m1, s)] for s in m1.states}
    order = sorted(m1.states, key=lambda s: len(candidates[s]))
    mapping, used = {}, set()

    def consistent(s, t):
        for s2, t2 in mapping.items():
            for a in agents:
                if m1.relations[a].related(s, s2) != m2.relations[a].related(t, t2):
                    return False
        return True

    def extend(i):
        if i == len(order):
            return True
        s = order[i]
        for t in candidates[s]:
            if t in used or not consistent(s, t):
                continue
            mapping[s] = t
            used.add(t)
            if extend(i + 1):
                return True
            del mapping[s]
            used.discard(t)
        return False

    return dict(mapping) if extend(0) else None


# --- exhaustive enumeration ----------------------------------------------

def set_partitions(carrier: Sequence[str]) -> Iterator[list[list[str]]]:
    """Every partition of carrier, blocks in order of first element."""
    if not carrier:
        yield []
        return
    first, rest = carrier[0], carrier[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def all_models(agents: Sequence[str], props: Sequence[str], max_states: int) -> Iterator[EpistemicModel]:
    """Every model with 1..max_states states over the given agents and propositions."""
    agents = sorted(agents)
    for n in range(1, max_states + 1):
        states = tuple(f"s{i}" for i in range(n))
        partitions = [Relation(states, blocks) for blocks in set_partitions(states)]
        subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(states, r)]
        for relations in itertools.product(partitions, repeat=len(agents)):
            for extensions in itertools.product(subsets, repeat=len(props)):
                yield EpistemicModel(frozenset(agents), states, dict(zip(agents, relations)),
                                     dict(zip(props, extensions)))
