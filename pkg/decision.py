# decision.py
"""
Satisfiability and validity for the static language, by type elimination.

The search space is a set of atoms: locally consistent truth assignments to a
finite closure of the input formula. Each atom fixes a pattern for all
comparatives (a closure operator on the agents) and a truth value for every
proposition and Cd formula of the closure; every other closure member follows
by Boolean evaluation.

Two atoms are B-related when they agree on everything the groups above B
determine: for every group E with B <= E in the atom, the comparatives E <= X
and the Cd formulas whose family contains E. Elimination then deletes atoms
with a negative Cd demand that no reachable atom fulfils. A satisfiable input
yields a pseudo-model witness built from surviving atoms, which is re-checked
before it is returned.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from pydantic import BaseModel, ConfigDict

from checker import check_pseudo, extension
from config import config
from errors import ResourceLimitExceeded, UnknownState, WitnessVerificationFailed
from models import PseudoModel, Relation, UnionFind, all_models, nonempty_groups, validate_pseudo
from reducer import reduce
from syntax import (And, Atom, Cd, Comp, Const, Formula, Not, agents, desugar, formula_sort_key,
                    is_desugared, is_static, render_formula, single_negation, subformulas)

logger = logging.getLogger(__name__)


# --- closure -------------------------------------------------------------

@dataclass(frozen=True)
class FLClosure:
    """
    Finite closure of a seed formula over a universe.

    full=True adds every family variant of the Cd members and the D-prefixed
    unfoldings of the non-singleton ones; full=False keeps subformulas, all
    comparatives and single negations, which is what the atom search needs.
    """
    seed: Formula
    universe: frozenset
    members: frozenset
    full: bool = False

    def ordered(self) -> list:
        return sorted(self.members, key=formula_sort_key)

    def positives(self) -> list:
        return [f for f in self.ordered() if not isinstance(f, Not)]

    def basis(self) -> list:
        """Propositions and Cd members: the formulas atoms branch on."""
        return [f for f in self.positives() if isinstance(f, (Atom, Cd))]

    def non_comparatives(self) -> list:
        return [f for f in self.members if not isinstance(f.sub if isinstance(f, Not) else f, Comp)]

    def __len__(self):
        return len(self.members)

    def __contains__(self, f):
        return f in self.members


def all_families(groups: list) -> list:
    return [frozenset(c) for r in range(1, len(groups) + 1) for c in itertools.combinations(groups, r)]


def fl_closure(seed: Formula, universe, full: bool = False) -> FLClosure:
    """
    Closure of a static, desugared formula.

    Args:
        seed: The formula.
        universe: Agents; must include the seed's agents.
        full: Also add family variants and D-prefixed unfoldings of Cd members.
    """
    seed = seed if is_desugared(seed) else desugar(seed)
    if not is_static(seed):
        raise ValueError("closure is defined for static formulas only")
    universe = frozenset(universe) | agents(seed)
    groups = nonempty_groups(universe)

    members = set(subformulas(seed))
    members.update(Comp(b, c) for b in groups for c in groups)

    if full:
        primaries = {f for f in members if isinstance(f, Cd)}
        families = all_families(groups)
        variants = {Cd(family, f.sub) for f in primaries for family in families}
        unfoldings = {Cd(frozenset([g]), f) for f in variants if len(f.family) > 1 for g in groups}
        members |= variants | unfoldings
        for f in variants | unfoldings:
            members |= subformulas(f)

    members |= {single_negation(f) for f in members}
    return FLClosure(seed, universe, frozenset(members), full)


# --- comparative patterns ------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    """A closure operator on groups: B <= C holds iff C is inside cl(B)."""
    closures: tuple  # ((group, closure), ...)

    def __post_init__(self):
        object.__setattr__(self, "_table", dict(self.closures))

    def closure(self, group: frozenset) -> frozenset:
        return self._table[group]

    def leq(self, left: frozenset, right: frozenset) -> bool:
        return right <= self._table[left]

    def above(self, group: frozenset) -> list:
        """Groups E with group <= E."""
        return [e for e, _ in self.closures if e <= self._table[group]]


@lru_cache(maxsize=None)
def comparative_patterns(agent_tuple: tuple) -> tuple:
    """
    Every comparative pattern consistent with Inclusion, Additivity and
    Transitivity, as closure operators on the nonempty groups.
    """
    universe = frozenset(agent_tuple)
    groups = nonempty_groups(universe)
    if not groups:
        return (Pattern(()),)
    proper = [g for g in groups if g != universe]
    patterns = []
    for mask in range(1 << len(proper)):
        closed = [g for i, g in enumerate(proper) if mask >> i & 1] + [universe]
        closed_set = set(closed)
        if any((x & y) and (x & y) not in closed_set for x, y in itertools.combinations(closed, 2)):
            continue
        table = tuple((b, frozenset.intersection(*[m for m in closed if b <= m])) for b in groups)
        patterns.append(Pattern(table))
    logger.debug(f"{len(patterns)} comparative patterns over {sorted(universe)}")
    return tuple(patterns)


# --- atoms ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HAtom:
    """
    A locally consistent member set of a closure.

    Only the pattern and the true basis formulas are stored; holds() derives
    everything else.
    """
    pattern: Pattern
    true_basis: frozenset
    index: int = 0
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    def holds(self, f: Formula) -> bool:
        cached = self._memo.get(f)
        if cached is not None:
            return cached
        if isinstance(f, Const):
            result = f.value
        elif isinstance(f, (Atom, Cd)):
            result = f in self.true_basis
        elif isinstance(f, Comp):
            result = self.pattern.leq(f.left, f.right)
        elif isinstance(f, Not):
            result = not self.holds(f.sub)
        elif isinstance(f, And):
            result = self.holds(f.left) and self.holds(f.right)
        else:
            raise TypeError(f"atoms evaluate static desugared formulas only: {f!r}")
        self._memo[f] = result
        return result

    def members(self, closure: FLClosure) -> frozenset:
        return frozenset(f for f in closure.members if self.holds(f))


def _locally_consistent(atom: HAtom, closure: FLClosure, cds: list) -> bool:
    members = closure.members
    for f in cds:
        if not atom.holds(f):
            continue
        if not atom.holds(f.sub):
            return False
        for g in f.family:
            unfolded = Cd(frozenset([g]), f)
            if unfolded in members and not atom.holds(unfolded):
                return False
        for other in cds:
            if other.sub == f.sub and other.family <= f.family and not atom.holds(other):
                return False
    for f in cds:
        if len(f.family) != 1 or not atom.holds(f):
            continue
        (target,) = f.family
        for other in cds:
            if other.sub != f.sub or len(other.family) != 1 or atom.holds(other):
                continue
            (source,) = other.family
            if atom.pattern.leq(source, target):
                return False
    return True


def atoms(closure: FLClosure) -> list:
    """
    All locally consistent atoms of a closure.

    Enumeration backtracks over the basis in size order, checking that a true
    Cd formula's body holds as soon as it is assigned.
    """
    basis = closure.basis()
    cds = [f for f in basis if isinstance(f, Cd)]
    found = []
    for pattern in comparative_patterns(tuple(sorted(closure.universe))):
        def extend(i, chosen):
            if i == len(basis):
                atom = HAtom(pattern, frozenset(chosen), len(found))
                if _locally_consistent(atom, closure, cds):
                    found.append(atom)
                return
            f = basis[i]
            extend(i + 1, chosen)
            if isinstance(f, Cd):
                partial = HAtom(pattern, frozenset(chosen))
                if not partial.holds(f.sub):
                    return
            chosen.append(f)
            extend(i + 1, chosen)
            chosen.pop()

        extend(0, [])
    logger.info(f"Enumerated {len(found)} atoms from a basis of {len(basis)} formulas")
    return found


# --- elimination ---------------------------------------------------------

class AtomGraph:
    """
    Surviving atoms with their group relations.

    T ~B W iff key(T, B) == key(W, B); the key collects T's values on every
    formula determined by a group E with B <= E in T.
    """

    def __init__(self, closure: FLClosure, atom_list: list):
        self.closure = closure
        self.atoms = list(atom_list)
        self.survivors = list(atom_list)
        self.groups = nonempty_groups(closure.universe)
        self.cds = [f for f in closure.basis() if isinstance(f, Cd)]
        self.determined = {
            e: [Comp(e, x) for x in self.groups] + [f for f in self.cds if e in f.family]
            for e in self.groups
        }
        self.rounds = 0
        self._keys = {}

    def key(self, atom: HAtom, group: frozenset) -> frozenset:
        cache_key = (atom.index, group)
        cached = self._keys.get(cache_key)
        if cached is None:
            items = set()
            for e in atom.pattern.above(group):
                for f in self.determined[e]:
                    items.add((f, atom.holds(f)))
            cached = frozenset(items)
            self._keys[cache_key] = cached
        return cached

    def group_partition(self, group: frozenset, population=None) -> dict:
        """Buckets of mutually B-related atoms, keyed by their B-key."""
        buckets = {}
        for atom in (self.survivors if population is None else population):
            buckets.setdefault(self.key(atom, group), []).append(atom)
        return buckets

    def components(self, family, population=None) -> dict:
        """Atom index -> component representative under the family's joined relations."""
        population = self.survivors if population is None else population
        uf = UnionFind()
        for atom in population:
            uf.find(atom.index)
        for group in family:
            for bucket in self.group_partition(group, population).values():
                first = bucket[0].index
                for other in bucket[1:]:
                    uf.union(first, other.index)
        return {atom.index: uf.find(atom.index) for atom in population}

    def path_to(self, start: HAtom, family, goal) -> list:
        """Shortest chain of family-related survivors from start to an atom satisfying goal."""
        buckets = {g: self.group_partition(g) for g in family}
        previous = {start.index: None}
        by_index = {a.index: a for a in self.survivors}
        queue = deque([start])
        while queue:
            atom = queue.popleft()
            if goal(atom):
                path = []
                cursor = atom.index
                while cursor is not None:
                    path.append(by_index[cursor])
                    cursor = previous[cursor]
                return list(reversed(path))
            for g in family:
                for other in buckets[g][self.key(atom, g)]:
                    if other.index not in previous:
                        previous[other.index] = atom.index
                        queue.append(other)
        return []


def eliminate(atom_list: list, closure: FLClosure) -> AtomGraph:
    """
    Deletes atoms whose negative Cd demands cannot be met, until nothing changes.

    An atom holding ~Cd_F(psi) needs an atom without psi in its component under
    the family F; relations are recomputed on the survivors every round.
    """
    graph = AtomGraph(closure, atom_list)
    while True:
        graph.rounds += 1
        doomed = set()
        for f in graph.cds:
            component = graph.components(f.family)
            fulfilled = {component[a.index] for a in graph.survivors if not a.holds(f.sub)}
            for a in graph.survivors:
                if not a.holds(f) and component[a.index] not in fulfilled:
                    doomed.add(a.index)
        logger.debug(f"Elimination round {graph.rounds}: {len(doomed)} of {len(graph.survivors)} atoms removed")
        if not doomed:
            break
        graph.survivors = [a for a in graph.survivors if a.index not in doomed]
    return graph


# --- witnesses -----------------------------------------------------------

def negative_demands(atom: HAtom, graph: AtomGraph) -> list:
    return [f for f in graph.cds if not atom.holds(f)]


def build_witness(graph: AtomGraph, root: HAtom) -> tuple[PseudoModel, dict]:
    """
    Pseudo-model on a demand-closed set of survivors containing root.

    Every negative Cd demand of a chosen atom is met by a shortest path of
    survivors, all of which join the chosen set.

    Returns:
        The pseudo-model (states t0, t1, ... with t0 the root) and the map from
        state id to atom.
    """
    chosen = [root]
    seen = {root.index}
    queue = deque([root])
    while queue:
        atom = queue.popleft()
        for f in negative_demands(atom, graph):
            path = graph.path_to(atom, f.family, lambda w, body=f.sub: not w.holds(body))
            if not path:
                raise WitnessVerificationFailed(f"surviving atom has an unmet demand {render_formula(Not(f))}")
            for other in path:
                if other.index not in seen:
                    seen.add(other.index)
                    chosen.append(other)
                    queue.append(other)

    atom_of = {f"t{i}": atom for i, atom in enumerate(chosen)}
    states = tuple(atom_of)
    grel = {g: Relation.by_key(states, lambda s, g=g: graph.key(atom_of[s], g)) for g in graph.groups}
    xval = {}
    for f in graph.closure.basis():
        if isinstance(f, Atom):
            xval[f.name] = frozenset(s for s in states if atom_of[s].holds(f))
    for left in graph.groups:
        for right in graph.groups:
            xval[Comp(left, right)] = frozenset(s for s in states if atom_of[s].pattern.leq(left, right))
    return PseudoModel(graph.closure.universe, states, grel, xval), atom_of


def verify_witness(pm: PseudoModel, state: str, formula: Formula):
    """Raises WitnessVerificationFailed unless pm is a pseudo-model satisfying formula at state."""
    report = validate_pseudo(pm)
    if not report.ok:
        raise WitnessVerificationFailed(
            f"witness violates pseudo-model condition {report.condition}: {report.message}")
    if not check_pseudo(pm, state, formula):
        raise WitnessVerificationFailed(f"witness does not satisfy {render_formula(formula)} at {state}")


# --- satisfiability ------------------------------------------------------

class SatResult(BaseModel):
    """Outcome of sat(); witness and state are set only when satisfiable."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    satisfiable: bool
    formula: str
    universe: list[str]
    closure_size: int
    atom_count: int
    survivor_count: int
    rounds: int
    witness: PseudoModel | None = None
    state: str | None = None


def _check_limits(closure: FLClosure):
    max_agents = int(config.get("max_agents", 4))
    max_closure = int(config.get("max_closure", 64))
    max_basis = int(config.get("max_basis", 16))
    if len(closure.universe) > max_agents:
        raise ResourceLimitExceeded(f"{len(closure.universe)} agents exceed the limit of {max_agents}")
    non_comparatives = len(closure.non_comparatives())
    if non_comparatives > max_closure:
        raise ResourceLimitExceeded(
            f"closure has {non_comparatives} non-comparative members, limit is {max_closure}")
    basis = len(closure.basis())
    if basis > max_basis:
        raise ResourceLimitExceeded(f"{basis} basis formulas exceed the limit of {max_basis}")


def sat(formula: Formula, universe=None, registry=None) -> SatResult:
    """
    Decides satisfiability.

    Args:
        formula: Any formula the reducer can make static.
        universe: Agents to reason about; defaults to the formula's agents.
        registry: Event models for [E.e] modalities.

    Returns:
        A SatResult; when satisfiable it carries a verified witness.
    """
    universe = frozenset(universe or ()) | agents(formula)
    static = reduce(formula, registry, universe)
    closure = fl_closure(static, universe)
    _check_limits(closure)
    atom_list = atoms(closure)
    graph = eliminate(atom_list, closure)
    root = next((a for a in graph.survivors if a.holds(static)), None)
    result = SatResult(
        satisfiable=root is not None,
        formula=render_formula(static),
        universe=sorted(closure.universe),
        closure_size=len(closure),
        atom_count=len(atom_list),
        survivor_count=len(graph.survivors),
        rounds=graph.rounds,
    )
    if root is not None:
        witness, _ = build_witness(graph, root)
        verify_witness(witness, "t0", static)
        result.witness = witness
        result.state = "t0"
    logger.info(f"sat: {result.satisfiable} ({result.atom_count} atoms, {result.survivor_count} "
                f"survivors, {result.rounds} rounds)")
    return result


def valid(formula: Formula, universe=None, registry=None) -> bool:
    return not sat(Not(formula), universe, registry).satisfiable


# --- unravelling ---------------------------------------------------------

@dataclass
class Unravelling:
    """
    Histories from a root up to a depth.

    A history is (s0, B1, s1, ..., Bn, sn). edges holds (h, B, h') for
    h ->B h'; tilde_edges holds (h, B, h') whenever h ->B' h' for some B'
    with last(h) satisfying B' <= B. Histories are referred to by index.
    """
    root: str
    depth: int
    histories: list
    edges: list
    tilde_edges: list

    def last(self, index: int) -> str:
        return self.histories[index][-1]

    def count_by_length(self) -> list:
        counts = [0] * (self.depth + 1)
        for h in self.histories:
            counts[len(h) // 2] += 1
        return counts


def unravel(pm: PseudoModel, root: str, depth: int | None = None) -> Unravelling:
    """
    Materializes every history of length at most depth starting at root.

    Args:
        pm: A pseudo-model.
        root: Start state.
        depth: Maximal number of steps; defaults to the unravel_depth setting.
    """
    if depth is None:
        depth = int(config.get("unravel_depth", 3))
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if root not in pm.states:
        raise UnknownState(f"unknown state {root!r}")
    groups = sorted(pm.grel, key=lambda g: (len(g), sorted(g)))
    histories = [(root,)]
    edges = []
    frontier = [0]
    for _ in range(depth):
        next_frontier = []
        for index in frontier:
            h = histories[index]
            for g in groups:
                for t in sorted(pm.grel[g].block_of(h[-1]), key=pm.states.index):
                    histories.append(h + (g, t))
                    edges.append((index, g, len(histories) - 1))
                    next_frontier.append(len(histories) - 1)
        frontier = next_frontier

    tilde_edges = []
    for index, g, child in edges:
        s = histories[index][-1]
        for target in groups:
            if s in pm.xval.get(Comp(g, target), ()):
                tilde_edges.append((index, target, child))
    return Unravelling(root, depth, histories, edges, tilde_edges)


def unravelling_problems(pm: PseudoModel, unravelling: Unravelling) -> list[str]:
    """
    Checks the prefix properties of an unravelling.

    Returns:
        Human-readable descriptions of violations; empty when every history
        walks along stored relations, the last map satisfies forth along
        tilde edges, and B-row comparatives are transported along them.
    """
    problems = []
    for index, h in enumerate(unravelling.histories):
        if len(h) % 2 != 1 or h[0] != unravelling.root:
            problems.append(f"malformed history {h}")
        for k in range(2, len(h), 2):
            if not pm.grel[h[k - 1]].related(h[k - 2], h[k]):
                problems.append(f"history {index} steps along a non-edge")

    comparatives = [k for k in pm.xval if isinstance(k, Comp)]
    for index, g, child in unravelling.tilde_edges:
        s, t = unravelling.last(index), unravelling.last(child)
        if g not in pm.grel or not pm.grel[g].related(s, t):
            problems.append(f"forth fails on tilde edge {index} -{sorted(g)}-> {child}")
            continue
        for c in comparatives:
            if c.left == g and (s in pm.xval[c]) != (t in pm.xval[c]):
                problems.append(f"{c} not transported along tilde edge {index} -> {child}")
    return problems


def brute_force_sat(formula: Formula, universe, props_list, max_states: int = 3):
    """
    Exhaustive search for a model of formula with at most max_states states.

    Returns:
        (model, state) or None.
    """
    for model in all_models(sorted(universe), sorted(props_list), max_states):
        ext = extension(model, formula)
        if ext:
            return model, min(ext, key=model.states.index)
    return None
