"""
Tests for closures, atoms, type elimination, witnesses and unravelling.
"""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from checker import check, check_pseudo
from config import config
from decision import (Unravelling, atoms, brute_force_sat, build_witness, comparative_patterns, eliminate,
                      fl_closure, sat, unravel, unravelling_problems, valid, verify_witness)
from errors import ResourceLimitExceeded, UnknownState, WitnessVerificationFailed
from generators import formula_pool, random_model, random_pseudo_model
from models import PseudoModel, Relation, comparative_extension, model_as_pseudo, nonempty_groups, validate_pseudo
from syntax import Comp, Not, desugar, parse_formula, render_formula

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def closure_of(text, universe, full=False):
    return fl_closure(desugar(parse_formula(text)), frozenset(universe), full=full)


def is_sat(text, universe=None):
    return sat(parse_formula(text), frozenset(universe or ())).satisfiable


def is_valid(text, universe=None):
    return valid(parse_formula(text), frozenset(universe or ()))


@pytest.mark.parametrize("text, universe, full, size", [
    ("p", "ab", False, 20),
    ("~p", "ab", False, 20),
    ("K a p", "a", False, 6),
    ("K a p", "a", True, 6),
    ("C{a,b} p", "ab", False, 22),
    ("C{a,b} p", "ab", True, 58),
])
def test_closure_sizes(text, universe, full, size):
    assert len(closure_of(text, universe, full)) == size


def test_closure_members():
    closure = closure_of("C{a,b} p", "ab", full=True)
    a, b, ab = frozenset("a"), frozenset("b"), frozenset("ab")
    cab = parse_formula("Cd{{a},{b}} p")
    assert Comp(ab, a) in closure and Not(Comp(a, ab)) in closure
    assert parse_formula("Cd{{a},{a,b}} p") in closure
    assert desugar(parse_formula("D{b} Cd{{a},{b}} p")) in closure
    assert closure.basis()[0] == parse_formula("p")
    assert cab in closure.basis()
    with pytest.raises(ValueError):
        fl_closure(parse_formula("[!pub{a}] p"), "a")


def test_comparative_patterns_are_closure_operators():
    for universe in ("a", "ab", "abc"):
        groups = nonempty_groups(universe)
        patterns = comparative_patterns(tuple(universe))
        assert len(set(patterns)) == len(patterns)
        for pattern in patterns:
            for b in groups:
                for c in groups:
                    if c <= b:
                        assert pattern.leq(b, c)
                    for e in groups:
                        if pattern.leq(b, c) and pattern.leq(b, e):
                            assert pattern.leq(b, c | e)
                        if pattern.leq(b, c) and pattern.leq(c, e):
                            assert pattern.leq(b, e)
    assert len(comparative_patterns(("a",))) == 1
    assert len(comparative_patterns(("a", "b"))) == 4


def test_every_model_pattern_is_enumerated():
    rng = random.Random(7)
    groups = nonempty_groups("abc")
    known = {tuple(p.leq(b, c) for b in groups for c in groups) for p in comparative_patterns(("a", "b", "c"))}
    for _ in range(200):
        m = random_model(rng, "abc", "p", max_states=5)
        s = rng.choice(m.states)
        row = tuple(check(m, s, Comp(b, c)) for b in groups for c in groups)
        assert row in known


def test_atom_counts():
    assert len(atoms(closure_of("p", "a"))) == 2
    assert len(atoms(closure_of("p", "ab"))) == 8
    assert len(atoms(closure_of("K a p", "a"))) == 3


def test_elimination_keeps_fulfilled_demands():
    closure = closure_of("p & ~K a p", "a")
    graph = eliminate(atoms(closure), closure)
    f = desugar(parse_formula("p & ~K a p"))
    roots = [t for t in graph.survivors if t.holds(f)]
    assert len(roots) == 1
    witness, atom_of = build_witness(graph, roots[0])
    assert len(witness.states) == 2
    assert atom_of["t0"] is roots[0]
    assert validate_pseudo(witness).ok


def test_elimination_removes_unfulfillable_demands():
    closure = closure_of("{a} <= {b} & ~K a ({a} <= {b})", "ab")
    graph = eliminate(atoms(closure), closure)
    f = desugar(parse_formula("{a} <= {b} & ~K a ({a} <= {b})"))
    assert not any(t.holds(f) for t in graph.survivors)
    assert graph.rounds >= 2


@pytest.mark.parametrize("text, universe, expected", [
    ("p & ~p", None, False),
    ("p", None, True),
    ("K a p & ~p", None, False),
    ("D{a,b} p & ~K a p & ~K b p", "ab", True),
    ("{a} <= {b} & K b p & ~K a p", None, False),
    ("~({a,b} <= {a})", None, False),
    ("~({a} <= {a,b})", None, True),
    ("C{a,b} p & ~K a K b p", None, False),
    ("K a p & K b p & ~C{a,b} p", None, True),
    ("Cd{{a},{b}} p & ~C{a,b} p", None, False),
])
def test_satisfiability(text, universe, expected):
    assert is_sat(text, universe) is expected


@pytest.mark.parametrize("text, universe", [
    ("D{a,b} p <-> [!res{a,b}] C{a,b} p", "ab"),
    ("[!pub{a}] ({b} <= {a})", "ab"),
    ("Cd{{a},{b}} p -> (p & D{a} Cd{{a},{b}} p)", None),
    ("K a p -> D{a,b} p", None),
    ("{a} <= {b} -> K a ({a} <= {b})", None),
    ("~({a} <= {b}) -> K a ~({a} <= {b})", None),
    ("Cd{{a},{b}} p -> Cd{{a},{a,b}} p", None),
    ("Cd{{a},{b}} (p -> K a p & K b p) -> (p -> Cd{{a},{b}} p)", None),
])
def test_validities(text, universe):
    assert is_valid(text, universe)


@pytest.mark.parametrize("text", ["p -> D{a} p", "D{a,b} p -> K a p", "{a} <= {b}", "K a p -> C{a,b} p"])
def test_non_validities(text):
    assert not is_valid(text)


def test_witness_is_a_verified_pseudo_model():
    f = parse_formula("D{a,b} p & ~K a p & ~K b p & ~({a} <= {b})")
    result = sat(f)
    assert result.satisfiable and result.state == "t0"
    assert validate_pseudo(result.witness).ok
    assert check_pseudo(result.witness, "t0", desugar(f))
    assert result.universe == ["a", "b"]
    assert result.survivor_count <= result.atom_count


def test_unsat_result_has_no_witness():
    result = sat(parse_formula("K a p & ~p"))
    assert not result.satisfiable
    assert result.witness is None and result.state is None


def test_dynamic_input_is_reduced_first(hacking):
    assert is_valid("[!pub{a,b}] K c p <-> D{a,b,c} p")
    result = sat(parse_formula("[hack.hack] (K b p & ~K a p)", registry=hacking), registry=hacking)
    assert result.satisfiable


def test_corrupted_witness_is_rejected():
    f = desugar(parse_formula("D{a,b} p & ~K a p"))
    witness = sat(f).witness
    broken = dict(witness.xval)
    broken[Comp(frozenset("ab"), frozenset("a"))] = frozenset()
    with pytest.raises(WitnessVerificationFailed):
        verify_witness(PseudoModel(witness.universe, witness.states, witness.grel, broken), "t0", f)
    with pytest.raises(WitnessVerificationFailed):
        verify_witness(witness, "t0", Not(f))


def test_resource_limits(monkeypatch):
    with pytest.raises(ResourceLimitExceeded):
        sat(parse_formula("p"), frozenset("abcde"))
    monkeypatch.setitem(config, "max_basis", 2)
    with pytest.raises(ResourceLimitExceeded):
        sat(parse_formula("K a p & K a q & K a r"))


@pytest.mark.slow
def test_agrees_with_exhaustive_search_on_small_models():
    pool = formula_pool(("a", "b"), "p", max_depth=2, count=500)
    assert len(pool) >= 500
    for f in pool:
        result = sat(f, frozenset("ab"))
        found = brute_force_sat(f, "ab", ["p"], max_states=3)
        assert result.satisfiable == (found is not None), render_formula(f)
        if found is not None:
            model, state = found
            assert check(model, state, f)
            verify_witness(result.witness, result.state, desugar(f))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_model_theory_and_decision_agree(seed):
    rng = random.Random(seed)
    m = random_model(rng, "ab", "p", max_states=4)
    pool = formula_pool(("a", "b"), "p", max_depth=2, count=80, seed=seed % 5)
    s = rng.choice(m.states)
    for f in rng.sample(pool, 5):
        if check(m, s, f):
            assert sat(f, frozenset("ab")).satisfiable
        else:
            assert not valid(f, frozenset("ab"))


# --- unravelling ---------------------------------------------------------

def test_unravel_two_state_model(ex8):
    pm = model_as_pseudo(ex8)
    forest = unravel(pm, "s", depth=1)
    assert forest.count_by_length() == [1, 4]
    assert len(forest.edges) == 4
    assert len(forest.tilde_edges) == 8
    assert forest.last(0) == "s"
    assert unravelling_problems(pm, forest) == []


def test_unravel_errors(ex8):
    pm = model_as_pseudo(ex8)
    with pytest.raises(ValueError):
        unravel(pm, "s", depth=-1)
    with pytest.raises(UnknownState):
        unravel(pm, "nowhere", depth=1)
    assert unravel(pm, "t", depth=0).histories == [("t",)]


def test_unravelling_problems_are_reported(ex8):
    pm = model_as_pseudo(ex8)
    a = frozenset("a")
    forest = Unravelling("s", 1, [("s",), ("s", a, "t")], [(0, a, 1)], [(0, a, 1)])
    problems = unravelling_problems(pm, forest)
    assert any("non-edge" in p for p in problems)
    assert any("forth fails" in p for p in problems)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_unravelled_pseudo_models_have_the_prefix_properties(seed):
    rng = random.Random(seed)
    pm = random_pseudo_model(rng, "ab", "p", max_states=4)
    forest = unravel(pm, pm.states[0], depth=3)
    assert unravelling_problems(pm, forest) == []
    groups = len(pm.grel)
    assert forest.count_by_length()[0] == 1
    assert all(k == 0 or count >= groups ** k for k, count in enumerate(forest.count_by_length()))


def test_unravel_pseudo_model_finer_than_its_members():
    states = ("s", "t", "x", "y")
    a, b, ab = frozenset("a"), frozenset("b"), frozenset("ab")
    grel = {a: Relation(states, [["s", "t", "x"], ["y"]]),
            b: Relation(states, [["s", "t", "y"], ["x"]]),
            ab: Relation.discrete(states)}
    bare = PseudoModel(frozenset("ab"), states, grel, {"p": frozenset(["s", "x"])})
    xval = {**bare.xval, **{Comp(g, h): comparative_extension(bare, g, h) for g in grel for h in grel}}
    pm = PseudoModel(bare.universe, states, grel, xval)
    assert validate_pseudo(pm).ok
    assert grel[ab] != grel[a].meet(grel[b])

    forest = unravel(pm, "s", depth=2)
    assert unravelling_problems(pm, forest) == []
    assert len(forest.tilde_edges) > len(forest.edges)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_witnesses_of_random_formulas_unravel_cleanly(seed):
    rng = random.Random(seed)
    f = rng.choice(formula_pool(("a", "b"), "p", max_depth=2, count=200, seed=seed % 3))
    result = sat(f, frozenset("ab"))
    if result.satisfiable:
        forest = unravel(result.witness, result.state, depth=2)
        assert unravelling_problems(result.witness, forest) == []


def test_witness_unravels_cleanly():
    result = sat(parse_formula("D{a,b} p & ~K a p & ~K b p"))
    forest = unravel(result.witness, result.state, depth=2)
    assert unravelling_problems(result.witness, forest) == []
    assert list(itertools.accumulate(forest.count_by_length()))[-1] == len(forest.histories)
