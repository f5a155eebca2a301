"""
Tests for the formula language: parser, printer, desugaring and helpers.
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from errors import EmptyGroup, ParseError, UnknownAgent, UnknownEvent, UnknownEventModel
from generators import random_event_model, random_formula
from syntax import (FALSE, TRUE, And, Atom, Cd, Common, Comp, Dist, Event, Iff, Implies, Know, Not, Or,
                    ReadingAction, SemiPub, agents, conjunction, desugar, is_desugared, is_static,
                    make_family, make_group, modal_depth, parse_action, parse_formula, props,
                    render_formula, resugar, single_negation, size, subformulas)

p, q, r = Atom("p"), Atom("q"), Atom("r")
A, B, AB, CD = frozenset("a"), frozenset("b"), frozenset("ab"), frozenset("cd")


def test_parse_public_sharing_with_common_knowledge():
    f = parse_formula("[!pub{a,b}] C{a,b,c} p")
    assert f == SemiPub(ReadingAction("pub", (AB,)), Common(frozenset("abc"), p))


def test_render_common_distributed_knowledge():
    assert render_formula(Cd(frozenset([AB, CD]), p)) == "Cd{{a,b},{c,d}} p"
    assert render_formula(Cd(frozenset([CD, AB]), p)) == "Cd{{a,b},{c,d}} p"


def test_group_order_does_not_matter():
    assert parse_formula("D{b,a} p") == parse_formula("D{a,b} p")
    assert parse_formula("Cd{{d,c},{b,a}} p") == Cd(frozenset([AB, CD]), p)


@pytest.mark.parametrize("text, expected", [
    ("p -> q -> r", Implies(p, Implies(q, r))),
    ("p & q | r", Or(And(p, q), r)),
    ("p | q & r", Or(p, And(q, r))),
    ("p <-> q <-> r", Iff(Iff(p, q), r)),
    ("~p & q", And(Not(p), q)),
    ("~{a} <= {b}", Not(Comp(A, B))),
    ("K a p & q", And(Know("a", p), q)),
    ("K a (p & q)", Know("a", And(p, q))),
    ("true & ~false", And(TRUE, Not(FALSE))),
    ("<!res{a}> p", SemiPub(ReadingAction("res", (A,)), p)),
])
def test_precedence_and_associativity(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize("f, text", [
    (Not(Comp(A, B)), "~({a} <= {b})"),
    (And(Comp(AB, A), p), "{a,b} <= {a} & p"),
    (Implies(Implies(p, q), r), "(p -> q) -> r"),
    (And(p, And(q, r)), "p & (q & r)"),
    (Know("a", Or(p, q)), "K a (p | q)"),
    (SemiPub(ReadingAction("grp", (CD, AB)), Common(frozenset("abcd"), p)), "[!grp({a,b};{c,d})] C{a,b,c,d} p"),
    (SemiPub(ReadingAction("share", (A, B)), p), "[!share({a}:{b})] p"),
    (SemiPub(ReadingAction("map", (("b", AB), ("a", A))), p), "[!map(a:{a},b:{a,b})] p"),
    (Event("hack", "skip", Dist(A, p)), "[hack.skip] D{a} p"),
])
def test_render(f, text):
    assert render_formula(f) == text


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_render_then_parse_is_identity(seed):
    rng = random.Random(seed)
    registry = {"E": random_event_model(rng, "abc")}
    f = random_formula(rng, 4, "abc", "pq", registry)
    assert parse_formula(render_formula(f), registry=registry) == f


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse_formula("p & & q")
    assert info.value.line == 1
    assert info.value.column == 5


@pytest.mark.parametrize("text", ["", "   ", "p &", "K p", "{a} <=", "D{} p", "(p"])
def test_malformed_input_is_a_parse_error(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_agent_names_are_not_propositions():
    with pytest.raises(ParseError):
        parse_formula("a", universe={"a"})
    with pytest.raises(ParseError):
        parse_formula("b")


def test_unknown_agent_against_universe():
    with pytest.raises(UnknownAgent):
        parse_formula("K z p", universe={"a", "b"})
    with pytest.raises(UnknownAgent):
        parse_formula("[!pub{z}] p", universe={"a"})


def test_event_references_resolve_against_registry(hacking):
    assert parse_formula("[hack.hack] p", registry=hacking) == Event("hack", "hack", p)
    with pytest.raises(UnknownEventModel):
        parse_formula("[spy.hack] p", registry=hacking)
    with pytest.raises(UnknownEvent):
        parse_formula("[hack.nothing] p", registry=hacking)
    with pytest.raises(UnknownEventModel):
        parse_formula("[hack.hack] p")


def test_groups_must_be_nonempty():
    with pytest.raises(EmptyGroup):
        make_group([])
    with pytest.raises(EmptyGroup):
        make_family([])


def test_reading_action_canonical_form():
    assert ReadingAction("grp", (CD, AB, CD)).args == (AB, CD)
    assert ReadingAction("map", (("b", B), ("a", AB))).args == (("a", AB), ("b", B))
    with pytest.raises(ParseError):
        ReadingAction("map", (("a", A), ("a", AB)))
    with pytest.raises(ParseError):
        ReadingAction("spy", (A,))


def test_reading_action_from_reads():
    action = ReadingAction.from_reads({"a": {"a"}, "b": {"a", "b"}})
    assert action.render() == "map(b:{a,b})"
    assert ReadingAction.from_reads({"a": {"a"}, "b": {"b"}}).render() == "map(a:{a})"


def test_parse_action():
    assert parse_action("!pub{b}") == ReadingAction("pub", (B,))
    assert parse_action("res{a,b}") == ReadingAction("res", (AB,))
    with pytest.raises(ParseError):
        parse_action("")


def test_desugar_uses_only_core_connectives():
    f = parse_formula("(p | q) -> (K a p <-> C{a,b} q) & D{a,b} r")
    g = desugar(f)
    assert is_desugared(g)
    assert not is_desugared(f)
    assert desugar(Know("a", p)) == Cd(frozenset([A]), p)
    assert desugar(Common(AB, p)) == Cd(frozenset([A, B]), p)
    assert desugar(Or(p, q)) == Not(And(Not(p), Not(q)))


def test_resugar_writes_singleton_families_as_d():
    assert resugar(Cd(frozenset([AB]), p)) == Dist(AB, p)
    assert resugar(And(Cd(frozenset([A]), p), Cd(frozenset([A, B]), q))) == \
        And(Dist(A, p), Cd(frozenset([A, B]), q))


def test_helpers():
    f = parse_formula("[!pub{c}] (K a p & ~D{a,b} q) | {d} <= {a}")
    assert agents(f) == frozenset("abcd")
    assert props(f) == {"p", "q"}
    assert modal_depth(f) == 2
    assert not is_static(f)
    assert is_static(parse_formula("Cd{{a},{b}} p"))
    assert size(And(p, Not(q))) == 4
    assert single_negation(Not(p)) == p
    assert single_negation(p) == Not(p)
    assert conjunction([]) == TRUE
    assert conjunction([p, q, r]) == And(And(p, q), r)
    assert subformulas(And(p, Not(p))) == {And(p, Not(p)), p, Not(p)}
