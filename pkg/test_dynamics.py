"""
Tests for reading maps, semi-public updates and reading event models.
"""

import logging
import random

import pytest
from hypothesis import given, settings, strategies as st

from checker import check
from documents import write_json
from dynamics import (ReadingMap, compose_events, compose_reading, event_model_from_map, event_model_to_document,
                      identity, lift_reading, lift_resolution_chain, load_event_model, load_event_registry,
                      product_update, public, reading_closure, resolution, resolve_action, semi_public_update,
                      sharing, within)
from errors import EventModelError, UniverseMismatch, UnknownAgent, UnknownEvent
from generators import random_action, random_event_model, random_model
from models import is_isomorphism
from syntax import ReadingAction, parse_formula

UNIVERSE = frozenset("abcd")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_reading_map_invariants():
    with pytest.raises(UniverseMismatch):
        ReadingMap.from_dict("ab", {"a": {"a"}})
    with pytest.raises(EventModelError):
        ReadingMap.from_dict("ab", {"a": {"b"}, "b": {"b"}})
    with pytest.raises(UnknownAgent):
        ReadingMap.from_dict("ab", {"a": {"a", "z"}, "b": {"b"}})


def test_named_reading_maps():
    assert public(UNIVERSE, "ab")("c") == frozenset("abc")
    assert public(UNIVERSE, "ab")("a") == frozenset("ab")
    assert resolution(UNIVERSE, "ab")("c") == frozenset("c")
    assert resolution(UNIVERSE, "ab")("b") == frozenset("ab")
    grouped = within(UNIVERSE, ["ab", "bc"])
    assert grouped("b") == frozenset("abc")
    assert grouped("d") == frozenset("d")
    assert sharing(UNIVERSE, "a", "cd")("d") == frozenset("ad")
    assert sharing(UNIVERSE, "a", "cd")("b") == frozenset("b")
    assert identity(UNIVERSE).is_identity()


def test_written_actions_resolve_to_named_maps():
    assert resolve_action(ReadingAction("pub", (frozenset("a"),)), UNIVERSE) == public(UNIVERSE, "a")
    assert resolve_action(ReadingAction("grp", (frozenset("ab"), frozenset("cd"))), UNIVERSE) == \
        within(UNIVERSE, ["ab", "cd"])
    mapped = resolve_action(ReadingAction("map", (("b", frozenset("a")),)), UNIVERSE)
    assert mapped("b") == frozenset("ab")
    assert mapped("a") == frozenset("a")
    with pytest.raises(UnknownAgent):
        resolve_action(ReadingAction("pub", (frozenset("z"),)), UNIVERSE)


def test_reading_map_prints_as_action():
    assert str(public("ab", "a")) == "map(b:{a,b})"
    assert str(identity("ab")) == "map(a:{a})"


def test_lifting_and_composition():
    alpha = resolution(UNIVERSE, "ab")
    beta = resolution(UNIVERSE, "bc")
    assert lift_reading(alpha, "bc") == frozenset("abc")
    composed = compose_reading(alpha, beta)
    assert composed("c") == frozenset("abc")
    assert composed("a") == frozenset("ab")
    assert compose_reading(alpha, identity(UNIVERSE)) == alpha
    assert compose_reading(identity(UNIVERSE), alpha) == alpha
    assert lift_resolution_chain(UNIVERSE, [frozenset("ab"), frozenset("bc")], "c") == frozenset("abc")
    assert lift_resolution_chain(UNIVERSE, [frozenset("bc"), frozenset("ab")], "c") == frozenset("bc")
    with pytest.raises(UniverseMismatch):
        compose_reading(alpha, identity("ab"))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_composition_is_associative(seed):
    rng = random.Random(seed)
    a, b, c = (resolve_action(random_action(rng, "abc"), "abc") for _ in range(3))
    assert compose_reading(compose_reading(a, b), c) == compose_reading(a, compose_reading(b, c))


def test_reading_closure_is_closed():
    maps = {resolution("abc", "ab"), resolution("abc", "bc")}
    closed = reading_closure(maps)
    assert maps <= closed
    for alpha in closed:
        for beta in closed:
            assert compose_reading(alpha, beta) in closed


def test_public_sharing_of_b_on_first_model(ex1):
    updated = semi_public_update(ex1, public(ex1.universe, "b"))
    assert updated.relations["a"] == ex1.group_rel("ab")
    assert updated.relations["c"] == ex1.group_rel("bc")
    assert updated.relations["b"] == ex1.relations["b"]
    assert updated.valuation == ex1.valuation
    with pytest.raises(UniverseMismatch):
        semi_public_update(ex1, public("ab", "a"))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_single_event_product_matches_semi_public_update(seed):
    rng = random.Random(seed)
    m = random_model(rng, "abc", "pq", max_states=5)
    alpha = resolve_action(random_action(rng, "abc"), m.universe)
    direct = semi_public_update(m, alpha)
    product = product_update(m, event_model_from_map(alpha, "e"))
    assert is_isomorphism(direct, product, {s: f"{s}@e" for s in m.states})


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_composed_event_model_matches_two_products(seed):
    rng = random.Random(seed)
    m = random_model(rng, "ab", "p", max_states=3)
    first = random_event_model(rng, "ab", max_events=2)
    second = random_event_model(rng, "ab", max_events=2)
    stepwise = product_update(product_update(m, first), second)
    at_once = product_update(m, compose_events(first, second))
    pairing = {f"{s}@{e};{f}": f"{s}@{e}@{f}" for s in m.states for e in first.events for f in second.events}
    assert is_isomorphism(at_once, stepwise, pairing)


def test_composed_event_names():
    hack = load_event_model({"agents": ["a", "b"], "events": ["hack", "skip"],
                             "relations": {"a": [["hack", "skip"]], "b": [["hack"], ["skip"]]},
                             "reads": {"hack": {"b": ["a", "b"]}}})
    composed = compose_events(hack, hack, separator="_")
    assert composed.events == ("hack_hack", "hack_skip", "skip_hack", "skip_skip")
    assert composed.reads["skip_hack"]("b") == frozenset("ab")
    assert composed.reads["skip_skip"].is_identity()


def test_hacking_product(ex8, hacking):
    product = product_update(ex8, hacking["hack"])
    assert product.states == ("s@hack", "s@skip", "t@hack", "t@skip")
    assert product.projection["t@hack"] == ("t", "hack")
    assert product.relations["b"].block_of("s@hack") == {"s@hack"}
    assert product.relations["a"].block_of("s@hack") == {"s@hack", "s@skip"}
    assert product.valuation["p"] == {"s@hack", "s@skip"}
    assert check(product, "s@hack", parse_formula("K b p & ~K a K b p"))


def test_detected_hacking(ex8, hacking):
    f = parse_formula("[detected.detected] (K a K b p & ~K b K a K b p)", registry=hacking)
    assert check(ex8, "s", f, hacking)
    f = parse_formula("[detected.undetected] K a K b p", registry=hacking)
    assert not check(ex8, "s", f, hacking)


def test_indistinguishable_events_must_read_alike():
    document = {"agents": ["a", "b"], "events": ["e", "f"],
                "relations": {"a": [["e", "f"]], "b": [["e"], ["f"]]},
                "reads": {"e": {"a": ["a", "b"]}}}
    with pytest.raises(EventModelError):
        load_event_model(document)


def test_read_sets_missing_their_reader(caplog):
    document = {"agents": ["a", "b"], "events": ["e"],
                "relations": {"a": [["e"]], "b": [["e"]]},
                "reads": {"e": {"b": ["a"]}}}
    with pytest.raises(EventModelError):
        load_event_model(document, strict=True)
    with caplog.at_level(logging.WARNING):
        em = load_event_model(document, strict=False)
    assert em.reads["e"]("b") == frozenset("ab")
    assert "omits the reader" in caplog.text


def test_event_model_loader_errors():
    base = {"agents": ["a"], "events": ["e"], "relations": {"a": [["e"]]}}
    with pytest.raises(UnknownEvent):
        load_event_model({**base, "reads": {"x": {"a": ["a"]}}})
    with pytest.raises(UnknownAgent):
        load_event_model({**base, "reads": {"e": {"z": ["z"]}}})
    with pytest.raises(EventModelError):
        load_event_model({**base, "relations": {"a": [["e", "x"]]}})
    with pytest.raises(EventModelError):
        load_event_model({**base, "relations": {}})
    with pytest.raises(UnknownEvent):
        load_event_model(base).require_event("x")


def test_event_document_round_trip(hacking):
    for em in hacking.values():
        again = load_event_model(event_model_to_document(em))
        assert again.events == em.events
        assert again.reads == em.reads
        assert all(again.erel[a] == em.erel[a] for a in em.universe)


def test_registry_is_keyed_by_file_stem(tmp_path, hacking):
    path = tmp_path / "spy.json"
    write_json(str(path), event_model_to_document(hacking["hack"]))
    registry = load_event_registry([str(path)])
    assert set(registry) == {"spy"}
    with pytest.raises(EventModelError):
        load_event_registry([str(path), str(path)])
