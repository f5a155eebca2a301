# conftest.py
"""Shared fixtures: the bundled corpus models and event models."""

import logging
import os

import pytest

from documents import read_json
from dynamics import load_event_model
from models import load_model

ROOT = os.path.dirname(os.path.abspath(__file__))
CORPUS = os.path.join(ROOT, "corpus")


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS, name)


def corpus_model(name: str):
    return load_model(read_json(corpus_path(name)))


@pytest.fixture
def ex1():
    """Four states, three agents; p is distributed knowledge at sp."""
    return corpus_model("ex1.json")


@pytest.fixture
def ex3():
    return corpus_model("ex3.json")


@pytest.fixture
def ex7():
    return corpus_model("ex7.json")


@pytest.fixture
def ex8():
    return corpus_model("ex8.json")


@pytest.fixture
def hacking():
    """Registry with the secret, detected and mutual hacking event models."""
    return {name: load_event_model(read_json(corpus_path(f"{name}.json")))
            for name in ("hack", "detected", "mutual")}


@pytest.fixture(autouse=True)
def restore_root_logger():
    """main() reconfigures the root logger; undo that after each test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
