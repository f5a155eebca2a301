# documents.py
"""
JSON document schemas for models, event models and pseudo-models.

The schemas only check shape. Semantic checks (partitions, known agents,
reading invariants) happen in the loaders of models.py and dynamics.py.
"""

import json
import logging

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from errors import InputError, SchemaError

logger = logging.getLogger(__name__)


class ModelDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    agents: list[str]
    states: list[str]
    relations: dict[str, list[list[str]]]
    valuation: dict[str, list[str]] = Field(default_factory=dict)


class PseudoModelDocument(BaseModel):
    """Groups are keyed "a,b"; comparatives are keyed "a,b<=c"."""
    model_config = ConfigDict(extra="forbid")

    agents: list[str]
    states: list[str]
    groups: dict[str, list[list[str]]]
    valuation: dict[str, list[str]] = Field(default_factory=dict)
    comparatives: dict[str, list[str]] = Field(default_factory=dict)
    designated: str | None = None


class EventModelDocument(BaseModel):
    """reads lists, per event, only the agents that read more than themselves."""
    model_config = ConfigDict(extra="forbid")

    agents: list[str]
    events: list[str]
    relations: dict[str, list[list[str]]]
    reads: dict[str, dict[str, list[str]]] = Field(default_factory=dict)


def validate_document(schema: type[BaseModel], data) -> BaseModel:
    """
    Validates raw JSON data against a document schema.

    Args:
        schema: One of the document classes above.
        data: Parsed JSON, or an already validated document.

    Returns:
        The validated document.
    """
    if isinstance(data, schema):
        return data
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise SchemaError(f"{schema.__name__}: {location}: {first['msg']}") from None


def read_json(path: str):
    """Reads a JSON file, mapping I/O and decoding problems to input errors."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON: {e}") from None
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    logger.info(f"Loaded document {path}")
    return data


def dump_json(data) -> str:
    """Deterministic JSON text for result documents."""
    return json.dumps(data, indent=2, ensure_ascii=False)


def write_json(path: str, data):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(dump_json(data) + "\n")
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}") from None
    logger.info(f"Wrote document {path}")
