"""JSON schemas for the documents written by the command-line tool."""

from __future__ import annotations

import jsonschema

from .exceptions import InvalidArgumentError

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}
_INTERVAL = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

CRITERION_REPORT = {
    "type": "object",
    "required": ["criterion", "lhs", "rhs", "ratio", "violated", "gains", "components", "state"],
    "properties": {
        "criterion": {"type": "string"},
        "lhs": _NUM,
        "rhs": _NUM,
        "ratio": _NUM_OR_NULL,
        "violated": {"type": "boolean"},
        "direction": {"enum": ["lower", "upper"]},
        "gains": {
            "oneOf": [
                {"type": "null"},
                {"type": "object", "required": ["x", "y", "z"], "additionalProperties": False,
                 "properties": {"x": _NUM, "y": _NUM, "z": _NUM}},
            ]
        },
        "components": {"type": "object", "additionalProperties": _NUM},
        "state": {"type": "object"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "intervals": {"type": "object", "additionalProperties": _INTERVAL},
    },
}

REPORT_BUNDLE = {
    "type": "object",
    "required": ["state", "reports"],
    "properties": {
        "state": {"type": "object"},
        "reports": {"type": "array", "items": CRITERION_REPORT},
        "skipped": {"type": "array", "items": {"type": "string"}},
    },
}

ESTIMATE_SET = {
    "type": "object",
    "required": ["values", "intervals", "counts", "n_mean"],
    "properties": {
        "values": {"type": "object", "additionalProperties": _NUM},
        "intervals": {"type": "object", "additionalProperties": _INTERVAL},
        "counts": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "n_mean": _NUM,
        "confidence": _NUM,
        "replicates": {"type": "object", "additionalProperties": {"type": "array", "items": _NUM}},
    },
}

ESTIMATE_BUNDLE = {
    "type": "object",
    "required": ["estimates", "reports"],
    "properties": {"estimates": ESTIMATE_SET, "reports": {"type": "array", "items": CRITERION_REPORT}},
}

SWEEP_RESULT = {
    "type": "object",
    "required": ["grid", "criteria", "ratios", "meta"],
    "properties": {
        "grid": {"type": "array", "items": _NUM, "minItems": 1},
        "criteria": {"type": "array", "items": {"type": "string"}},
        "ratios": {"type": "object", "additionalProperties": {"type": "array", "items": _NUM_OR_NULL}},
        "meta": {"type": "object"},
    },
}

VERIFY_RESULT = {
    "type": "object",
    "required": ["passed", "checks"],
    "properties": {"passed": {"type": "boolean"}, "checks": {"type": "array"}},
}


def validate(doc, schema) -> None:
    """Raise :class:`InvalidArgumentError` if ``doc`` does not satisfy ``schema``."""
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise InvalidArgumentError(f"output failed schema validation: {exc.message}") from None
