"""Deterministic JSON reports for verdict suites.

Reports carry no timestamps or machine identity; given the same verdicts
and configuration the emitted bytes are identical.  Keys are sorted at
every level and floats are written with 17 significant digits, which
round-trips any double exactly.  Non-finite floats are rejected so every
report stays valid JSON for every consumer.
"""

from __future__ import annotations

import json
import math
from typing import Mapping

from .errors import ContractError

__all__ = ["REPORT_SCHEMA", "SCHEMA_VERSION", "canonical_json", "emit_report"]

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "security verdict report",
    "type": "object",
    "required": ["schema_version", "generator", "scheme", "seed", "config",
                 "verdicts", "overall_pass"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "generator": {
            "type": "object",
            "required": ["name", "version"],
            "properties": {
                "name": {"type": "string"},
                "version": {"type": "string"},
            },
        },
        "scheme": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "config": {"type": "object"},
        "verdicts": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {
                "type": "object",
                "required": ["check", "method"],
                "properties": {
                    "check": {"type": "string"},
                    "method": {"type": "string"},
                    "pass": {"type": "boolean"},
                },
            },
        },
        "overall_pass": {"type": "boolean"},
    },
}


def canonical_json(obj) -> str:
    """Serialize to JSON with sorted keys and 17-significant-digit floats."""
    out: list[str] = []
    _emit(obj, out.append)
    return "".join(out)


def _emit(obj, write) -> None:
    if obj is None:
        write("null")
    elif obj is True:
        write("true")
    elif obj is False:
        write("false")
    elif isinstance(obj, str):
        write(json.dumps(obj))
    elif isinstance(obj, int):
        write(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ContractError(f"non-finite float {obj!r} cannot appear in a report")
        write(f"{obj:.17g}")
    elif isinstance(obj, Mapping):
        write("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise ContractError(f"report keys must be strings, got {key!r}")
            if not first:
                write(",")
            first = False
            write(json.dumps(key))
            write(":")
            _emit(obj[key], write)
        write("}")
    elif isinstance(obj, (list, tuple)):
        write("[")
        for i, item in enumerate(obj):
            if i:
                write(",")
            _emit(item, write)
        write("]")
    else:
        raise ContractError(f"unsupported report value: {obj!r}")


def emit_report(verdicts: Mapping[str, Mapping], config: Mapping, seed: int) -> str:
    """Assemble and serialize a report.

    ``overall_pass`` aggregates the verdicts that carry a ``pass`` field;
    diagnostics without one are included but never gate the outcome.  The
    config echo should hold the semantic parameters only: operational
    flags (worker counts, output paths) are excluded by the callers so
    identical analyses give identical bytes anywhere.
    """
    from . import __version__

    if not verdicts:
        raise ContractError("a report needs at least one verdict")
    for name, verdict in verdicts.items():
        if not isinstance(verdict, Mapping) or "check" not in verdict:
            raise ContractError(f"verdict {name!r} must be a mapping with a 'check' field")
    report = {
        "schema_version": SCHEMA_VERSION,
        "generator": {"name": "chaosteg", "version": __version__},
        "scheme": "chaotic-iterations LSC hiding (keyed and cover-driven strategies)",
        "seed": seed,
        "config": dict(config),
        "verdicts": {name: dict(v) for name, v in verdicts.items()},
        "overall_pass": all(
            bool(v["pass"]) for v in verdicts.values() if "pass" in v
        ),
    }
    return canonical_json(report)
