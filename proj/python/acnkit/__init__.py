"""ASN.1/ACN codec toolkit.

Values use the same JSON notation as the command-line tool: records are
dicts, CHOICE values are single-key dicts, SEQUENCE OF values are lists and
REAL values are {"pattern": "<hex>", "width": 32 | 64}.
"""

import json

from ._core import CodecError, Plan, compile, random_schema

__all__ = [
    "CodecError",
    "Plan",
    "compile",
    "encode",
    "decode",
    "size_of",
    "check_constraints",
    "roundtrip",
    "random_schema",
    "random_value",
]

from . import _core


def encode(plan, value, offset=0):
    """Encode value at bit offset. Returns the bytes from bit 0 to the end of the message."""
    return _core.encode_json(plan, json.dumps(value), offset)


def decode(plan, data, offset=0):
    """Decode a message starting at bit offset. Returns (value, bits consumed)."""
    text, bits = _core.decode_json(plan, bytes(data), offset)
    return json.loads(text), bits


def size_of(plan, value, offset=0):
    return _core.size_of_json(plan, json.dumps(value), offset)


def check_constraints(plan, value):
    """List of (path, message) pairs; empty when the value is valid."""
    return _core.check_constraints_json(plan, json.dumps(value))


def roundtrip(plan, value, offset=0, fuzz=16, seed=1):
    """Run the invertibility contracts. Returns {name: (passed, detail)} in run order."""
    return {name: (ok, detail) for name, ok, detail in _core.roundtrip_json(plan, json.dumps(value), offset, fuzz, seed)}


def random_value(plan, seed):
    return json.loads(_core.random_value_json(plan, seed))
