import os
from pathlib import Path

import pytest

import acnkit

FIXTURES = Path(os.environ.get("ACNKIT_FIXTURES", Path(__file__).resolve().parents[2] / "tests" / "fixtures"))
TC27 = "TC-2-7-DistrPhysicalDevCmds"


def load(name):
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="module")
def tc27():
    return acnkit.compile(load("tc27.asn1"), load("tc27.acn"), TC27)


@pytest.fixture(scope="module")
def cmds1():
    import json

    return json.loads(load("tc27.cmds1.json"))


def test_compile_bounds(tc27):
    assert (tc27.min_bits, tc27.max_bits, tc27.alignment) == (56, 1544, "none")
    assert len(tc27.slots) == 2


def test_encode_known_bytes(tc27, cmds1):
    assert acnkit.encode(tc27, cmds1) == bytes([0, 0, 0, 2, 1, 7, 200, 1, 0, 255])


def test_decode_inverts_encode_at_offset(tc27, cmds1):
    for offset in (0, 3, 13):
        data = acnkit.encode(tc27, cmds1, offset)
        value, bits = acnkit.decode(tc27, data, offset)
        assert bits == acnkit.size_of(tc27, cmds1, offset) == 80
        assert acnkit.encode(tc27, value, offset) == data


def test_plan_dump_load(tc27, cmds1):
    again = acnkit.Plan.load(tc27.dump())
    assert again.dump() == tc27.dump()
    assert acnkit.encode(again, cmds1) == acnkit.encode(tc27, cmds1)


def test_roundtrip_contracts(tc27, cmds1):
    outcome = acnkit.roundtrip(tc27, cmds1, offset=5, fuzz=8, seed=3)
    assert len(outcome) == 9
    assert all(ok for ok, _ in outcome.values())


def test_constraint_violations(tc27):
    found = acnkit.check_constraints(tc27, {"physicalDevCmds": []})
    assert found and found[0][0] == "physicalDevCmds"


def test_errors_raise(tc27):
    with pytest.raises(acnkit.CodecError, match="insufficient"):
        acnkit.decode(tc27, b"\x00\x00\x00\x02\x01")
    with pytest.raises(acnkit.CodecError):
        acnkit.compile("M DEFINITIONS ::= BEGIN\nT ::= INTEGER (5 .. 3)\nEND\n", "", "T")


def test_random_schema_roundtrips():
    for seed in range(20):
        asn1, acn, name = acnkit.random_schema(seed)
        plan = acnkit.compile(asn1, acn, name)
        value = acnkit.random_value(plan, seed)
        assert all(ok for ok, _ in acnkit.roundtrip(plan, value, offset=seed % 8, fuzz=2).values())
