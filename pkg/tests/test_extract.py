import io
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dappnet.extract import (
    CSV_HEADER,
    emit_call_table,
    extract_project,
    read_call_table,
    scan_project,
)
from dappnet.extract.model import CallRecord

from conftest import FIXTURES, call_rows, write_tree

HDR = "// SPDX-License-Identifier: MIT\npragma solidity ^0.8.0;\n"


@pytest.mark.parametrize("name", ["auction", "weth"])
def test_golden_call_tables(name):
    got = emit_call_table(extract_project(FIXTURES / name).records)
    want = (FIXTURES / "golden" / f"{name}_calls.csv").read_text()
    assert got == want


def test_same_contract_and_base_calls(tmp_path):
    rows = call_rows(tmp_path, {
        "Base.sol": HDR + "contract Base { function b() internal {} }",
        "Kid.sol": HDR + "contract Kid is Base { function k() public { b(); own(); } function own() internal {} }",
    })
    assert rows == [("Kid.sol", "Kid", "k", "Base"), ("Kid.sol", "Kid", "k", "Kid")]


def test_typed_member_call_and_new(tmp_path):
    rows = call_rows(tmp_path, {
        "T.sol": HDR + "contract T { function f() external {} }",
        "U.sol": HDR + """
contract U {
    T t;
    function g() public {
        t.f();
        T other = new T();
        other.f();
    }
}""",
    })
    assert [r[3] for r in rows] == ["T", "T", "T"]


def test_static_contract_call(tmp_path):
    rows = call_rows(tmp_path, {
        "L.sol": HDR + "library L { function h(uint x) internal pure returns (uint) { return x; } }",
        "C.sol": HDR + "contract C { function f() public { L.h(1); } }",
    })
    assert rows == [("C.sol", "C", "f", "L")]


def test_unresolved_and_low_level_calls_are_sentinel(tmp_path):
    rows = call_rows(tmp_path, {
        "C.sol": HDR + """
contract C {
    function f(address a) public {
        (bool ok, ) = a.call{value: 1}("");
        require(ok, "x");
        IUnknown(a).ping();
        missing();
    }
}""",
    })
    assert [r[3] for r in rows] == ["None", "None", "None"]


def test_builtins_emit_nothing(tmp_path):
    rows = call_rows(tmp_path, {
        "C.sol": HDR + """
contract C {
    uint[] xs;
    event E(uint);
    function f(uint y) public {
        require(y > 0);
        assert(y != 2);
        emit E(uint256(y));
        xs.push(y);
        bytes memory b = abi.encode(y, msg.sender);
        keccak256(b);
    }
}""",
    })
    assert rows == []


def test_calls_in_strings_and_comments_ignored(tmp_path):
    rows = call_rows(tmp_path, {
        "C.sol": HDR + """
contract C {
    function f() public {
        // g();
        /* g(); */
        string memory s = "g();";
    }
    function g() public {}
}""",
    })
    assert rows == []


def test_multiplicity_preserved(tmp_path):
    rows = call_rows(tmp_path, {"C.sol": HDR + "contract C { function f() public { g(); g(); g(); } function g() public {} }"})
    assert len(rows) == 3


def test_modifier_body_calls_attributed_to_modifier(tmp_path):
    rows = call_rows(tmp_path, {
        "C.sol": HDR + "contract C { modifier only() { check(); _; } function check() internal view {} function f() public only {} }",
    })
    assert rows == [("C.sol", "C", "only", "C")]


def test_interface_target(tmp_path):
    rows = call_rows(tmp_path, {
        "I.sol": HDR + "interface IOracle { function price() external view returns (uint); }",
        "C.sol": HDR + "contract C { IOracle o; function f() public view { o.price(); } }",
    })
    assert rows == [("C.sol", "C", "f", "IOracle")]


def test_using_for_resolves_to_attached_library(tmp_path):
    rows = call_rows(tmp_path, {
        "M.sol": HDR + "library SafeMath { function add(uint a, uint b) internal pure returns (uint) { return a + b; } }",
        "C.sol": HDR + "contract C { using SafeMath for uint; function f(uint x) public pure returns (uint) { return x.add(1); } }",
    })
    assert rows == [("C.sol", "C", "f", "SafeMath")]


def test_assembly_is_skipped(tmp_path):
    rows = call_rows(tmp_path, {
        "C.sol": HDR + "contract C { function f() public { assembly { let x := mload(0x40) g() } } function g() public {} }",
    })
    assert rows == []


def test_duplicate_contract_names_renamed(tmp_path, caplog):
    ext = extract_project(write_tree(tmp_path, {
        "a/X.sol": HDR + "contract X { function f() public { f(); } }",
        "b/X.sol": HDR + "contract X { function g() public { g(); } }",
    }))
    names = sorted(c.name for c in ext.contracts)
    assert names == ["X", "X_2"]
    assert {r.source_contract for r in ext.records} == {"X", "X_2"}


def test_lexical_error_skips_file(tmp_path):
    ext = extract_project(write_tree(tmp_path, {
        "Bad.sol": HDR + "contract B { /* unterminated ",
        "Good.sol": HDR + "contract G { function f() public { f(); } }",
    }))
    assert [r.source_contract for r in ext.records] == ["G"]
    assert len(ext.errors) == 1 and "Bad.sol" in ext.errors[0]


def test_non_utf8_file_skipped(tmp_path):
    write_tree(tmp_path, {"Good.sol": HDR + "contract G { function f() public { f(); } }"})
    (tmp_path / "Bin.sol").write_bytes(b"\xff\xfe contract")
    units = scan_project(tmp_path)
    assert [Path(u.path).name for u in units] == ["Good.sol"]


def test_missing_root_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        scan_project(tmp_path / "nope")


def test_csv_roundtrip():
    recs = [CallRecord("A.sol", "A", "f", "B"), CallRecord("A.sol", "A", "g", None)]
    text = emit_call_table(recs)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert read_call_table(io.StringIO(text)) == recs


def test_read_rejects_bad_header():
    with pytest.raises(ValueError):
        read_call_table(io.StringIO("a,b,c,d\n"))


ident = st.sampled_from(["alpha", "beta", "gamma", "delta"])


@settings(max_examples=40)
@given(st.lists(st.tuples(ident, st.sampled_from(["Alpha", "Beta", "Ghost"])), min_size=1, max_size=12))
def test_closure_and_count(tmp_path_factory, calls):
    """Every call statement yields one record whose endpoints are declared
    contracts or the sentinel."""
    root = tmp_path_factory.mktemp("p")
    body = "\n".join(f"        {t[1].lower()}.{t[0]}();" for t in calls)
    files = {
        "Alpha.sol": HDR + "contract Alpha { function alpha() public {} function beta() public {} function gamma() public {} function delta() public {} }",
        "Beta.sol": HDR + "contract Beta { function alpha() public {} function beta() public {} function gamma() public {} function delta() public {} }",
        "Main.sol": HDR + "contract Main {\n    Alpha alpha;\n    Beta beta;\n    function run() public {\n" + body + "\n    }\n}",
    }
    ext = extract_project(write_tree(root, files))
    declared = {c.name for c in ext.contracts}
    assert len(ext.records) == len(calls)
    for rec, (_, target) in zip(ext.records, calls):
        assert rec.source_contract in declared
        assert rec.target_contract == (None if target == "Ghost" else target)
