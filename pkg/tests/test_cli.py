import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from genop.cli import main
from genop.fincat import arrow, poset, walking_iso
from genop.fmulti import nonsym
from genop.orbital import OrbitalPair, core_pair
from genop.serialize import dumps, wrap

from oracles import catalan

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*args, input=None):
    return CliRunner().invoke(main, [str(a) for a in args], input=input)


def run_json(*args, input=None):
    res = run(*args, "--json", input=input)
    return res, json.loads(res.output)


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(dumps(doc))
    return p


def test_build_then_check_through_a_pipe():
    built = run("fmulti", "build", "sigma-star", "--arity", 3, "--json")
    assert built.exit_code == 0
    res = run("fmulti", "check", input=built.output)
    assert res.exit_code == 0
    assert res.output.rstrip().endswith("ok")


def test_transfer_systems_of_c2():
    res, doc = run_json("orbital", "transfer-systems", "--group", "cyclic:2")
    assert res.exit_code == 0
    assert doc["data"]["count"] == 2
    res, doc = run_json("orbital", "transfer-systems", "--file", SAMPLES / "c2.json")
    assert doc["data"]["count"] == 2


def test_free_operad_on_binary_generator():
    res, doc = run_json("operad", "free", "--file", SAMPLES / "binary-generator.json", "--max-stage", 6, "--arity", 4)
    assert res.exit_code == 0
    sizes = doc["data"]["arity_sizes"]
    assert [sizes[str(n)] for n in range(1, 5)] == [catalan(n - 1) for n in range(1, 5)]


def test_non_stabilizing_free_operad_fails_with_witness():
    res, doc = run_json("operad", "free", "--file", SAMPLES / "unary-generator.json", "--max-stage", 4)
    assert res.exit_code == 1
    failed = [c for c in doc["checks"] if not c["pass"]]
    assert failed and failed[0]["witness"]
    assert [s["1"] for s in doc["data"]["stages"]] == [k + 1 for k in range(len(doc["data"]["stages"]))]


@pytest.mark.parametrize("args", [
    ("collections", "compose", "--file", SAMPLES / "collection-pair.json"),
    ("collections", "hom", "--file", SAMPLES / "collection-pair.json"),
    ("collections", "unit", "--arity", 3),
    ("coloured", "pushout", "--file", SAMPLES / "pushout-iso.json"),
    ("coloured", "pushout", "--file", SAMPLES / "pushout-arrow.json"),
    ("coloured", "predicates", "--file", SAMPLES / "morphisms.json"),
    ("coloured", "reduce", "--file", SAMPLES / "morphisms.json"),
    ("orbital", "orbit-cat", "--group", "cyclic:3"),
    ("orbital", "sigma-ot", "--group", "cyclic:2", "--transfer", 1),
    ("fmulti", "fibrancy", "--file", SAMPLES / "binary-generator.json"),
    ("operad", "monoid-roundtrip", "--file", SAMPLES / "binary-generator.json"),
], ids=lambda a: " ".join(str(x) for x in a[:2]))
def test_sample_commands_pass(args):
    res = run(*args)
    assert res.exit_code == 0, res.output


def test_composite_sizes_of_the_sample_pair():
    res, doc = run_json("collections", "compose", "--file", SAMPLES / "collection-pair.json")
    assert doc["data"]["composite"]["2"] == 4


def test_json_output_is_byte_identical():
    args = ("coloured", "pushout", "--file", SAMPLES / "pushout-iso.json", "--json")
    first, second = run(*args), run(*args)
    assert first.exit_code == 0
    assert first.output == second.output
    seeded = ("collections", "compose", "--seed", 7, "--json")
    assert run(*seeded).output == run(*seeded).output


def test_category_documents(tmp_path):
    good = write(tmp_path, "iso.json", wrap("category", walking_iso().to_json()))
    res, doc = run_json("fincat", "check", "--file", good)
    assert res.exit_code == 0 and doc["data"]["morphisms"] == 4
    broken = arrow().to_json()
    broken["compose"].append(["id_b", "u", "id_b"])
    res = run("fincat", "check", "--file", write(tmp_path, "bad.json", wrap("category", broken)))
    assert res.exit_code == 1


def test_orbital_pair_documents(tmp_path):
    ok = write(tmp_path, "core.json", wrap("orbital-pair", core_pair(arrow()).to_json()))
    assert run("orbital", "check-pair", "--file", ok).exit_code == 0
    order = ["x", "y", "z"]
    c = poset(order, lambda a, b: order.index(a) <= order.index(b))
    t = {m: m in c.ident.values() or m == "x<=z" for m in c.morphisms}
    bad = write(tmp_path, "bad.json", wrap("orbital-pair", OrbitalPair(c, t).to_json()))
    res, doc = run_json("orbital", "check-pair", "--file", bad)
    assert res.exit_code == 1
    assert any(not c["pass"] and c["witness"] for c in doc["checks"])


def test_operad_check_detects_a_broken_table(tmp_path):
    from genop.operads.structures import terminal_operad
    doc = terminal_operad(nonsym(2)).to_json()
    doc["multicat"] = {"builder": "nonsym", "arity": 2}
    path = write(tmp_path, "op.json", wrap("operad", doc))
    assert run("operad", "check", "--file", path).exit_code == 0
    doc["units"] = {x: "nope" for x in doc["units"]}
    path = write(tmp_path, "bad.json", wrap("operad", doc))
    assert run("operad", "check", "--file", path).exit_code == 1


def test_unknown_subcommand_exits_2():
    res = run("bogus")
    assert res.exit_code == 2
    assert "No such command" in res.output


@pytest.mark.parametrize("text,message", [
    ("not json", "not valid JSON"),
    ("[1, 2]", "JSON object"),
    ('{"kind": "collection"}', "missing schema"),
    ('{"schema": 99}', "unsupported schema version"),
])
def test_malformed_documents_exit_2(text, message):
    res = run("fmulti", "check", input=text)
    assert res.exit_code == 2
    assert message in res.output


def test_missing_file_exits_2(tmp_path):
    res = run("operad", "free", "--file", tmp_path / "absent.json")
    assert res.exit_code == 2
    assert "cannot read" in res.output


def test_structure_search_beyond_the_cap_exits_3(tmp_path):
    doc = wrap("collection", {"multicat": {"builder": "nonsym", "arity": 2}, "values": {"1": list("abcd")}})
    res = run("operad", "monoid-roundtrip", "--file", write(tmp_path, "big.json", doc))
    assert res.exit_code == 3
    assert "resource cap exceeded" in res.output


def test_text_report_lists_the_bound_and_timings():
    res = run("operad", "free", "--file", SAMPLES / "binary-generator.json")
    assert "(arity bound 4)" in res.output
    assert "s]" in res.output
