import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from galelab import core, diagonal, describe, zoo
from galelab.describe import SCHEMA_ID, SpecError, build_constructor, build_family, build_gale, build_source, dumps, parse_spec
from galelab.words import PeriodicSource, RuleSource, WordSource, words_upto

F = Fraction
SPECS = Path(__file__).resolve().parent.parent / "specs"
A2 = zoo.BlockAlphabet(2, ("00", "11"))

GALES = {
    "trivial": lambda: zoo.trivial_gale(F(3, 2)),
    "singleton": lambda: zoo.singleton_gale(F(3, 2), RuleSource("zeros")),
    "cover": lambda: zoo.cover_gale(2, ["01", "1"]),
    "cover_sum": lambda: zoo.cover_sum_gale(2, [["01"], ["1101"]]),
    "frequency": lambda: zoo.frequency_gale(F(3, 2), F(1, 4)),
    "block": lambda: zoo.block_gale(2, A2),
    "circuit": lambda: zoo.circuit_gale(F(3, 2), {0: 0, 1: 1, 2: 2}),
    "table": lambda: core.random_table(random.Random(3), F(5, 4), 4),
    "combine": lambda: core.combine([zoo.trivial_gale(2), zoo.frequency_gale(2, F(1, 4))], [1, 2]),
    "dilate": lambda: core.dilate(zoo.frequency_gale(2, F(1, 4)), F(3, 2)),
    "conversion": lambda: core.supergale_to_gale(core.random_table(random.Random(5), F(3, 2), 4)),
}


@pytest.mark.parametrize("name", sorted(GALES))
def test_gale_round_trip(name):
    g = GALES[name]()
    doc = g.describe()
    h = build_gale(json.loads(dumps(doc)))
    assert dumps(h.describe()) == dumps(doc)
    for w in words_upto(4):
        assert h(w) == g(w)


@pytest.mark.parametrize(
    "src",
    [PeriodicSource("01", "1"), WordSource("0110"), RuleSource("thue-morse"), RuleSource("zeros")],
    ids=lambda s: s.describe()["kind"],
)
def test_source_round_trip(src):
    doc = src.describe()
    again = build_source(json.loads(dumps(doc)))
    assert again.describe() == doc
    n = 4 if doc["kind"] == "word" else 50
    assert again.prefix(n) == src.prefix(n)


@pytest.mark.parametrize(
    "make",
    [
        lambda: diagonal.min_branch_constructor(zoo.frequency_gale(F(3, 2), F(1, 4))),
        lambda: diagonal.block_constructor(zoo.trivial_gale(1), A2),
        lambda: diagonal.frequency_constructor(zoo.frequency_gale(1, F(1, 2)), diagonal.FrequencyPlan(F(1, 2), 64)),
        lambda: diagonal.circuit_constructor(zoo.trivial_gale(F(3, 2)), F(1, 2), 2),
    ],
    ids=["min_branch", "block", "frequency", "circuit"],
)
def test_constructor_round_trip(make):
    delta = make()
    doc = delta.describe()
    again = build_constructor(json.loads(dumps(doc)))
    assert dumps(again.describe()) == dumps(doc)
    n = min(40, getattr(delta, "depth_limit", 40))
    assert diagonal.run_constructor(again, n).prefix == diagonal.run_constructor(delta, n).prefix
    src = build_source({"kind": "constructor", "constructor": doc})
    assert src.prefix(n) == diagonal.run_constructor(delta, n).prefix


def test_family_builds_one_gale_per_q():
    fam = build_family({"rule": "frequency", "params": {"y": "1/4"}})
    assert fam(F(5, 4)).q == F(5, 4) and fam(3)("1") == F(3, 4)
    with pytest.raises(SpecError):
        build_family({"rule": "frequency", "q": "2", "params": {"y": "1/4"}})


@pytest.mark.parametrize("path", sorted(SPECS.glob("*.json")), ids=lambda p: p.stem)
def test_example_specs_parse_and_round_trip(path):
    spec = describe.load_spec(path)
    again = parse_spec(json.loads(spec.to_json()))
    assert again.to_json() == spec.to_json()


BAD = [
    ({"schema": "other/v0"}, "schema"),
    ({"schema": SCHEMA_ID, "extra": 1}, "unknown top-level"),
    ({"schema": SCHEMA_ID, "gale": {"rule": "trivial", "q": 1.5}}, "exact rational"),
    ({"schema": SCHEMA_ID, "gale": {"rule": "mystery", "q": "2"}}, "unknown"),
    ({"schema": SCHEMA_ID, "gale": {"rule": "trivial"}}, "missing field 'q'"),
    ({"schema": SCHEMA_ID, "gale": {"rule": "frequency", "q": "2", "params": {"y": "3/4"}}}, "frequency"),
    ({"schema": SCHEMA_ID, "sources": [{"kind": "tape"}]}, "unknown kind"),
    ({"schema": SCHEMA_ID, "sources": [{"kind": "rule", "rule": "nope"}]}, "source"),
    ({"schema": SCHEMA_ID, "constructor": {"constructor": "min_branch", "gale": {"rule": "trivial", "q": "2"}}}, "min_branch"),
    ({"schema": SCHEMA_ID, "constructor": {"constructor": "oracle", "gale": {"rule": "trivial", "q": "1"}}}, "unknown kind"),
    ([1, 2], "JSON object"),
]


@pytest.mark.parametrize("doc,fragment", BAD, ids=[b[1] for b in BAD])
def test_bad_documents_raise_spec_error(doc, fragment):
    with pytest.raises(SpecError, match=fragment):
        parse_spec(doc)


def test_load_spec_errors(tmp_path):
    with pytest.raises(SpecError, match="cannot read"):
        describe.load_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecError, match="not valid JSON"):
        describe.load_spec(bad)
