import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galelab.circuits import census, table_to_word
from galelab.core import validate
from galelab.words import EMPTY, PeriodicSource, RuleSource, all_words, words_upto
from galelab.zoo import (
    BlockAlphabet,
    CoverGale,
    block_gale,
    circuit_gale,
    countable_family,
    cover_gale,
    cover_sum_gale,
    frequency_gale,
    segment_of,
    singleton_gale,
    trivial_gale,
)
from oracles import frequency_value

F = Fraction


def cursor_values(d, bits):
    return list(d.path_values(bits))


def direct_values(d, bits):
    return [d(bits[:i]) for i in range(len(bits) + 1)]


def test_trivial_gale():
    assert all(trivial_gale(2)(w) == 1 for w in words_upto(5))
    assert trivial_gale(3)("0110") == F(81, 16)
    assert validate(trivial_gale(F(5, 2)), 8).valid


def test_singleton_gale():
    d = singleton_gale(2, RuleSource("zeros"))
    assert d("000") == 8 and d("01") == 0
    assert validate(d, 10).valid
    flat = singleton_gale(1, RuleSource("zeros"))
    assert all(flat("0" * n) == 1 for n in range(20))
    assert cursor_values(d, "00010") == direct_values(d, "00010")


def test_cover_gale_hand_example():
    d = cover_gale(2, ["00"])
    assert (d(""), d("0"), d("1"), d("00"), d("000")) == (F(1, 4), F(1, 2), 0, 1, 1)


def test_cover_at_root_is_trivial():
    d = cover_gale(F(3, 2), [""])
    assert all(d(w) == F(3, 4) ** len(w) for w in words_upto(6))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([F(5, 4), F(3, 2), F(2), F(3)]))
def test_cover_gale_triple(seed, q):
    rng = random.Random(seed)
    words = {"".join(rng.choice("01") for _ in range(rng.randint(0, 6))) for _ in range(rng.randint(1, 5))}
    cover = [w for w in words if not any(v != w and w.startswith(v) for v in words)]
    d = CoverGale(q, cover)
    assert validate(d, 8).valid
    assert d(EMPTY) == sum((q ** -len(a) for a in cover), F(0)) == d.mass()
    assert all(d(a) == 1 for a in cover)


def test_cover_sum_reaches_its_weight():
    covers = [["0" * 2**r] for r in range(4)]
    d = cover_sum_gale(2, covers)
    assert validate(d, 9).valid
    assert all(d("0" * n) >= 8 for n in range(8, 14))
    with pytest.raises(ValueError, match="Kraft mass"):
        cover_sum_gale(2, [["0"], ["0"]])


def test_frequency_gale_examples():
    assert all(frequency_gale(2, F(1, 2))(w) == 1 for w in words_upto(5))
    d = frequency_gale(2, F(1, 4))
    assert d("0") == F(3, 2) and d("01") == F(3, 4)
    for bad in (0, F(3, 5)):
        with pytest.raises(ValueError):
            frequency_gale(2, bad)


def test_frequency_closed_form_equals_recurrence():
    for q, y in [(F(3, 2), F(1, 3)), (2, F(1, 8)), (F(7, 5), F(1, 2))]:
        d = frequency_gale(q, y)
        for w in words_upto(12):
            assert d(w) == frequency_value(F(q), y, w)
        assert validate(d, 8).valid


@pytest.mark.parametrize("pattern", ["00000001", "0001", "01", "011", "00101"])
def test_frequency_growth_identity_on_periodic_sources(pattern):
    q, y = F(5, 3), F(1, 4)
    d = frequency_gale(q, y)
    k, p = pattern.count("1"), len(pattern)
    per_period = y**k * (1 - y) ** (p - k) * q**p
    vals = cursor_values(d, PeriodicSource(pattern).prefix(60 * p))
    for j in range(61):
        assert vals[j * p] == per_period**j


def test_block_gale_examples():
    A = BlockAlphabet(2, ("11", "00", "00"))
    assert A.S == ("00", "11") and A.size == 2
    d = block_gale(2, A)
    assert (d("0"), d("00"), d("01")) == (1, 2, 0)
    vals = cursor_values(d, "00" * 10)
    assert [vals[2 * k] for k in range(11)] == [2**k for k in range(11)]
    full = block_gale(F(3, 2), BlockAlphabet(3, tuple(all_words(3))))
    assert all(full(w) == F(3, 4) ** len(w) for w in words_upto(7))


def test_block_alphabet_validation():
    with pytest.raises(ValueError):
        BlockAlphabet(2, ("0",))
    with pytest.raises(ValueError):
        BlockAlphabet(2, ())
    with pytest.raises(ValueError):
        BlockAlphabet(0, ("",))


@pytest.mark.parametrize("l,S", [(2, ["00", "11"]), (2, ["00", "01", "10"]), (3, ["000", "001", "010", "100", "111"])])
def test_block_gale_telescoping_and_validity(l, S):
    A = BlockAlphabet(l, tuple(S))
    d = block_gale(F(3, 2), A)
    assert sum(d.rho(u) for u in S) == 1
    assert sum(d.rho(u) for u in all_words(l) if u not in S) == 0
    assert validate(d, 10).valid
    bits = "".join(S) * 5
    assert cursor_values(d, bits) == direct_values(d, bits)
    assert d(bits) == (F(3, 2) ** l / len(S)) ** (5 * len(S))


def test_segment_layout():
    assert [segment_of(p) for p in range(8)] == [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (2, 3), (3, 0)]


def test_circuit_gale_is_a_gale_through_two_input_segments():
    for budget in [{0: 0, 1: 0, 2: 1}, {0: 0, 1: 1, 2: 2}, {0: 0, 1: 1, 2: 5}]:
        d = circuit_gale(F(3, 2), budget)
        assert validate(d, 6).valid
        assert d(EMPTY) == 1
        with pytest.raises(ValueError, match="only covers"):
            d("0" * 8)


def test_circuit_gale_factor_on_decidable_block():
    q, t = F(3, 2), 2
    d = circuit_gale(q, {0: 0, 1: 1, 2: t})
    c2 = census(2, t)
    prefix = "0" + "01"  # segments n=0 and n=1
    for table in sorted(c2.reached(t)):
        u = table_to_word(2, table)
        assert d(prefix + u) == q**4 / c2.novel_count(t) * d(prefix)


def test_countable_family_members_are_singletons():
    fam = countable_family(2, [RuleSource("zeros"), RuleSource("ones")])
    assert fam[0]("00") == 4 and fam[1]("11") == 4 and fam[1]("10") == 0


def test_describe_shape():
    d = block_gale(2, BlockAlphabet(2, ("00", "11")))
    assert d.describe() == {"kind": "gale", "q": "2/1", "rule": "block", "params": {"l": 2, "S": ["00", "11"]}}
