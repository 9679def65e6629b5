import pytest
from hypothesis import given, strategies as st

from ambp import errors
from ambp.truthtable import (
    TruthTable,
    combine,
    complement,
    evaluate,
    from_id,
    function_from_spec,
    named_function,
    parse_table,
    random_table,
    restrict,
    xnor_glue,
)


def tables(max_arity=3):
    return st.integers(0, max_arity).flatmap(
        lambda j: st.builds(TruthTable, st.just(j), st.integers(0, (1 << (1 << j)) - 1))
    )


# --- parsing ---------------------------------------------------------------

def test_parse_and_of_two():
    t = parse_table("0001", 2)
    assert evaluate(t, (1, 1)) == 1
    assert [evaluate(t, x) for x in [(0, 0), (1, 0), (0, 1)]] == [0, 0, 0]


def test_parse_identity():
    t = parse_table("01", 1)
    assert evaluate(t, (0,)) == 0
    assert evaluate(t, (1,)) == 1


def test_parse_length_mismatch():
    with pytest.raises(errors.LengthMismatch):
        parse_table("011", 2)


def test_parse_bad_character():
    with pytest.raises(errors.BadCharacter):
        parse_table("01x1", 2)


def test_text_round_trip():
    for bits in range(16):
        t = from_id(2, bits)
        assert parse_table(t.text(), 2) == t


# --- evaluation -------------------------------------------------------------

def test_evaluate_xor_examples():
    xor = parse_table("0110", 2)
    assert evaluate(xor, (1, 0)) == 1  # index 1
    assert evaluate(xor, (1, 1)) == 0  # index 3


def test_evaluate_const_arity_zero():
    assert evaluate(TruthTable(0, 1), ()) == 1


def test_evaluate_arity_mismatch():
    with pytest.raises(errors.ArityMismatch):
        evaluate(parse_table("0110", 2), (1,))


# --- restrict / combine ------------------------------------------------------

def test_restrict_xor_high_half():
    assert restrict(parse_table("0110", 2), 1).text() == "10"


def test_restrict_and_low_half():
    assert restrict(parse_table("0001", 2), 0).text() == "00"


def test_restrict_arity_zero():
    with pytest.raises(errors.ArityZero):
        restrict(TruthTable(0, 1), 0)


def test_combine_examples():
    assert combine(parse_table("01", 1), parse_table("01", 1)).text() == "0101"
    assert combine(parse_table("00", 1), parse_table("11", 1)).text() == "0011"


def test_combine_xnor_against_enumeration_oracle():
    # expected bits computed point by point from the halves
    h0, h1 = parse_table("10", 1), parse_table("01", 1)
    joined = combine(h0, h1)
    for x1 in (0, 1):
        for x2 in (0, 1):
            want = evaluate(h1 if x2 else h0, (x1,))
            assert evaluate(joined, (x1, x2)) == want
    assert joined.text() == "1001"


def test_restrict_combine_round_trip_exhaustive():
    for arity in (1, 2, 3):
        for bits in range(1 << (1 << arity)):
            g = from_id(arity, bits)
            assert combine(restrict(g, 0), restrict(g, 1)) == g


@given(tables(max_arity=4), st.integers(0, 1))
def test_restrict_matches_evaluation(g, b):
    if g.arity == 0:
        return
    low = restrict(g, b)
    for index in range(low.size):
        x = tuple((index >> k) & 1 for k in range(low.arity))
        assert evaluate(low, x) == evaluate(g, x + (b,))


def test_restrict_matches_evaluation_exhaustive():
    # every table at arity <= 4, both restrictions, every remaining input
    for arity in (1, 2, 3, 4):
        inputs = [
            tuple((index >> k) & 1 for k in range(arity - 1))
            for index in range(1 << (arity - 1))
        ]
        for bits in range(1 << (1 << arity)):
            g = from_id(arity, bits)
            for b in (0, 1):
                low = restrict(g, b)
                for x in inputs:
                    assert evaluate(low, x) == evaluate(g, x + (b,))


def test_xnor_pointwise_exhaustive_small():
    # all pairs at n <= 2, strided pairs at n = 3
    for arity, stride in ((1, 1), (2, 1), (3, 13)):
        inputs = [
            tuple((index >> k) & 1 for k in range(arity))
            for index in range(1 << arity)
        ]
        count = 1 << (1 << arity)
        for f_bits in range(0, count, stride):
            f = from_id(arity, f_bits)
            for g_bits in range(0, count, stride):
                g = from_id(arity, g_bits)
                h = xnor_glue(f, g)
                for x in inputs:
                    assert evaluate(h, x) == (evaluate(f, x) == evaluate(g, x))


# --- xnor ---------------------------------------------------------------------

def test_xnor_self_and_complement():
    f = parse_table("0110", 2)
    assert xnor_glue(f, f).text() == "1111"
    assert xnor_glue(f, complement(f)).text() == "0000"


def test_xnor_and_xor_bitwise_oracle():
    a, b = "0001", "0110"
    expected = "".join("1" if x == y else "0" for x, y in zip(a, b))
    assert xnor_glue(parse_table(a, 2), parse_table(b, 2)).text() == expected == "1000"


@given(tables(max_arity=3), tables(max_arity=3))
def test_xnor_pointwise(f, g):
    if f.arity != g.arity:
        return
    h = xnor_glue(f, g)
    for index in range(f.size):
        x = tuple((index >> k) & 1 for k in range(f.arity))
        assert evaluate(h, x) == (evaluate(f, x) == evaluate(g, x))


def test_xnor_arity_mismatch():
    with pytest.raises(errors.ArityMismatch):
        xnor_glue(parse_table("01", 1), parse_table("0110", 2))


# --- ids -------------------------------------------------------------------

def test_func_id_bijection_small_arities():
    for arity in (0, 1, 2, 3, 4):
        count = 1 << (1 << arity)
        if arity == 4:
            sample = range(0, count, 97)
        else:
            sample = range(count)
        seen = set()
        for value in sample:
            t = from_id(arity, value)
            assert t.id == value
            seen.add(t.id)
        assert len(seen) == len(list(sample))


def test_func_id_sampled_arity_5():
    for value in (0, 1, 2**31 - 1, 2**32 - 1, 1234567890):
        assert from_id(5, value).id == value


# --- named functions -----------------------------------------------------------

def test_named_examples():
    assert named_function("xor", 2).text() == "0110"
    assert named_function("const1", 1).text() == "11"
    assert named_function("and", 2).text() == "0001"
    assert named_function("or", 2).text() == "0111"
    assert named_function("maj", 3).bits == named_function("maj", 3).bits


def test_named_random_deterministic():
    assert random_table(3, 7).bits == 210  # frozen; stable string-seeded stream
    assert named_function("random:7", 3).bits == 210
    assert named_function("random(7)", 3).bits == 210


def test_named_errors():
    with pytest.raises(errors.UnknownName):
        named_function("nand", 2)
    with pytest.raises(errors.UnsupportedArity):
        named_function("maj", 2)


def test_function_from_spec_table():
    assert function_from_spec("table:0110", 2) == named_function("xor", 2)
    with pytest.raises(errors.LengthMismatch):
        function_from_spec("table:011", 2)
