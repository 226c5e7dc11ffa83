import itertools

import pytest
from hypothesis import given, strategies as st
from test_terms import terms

from cotype.arith import (
    CallableRepr, ConstructorCodeTable, DecodeError, InvalidRepresentation, TableRepr, apply_chat,
    decode_address, defined_points, dump, encode_address, funcrepr_to_prefix, load, pair,
    term_to_funcrepr, unpair,
)
from cotype.evaluator import as_source
from cotype.syntax import parse_program
from cotype.terms import (
    Call, LiteralSource, Node, Unexplored, Unknown, UnknownSource, Vocabulary, lasso_word, make,
    prefix,
)

V = Vocabulary.of("e/0 0/1 1/1 p/2")
TABLE = ConstructorCodeTable(V)


def pe0e():
    return make(V, "p", make(V, "e"), make(V, "0", make(V, "e")))


def test_pairing_is_inverse():
    for z in range(5000):
        assert pair(*unpair(z)) == z
    for x, y in itertools.product(range(40), repeat=2):
        assert unpair(pair(x, y)) == (x, y)


def test_address_code_examples():
    assert encode_address(()) == 0
    assert decode_address(0) == ()
    assert decode_address(encode_address((1, 0))) == (1, 0)


def test_address_codes_injective_on_small_space():
    space = [a for n in range(5) for a in itertools.product(range(3), repeat=n)]
    assert len(space) == 121
    codes = {encode_address(a) for a in space}
    assert len(codes) == 121
    for a in space:
        assert decode_address(encode_address(a)) == a


def test_decode_rejects_non_codes():
    image = {encode_address(a) for n in range(4) for a in itertools.product(range(4), repeat=n)}
    rejected = 0
    for z in range(400):
        if z in image:
            continue
        try:
            a = decode_address(z)
        except DecodeError:
            rejected += 1
        else:
            assert encode_address(a) == z  # a code of a longer or wider address
    assert rejected > 0
    with pytest.raises(DecodeError):
        decode_address(-1)


@given(st.lists(st.integers(0, 50), max_size=12))
def test_address_roundtrip(a):
    assert decode_address(encode_address(a)) == tuple(a)


def test_constructor_codes():
    assert [TABLE.code(c) for c in V] == [1, 2, 3, 4]
    assert TABLE["p"] == 4 and TABLE.constructor(0) is None


def test_represent_the_worked_example():
    g = term_to_funcrepr(LiteralSource(pe0e()), TABLE)
    assert g.at(()) == TABLE["p"]
    assert g.at((0,)) == TABLE["e"]
    assert g.at((1,)) == TABLE["0"]
    assert g.at((1, 0)) == TABLE["e"]
    assert g.at((0, 0)) is None
    assert funcrepr_to_prefix(g, TABLE, 3) == prefix(LiteralSource(pe0e()), 3)


def test_represent_alternating_word():
    g = term_to_funcrepr(lasso_word(V, "", "01"), TABLE)
    for n in range(20):
        assert g.at((0,) * (2 * n)) == TABLE["0"]
        assert g.at((0,) * (2 * n + 1)) == TABLE["1"]


def test_represent_s_omega():
    nat = Vocabulary.of("0/0 s/1")
    p = parse_program("i = s(i);", nat, "i")
    tb = ConstructorCodeTable(nat)
    g = term_to_funcrepr(as_source(p, {}, Call(p.principal)), tb)
    assert all(g.at((0,) * n) == tb["s"] for n in range(40))
    assert g.at((1,)) is None


def test_unknown_propagates():
    g = term_to_funcrepr(UnknownSource(), TABLE)
    assert isinstance(g(0), Unknown)
    assert funcrepr_to_prefix(g, TABLE, 3) == Unexplored("unknown")


def test_invalid_representation():
    g = TableRepr({(): TABLE["e"], (0,): TABLE["e"]})
    with pytest.raises(InvalidRepresentation) as info:
        funcrepr_to_prefix(g, TABLE, 3)
    assert info.value.address == (0,)
    with pytest.raises(InvalidRepresentation):
        funcrepr_to_prefix(TableRepr({(): 99}), TABLE, 2)


def test_empty_representation():
    assert funcrepr_to_prefix(TableRepr({}), TABLE, 2) == Unexplored()


def test_rooting_matches_representation():
    kids = [term_to_funcrepr(LiteralSource(make(V, "e")), TABLE),
            term_to_funcrepr(LiteralSource(make(V, "0", make(V, "e"))), TABLE)]
    rooted = apply_chat(V["p"], kids, TABLE)
    direct = term_to_funcrepr(LiteralSource(pe0e()), TABLE)
    for n in range(5):
        for a in itertools.product(range(3), repeat=n):
            assert rooted.at(a) == direct.at(a)


def test_rooting_nullary():
    g = apply_chat(V["e"], [], TABLE)
    assert defined_points(g, TABLE, 5) == [(0, TABLE["e"])]
    with pytest.raises(ValueError):
        apply_chat(V["p"], [], TABLE)


@given(terms(V, max_leaves=30))
def test_rooting_roundtrips(t):
    g = apply_chat(t.constructor, [term_to_funcrepr(LiteralSource(k), TABLE) for k in t.args],
                   TABLE)
    assert funcrepr_to_prefix(g, TABLE, 10) == prefix(LiteralSource(t), 10)


@given(terms(V, max_leaves=30))
def test_dump_load_roundtrip(t):
    g = term_to_funcrepr(LiteralSource(t), TABLE)
    pts = defined_points(g, TABLE, 12)
    text = dump(pts)
    assert text == "".join(f"{a}\t{c}\n" for a, c in sorted(pts))
    back = load(text)
    assert funcrepr_to_prefix(back, TABLE, 12) == prefix(LiteralSource(t), 12)


def test_callable_repr():
    g = CallableRepr(lambda code: TABLE["1"] if code == 0 else None)
    assert funcrepr_to_prefix(g, TABLE, 2) == Node(V["1"], (Unexplored(),))
