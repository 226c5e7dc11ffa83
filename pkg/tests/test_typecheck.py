import pytest
from hypothesis import given, settings, strategies as st
from oracles import (
    ZE_OMEGA, FlatTD, flatten_expansion, lasso_letters, nat, runs_to, verify_derivation, word,
    ze_closure,
)

from cotype.datasystem import PolarityError
from cotype.evaluator import EvalConfig, No, Yes, as_source
from cotype.syntax import parse_program, parse_term
from cotype.terms import Call, LiteralSource, Unknown, UnknownSource, lasso_word, make
from cotype.typecheck import (
    Budget, ChoiceOutOfRange, Derived, Inner, Leaf, Refuted, SampleNotOfClaimedInputType, TDTree,
    VerifiedToHeight, check_coinductive, check_inductive, check_program_type, check_type,
    consistent, eq_program, is_positive, td_node, typed_eq,
)


def source(session, text, program=None, cfg=None):
    names = [program] if program else list(session.programs)
    for name in names:
        p = session.programs[name]
        try:
            t = parse_term(text, session.vocabulary, p)
        except Exception:
            continue
        return as_source(p, {}, t, cfg)
    raise LookupError(text)


# ------------------------------------------------------------ inductive

def test_ze_examples(words):
    vs, v = words.systems["ZE"], words.vocabulary
    src = LiteralSource(word(v, "010"))
    got = check_inductive(vs, "Z", src)
    assert isinstance(got, Derived) and verify_derivation(vs, src, got.witness)
    assert isinstance(check_inductive(vs, "Z", LiteralSource(word(v, "11"))), Refuted)
    got = check_inductive(vs, "Z", LiteralSource(word(v, "")))
    assert isinstance(got, Derived) and got.witness.premises == ()


def test_inductive_on_coinductive_type_is_an_error(words):
    with pytest.raises(PolarityError):
        check_inductive(words.systems["WOmega"], "W", LiteralSource(word(words.vocabulary, "")))


def test_nat_and_lists(alt):
    vs, v = alt.systems["Alt"], alt.vocabulary
    assert isinstance(check_type(vs, "N", LiteralSource(nat(v, 2))), Derived)
    assert isinstance(check_type(vs, "L", LiteralSource(make(v, "e"))), Derived)
    assert isinstance(check_type(vs, "F", source(alt, "fs")), VerifiedToHeight)
    assert isinstance(check_type(vs, "F", source(alt, "twice")), VerifiedToHeight)
    assert isinstance(check_type(vs, "F", source(alt, "p(s(0), sf)")), Refuted)
    got = check_type(vs, "L", source(alt, "pairs"))
    assert isinstance(got, Derived)
    assert verify_derivation(vs, source(alt, "pairs"), got.witness)


def test_inductive_check_on_infinite_input_is_unknown(omega):
    got = check_type(omega.systems["Nat"], "N", source(omega, "i"), Budget(height=20))
    assert isinstance(got, Unknown)


# ------------------------------------------------------- expansion tree

def test_td_examples(td):
    vs = td.systems["Run"]
    tree = TDTree(vs, "D")
    assert td_node(vs, "D", ()).tree == Leaf("D", True)
    assert len(tree.children(tree.root())) == 3
    e = td_node(vs, "E", (0,)).tree
    assert isinstance(e, Inner) and e.constructor.name == "p"
    assert e.children == (Leaf("E", True), Leaf("D", True))
    with pytest.raises(ChoiceOutOfRange):
        td_node(vs, "D", (3,))
    with pytest.raises(PolarityError):
        TDTree(vs, "T")


def test_td_leaves_of_lower_rank_are_terminal(td):
    node = td_node(td.systems["Run"], "D", (1,))
    assert node.tree.children == (Leaf("T", False), Leaf("D", True))
    assert node.designated() == (1,)


def test_td_expands_breadth_first(td):
    vs = td.systems["Run"]
    flat = FlatTD({"D": [("p", ["D", "E"]), ("p", ["T", "D"]), ("f", ["E"])],
                   "E": [("p", ["E", "D"])]}, {"D", "E"})
    for path in [(0, 0, 0), (0, 1, 0, 1), (1, 1, 2), (2, 0, 0)]:
        assert flatten_expansion(td_node(vs, "D", path)) == flat.node("D", path)


def test_consistent_examples(td, words):
    vs = td.systems["Run"]
    node = td_node(vs, "D", (0,))
    f_rooted = source(td, "fe")
    got = consistent(vs, node, f_rooted)
    assert isinstance(got, No) and got.address == ()
    assert consistent(vs, TDTree(vs, "D").root(), f_rooted) == Yes()
    w = words.systems["WOmega"]
    assert consistent(w, td_node(w, "W", (0, 1)), source(words, "alt01")) == Yes()


def test_consistent_checks_lower_rank_leaves(td):
    vs = td.systems["Run"]
    node = td_node(vs, "D", (1,))
    assert consistent(vs, node, source(td, "comb")) == Yes()
    v = td.vocabulary
    bad = LiteralSource(make(v, "p", make(v, "p", make(v, "0"), make(v, "0")), make(v, "0")))
    got = consistent(vs, node, bad)
    assert isinstance(got, No) and got.address == (0,)


# ----------------------------------------------------------- coinductive

def test_coinductive_examples(words):
    got = check_coinductive(words.systems["WOmega"], "W", source(words, "alt01"), 16)
    assert got == VerifiedToHeight(16, (0, 1) * 8)
    got = check_coinductive(words.systems["ZEOmega"], "E", source(words, "e110"), 3)
    assert isinstance(got, Refuted) and got.height == 2
    assert got.conflict.address == (0,)
    got = check_coinductive(words.systems["WOmega"], "W", UnknownSource(), 8)
    assert isinstance(got, Unknown)


def test_coinductive_on_inductive_type_is_an_error(words):
    with pytest.raises(PolarityError):
        check_coinductive(words.systems["ZE"], "Z", source(words, "zeros"), 4)


def test_finite_word_is_not_an_omega_word(words):
    got = check_coinductive(words.systems["WOmega"], "W", LiteralSource(word(words.vocabulary, "01")), 5)
    assert isinstance(got, Refuted) and got.height == 3


def test_decorated_trees(dt):
    vs = dt.systems["DT"]
    assert isinstance(check_type(vs, "D", source(dt, "deco"), Budget(height=12)), VerifiedToHeight)
    got = check_type(vs, "D", source(dt, "bad"), Budget(height=12))
    assert isinstance(got, Refuted) and got.height == 1
    assert isinstance(check_type(vs, "T", source(dt, "leafy"), Budget(height=8)), VerifiedToHeight)


def test_running_example_members(td):
    vs = td.systems["Run"]
    for name in ("comb", "fe"):
        assert isinstance(check_type(vs, "D", source(td, name), Budget(height=10)), VerifiedToHeight)
    assert isinstance(check_type(vs, "E", source(td, "ee"), Budget(height=10)), VerifiedToHeight)


def test_frontier_cap_gives_unknown(words):
    got = check_coinductive(words.systems["WOmega"], "W", UnknownSource(), 20,
                            Budget(max_frontier=64))
    assert isinstance(got, Unknown)


# --------------------------------------------------------- typed equality

def test_eq_program_shape(words):
    p, xi = eq_program(words.vocabulary)
    assert xi.name == "xi" and xi.arity == 0
    assert len(p.user_equations()) == 4 * 4


def test_typed_eq_examples(words):
    w = words.systems["WOmega"]
    got = typed_eq(w, "W", source(words, "alt01"), source(words, "alt01"), Budget(height=16))
    assert isinstance(got, VerifiedToHeight)
    got = typed_eq(w, "W", source(words, "zeros"), source(words, "alt01"), Budget(height=16))
    assert isinstance(got, Refuted) and got.conflict.found == "xi"
    e = LiteralSource(word(words.vocabulary, ""))
    assert isinstance(typed_eq(words.systems["Words"], "W", e, e), Derived)


# --------------------------------------------------------- program claims

def test_program_claims(words):
    w = words.systems["WOmega"]
    samples = [lasso_word(words.vocabulary, "", "01")]
    (tl,) = check_program_type(w, words.programs["Tl"], "tl", "W", "W", samples, Budget(height=16))
    assert isinstance(tl.output_verdict, VerifiedToHeight)
    zeros = [lasso_word(words.vocabulary, "", "0")]
    (g,) = check_program_type(w, words.programs["Loop"], "g", "W", "W", zeros,
                              Budget(height=16), EvalConfig(fuel=500))
    assert isinstance(g.output_verdict, Unknown)


def test_identity_claim_mirrors_input(words):
    ident = parse_program("id(x) = x;", words.vocabulary, "id")
    w = words.systems["WOmega"]
    samples = [lasso_word(words.vocabulary, "1", "0"), lasso_word(words.vocabulary, "", "10")]
    for r in check_program_type(w, ident, "id", "W", "W", samples, Budget(height=12)):
        assert type(r.output_verdict) is type(r.input_verdict)


def test_sample_outside_input_type(words):
    w = words.systems["WOmega"]
    with pytest.raises(SampleNotOfClaimedInputType):
        check_program_type(w, words.programs["Tl"], "tl", "W", "W",
                           [LiteralSource(word(words.vocabulary, "0"))], Budget(height=4))


# ------------------------------------------------------------ properties

lasso = st.tuples(st.text("01", max_size=4), st.text("01", min_size=1, max_size=4))


@settings(deadline=None, max_examples=60)
@given(lasso, st.sampled_from(["Z", "E"]), st.integers(1, 14))
def test_omega_membership_matches_automaton(words, word_parts, t, h):
    stem, cycle = word_parts
    src = lasso_word(words.vocabulary, stem, cycle)
    got = check_coinductive(words.systems["ZEOmega"], t, src, h)
    fail = runs_to(ZE_OMEGA, t, lasso_letters(stem, cycle, h))
    if fail is None:
        assert isinstance(got, VerifiedToHeight) and got.height == h
    else:
        assert isinstance(got, Refuted) and got.height == fail


@settings(deadline=None, max_examples=40)
@given(lasso, st.integers(1, 10))
def test_verification_is_level_monotone(words, word_parts, h):
    stem, cycle = word_parts
    src = lasso_word(words.vocabulary, stem, cycle)
    vs = words.systems["ZEOmega"]
    if is_positive(check_coinductive(vs, "Z", src, h)):
        for lower in range(1, h):
            assert is_positive(check_coinductive(vs, "Z", src, lower))


def _level(tree, h):
    nodes = [tree.root()]
    for _ in range(h):
        nodes = [k for n in nodes for k in (tree.children(n) if n.designated() is not None else [n])]
    return nodes


@settings(deadline=None, max_examples=40)
@given(lasso, st.sampled_from(["Z", "E"]), st.integers(1, 7))
def test_refutation_means_no_consistent_node(words, word_parts, t, h):
    stem, cycle = word_parts
    vs = words.systems["ZEOmega"]
    src = lasso_word(words.vocabulary, stem, cycle)
    got = check_coinductive(vs, t, src, h)
    if isinstance(got, Refuted):
        for node in _level(TDTree(vs, t), got.height):
            assert isinstance(consistent(vs, node, src), No)


@settings(deadline=None, max_examples=40)
@given(lasso)
def test_typed_eq_is_reflexive_on_members(words, word_parts):
    stem, cycle = word_parts
    vs = words.systems["ZEOmega"]
    budget = Budget(height=10)
    for t in ("Z", "E"):
        src = lasso_word(words.vocabulary, stem, cycle)
        if is_positive(check_type(vs, t, src, budget)):
            assert is_positive(typed_eq(vs, t, src, lasso_word(words.vocabulary, stem, cycle),
                                        budget))


@given(st.text("01", max_size=12))
def test_derivations_recheck(words, letters):
    vs = words.systems["ZE"]
    src = LiteralSource(word(words.vocabulary, letters))
    truth = ze_closure(12)
    for t in ("Z", "E"):
        got = check_inductive(vs, t, src)
        assert isinstance(got, Derived) == (letters in truth[t])
        if isinstance(got, Derived):
            assert verify_derivation(vs, src, got.witness)


def test_input_call_has_variable_v(words):
    # claims evaluate fn(v) with the sample bound to v
    p = words.programs["Tl"]
    src = as_source(p, {"v": lasso_word(words.vocabulary, "1", "0")},
                    Call(p.principal, (parse_term("v", words.vocabulary, p),)))
    assert src.query(()).constructor.name == "0"
