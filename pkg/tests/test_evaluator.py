from hypothesis import given, settings, strategies as st
from oracles import letters_of, literal_addresses, nat, nat_value, word

from cotype.evaluator import (
    EvalConfig, No, Session, Yes, as_source, eval_at, eval_head, finite_eval, locally_equal,
)
from cotype.program import destructor
from cotype.syntax import parse_program, parse_term
from cotype.terms import (
    OUT_OF_RANGE, Call, Known, LiteralSource, Unknown, Var, Vocabulary, lasso_word, make,
    prefix, render_prefix,
)

NAT = Vocabulary.of("0/0 s/1")
WORDS = Vocabulary.of("e/0 0/1 1/1")
I = parse_program("i = s(i);", NAT, "i")
LOOP = parse_program("g(0(y)) = g(y); g(1(y)) = g(y);", WORDS, "g")
ADD = parse_program("add(0, y) = y; add(s(x), y) = s(add(x, y));", NAT, "add")
CAT = parse_program("cat(e, y) = y; cat(0(x), y) = 0(cat(x, y)); cat(1(x), y) = 1(cat(x, y));",
                    WORDS, "cat")


def i_term():
    return Call(I.principal)


def test_i_head_is_s():
    assert eval_head(I, {}, i_term()) == Known(NAT["s"])
    assert eval_at(I, {}, i_term(), (0,) * 10) == Known(NAT["s"])


def test_variable_reads_the_valuation():
    env = {"v": lasso_word(WORDS, "", "01")}
    assert eval_head(CAT, env, Var("v")) == Known(WORDS["0"])
    assert eval_at(CAT, env, Var("v"), (0,)) == Known(WORDS["1"])


def test_nonproductive_loop_runs_out_of_fuel():
    env = {"v": lasso_word(WORDS, "", "0")}
    got = eval_head(LOOP, env, Call(LOOP.principal, (Var("v"),)), EvalConfig(fuel=500))
    assert got == Unknown("fuel")


def test_finite_queries():
    t = make(NAT, "s", make(NAT, "0"))
    assert eval_at(I, {}, t, (0,)) == Known(NAT["0"])
    assert eval_at(CAT, {}, make(WORDS, "e"), (0,)) == OUT_OF_RANGE


def test_as_source_prefix():
    assert render_prefix(prefix(as_source(I, {}, i_term()), 3)) == "s(s(s(…)))"
    t = make(NAT, "s", make(NAT, "s", make(NAT, "0")))
    assert prefix(as_source(I, {}, t), 5) == prefix(LiteralSource(t), 5)
    src = as_source(LOOP, {"v": lasso_word(WORDS, "", "0")}, Call(LOOP.principal, (Var("v"),)),
                    EvalConfig(fuel=200))
    assert isinstance(src.query(()), Unknown)
    assert isinstance(src.query((0, 0)), Unknown)


def test_blackhole_and_stuck():
    j = parse_program("j = j;", NAT, "j")
    assert eval_head(j, {}, Call(j.principal)) == Unknown("loop")
    f = parse_program("f(0) = 0;", NAT, "f")
    assert eval_head(f, {}, Call(f.principal, (make(NAT, "s", make(NAT, "0")),))) == Unknown("stuck")


def test_depth_limit():
    cfg = EvalConfig(max_depth=5)
    assert eval_at(I, {}, i_term(), (0,) * 6, cfg) == Unknown("depth")
    assert eval_at(I, {}, i_term(), (0,) * 5, cfg) == Known(NAT["s"])


def test_shared_nullary_calls_stay_cheap():
    s = Session(I)
    root = s.thunk(i_term())
    assert s.eval_at(root, (0,) * 500) == Known(NAT["s"])
    assert s.steps == 1


def test_memo_off_agrees():
    cfg = EvalConfig(memo=False)
    for n in range(30):
        assert eval_at(I, {}, i_term(), (0,) * n, cfg) == Known(NAT["s"])


def test_finite_eval_examples():
    got = finite_eval(ADD, "add", (nat(NAT, 2), nat(NAT, 1)))
    assert got == nat(NAT, 3)
    v = Vocabulary.of("e/0 0/1 p/2")
    std = parse_program("", v)
    t = make(v, "p", make(v, "e"), make(v, "0", make(v, "e")))
    assert finite_eval(std, destructor(1), (t,)) == make(v, "e")
    assert isinstance(finite_eval(LOOP, "g", (word(WORDS, "0"),)), Unknown)


def test_finite_eval_step_bound():
    assert finite_eval(ADD, "add", (nat(NAT, 50), nat(NAT, 0)), step_bound=10) == Unknown("fuel")


def test_locally_equal():
    sub = parse_term("s(i)", NAT, I)
    assert locally_equal(I, {}, i_term(), sub, 10) == Yes()
    env = {"a": lasso_word(WORDS, "", "0"), "b": lasso_word(WORDS, "", "01")}
    got = locally_equal(CAT, env, Var("a"), Var("b"), 3)
    assert isinstance(got, No) and got.address == (0,)
    assert locally_equal(CAT, env, Var("b"), Var("b"), 12) == Yes()


# ------------------------------------------------------------ properties

small = st.integers(0, 12)


@given(small, small)
def test_add_matches_integer_addition(x, y):
    t = Call(ADD.principal, (nat(NAT, x), nat(NAT, y)))
    src = as_source(ADD, {}, t)
    for a, c in literal_addresses(nat(NAT, x + y)):
        assert src.query(a) == Known(c)
    assert nat_value(finite_eval(ADD, "add", (nat(NAT, x), nat(NAT, y)))) == x + y


bits = st.text("01", max_size=8)


@given(bits, bits)
def test_cat_matches_string_concatenation(x, y):
    got = finite_eval(CAT, "cat", (word(WORDS, x), word(WORDS, y)))
    assert letters_of(got) == x + y
    src = as_source(CAT, {}, Call(CAT.principal, (word(WORDS, x), word(WORDS, y))))
    assert prefix(src, 20) == prefix(LiteralSource(word(WORDS, x + y)), 20)


@settings(deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.text("01", min_size=1, max_size=4),
       st.integers(0, 12))
def test_more_fuel_only_resolves_unknowns(f1, f2, cycle, n):
    lo, hi = sorted((f1, f2))
    env = {"v": lasso_word(WORDS, "", cycle)}
    t = Call(CAT.principal, (word(WORDS, "0110" * 3), Var("v")))
    a = eval_at(CAT, env, t, (0,) * n, EvalConfig(fuel=lo))
    b = eval_at(CAT, env, t, (0,) * n, EvalConfig(fuel=hi))
    assert isinstance(a, Unknown) or a == b


@given(st.text("01", min_size=1, max_size=4), st.lists(st.integers(0, 10), max_size=8))
def test_independent_sessions_agree(cycle, probes):
    env = {"v": lasso_word(WORDS, "1", cycle)}
    t = Call(CAT.principal, (word(WORDS, "10"), Var("v")))
    one = as_source(CAT, env, t)
    for n in probes:
        other = as_source(CAT, env, t)
        assert one.query((0,) * n) == other.query((0,) * n)
