import pytest
from hypothesis import given, settings, strategies as st

import illatra.terms as T
from illatra.parser import parse_term, print_term, ParseError
from illatra.terms import App, Lam, FVar, BVar, XI, EL, lam, base_pred


def rt(s):
    return print_term(parse_term(s, allow_reserved=True))


def test_basic_forms():
    assert parse_term("Xi") == XI
    assert parse_term("L") == EL
    assert parse_term("\\x. x") == Lam(BVar(0), "x")
    assert parse_term("x y z", allow_reserved=True) == \
        App(App(FVar("x"), FVar("y")), FVar("z"))


def test_base_predicate_token():
    assert parse_term("A@b") == base_pred("b")


def test_markers_expand():
    t = parse_term("H x", allow_reserved=True)
    assert t == T.h_applied(FVar("x"))
    t = parse_term("K x", allow_reserved=True)
    assert t == T.k_applied(FVar("x"))
    t = parse_term("F A@b H")
    assert (base_pred("b"), T.H_COMB) in T.match_f(t)


def test_combinator_names():
    assert T.beta_eta_equal(App(parse_term("I"), FVar("x")), FVar("x"))
    assert parse_term("bot") == T.BOT


def test_roundtrip_identity_examples():
    for s in ["Xi A@b (\\x. P x)", "L (K x)", "\\x y. x (y x)",
              "Xi (K a) (K b)", "L H"]:
        t = parse_term(s, allow_reserved=True)
        assert parse_term(print_term(t), allow_reserved=True) == t


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_term("(x")
    with pytest.raises(ParseError):
        parse_term("\\. x")


NAMES = ("x", "y", "z")


def term_strategy():
    base = st.sampled_from([FVar(n) for n in NAMES]
                           + [XI, EL, base_pred("b")])
    return st.recursive(
        base,
        lambda sub: st.one_of(
            st.tuples(sub, sub).map(lambda p: App(*p)),
            st.tuples(st.sampled_from(NAMES), sub).map(
                lambda p: lam(p[0], p[1]))),
        max_leaves=10)


@given(term_strategy())
@settings(max_examples=300, deadline=None)
def test_print_parse_roundtrip(t):
    assert parse_term(print_term(t), allow_reserved=True) == t
