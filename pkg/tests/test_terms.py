import pytest
from hypothesis import given, settings, strategies as st

import illatra.terms as T
from illatra.terms import (App, Lam, FVar, BVar, Const, ConstId, XI, EL,
                           lam, subst, abstract, instantiate, free_vars,
                           beta_eta_normalize, beta_eta_equal,
                           one_step_reducts, k_applied, h_applied,
                           f_applied, imp, match_k, match_h, match_xi,
                           match_f, I_TERM, K_TERM, S_TERM, H_COMB,
                           base_pred, ReductionBudget, BudgetExhausted,
                           Verdict)


def v(name):
    return FVar(name)


def test_alpha_equality_ignores_hints():
    assert Lam(BVar(0), "x") == Lam(BVar(0), "y")
    assert lam("x", v("x")) == lam("y", v("y"))
    assert lam("x", v("z")) != lam("x", v("x"))


def test_lam_abstracts_named_variable():
    t = lam("x", App(v("x"), v("y")))
    assert t == Lam(App(BVar(0), v("y")), "x")


def test_free_vars():
    t = lam("x", App(v("x"), App(v("y"), v("z"))))
    assert free_vars(t) == {"y", "z"}


def test_subst_capture_avoiding():
    # (\y. x y)[x := y] must not capture the substituted y
    t = lam("y", App(v("x"), v("y")))
    out = subst(t, "x", v("y"))
    assert out == Lam(App(v("y"), BVar(0)), "y")
    assert free_vars(out) == {"y"}


def test_beta_reduction_basic():
    t = App(lam("x", App(v("x"), v("x"))), v("a"))
    assert beta_eta_normalize(t) == App(v("a"), v("a"))


def test_eta_reduction():
    t = lam("x", App(v("f"), v("x")))
    assert beta_eta_normalize(t) == v("f")


def test_eta_blocked_when_var_occurs():
    t = lam("x", App(App(v("f"), v("x")), v("x")))
    assert beta_eta_normalize(t) == t


def test_redex_under_binder_with_open_argument():
    # \z. (\x y. x) z  -->  \z y. z
    t = lam("z", App(lam("x", lam("y", v("x"))), v("z")))
    assert beta_eta_normalize(t) == lam("z", lam("y", v("z")))


def test_ski_combinators():
    x = v("x")
    assert beta_eta_normalize(App(I_TERM, x)) == x
    assert beta_eta_normalize(App(App(K_TERM, x), v("y"))) == x
    skk = App(App(S_TERM, K_TERM), K_TERM)
    assert beta_eta_equal(App(skk, x), x)


def test_budget_exhaustion_raises():
    omega = lam("x", App(v("x"), v("x")))
    loop = App(omega, omega)
    with pytest.raises(BudgetExhausted):
        beta_eta_normalize(loop, ReductionBudget(50))


def test_h_is_l_of_k():
    t = v("t")
    assert h_applied(t) == App(EL, k_applied(t))
    assert beta_eta_equal(h_applied(t), App(H_COMB, t))


def test_match_inverses():
    t1, t2 = v("a"), v("b")
    assert match_k(k_applied(t1)) == t1
    assert match_h(h_applied(t1)) == t1
    assert match_xi(App(App(XI, t1), t2)) == (t1, t2)
    assert (t1, t2) in match_f(f_applied(t1, t2))


def test_f_fused_with_lambda_second_argument():
    # when t2 is an abstraction the application is fused into its body
    a = base_pred("b")
    t = f_applied(a, H_COMB)
    body = match_f(t)
    assert any(x == a for x, _ in body)
    # F A H applied and Xi-expanded: \f. Xi A (\x. L (K (f x)))
    f, x = v("f"), v("x")
    expect = lam("f", App(App(XI, a),
                          lam("x", App(EL, k_applied(App(f, x))))))
    assert t == expect


def test_imp_encoding():
    a, b = v("a"), v("b")
    t = imp(a, b)
    xi = match_xi(t)
    assert xi == (k_applied(a), k_applied(b))


def test_one_step_reducts_soundness():
    t = App(lam("x", v("x")), v("a"))
    assert v("a") in one_step_reducts(t)


# property tests -------------------------------------------------------------

NAMES = ("x", "y", "z")


def term_strategy(depth=3):
    base = st.sampled_from([FVar(n) for n in NAMES] + [I_TERM, XI, EL])
    return st.recursive(
        base,
        lambda sub: st.one_of(
            st.tuples(sub, sub).map(lambda p: App(*p)),
            st.tuples(st.sampled_from(NAMES), sub).map(
                lambda p: lam(p[0], p[1]))),
        max_leaves=8)


@given(term_strategy())
@settings(max_examples=200, deadline=None)
def test_normalize_idempotent(t):
    try:
        nf = beta_eta_normalize(t, ReductionBudget(2000))
    except BudgetExhausted:
        return
    assert beta_eta_normalize(nf, ReductionBudget(2000)) == nf


@given(term_strategy(), st.sampled_from(NAMES), term_strategy())
@settings(max_examples=150, deadline=None)
def test_subst_trivial_when_not_free(t, x, s):
    if x not in free_vars(t):
        assert subst(t, x, s) == t


@given(term_strategy(), st.sampled_from(NAMES))
@settings(max_examples=150, deadline=None)
def test_abstract_instantiate_roundtrip(t, x):
    a = abstract(t, x)
    assert instantiate(a, FVar(x)) == t


@given(term_strategy())
@settings(max_examples=100, deadline=None)
def test_local_confluence_smoke(t):
    reds = one_step_reducts(t)[:3]
    nfs = set()
    for r in reds:
        try:
            nfs.add(beta_eta_normalize(r, ReductionBudget(2000)))
        except BudgetExhausted:
            return
    assert len(nfs) <= 1


def test_verdict_connectives():
    assert T.v_and([Verdict.TRUE, Verdict.UNKNOWN]) is Verdict.UNKNOWN
    assert T.v_and([Verdict.FALSE, Verdict.UNKNOWN]) is Verdict.FALSE
    assert T.v_or([Verdict.TRUE, Verdict.UNKNOWN]) is Verdict.TRUE
    assert T.v_or([Verdict.FALSE, Verdict.UNKNOWN]) is Verdict.UNKNOWN
