import json

import pytest

import illatra.pred2 as P
from illatra.pred2 import (O, Base, Arrow, V, C, Ap, Imp, All, Signature,
                           parse_formula, formula_str, parse_type,
                           type_str, typecheck, TypeErr, formula_subst,
                           alpha_eq_formula, falsum, neg,
                           check_pred2_derivation, Pred2RuleError,
                           ax, imp_i, imp_e, forall_i, forall_e)


B = Base("b")


@pytest.fixture
def sig():
    return Signature(frozenset({"b"}),
                     {"P": Arrow(B, O), "Q": Arrow(B, O), "c0": B},
                     {"x": B, "y": B, "p": O})


def test_parse_type_roundtrip():
    for s in ["b", "o", "b -> o", "b -> b -> o", "(b -> o) -> o"]:
        tau = parse_type(s, frozenset({"b"}))
        assert parse_type(type_str(tau), frozenset({"b"})) == tau


def test_parse_formula_roundtrip(sig):
    for s in ["P c0", "P x -> Q x", "forall x:b. P x",
              "forall p:o. (P x -> p) -> p", "~ P x", "false"]:
        phi = parse_formula(s, sig)
        assert alpha_eq_formula(parse_formula(formula_str(phi), sig), phi)


def test_typecheck_restriction(sig):
    # PRED2_0 forbids quantification over arrow types
    phi = All("f", Arrow(B, O), Ap(V("f"), C("c0")))
    with pytest.raises(TypeErr):
        typecheck(phi, sig, P.MODE_PRED2)
    assert typecheck(phi, sig, P.MODE_PREDW) == O


def test_falsum_and_negation(sig):
    assert typecheck(falsum(), sig) == O
    phi = parse_formula("P c0", sig)
    assert isinstance(neg(phi), Imp)
    assert P.is_falsum(neg(phi).rhs)


def test_subst_capture_avoiding(sig):
    phi = All("y", B, Imp(Ap(C("P"), V("x")), Ap(C("P"), V("y"))))
    out = formula_subst(phi, "x", V("y"), sig)
    # the bound y must be renamed away from the substituted y
    assert out.var != "y"
    assert alpha_eq_formula(
        out, All("z", B, Imp(Ap(C("P"), V("y")), Ap(C("P"), V("z")))))


def test_identity_derivation(sig):
    phi = parse_formula("P c0", sig)
    d = imp_i(ax([], phi), phi)
    assert check_pred2_derivation(d, sig)


def test_forall_intro_freshness(sig):
    phi = parse_formula("P x", sig)
    other = parse_formula("Q x", sig)
    d = forall_i(ax([other], phi), "x", B)
    with pytest.raises(Pred2RuleError, match="Freshness"):
        check_pred2_derivation(d, sig)


def test_forall_elim(sig):
    univ = parse_formula("forall x:b. P x", sig)
    d = forall_e(ax([univ], univ), C("c0"), sig)
    assert alpha_eq_formula(d.concl, parse_formula("P c0", sig))
    assert check_pred2_derivation(d, sig)


def test_double_negation_gated(sig):
    phi = parse_formula("P c0", sig)
    dn = P.P2Node("DoubleNeg", frozenset(),
                  Imp(neg(neg(phi)), phi))
    with pytest.raises(Pred2RuleError):
        check_pred2_derivation(dn, sig, classical=False)
    assert check_pred2_derivation(dn, sig, classical=True)


def test_modus_ponens_needs_matching_contexts(sig):
    a = parse_formula("P c0", sig)
    b = parse_formula("Q c0", sig)
    d = imp_e(ax([Imp(a, b)], Imp(a, b)), ax([Imp(a, b), a], a))
    # imp_e unions hypotheses, so both premises must be re-derived
    with pytest.raises(Pred2RuleError):
        check_pred2_derivation(d, sig)


def test_derivation_json_roundtrip(sig):
    univ = parse_formula("forall x:b. P x -> P x", sig)
    inner = imp_i(ax([], parse_formula("P x", sig)),
                  parse_formula("P x", sig))
    d = forall_i(inner, "x", B)
    assert check_pred2_derivation(d, sig)
    obj = json.loads(json.dumps(P.derivation_to_json(d)))
    d2 = P.derivation_from_json(obj, sig)
    assert check_pred2_derivation(d2, sig)
    assert alpha_eq_formula(d2.concl, univ)
