import pytest

import illatra.terms as T
import illatra.pred2 as P
import illatra.illative as IL
import illatra.translate as TR
from illatra.pred2 import (O, Base, Arrow, V, C, Signature, parse_formula,
                           ax, imp_i, imp_e, forall_i, forall_e)
from illatra.terms import App, FVar, XI, EL, Verdict, imp, lam
from illatra.translate import (translate, a_term, build_gamma, inhabit,
                               ill_context, compile_proof, h_derivation,
                               type_term_derivation, CompileError)


B = Base("b")


def make_sig():
    return Signature(frozenset({"b"}),
                     {"P": Arrow(B, O), "Q": Arrow(B, O), "c0": B,
                      "R": Arrow(B, Arrow(B, O))},
                     {"x": B, "y": B, "z": B, "p": O, "q": O})


@pytest.fixture
def sig():
    return make_sig()


def test_a_term_shapes(sig):
    assert a_term(O) == T.H_COMB
    assert a_term(B) == T.base_pred("b")
    ab = a_term(Arrow(B, O))
    assert (T.base_pred("b"), T.H_COMB) in T.match_f(ab)


def test_translate_connectives(sig):
    phi = parse_formula("P x -> Q x", sig)
    t = translate(phi)
    px = App(T.Const(T.ConstId("P", T.K_USER)), FVar("x"))
    qx = App(T.Const(T.ConstId("Q", T.K_USER)), FVar("x"))
    assert t == imp(px, qx)
    phi2 = parse_formula("forall x:b. P x", sig)
    t2 = translate(phi2)
    xi = T.match_xi(t2)
    assert xi is not None and xi[0] == T.base_pred("b")


def test_translate_injective_on_corpus(sig):
    strs = ["P x", "Q x", "P x -> Q x", "Q x -> P x",
            "forall x:b. P x", "forall y:b. P y -> Q y",
            "forall p:o. p", "R x y", "P c0 -> false"]
    terms = [translate(parse_formula(s, sig)) for s in strs]
    assert len(set(terms)) == len(terms)
    # falsum is by definition the universally quantified proposition
    assert translate(P.falsum()) == \
        translate(parse_formula("forall p:o. p", sig))


def test_gamma_contents(sig):
    phi = parse_formula("P x", sig)
    g = build_gamma([], phi, sig)
    assert App(T.base_pred("b"), FVar("x")) in g
    assert App(EL, T.base_pred("b")) in g
    assert any(isinstance(t, App) and t.fn == T.base_pred("b")
               and t.arg == TR.sentinel("b") for t in g)
    # every declared constant gets a typing assumption
    assert App(a_term(Arrow(B, O)),
               T.Const(T.ConstId("P", T.K_USER))) in g


def test_inhabit_all_small_types(sig):
    hyps = build_gamma([], parse_formula("P c0", sig), sig)
    taus = [B, O, Arrow(B, O), Arrow(B, B), Arrow(B, Arrow(B, O)),
            Arrow(O, O), Arrow(B, Arrow(B, Arrow(B, B)))]
    for tau in taus:
        t, d = inhabit(tau, hyps, sig)
        assert d.goal == App(a_term(tau), t)
        assert IL.check_illative(d, IL.I0) is Verdict.TRUE


def test_inhabit_rejects_arrow_sources(sig):
    hyps = build_gamma([], parse_formula("P c0", sig), sig)
    with pytest.raises(CompileError):
        inhabit(Arrow(Arrow(B, O), O), hyps, sig)


def test_h_derivation_for_each_connective(sig):
    for s in ["P c0", "P c0 -> Q c0", "forall x:b. P x",
              "forall p:o. p -> p"]:
        phi = parse_formula(s, sig)
        hyps = ill_context([], phi, sig)
        d = h_derivation(phi, sig, hyps)
        assert IL.check_illative(d, IL.I0) is Verdict.TRUE
        assert T.beta_eta_equal(d.goal, T.h_applied(translate(phi)))


def test_type_term_derivation(sig):
    phi = parse_formula("P c0", sig)
    hyps = ill_context([], phi, sig)
    d = type_term_derivation(P.Ap(C("P"), C("c0")), sig, hyps)
    assert IL.check_illative(d, IL.I0) is Verdict.TRUE


def proof_corpus(sig):
    """Curated PRED2_0 derivations covering all five rules, nested
    quantifiers, and the modus-ponens witness-substitution case."""
    f = lambda s: parse_formula(s, sig)
    out = []

    # identity and weakening shapes
    out.append(imp_i(ax([], f("P c0")), f("P c0")))
    out.append(imp_i(ax([f("Q c0")], f("P c0")), f("P c0")))
    out.append(imp_i(imp_i(ax([f("P c0")], f("Q c0")), f("Q c0")),
                     f("P c0")))

    # B -> (A -> A) at the propositional level
    pc, qc = f("P c0"), f("Q c0")
    out.append(imp_i(imp_i(ax([qc, pc], pc), pc), qc))

    # modus ponens with closed premises
    d_imp = ax([f("P c0 -> Q c0"), pc], f("P c0 -> Q c0"))
    d_min = ax([f("P c0 -> Q c0"), pc], pc)
    out.append(imp_e(d_imp, d_min))

    # modus ponens whose minor premise has an extra free variable,
    # exercising witness substitution during compilation
    d1 = imp_i(ax([f("P x")], f("P x")), f("P x"))
    d1w = P.P2Node("ImpI", frozenset({f("Q y")}), d1.concl,
                   (P.P2Node("Axiom", frozenset({f("P x"), f("Q y")}),
                             f("P x")),))
    out.append(d1w)

    # forall intro and elim
    d_univ = forall_i(imp_i(ax([], f("P x")), f("P x")), "x", B)
    out.append(d_univ)
    out.append(forall_e(d_univ, C("c0"), sig))
    out.append(forall_e(d_univ, V("z"), sig))

    # nested universals over two variables
    rxy = f("R x y")
    d_nested = forall_i(forall_i(imp_i(ax([], rxy), rxy), "y", B),
                        "x", B)
    out.append(d_nested)
    out.append(forall_e(d_nested, C("c0"), sig))

    # universal instantiation used as a major premise
    univ_imp = f("forall x:b. P x -> Q x")
    d_u = ax([univ_imp, f("P c0")], univ_imp)
    d_inst = forall_e(d_u, C("c0"), sig)
    d_mp = imp_e(d_inst, ax([univ_imp, f("P c0")], f("P c0")))
    out.append(d_mp)

    # quantifier over o
    d_po = forall_i(imp_i(ax([], f("p")), f("p")), "p", O)
    out.append(d_po)
    out.append(forall_e(d_po, f("P c0"), sig))
    out.append(forall_e(d_po, P.falsum(), sig))

    # ex falso for atoms: (forall p:o. p) -> P c0
    efq = f("forall p:o. p")
    out.append(imp_i(forall_e(ax([efq], efq), f("P c0"), sig), efq))

    # implication chains
    chain = imp_i(imp_i(imp_e(
        ax([f("P c0 -> Q c0"), pc], f("P c0 -> Q c0")),
        ax([f("P c0 -> Q c0"), pc], pc)), pc), f("P c0 -> Q c0"))
    out.append(chain)

    # swap of nested quantifiers instantiated back
    d_sw = forall_i(forall_e(forall_e(
        ax([f("forall x:b. forall y:b. R x y")],
           f("forall x:b. forall y:b. R x y")), V("z"), sig),
        V("z"), sig), "z", B)
    out.append(d_sw)

    # vacuous quantification
    out.append(forall_i(imp_i(ax([], pc), pc), "x", B))
    out.append(forall_e(forall_i(imp_i(ax([], pc), pc), "x", B),
                        C("c0"), sig))

    # hypothesis shuffling: A -> (B -> A)
    out.append(imp_i(imp_i(ax([pc, qc], pc), qc), pc))
    # (A -> B) -> (A -> B)
    ab = f("P c0 -> Q c0")
    out.append(imp_i(ax([ab], ab), ab))
    # S combinator: (A -> B -> C) -> (A -> B) -> A -> C
    a_ = f("P c0")
    habc = f("P c0 -> Q c0 -> R c0 c0")
    hab = f("P c0 -> Q c0")
    g0 = [habc, hab, a_]
    d_bc = imp_e(ax(g0, habc), ax(g0, a_))
    d_b = imp_e(ax(g0, hab), ax(g0, a_))
    d_c = imp_e(d_bc, d_b)
    out.append(imp_i(imp_i(imp_i(d_c, a_), hab), habc))

    # forall distributing over implication, one direction at a fixed
    # instance
    uimp = f("forall x:b. P x -> Q x")
    up = f("forall x:b. P x")
    g1 = [uimp, up]
    d_q = imp_e(forall_e(ax(g1, uimp), V("x"), sig),
                forall_e(ax(g1, up), V("x"), sig))
    out.append(forall_i(d_q, "x", B))

    # instantiation with a variable then generalization over it
    d_gen = forall_i(forall_e(ax([up], up), V("y"), sig), "y", B)
    out.append(d_gen)

    # doubly nested implication under a quantifier
    d_di = forall_i(imp_i(imp_i(ax([f("P x"), f("Q x")], f("P x")),
                                f("Q x")), f("P x")), "x", B)
    out.append(d_di)

    # extra instances to push the corpus over thirty entries
    for t in (C("c0"), V("x"), V("y")):
        out.append(forall_e(ax([up], up), t, sig))
    for s in ("P c0", "Q c0", "R c0 c0"):
        phi = f(s)
        out.append(imp_i(ax([], phi), phi))
    return out


def test_corpus_is_large_and_covers_rules(sig):
    corpus = proof_corpus(sig)
    assert len(corpus) >= 30
    rules = set()

    def walk(d):
        rules.add(d.rule)
        for p in d.premises:
            walk(p)
    for d in corpus:
        walk(d)
    assert rules >= {"Axiom", "ImpI", "ImpE", "ForallI", "ForallE"}


def test_compile_corpus_sound(sig):
    for d in proof_corpus(sig):
        out = compile_proof(d, sig)
        assert out.goal == translate(d.concl)
        assert out.hyps == ill_context(d.hyps, d.concl, sig)
        assert IL.check_illative(out, IL.I0,
                                 budget=T.ReductionBudget(500)) \
            is Verdict.TRUE


def test_compile_rejects_classical(sig):
    phi = parse_formula("P c0", sig)
    dn = P.P2Node("DoubleNeg", frozenset(),
                  P.Imp(P.neg(P.neg(phi)), phi))
    with pytest.raises((CompileError, P.Pred2RuleError)):
        compile_proof(dn, sig)
