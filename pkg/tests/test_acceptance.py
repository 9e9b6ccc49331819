"""End-to-end acceptance checks.

Each test prints exactly one PASS/FAIL line.  Later checks reuse the
caches populated by earlier ones, so the file must run in order.
"""

import itertools
import random
import time

import illatra.terms as T
import illatra.pred2 as P
import illatra.kripke as KR
import illatra.illative as IL
import illatra.translate as TR
import illatra.stage_omega as SO
import illatra.stage_kripke as SK
from illatra.parser import parse_term
from illatra.pred2 import O, Base, Arrow, Signature
from illatra.terms import App, Lam, BVar, Verdict, ConstId, Const

from test_translate import proof_corpus

B = Base("b")

# caches shared with the closure checks at the end of the file
MIRROR_CACHES = []
STAGE_CACHES = []


def pt(s):
    return parse_term(s, allow_reserved=True)


def _report(num, desc, ok, detail=""):
    line = "acceptance %d (%s): %s" % (num, desc, "PASS" if ok else "FAIL")
    if detail:
        line += " [%s]" % detail
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. randomized elaborations of the admissible rules stay checkable

def test_acceptance_1_randomized_elaborations():
    t0 = time.time()
    rng = random.Random(2024)
    atoms = [pt(s) for s in ("a", "b", "c", "P q", "L H", "H c")]
    n_checked = 0
    ok = True
    for i in range(200):
        a, b = rng.sample(atoms, 2)
        extra = frozenset(rng.sample(atoms, rng.randint(0, 3))) - {a}
        kind = rng.choice(["Pi", "Pe", "PH", "Weak"])
        if kind == "Pi":
            gamma = extra | {b, T.h_applied(a)}
            d = IL.elaborate_derived("Pi", IL.n_ax(gamma | {a}, b),
                                     IL.n_ax(gamma, T.h_applied(a)))
        elif kind == "Pe":
            g = extra | {T.imp(a, b), a}
            d = IL.elaborate_derived("Pe", IL.n_ax(g, T.imp(a, b)),
                                     IL.n_ax(g, a))
        elif kind == "PH":
            gamma = extra | {b, T.h_applied(a)}
            d = IL.elaborate_derived("PH", IL.n_hi(IL.n_ax(gamma | {a}, b)),
                                     IL.n_ax(gamma, T.h_applied(a)))
        else:
            d = IL.elaborate_derived("Weak", IL.n_ax(extra | {a}, a),
                                     extra=b)
        v = IL.check_illative(d, IL.I0)
        n_checked += 1
        if v is not Verdict.TRUE:
            ok = False
            break
    dt = time.time() - t0
    _report(1, "randomized admissible-rule elaborations",
            ok and n_checked == 200 and dt < 10.0,
            "200 elaborations, %.1fs" % dt)


# ---------------------------------------------------------------------------
# 2. a thirty-plus derivation corpus compiles with no undecided checks

def test_acceptance_2_compile_corpus():
    t0 = time.time()
    sig = Signature(frozenset({"b"}),
                    {"P": Arrow(B, O), "Q": Arrow(B, O), "c0": B,
                     "R": Arrow(B, Arrow(B, O))},
                    {"x": B, "y": B, "z": B, "p": O, "q": O})
    corpus = proof_corpus(sig)
    rules = set()
    has_nested = False

    def walk(d):
        rules.add(d.rule)
        for pr in d.premises:
            walk(pr)

    def nested(phi):
        if isinstance(phi, P.All):
            return any(isinstance(q, P.All) for q in _subformulas(phi.body))
        return False

    def _subformulas(phi):
        yield phi
        if isinstance(phi, P.Imp):
            yield from _subformulas(phi.lhs)
            yield from _subformulas(phi.rhs)
        if isinstance(phi, P.All):
            yield from _subformulas(phi.body)

    has_witness_case = False
    for d in corpus:
        walk(d)
        has_nested = has_nested or nested(d.concl)
        if d.rule == "ImpI" and \
                P.fv_set([h for h in d.hyps]) - P.fv(d.concl):
            has_witness_case = True
    undecided = 0
    for d in corpus:
        out = TR.compile_proof(d, sig)
        v = IL.check_illative(out, IL.I0, budget=T.ReductionBudget(500))
        if v is Verdict.UNKNOWN:
            undecided += 1
        assert v is Verdict.TRUE
    dt = time.time() - t0
    _report(2, "derivation corpus compiles and checks",
            len(corpus) >= 30
            and rules >= {"Axiom", "ImpI", "ImpE", "ForallI", "ForallE"}
            and has_nested and has_witness_case
            and undecided == 0 and dt < 30.0,
            "%d derivations, 0 undecided, %.1fs" % (len(corpus), dt))


# ---------------------------------------------------------------------------
# 3. exhaustive model family: direct forcing equals mirror forcing

def _criterion3_sig():
    return Signature(frozenset({"b"}),
                     {"P": Arrow(B, O), "c": B},
                     {"x": B, "p": O})


def _upsets(states, le):
    out = []
    for r in range(len(states) + 1):
        for sub in itertools.combinations(states, r):
            sub = frozenset(sub)
            if all(t in sub for s in sub for (a, t) in le if a == s):
                out.append(sub)
    return out


def _model_family():
    posets = [
        (("s0",), frozenset([("s0", "s0")])),
        (("s0", "s1"),
         frozenset([("s0", "s0"), ("s1", "s1"), ("s0", "s1")])),
        (("s0", "s1"), frozenset([("s0", "s0"), ("s1", "s1")])),
    ]
    fo = Arrow(B, O)
    for states, le in posets:
        ups = _upsets(states, le)
        o_names = tuple("o%d" % i for i in range(len(ups)))
        sigma = dict(zip(o_names, ups))
        for nb in (1, 2):
            dom_b = tuple("d%d" % i for i in range(nb))
            for ptab in itertools.product(o_names, repeat=nb):
                app = {(fo, "f", d): v for d, v in zip(dom_b, ptab)}
                for c in dom_b:
                    yield KR.KripkeModel(
                        states=states, le=le,
                        domains={B: dom_b, O: o_names, fo: ("f",)},
                        app=app, interp={"P": "f", "c": c},
                        sigma=sigma)


def test_acceptance_3_forcing_equivalence():
    t0 = time.time()
    sig = _criterion3_sig()
    corpus = SK.formulas_upto(sig, 2)
    n_models = 0
    checked = 0
    disagreements = []
    unknowns = []
    for m in _model_family():
        assert KR.validate_model(m, sig) == []
        mir = SK.build_mirror(m, sig)
        cache = SK.MirrorCache(mir)
        MIRROR_CACHES.append(cache)
        rep = SK.forcing_equiv_suite(mir, sig, corpus, cache)
        n_models += 1
        checked += rep.checked
        disagreements += rep.disagreements
        unknowns += rep.unknowns
    dt = time.time() - t0
    _report(3, "forcing agrees with mirror forcing on the model family",
            n_models > 0 and not disagreements and not unknowns
            and dt < 300.0,
            "%d models, %d checks, 0 disagreements, 0 unknowns, %.1fs"
            % (n_models, checked, dt))


# ---------------------------------------------------------------------------
# 4. the staged-evaluation worked example

def test_acceptance_4_worked_example():
    t0 = time.time()
    uni = SO.Universe({"t": ("d",)}, rank_bound=3)
    cache = SO.StageCache(uni)
    STAGE_CACHES.append(cache)
    tt = SO.mk_arrow(SO.TpBase("t"), SO.TpBase("t"))
    idc = uni.get_T(tt)[0]
    v1 = cache.succ(Lam(BVar(0), "x"), idc, 1)
    w2t = SO.mk_arrow(SO.OMEGA, tt)
    lyid = uni.get_T(w2t)[0]
    lam_yx = Lam(Lam(BVar(0), "x"), "y")
    v2 = cache.succ(lam_yx, lyid, 2)
    sig = SO.mk_arrow(w2t, tt)
    f0 = uni.get_T(sig)[0]
    rho = uni.canon_fn(SO.mk_arrow(sig, tt), {f0: idc})
    tz = Lam(App(BVar(0), lam_yx), "z")
    v3 = cache.succ(tz, rho, 4)
    dt = time.time() - t0
    _report(4, "staged-evaluation worked example",
            v1 is Verdict.TRUE and v2 is Verdict.TRUE
            and v3 is Verdict.TRUE and dt < 10.0,
            "three witnesses at stages 1/2/4, %.1fs" % dt)


# ---------------------------------------------------------------------------
# 5. determinism: no term maps to two canonicals of the same type

def _random_terms(rng, atoms, count, depth):
    def gen(d):
        if d == 0 or rng.random() < 0.3:
            return rng.choice(atoms)
        if rng.random() < 0.55:
            return App(gen(d - 1), gen(d - 1))
        return Lam(gen(d - 1), "x")
    return [gen(depth) for _ in range(count)]


def test_acceptance_5_determinism():
    t0 = time.time()
    uni = SO.Universe({"b": ("d",)}, rank_bound=2, stage_bound=6,
                      step_budget=150)
    cache = SO.StageCache(uni)
    STAGE_CACHES.append(cache)
    rng = random.Random(5)
    bb = SO.TpBase("b")
    c = uni.get_T(bb)[0]
    atoms = [SO.TOP, SO.BOT, c, T.I_TERM, T.K_TERM, T.H_COMB,
             T.base_pred("b"), Lam(BVar(0), "x")]
    taus = [SO.TPO, bb, SO.mk_arrow(bb, bb), SO.mk_arrow(bb, SO.TPO)]
    canons = [r for tau in taus for r in uni.get_T(tau)]
    for t in _random_terms(rng, atoms, 1000, 4):
        cache.sim(t, 6)
        for rho in canons:
            cache.succ(t, rho, 6)
    det = SO.determinism_violations(cache)
    uniq = SO.sim_uniqueness_violations(cache)
    tb = SO.top_bot_violations(cache)
    dt = time.time() - t0
    _report(5, "staged evaluation is deterministic on random terms",
            det == [] and uniq == [] and tb == [] and dt < 120.0,
            "1000 terms, stage 6, %.1fs" % dt)


# ---------------------------------------------------------------------------
# 6. inconsistent and divergent terms are never certified true

def test_acceptance_6_no_false_certificates():
    t0 = time.time()
    uni = SO.Universe({"b": ("d",)}, rank_bound=2, stage_bound=8,
                      step_budget=1000)
    cache = SO.StageCache(uni)
    STAGE_CACHES.append(cache)
    xihi = App(App(T.XI, T.H_COMB), T.I_TERM)
    v1 = cache.certify_true(xihi)
    y = pt("\\f. (\\x. f (x x)) (\\x. f (x x))")
    nu = Const(ConstId("nu_probe", T.K_EXT))
    v2 = cache.certify_true(App(y, nu))
    v3 = IL.term_model_eval(frozenset(), xihi, depth=6, system=IL.IWC,
                            budget=T.ReductionBudget(1000))
    dt = time.time() - t0
    _report(6, "no certificate for the inconsistency candidates",
            v1 is not Verdict.TRUE and v2 is not Verdict.TRUE
            and v3 is not Verdict.TRUE and dt < 120.0,
            "stage 8, budget 1000, search depth 6, %.1fs" % dt)


# ---------------------------------------------------------------------------
# 7. random reduction peaks join within four times the budget

def test_acceptance_7_joinability():
    t0 = time.time()
    uni = SO.Universe({"b": ("d",)}, rank_bound=2, step_budget=200)
    cache = SO.StageCache(uni)
    rng = random.Random(77)
    bb = SO.TpBase("b")
    c = uni.get_T(bb)[0]
    atoms = [SO.TOP, SO.BOT, c, T.I_TERM, T.K_TERM, Lam(BVar(0), "x"),
             T.base_pred("b")]
    peaks = 0
    failures = 0
    while peaks < 500:
        t = _random_terms(rng, atoms, 1, 4)[0]
        reds = cache.reduce_step(t, 2)
        if len(set(reds)) < 2:
            continue
        u1, u2 = sorted(set(reds), key=repr)[:2]
        peaks += 1
        if not cache.joinable(u1, u2, 2, 4 * uni.step_budget):
            failures += 1
    dt = time.time() - t0
    _report(7, "random peaks rejoin within four budgets",
            failures == 0 and dt < 120.0,
            "500 peaks, %.1fs" % dt)


# ---------------------------------------------------------------------------
# 8. substitution commutes with evaluation and forcing

def test_acceptance_8_substitution_lemmas():
    t0 = time.time()
    sig = _criterion3_sig()
    corpus = [phi for phi in SK.formulas_upto(sig, 1)
              if "x" in P.fv(phi)]
    terms = [P.C("c"), P.V("x")]
    q_terms = [P.Ap(P.C("P"), P.V("x")), P.V("x")]
    checked = 0
    ok = True
    for m in _model_family():
        for t in terms:
            for q in q_terms:
                qi = P.formula_subst(q, "x", t, sig)
                for u in KR._valuations(m, sig, P.fv(q) | P.fv(t)):
                    u2 = dict(u)
                    u2["x"] = KR.eval_term(m, sig, u, t)
                    if KR.eval_term(m, sig, u, qi) != \
                            KR.eval_term(m, sig, u2, q):
                        ok = False
            for phi in corpus:
                inst = P.formula_subst(phi, "x", t, sig)
                for u in KR._valuations(m, sig, P.fv(phi) | P.fv(t)):
                    u2 = dict(u)
                    u2["x"] = KR.eval_term(m, sig, u, t)
                    for s in m.states:
                        checked += 1
                        if KR.forces(m, sig, s, u, inst) != \
                                KR.forces(m, sig, s, u2, phi):
                            ok = False
    dt = time.time() - t0
    _report(8, "substitution lemmas hold on the model family",
            ok and checked > 0 and dt < 120.0,
            "%d forcing checks, %.1fs" % (checked, dt))


# ---------------------------------------------------------------------------
# 9. closure properties of everything certified so far

def test_acceptance_9_closure_properties():
    t0 = time.time()
    assert MIRROR_CACHES and STAGE_CACHES
    n_entries = 0
    bad = []
    for cache in MIRROR_CACHES:
        n_entries += len(cache.true_leadsto)
        bad += SK.upward_closure_violations(cache)
        bad += SK.top_bot_violations(cache)
        bad += SK.h_dichotomy_violations(cache)
    for cache in STAGE_CACHES:
        n_entries += len(cache.true_leadsto)
        bad += SO.h_dichotomy_violations(cache)
        bad += SO.top_bot_violations(cache)
    dt = time.time() - t0
    _report(9, "upward closure and h-dichotomy on all cached truths",
            bad == [], "%d cached entries, %d violations, %.1fs"
            % (n_entries, len(bad), dt))


# ---------------------------------------------------------------------------
# 10. every small type is inhabited, with a checkable witness derivation

def test_acceptance_10_inhabitation():
    t0 = time.time()
    sig = Signature(frozenset({"b"}), {}, {})

    def types(arrows):
        if arrows == 0:
            return [B, O]
        return [Arrow(B, t) for t in types(arrows - 1)]

    all_types = [t for k in range(4) for t in types(k)]
    hyps = TR.build_gamma([], P.falsum(), sig)
    n = 0
    for tau in all_types:
        t, d = TR.inhabit(tau, hyps, sig)
        assert d.goal == App(TR.a_term(tau), t)
        assert IL.check_illative(d, IL.I0) is Verdict.TRUE
        n += 1
    dt = time.time() - t0
    _report(10, "inhabitation of all small types checks out",
            n == len(all_types) and dt < 10.0,
            "%d types, %.1fs" % (n, dt))
