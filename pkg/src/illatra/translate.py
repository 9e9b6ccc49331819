"""Embedding of PRED2_0 into the illative system I_0.

Formulas are mapped to lambda terms (implication to the Xi-encoded
arrow, universal quantification over tau to Xi A_tau), contexts are
extended with the typing assumptions Gamma(Delta, phi), every simple
type gets an inhabitation witness, and PRED2_0 derivations are compiled
into checkable I_0 derivations.
"""

from dataclasses import dataclass

from . import terms as T
from . import pred2 as P
from . import illative as IL
from .terms import (App, FVar, Const, ConstId, XI, EL, imp, lam,
                    h_applied, k_applied, f_applied, base_pred, free_vars,
                    free_vars_of, fresh_name)
from .pred2 import O, Base, Arrow, V, C, Ap, Imp, All, type_str


class CompileError(Exception):
    pass


def a_term(tau):
    """The type predicate for tau: a base constant, H for o, or the
    F-composition for arrows."""
    if tau == O:
        return T.H_COMB
    if isinstance(tau, Base):
        return base_pred(tau.name)
    return f_applied(a_term(tau.src), a_term(tau.dst))


def sentinel(base_name):
    return FVar("%y_" + base_name)


def translate(phi):
    """The formula/term translation into lambda terms."""
    if isinstance(phi, V):
        return FVar(phi.name)
    if isinstance(phi, C):
        return Const(ConstId(phi.name, T.K_USER))
    if isinstance(phi, Ap):
        return App(translate(phi.fn), translate(phi.arg))
    if isinstance(phi, Imp):
        return imp(translate(phi.lhs), translate(phi.rhs))
    if isinstance(phi, All):
        return App(App(XI, a_term(phi.tau)), lam(phi.var,
                                                 translate(phi.body)))
    raise CompileError("cannot translate %r" % (phi,))


def build_gamma(delta, phi, sig):
    """The typing context Gamma(Delta, phi): A_tau x for free variables,
    A_tau c for declared constants, L A_tau for base types, and a
    sentinel A_tau y per base type."""
    out = set()
    for x in sorted(P.fv_set(list(delta) + [phi])):
        tau = sig.var_type(x)
        out.add(App(a_term(tau), FVar(x)))
    for c in sorted(sig.consts):
        tau = sig.consts[c]
        out.add(App(a_term(tau), Const(ConstId(c, T.K_USER))))
    for b in sorted(sig.base_types):
        out.add(App(EL, base_pred(b)))
        out.add(App(base_pred(b), sentinel(b)))
    return frozenset(out)


def _la_derivation(tau, hyps):
    """Derivation of hyps |- L A_tau for tau a base type or o."""
    if tau == O:
        return IL.weaken_to(IL.n_axlh(), hyps)
    if isinstance(tau, Base):
        return IL.weaken_to(IL.n_axla(tau.name), hyps)
    raise CompileError("no L-derivation for the arrow type %s in i0"
                       % type_str(tau))


def inhabit(tau, hyps, sig):
    """A witness t with a checkable I_0 derivation of hyps |- A_tau t.

    hyps must contain the sentinel assumptions of build_gamma for the
    relevant base types."""
    if isinstance(tau, Base):
        t = sentinel(tau.name)
        goal = App(a_term(tau), t)
        if goal not in hyps:
            raise CompileError("no sentinel assumption for base type %s"
                               % tau.name)
        return t, IL.n_ax(hyps, goal)
    if tau == O:
        t = IL.AX_LH
        d = IL.n_eq(IL.n_hi(IL.n_axlh()), App(a_term(O), t))
        return t, IL.weaken_to(d, hyps)
    # arrow: the constant function on a witness of the target type
    if not (isinstance(tau.src, Base) or tau.src == O):
        raise CompileError("arrow source %s is not a base type"
                           % type_str(tau.src))
    w2, d2 = inhabit(tau.dst, hyps, sig)
    t = k_applied(w2)
    x = fresh_name("i")
    a1, a2 = a_term(tau.src), a_term(tau.dst)
    body = k_applied(App(a2, w2))
    left = IL.n_eq(IL.weaken(d2, App(a1, FVar(x))), App(body, FVar(x)))
    dl = _la_derivation(tau.src, hyps)
    dxi = IL.n_xii(left, dl, x, a1, body)
    return t, IL.n_eq(dxi, App(a_term(tau), t))


def type_term_derivation(q, sig, hyps, bound=None):
    """Derivation of hyps |- A_tau [[q]] for a connective-free term q,
    using the typing assumptions present in hyps."""
    if bound is None:
        bound = {}
    sig2 = P.Signature(sig.base_types, sig.consts, dict(sig.vars))
    sig2.vars.update(bound)
    tau = P.typecheck(q, sig2, P.MODE_PRED2)
    goal = App(a_term(tau), translate(q))
    if isinstance(q, (V, C)):
        if goal in hyps:
            return IL.n_ax(hyps, goal)
        raise CompileError("no typing assumption for %s"
                           % P.formula_str(q))
    if isinstance(q, Ap):
        sigma = P.typecheck(q.arg, sig2, P.MODE_PRED2)
        d1 = type_term_derivation(q.fn, sig, hyps, bound)
        d2 = type_term_derivation(q.arg, sig, hyps, bound)
        asig, atau = a_term(sigma), a_term(tau)
        t1 = translate(q.fn)
        # A_{sigma->tau} t1  is beta-eta  Xi A_sigma (\z. A_tau (t1 z))
        t2 = T.Lam(App(atau, App(_sh(t1), T.BVar(0))), "z")
        maj = IL.n_eq(d1, App(App(XI, asig), t2))
        out = IL.n_xie(maj, d2, asig, translate(q.arg),
                       App(t2, translate(q.arg)))
        return IL.n_eq(out, goal)
    raise CompileError("not a typable term: %r" % (q,))


def _sh(t):
    # complete terms have no loose indices; wrapping under one binder
    # needs no shifting
    return t


def h_derivation(phi, sig, hyps, bound=None):
    """Derivation of hyps |- H [[phi]], by induction on phi."""
    if bound is None:
        bound = {}
    if isinstance(phi, (V, C, Ap)):
        d = type_term_derivation(phi, sig, hyps, bound)
        # A_o is H itself, but the H-form goal is the applied shape
        return IL.n_eq(d, h_applied(translate(phi)))
    if isinstance(phi, Imp):
        hyp = translate(phi.lhs)
        base = hyps - {hyp}
        d2 = h_derivation(phi.lhs, sig, base, bound)
        d1 = h_derivation(phi.rhs, sig, base | {hyp}, bound)
        out = IL.elaborate_ph(d1, d2)
        return IL.weaken_to(out, hyps)
    if isinstance(phi, All):
        x, tau, body = phi.var, phi.tau, phi.body
        taken = free_vars_of(hyps) | P.fv_set([phi]) | set(bound)
        if x in taken:
            x2 = fresh_name(x.lstrip("%").split("_")[0] or "v")
            body = P.formula_subst_unsafe(body, x, V(x2))
            x = x2
        atau = a_term(tau)
        hyp = App(atau, FVar(x))
        b2 = dict(bound)
        b2[x] = tau
        db = h_derivation(body, sig, hyps | {hyp}, b2)
        db = IL.weaken_to(db, hyps | {hyp})
        t2 = lam(x, translate(body))
        left = IL.n_eq(db, h_applied(App(t2, FVar(x))))
        dl = _la_derivation(tau, hyps)
        out = IL.n_xih(left, dl, x, atau, t2)
        return IL.n_eq(out, h_applied(translate(phi)))
    raise CompileError("no H-derivation for %r" % (phi,))


# ---------------------------------------------------------------------------
# proof compilation

def ill_context(delta, phi, sig):
    return frozenset(translate(h) for h in delta) | \
        build_gamma(delta, phi, sig)


def compile_proof(d, sig):
    """Compile a checked PRED2_0 derivation into an I_0 derivation of
    [[Delta]], Gamma(Delta, phi) |- [[phi]]."""
    P.check_pred2_derivation(d, sig, classical=False)
    out = _compile(d, sig)
    return out


def _reconcile(dill, target_hyps, sig):
    """Adjust a compiled derivation's hypothesis set to target_hyps:
    weaken in what is missing, then eliminate extra typing assumptions
    A_tau x by substituting an inhabitation witness for x and cutting."""
    extra = dill.hyps - target_hyps
    for h in sorted(extra, key=repr):
        if isinstance(h, App) and isinstance(h.arg, FVar):
            tau = _a_type_of(h.fn, sig)
            if tau is not None:
                w, dw = inhabit(tau, target_hyps, sig)
                dill = IL.subst_derivation(dill, h.arg.name, w)
                dill = IL.cut_hyp(dill, App(h.fn, w), dw)
                continue
        raise CompileError("cannot eliminate hypothesis %r" % (h,))
    return IL.weaken_to(dill, target_hyps)


def _a_type_of(t, sig, _cache={}):
    """Recognize t as A_tau for a type over the signature's bases."""
    if t == T.H_COMB:
        return O
    if isinstance(t, Const) and t.cid.kind == T.K_BASE:
        return Base(t.cid.name)
    # arrows: match against the finitely many shapes we can emit
    key = (t, sig.base_types)
    if key in _cache:
        return _cache[key]
    out = None
    for t1, t2 in T.match_f(t):
        s1 = _a_type_of(t1, sig)
        s2 = _a_type_of(t2, sig)
        if s1 is not None and s2 is not None:
            out = Arrow(s1, s2)
            break
    _cache[key] = out
    return out


def _compile(d, sig):
    hyps = ill_context(d.hyps, d.concl, sig)
    goal = translate(d.concl)

    if d.rule == "Axiom":
        for h in d.hyps:
            if P.alpha_eq_formula(h, d.concl):
                return IL.n_ax(hyps, translate(h))
        raise CompileError("axiom without matching hypothesis")

    if d.rule == "ImpI":
        (p,) = d.premises
        dp = _compile(p, sig)
        hyp = translate(d.concl.lhs)
        inner = hyps - {hyp}
        dp = _reconcile(dp, inner | {hyp}, sig)
        dh = h_derivation(d.concl.lhs, sig, inner)
        out = IL.elaborate_pi(dp, dh)
        return IL.n_eq(IL.weaken_to(out, hyps), goal)

    if d.rule == "ImpE":
        p1, p2 = d.premises
        d1 = _reconcile(_compile(p1, sig), hyps, sig)
        d2 = _reconcile(_compile(p2, sig), hyps, sig)
        out = IL.elaborate_pe(d1, d2)
        return IL.n_eq(out, goal)

    if d.rule == "ForallI":
        (p,) = d.premises
        x, tau = d.concl.var, d.concl.tau
        dp = _compile(p, sig)
        atau = a_term(tau)
        hyp = App(atau, FVar(x))
        dp = _reconcile(dp, hyps | {hyp}, sig)
        t2 = lam(x, translate(d.concl.body))
        left = IL.n_eq(dp, App(t2, FVar(x)))
        dl = _la_derivation(tau, hyps)
        out = IL.n_xii(left, dl, x, atau, t2)
        return IL.n_eq(out, goal)

    if d.rule == "ForallE":
        (p,) = d.premises
        (t,) = d.params
        # variables of t may not survive into the conclusion; give them
        # typing assumptions and eliminate them afterwards
        hyps2 = hyps | frozenset(
            App(a_term(sig.var_type(x)), FVar(x)) for x in P.fv(t))
        dp = _reconcile(_compile(p, sig), hyps2, sig)
        atau = a_term(p.concl.tau)
        t2 = lam(p.concl.var, translate(p.concl.body))
        arg = translate(t)
        if p.concl.tau == O and isinstance(t, (Imp, All)):
            # an o-witness may be a compound formula; its typing
            # derivation is its H-derivation
            dt = IL.n_eq(h_derivation(t, sig, hyps2), App(atau, arg))
        else:
            dt = type_term_derivation(t, sig, hyps2)
        out = IL.n_xie(dp, dt, atau, arg, App(t2, arg))
        return _reconcile(IL.n_eq(out, goal), hyps, sig)

    raise CompileError("rule %r is not compilable into i0" % d.rule)
