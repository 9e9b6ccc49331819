"""Judgment checker for the illative systems I_0, I_omega, I_omega^c.

Derivations are trees of nodes over judgments Gamma |- t.  Primitive
rules: Ax, AxLH, AxLA, Eq, Hi, XiE, XiI, XiH, FL, DN.  The derived
rules P_i, P_e, P_H and Weak are elaborated into primitive derivations.
A bounded iterative-deepening proof search backs the term-model oracle.
"""

from dataclasses import dataclass, field

from . import terms as T
from .terms import (Term, App, FVar, XI, EL, Verdict, ReductionBudget,
                    BudgetExhausted, beta_eta_equal, beta_eta_normalize,
                    h_applied, k_applied, match_h, match_xi, match_f,
                    free_vars, free_vars_of, fresh_name, base_pred, imp)

I0 = "i0"
IW = "iw"
IWC = "iwc"

RULES = ("Ax", "AxLH", "AxLA", "Eq", "Hi", "XiE", "XiI", "XiH", "FL", "DN")


@dataclass(frozen=True)
class IllNode:
    rule: str
    hyps: frozenset          # of Term
    goal: Term
    premises: tuple = ()
    params: tuple = ()       # rule-specific, see check_illative


class RuleError(Exception):
    def __init__(self, node, reason):
        self.node = node
        self.reason = reason
        super().__init__(reason)


AX_LH = App(EL, T.H_COMB)


def ax_la(tau_name):
    return App(EL, base_pred(tau_name))


def _match_eq(a, b, budget):
    """Equality up to alpha plus one normalization pass each."""
    if a == b:
        return True
    try:
        return beta_eta_normalize(a, budget) == beta_eta_normalize(b, budget)
    except BudgetExhausted:
        return False


def check_illative(d, system=IW, budget=None):
    """Check every node; Verdict.TRUE if valid, UNKNOWN if some Eq node
    was undecided within budget; raises RuleError on a schema violation."""
    if budget is None:
        budget = ReductionBudget()
    verdict = Verdict.TRUE

    def fail(node, reason):
        raise RuleError(node, reason)

    def go(d):
        nonlocal verdict
        hyps, goal = d.hyps, d.goal
        r = d.rule
        if r == "Ax":
            if goal not in hyps:
                fail(d, "Ax: goal not among hypotheses")
            return
        if r == "AxLH":
            if goal != AX_LH:
                fail(d, "AxLH: goal is not L H")
            return
        if r == "AxLA":
            if not d.params:
                fail(d, "AxLA: missing base type parameter")
            if goal != ax_la(d.params[0]):
                fail(d, "AxLA: goal is not L A_tau for the recorded tau")
            return
        if r == "DN":
            if system != IWC:
                fail(d, "DN: double negation is only available in iwc")
            if goal != T.dn_axiom_term():
                fail(d, "DN: goal is not the double-negation axiom")
            return
        if r == "Eq":
            (p,) = d.premises
            if p.hyps != hyps:
                fail(d, "Eq: hypotheses changed")
            v = beta_eta_equal(p.goal, goal, budget)
            if v is Verdict.FALSE:
                fail(d, "Eq: terms are not beta-eta equal")
            if v is Verdict.UNKNOWN:
                verdict = Verdict.UNKNOWN
            go(p)
            return
        if r == "Hi":
            (p,) = d.premises
            if p.hyps != hyps:
                fail(d, "Hi: hypotheses changed")
            t = match_h(goal)
            if t is None or t != p.goal:
                fail(d, "Hi: goal is not H applied to the premise goal")
            go(p)
            return
        if r == "XiE":
            p1, p2 = d.premises
            if len(d.params) != 2:
                fail(d, "XiE: expected recorded (t1, t3)")
            t1, t3 = d.params
            if p1.hyps != hyps or p2.hyps != hyps:
                fail(d, "XiE: hypotheses changed")
            xi = match_xi(p1.goal)
            if xi is None:
                fail(d, "XiE: first premise is not Xi t1 t2")
            mt1, t2 = xi
            if not _match_eq(mt1, t1, budget):
                fail(d, "XiE: recorded t1 does not match the Xi premise")
            if not (isinstance(p2.goal, App)
                    and _match_eq(p2.goal.fn, t1, budget)
                    and _match_eq(p2.goal.arg, t3, budget)):
                fail(d, "XiE: second premise is not t1 t3")
            if not (isinstance(goal, App)
                    and _match_eq(goal.fn, t2, budget)
                    and _match_eq(goal.arg, t3, budget)):
                fail(d, "XiE: conclusion is not t2 t3")
            go(p1)
            go(p2)
            return
        if r in ("XiI", "XiH", "FL"):
            if r == "FL" and system == I0:
                fail(d, "FL: not available in i0")
            if len(d.params) != 1:
                fail(d, "%s: expected recorded fresh variable" % r)
            x = d.params[0]
            p1, p2 = d.premises
            if r == "XiI":
                xi = match_xi(goal)
                if xi is None:
                    fail(d, "XiI: conclusion is not Xi t1 t2")
                t1, t2 = xi
                want1 = App(t2, FVar(x))
                if p1.goal != want1:
                    fail(d, "XiI: first premise goal is not t2 x")
            elif r == "XiH":
                u = match_h(goal)
                xi = match_xi(u) if u is not None else None
                if xi is None:
                    fail(d, "XiH: conclusion is not H (Xi t1 t2)")
                t1, t2 = xi
                if match_h(p1.goal) != App(t2, FVar(x)):
                    fail(d, "XiH: first premise goal is not H (t2 x)")
            else:
                t1t2 = None
                if isinstance(goal, App) and goal.fn == EL:
                    for cand in match_f(goal.arg):
                        c1, c2 = cand
                        if p1.goal == App(EL, c2) and \
                                p2.goal == App(EL, c1):
                            t1t2 = cand
                            break
                if t1t2 is None:
                    fail(d, "FL: conclusion/premises do not fit L (F t1 t2)")
                t1, t2 = t1t2
            if p1.hyps != hyps | {App(t1, FVar(x))}:
                fail(d, "%s: first premise hypotheses are not "
                        "Gamma, t1 x" % r)
            if p2.hyps != hyps:
                fail(d, "%s: second premise hypotheses changed" % r)
            if p2.goal != App(EL, t1):
                fail(d, "%s: second premise is not L t1" % r)
            forbidden = free_vars_of(hyps) | free_vars(t1) | free_vars(t2)
            if x in forbidden:
                fail(d, "FreshnessViolation: %s occurs free in the "
                        "context or in t1, t2" % x)
            go(p1)
            go(p2)
            return
        fail(d, "unknown rule %r" % r)

    go(d)
    return verdict


# ---------------------------------------------------------------------------
# node constructors

def n_ax(hyps, goal):
    return IllNode("Ax", frozenset(hyps) | {goal}, goal)


def n_axlh(hyps=()):
    return IllNode("AxLH", frozenset(hyps), AX_LH)


def n_axla(tau_name, hyps=()):
    return IllNode("AxLA", frozenset(hyps), ax_la(tau_name), (), (tau_name,))


def n_eq(p, goal):
    return IllNode("Eq", p.hyps, goal, (p,))


def n_hi(p):
    return IllNode("Hi", p.hyps, h_applied(p.goal), (p,))


def n_xie(p1, p2, t1, t3, goal):
    return IllNode("XiE", p1.hyps, goal, (p1, p2), (t1, t3))


def n_xii(p1, p2, x, t1, t2):
    return IllNode("XiI", p2.hyps, App(App(XI, t1), t2), (p1, p2), (x,))


def n_xih(p1, p2, x, t1, t2):
    return IllNode("XiH", p2.hyps, h_applied(App(App(XI, t1), t2)),
                   (p1, p2), (x,))


def n_fl(p1, p2, x, t1, t2):
    return IllNode("FL", p2.hyps, App(EL, T.f_applied(t1, t2)),
                   (p1, p2), (x,))


def n_dn(hyps=()):
    return IllNode("DN", frozenset(hyps), T.dn_axiom_term())


# ---------------------------------------------------------------------------
# derivation transformations

def map_terms(d, f):
    """Rebuild a derivation applying f to every term in it."""
    return IllNode(d.rule, frozenset(f(h) for h in d.hyps), f(d.goal),
                   tuple(map_terms(p, f) for p in d.premises),
                   tuple(f(p) if isinstance(p, Term) else p
                         for p in d.params))


def rename_fvar(d, old, new):
    """Rename a free variable everywhere, including recorded fresh vars."""
    def f(t):
        return T.subst(t, old, FVar(new))
    out = map_terms(d, f)
    if out.rule in ("XiI", "XiH", "FL") and out.params[0] == old:
        out = IllNode(out.rule, out.hyps, out.goal, out.premises, (new,))
    if out.premises:
        out = IllNode(out.rule, out.hyps, out.goal,
                      tuple(_fix_params(p, old, new) for p in out.premises),
                      out.params)
    return out


def _fix_params(d, old, new):
    if d.rule in ("XiI", "XiH", "FL") and d.params[0] == old:
        d = IllNode(d.rule, d.hyps, d.goal, d.premises, (new,))
    return IllNode(d.rule, d.hyps, d.goal,
                   tuple(_fix_params(p, old, new) for p in d.premises),
                   d.params)


def recorded_vars(d):
    out = set()
    if d.rule in ("XiI", "XiH", "FL"):
        out.add(d.params[0])
    for p in d.premises:
        out |= recorded_vars(p)
    return out


def weaken(d, extra):
    """Weak: turn a derivation of Gamma |- t into Gamma, extra |- t."""
    for x in sorted(recorded_vars(d) & free_vars(extra)):
        d = rename_fvar(d, x, fresh_name("w"))
    def go(d):
        return IllNode(d.rule, d.hyps | {extra}, d.goal,
                       tuple(go(p) for p in d.premises), d.params)
    return go(d)


def weaken_to(d, hyps):
    out = d
    for h in sorted(frozenset(hyps) - d.hyps, key=repr):
        out = weaken(out, h)
    return out


def replace_hyp(d, old, new):
    """Replace the hypothesis old by a beta-eta-equal hypothesis new;
    axiom uses of old are patched with an Eq step."""
    for x in sorted(recorded_vars(d) & free_vars(new)):
        d = rename_fvar(d, x, fresh_name("w"))

    def go(d):
        if old not in d.hyps:
            return d
        hyps = (d.hyps - {old}) | {new}
        if d.rule == "Ax" and d.goal == old:
            return n_eq(n_ax(hyps - {new}, new), old)
        return IllNode(d.rule, hyps, d.goal,
                       tuple(go(p) for p in d.premises), d.params)
    return go(d)


def subst_derivation(d, x, t):
    """Substitute a term for a free variable throughout a derivation,
    renaming recorded fresh variables that clash with FV(t)."""
    for y in sorted(recorded_vars(d) & (free_vars(t) | {x})):
        d = rename_fvar(d, y, fresh_name("w"))
    return map_terms(d, lambda q: T.subst(q, x, t))


def cut_hyp(d, h, dh):
    """Remove hypothesis h from d by grafting dh (a derivation of h
    from a subset of d's remaining hypotheses)."""
    def go(d):
        if h not in d.hyps:
            return d
        hyps = d.hyps - {h}
        if d.rule == "Ax" and d.goal == h:
            return weaken_to(dh, hyps)
        return IllNode(d.rule, hyps, d.goal,
                       tuple(go(p) for p in d.premises), d.params)
    base = dh.hyps
    extra_fv = free_vars_of(base)
    for x in sorted(recorded_vars(d) & extra_fv):
        d = rename_fvar(d, x, fresh_name("w"))
    return go(d)


# ---------------------------------------------------------------------------
# derived rules (Lemma-style elaborations into primitive derivations)

def elaborate_pi(d1, d2):
    """From Gamma, t1 |- t2 and Gamma |- H t1 build Gamma |- t1 => t2."""
    t1 = match_h(d2.goal)
    if t1 is None:
        raise RuleError(d2, "Pi: second premise is not H t1")
    if t1 not in d1.hyps:
        raise RuleError(d1, "Pi: t1 is not among the first premise's "
                            "hypotheses")
    t2 = d1.goal
    gamma = d1.hyps - {t1}
    if gamma != d2.hyps:
        raise RuleError(d1, "Pi: premise contexts disagree")
    x = fresh_name("p")
    kt1, kt2 = k_applied(t1), k_applied(t2)
    left = replace_hyp(d1, t1, App(kt1, FVar(x)))
    left = n_eq(left, App(kt2, FVar(x)))
    # d2's goal H t1 is literally L (K t1), the required L premise
    return n_xii(left, d2, x, kt1, kt2)


def elaborate_pe(d1, d2):
    """From Gamma |- t1 => t2 and Gamma |- t1 build Gamma |- t2."""
    xi = match_xi(d1.goal)
    if xi is None:
        raise RuleError(d1, "Pe: first premise is not an implication")
    kt1, kt2 = xi
    t1 = T.match_k(kt1)
    t2 = T.match_k(kt2)
    if t1 is None or t2 is None:
        raise RuleError(d1, "Pe: first premise is not an implication")
    if d1.hyps != d2.hyps:
        raise RuleError(d1, "Pe: premise contexts disagree")
    minor = n_eq(d2, App(kt1, T.I_TERM))
    out = n_xie(d1, minor, kt1, T.I_TERM, App(kt2, T.I_TERM))
    return n_eq(out, t2)


def elaborate_ph(d1, d2):
    """From Gamma, t1 |- H t2 and Gamma |- H t1 build
    Gamma |- H (t1 => t2)."""
    t1 = match_h(d2.goal)
    if t1 is None:
        raise RuleError(d2, "PH: second premise is not H t1")
    t2 = match_h(d1.goal)
    if t2 is None:
        raise RuleError(d1, "PH: first premise is not H t2")
    if t1 not in d1.hyps:
        raise RuleError(d1, "PH: t1 is not among the first premise's "
                            "hypotheses")
    gamma = d1.hyps - {t1}
    if gamma != d2.hyps:
        raise RuleError(d1, "PH: premise contexts disagree")
    x = fresh_name("p")
    kt1, kt2 = k_applied(t1), k_applied(t2)
    left = replace_hyp(d1, t1, App(kt1, FVar(x)))
    left = n_eq(left, h_applied(App(kt2, FVar(x))))
    return n_xih(left, d2, x, kt1, kt2)


def elaborate_derived(rule, *ds, extra=None):
    if rule == "Pi":
        return elaborate_pi(*ds)
    if rule == "Pe":
        return elaborate_pe(*ds)
    if rule == "PH":
        return elaborate_ph(*ds)
    if rule == "Weak":
        (d,) = ds
        return weaken(d, extra)
    raise ValueError("unknown derived rule %r" % rule)


# ---------------------------------------------------------------------------
# bounded proof search / term-model oracle

def _normalize_safe(t, budget):
    try:
        return beta_eta_normalize(t, budget)
    except BudgetExhausted:
        return None


def _mediator_candidates(hyps, goal):
    cands = []
    seen = set()
    for t in sorted(hyps, key=repr) + [goal]:
        for s in _subterms(t):
            if s not in seen and not isinstance(s, (T.BVar,)):
                seen.add(s)
                cands.append(s)
    return cands


def _subterms(t):
    out = [t]
    if isinstance(t, App):
        out += _subterms(t.fn) + _subterms(t.arg)
    elif isinstance(t, T.Lam):
        out += _subterms(t.body)
    return [s for s in out if not _has_loose(s)]


def _has_loose(t, k=0):
    if isinstance(t, T.BVar):
        return t.idx >= k
    if isinstance(t, App):
        return _has_loose(t.fn, k) or _has_loose(t.arg, k)
    if isinstance(t, T.Lam):
        return _has_loose(t.body, k + 1)
    return False


def term_model_eval(hyps, goal, budget=None, depth=4, system=IW):
    """Bounded search for Gamma |- goal: TRUE if a proof is found,
    UNKNOWN otherwise.  Never returns FALSE."""
    if budget is None:
        budget = ReductionBudget()
    hyps = frozenset(hyps)
    memo = {}

    def fresh_budget():
        return ReductionBudget(budget.max_steps)

    def search(hyps, goal, k):
        key = (hyps, goal, k)
        if key in memo:
            return memo[key]
        memo[key] = Verdict.UNKNOWN   # cycle guard
        v = _search(hyps, goal, k)
        memo[key] = v
        return v

    def _search(hyps, goal, k):
        if goal in hyps:
            return Verdict.TRUE
        if goal == AX_LH:
            return Verdict.TRUE
        if isinstance(goal, App) and goal.fn == EL and \
                isinstance(goal.arg, T.Const) and \
                goal.arg.cid.kind == T.K_BASE:
            return Verdict.TRUE
        for h in hyps:
            if beta_eta_equal(goal, h, fresh_budget()) is Verdict.TRUE:
                return Verdict.TRUE
        if k <= 0:
            return Verdict.UNKNOWN
        # Eq: move to normal form
        nf = _normalize_safe(goal, fresh_budget())
        if nf is not None and nf != goal:
            if search(hyps, nf, k - 1) is Verdict.TRUE:
                return Verdict.TRUE
        # Hi
        h = match_h(goal)
        if h is not None and search(hyps, h, k - 1) is Verdict.TRUE:
            return Verdict.TRUE
        # XiI
        xi = match_xi(goal)
        if xi is not None:
            t1, t2 = xi
            x = fresh_name("s")
            p1 = App(t2, FVar(x))
            p1n = _normalize_safe(p1, fresh_budget()) or p1
            if search(hyps | {App(t1, FVar(x))}, p1n, k - 1) is Verdict.TRUE \
                    and search(hyps, App(EL, t1), k - 1) is Verdict.TRUE:
                return Verdict.TRUE
        # XiH
        hh = match_h(goal)
        if hh is not None:
            xih = match_xi(hh)
            if xih is not None:
                t1, t2 = xih
                x = fresh_name("s")
                p1 = h_applied(App(t2, FVar(x)))
                if search(hyps | {App(t1, FVar(x))}, p1, k - 1) \
                        is Verdict.TRUE \
                        and search(hyps, App(EL, t1), k - 1) is Verdict.TRUE:
                    return Verdict.TRUE
        # FL
        if system != I0 and isinstance(goal, App) and goal.fn == EL:
            for t1, t2 in match_f(goal.arg):
                x = fresh_name("s")
                if search(hyps | {App(t1, FVar(x))}, App(EL, t2), k - 1) \
                        is Verdict.TRUE \
                        and search(hyps, App(EL, t1), k - 1) is Verdict.TRUE:
                    return Verdict.TRUE
        # XiE: goal must look like t2 t3
        if isinstance(goal, App):
            t2g, t3 = goal.fn, goal.arg
            for t1 in _mediator_candidates(hyps, goal):
                maj = App(App(XI, t1), t2g)
                if search(hyps, maj, k - 1) is Verdict.TRUE and \
                        search(hyps, App(t1, t3), k - 1) is Verdict.TRUE:
                    return Verdict.TRUE
        return Verdict.UNKNOWN

    for k in range(1, depth + 1):
        memo.clear()
        if search(hyps, goal, k) is Verdict.TRUE:
            return Verdict.TRUE
    return Verdict.UNKNOWN


# ---------------------------------------------------------------------------
# JSON

def derivation_to_json(d, printer):
    obj = {
        "rule": d.rule,
        "hyps": sorted(printer(h) for h in d.hyps),
        "concl": printer(d.goal),
        "premises": [derivation_to_json(p, printer) for p in d.premises],
    }
    if d.params:
        obj["params"] = [printer(p) if isinstance(p, Term) else p
                         for p in d.params]
    return obj


def derivation_from_json(obj, parser):
    rule = obj["rule"]
    params = []
    for p in obj.get("params", []):
        if rule in ("XiI", "XiH", "FL", "AxLA"):
            params.append(p)
        else:
            params.append(parser(p))
    return IllNode(
        rule,
        frozenset(parser(h) for h in obj.get("hyps", [])),
        parser(obj["concl"]),
        tuple(derivation_from_json(p, parser)
              for p in obj.get("premises", [])),
        tuple(params),
    )
