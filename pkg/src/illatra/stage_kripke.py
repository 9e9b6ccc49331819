"""Mirror construction: lift a finite PRED2_0 Kripke model into a
per-state stage semantics over a fixed rewrite system.

The rewrite system R consists of beta, eta, and one table rule per
entry of the model's application tables; it is state-independent and
confluent.  The stage relations succ/sim/leadsto are evaluated per
state, with the state quantifier over the finite state set taken
per-state inside the Xi clauses so that truth is upward closed.
Forcing of translated formulas in the mirror is compared against the
direct Kripke forcing relation.
"""

from dataclasses import dataclass, field

from . import terms as T
from . import pred2 as P
from . import kripke as KR
from . import translate as TR
from .terms import (App, Lam, FVar, Const, ConstId, EL, Verdict,
                    match_h, match_k, match_xi, h_applied, base_pred)
from .pred2 import O, Base, Arrow, type_str
from .stage_omega import TP, TpBase, TPO, OMEGA, EPS


class MirrorError(Exception):
    pass


NU = Const(ConstId("nu0", T.K_EXT))


@dataclass
class Mirror:
    model: object
    sig: object
    stage_bound: int = 8
    step_budget: int = 300
    const_of: dict = field(default_factory=dict)   # (tau, elem) -> Const
    delta: dict = field(default_factory=dict)      # const name -> (tau, elem)
    rules: dict = field(default_factory=dict)      # (fn, arg names) -> Const
    sigma: dict = field(default_factory=dict)      # const name -> states
    top: Const = None
    bot: Const = None
    base_names: frozenset = frozenset()

    def canonical(self, t):
        """The (tau, elem) pair for a canonical constant, else None."""
        if isinstance(t, Const) and t.cid.kind == T.K_CANON:
            return self.delta.get(t.cid.name)
        return None

    def o_elem(self, t):
        d = self.canonical(t)
        if d is not None and d[0] == O:
            return d[1]
        return None

    def domain_consts(self, tau):
        return tuple(self.const_of[(tau, e)] for e in self.model.dom(tau))

    def up(self, s):
        return self.model.up(s)


def build_mirror(model, sig, stage_bound=8, step_budget=300):
    """Materialize the canonical signature, the bridge map, and the
    rewrite rules from the model's application tables."""
    mir = Mirror(model=model, sig=sig, stage_bound=stage_bound,
                 step_budget=step_budget)
    i = 0
    for tau in sorted(model.domains, key=type_str):
        for e in model.dom(tau):
            name = "m%d" % i
            i += 1
            mir.const_of[(tau, e)] = Const(ConstId(name, T.K_CANON))
            mir.delta[name] = (tau, e)
    if O not in model.domains:
        raise MirrorError("model has no domain at type o")
    states = frozenset(model.states)
    for e in model.dom(O):
        c = mir.const_of[(O, e)]
        st = frozenset(model.sigma[e])
        mir.sigma[c.cid.name] = st
        if st == states and mir.top is None:
            mir.top = c
        if not st and mir.bot is None:
            mir.bot = c
    if mir.top is None or mir.bot is None:
        raise MirrorError("the o-domain must contain an always-true and "
                          "a never-true element")
    for (tau, f, a), r in model.app.items():
        cf = mir.const_of[(tau, f)]
        ca = mir.const_of[(tau.src, a)]
        cr = mir.const_of[(tau.dst, r)]
        key = (cf.cid.name, ca.cid.name)
        if key in mir.rules and mir.rules[key] != cr:
            raise MirrorError("conflicting table rules for %r" % (key,))
        mir.rules[key] = cr
    mir.base_names = frozenset(tau.name for tau in model.domains
                               if isinstance(tau, Base))
    return mir


def critical_pair_report(mir):
    """Confluence evidence for R: table rules have pairwise distinct
    constant-pair left-hand sides and do not overlap beta or eta."""
    out = []
    seen = {}
    for (f, a), r in mir.rules.items():
        if (f, a) in seen and seen[(f, a)] != r:
            out.append(("duplicate-lhs", f, a))
        seen[(f, a)] = r
        if f not in mir.delta or a not in mir.delta:
            out.append(("non-constant-lhs", f, a))
    return out


# ---------------------------------------------------------------------------
# the per-state cache

class MirrorCache:
    def __init__(self, mir):
        self.mir = mir
        self.memo_succ = {}
        self.memo_sim = {}
        self.memo_leadsto = {}
        self.memo_reach = {}
        self.true_succ = set()      # (t, rho, n, s)
        self.true_leadsto = set()   # (t, rho, n, s)
        self.true_sim = set()       # (t, tau, n, s)

    # -- rewriting (state and stage independent) ----------------------------

    def reduce_step(self, t):
        out = list(T.one_step_reducts(t))
        out.extend(self._table_steps(t))
        return sorted(set(out), key=repr)

    def _table_steps(self, t):
        out = []
        if isinstance(t, App):
            if isinstance(t.fn, Const) and isinstance(t.arg, Const):
                r = self.mir.rules.get((t.fn.cid.name, t.arg.cid.name))
                if r is not None:
                    out.append(r)
            for r in self._table_steps(t.fn):
                out.append(App(r, t.arg))
            for r in self._table_steps(t.arg):
                out.append(App(t.fn, r))
        elif isinstance(t, Lam):
            # table rules are closed, so rewriting under the binder
            # needs no index adjustment
            for r in self._table_steps(t.body):
                out.append(Lam(r, t.hint))
        return out

    def reachable(self, t):
        """(set of reducts, exhausted flag) within the step budget."""
        got = self.memo_reach.get(t)
        if got is not None:
            return got
        budget = self.mir.step_budget
        seen = set()
        frontier = [t]
        exhausted = True
        while frontier:
            u = frontier.pop(0)
            if u in seen:
                continue
            if len(seen) >= budget:
                exhausted = False
                break
            seen.add(u)
            frontier.extend(self.reduce_step(u))
        got = (frozenset(seen), exhausted)
        self.memo_reach[t] = got
        return got

    def joinable(self, t1, t2):
        r1, _ = self.reachable(t1)
        r2, _ = self.reachable(t2)
        return bool(r1 & r2)

    # -- leadsto -------------------------------------------------------------

    def leadsto(self, t, rho, n, s):
        if n < 0:
            return Verdict.FALSE
        key = (t, rho, n, s)
        got = self.memo_leadsto.get(key)
        if got is not None:
            return got
        self.memo_leadsto[key] = Verdict.UNKNOWN
        reach, exhausted = self.reachable(t)
        verdicts = [self.succ(u, rho, n, s) for u in sorted(reach, key=repr)]
        v = T.v_or(verdicts)
        if v is Verdict.FALSE and not exhausted:
            v = Verdict.UNKNOWN
        self.memo_leadsto[key] = v
        if v is Verdict.TRUE:
            self.true_leadsto.add(key)
        return v

    # -- sim -----------------------------------------------------------------

    def sim(self, t, n, s):
        if n < 0:
            return (Verdict.FALSE, None)
        key = (t, n, s)
        got = self.memo_sim.get(key)
        if got is not None:
            return got
        self.memo_sim[key] = (Verdict.UNKNOWN, None)
        v = self._sim(t, n, s)
        self.memo_sim[key] = v
        if v[0] is Verdict.TRUE:
            self.true_sim.add((t, v[1], n, s))
        return v

    def _sim(self, t, n, s):
        if isinstance(t, Const) and t.cid.kind == T.K_BASE \
                and t.cid.name in self.mir.base_names:
            return (Verdict.TRUE, TpBase(t.cid.name))
        if t == T.H_COMB:
            return (Verdict.TRUE, TPO)
        kt = match_k(t)
        if kt is not None:
            unknown = False
            v = self.leadsto(kt, self.mir.top, n - 1, s)
            if v is Verdict.TRUE:
                return (Verdict.TRUE, OMEGA)
            if v is Verdict.UNKNOWN:
                unknown = True
            v = self.leadsto(kt, self.mir.bot, n - 1, s)
            if v is Verdict.TRUE:
                return (Verdict.TRUE, EPS)
            if v is Verdict.UNKNOWN:
                unknown = True
            if unknown:
                return (Verdict.UNKNOWN, None)
        return (Verdict.FALSE, None)

    # -- succ ----------------------------------------------------------------

    def succ(self, t, rho, n, s):
        if n < 0:
            return Verdict.FALSE
        key = (t, rho, n, s)
        got = self.memo_succ.get(key)
        if got is not None:
            return got
        self.memo_succ[key] = Verdict.UNKNOWN
        if rho == self.mir.top:
            v = self._succ_top(t, n, s)
        elif rho == self.mir.bot:
            v = self._succ_bot(t, n, s)
        else:
            raise ValueError("succ target must be the true or the false "
                             "constant")
        self.memo_succ[key] = v
        if v is Verdict.TRUE:
            self.true_succ.add(key)
        return v

    def _succ_top(self, t, n, s):
        mir = self.mir
        e = mir.o_elem(t)
        if e is not None:
            return T.v_from_bool(s in mir.sigma[t.cid.name])
        if isinstance(t, App) and t.fn == EL:
            u = t.arg
            if isinstance(u, Const) and u.cid.kind == T.K_BASE \
                    and u.cid.name in mir.base_names:
                return Verdict.TRUE
            if u == T.H_COMB:
                return Verdict.TRUE
        if isinstance(t, App) and isinstance(t.fn, Const) \
                and t.fn.cid.kind == T.K_BASE:
            d = mir.canonical(t.arg)
            if d is not None and d[0] == Base(t.fn.cid.name):
                return Verdict.TRUE
        ht = match_h(t)
        if ht is not None and mir.o_elem(ht) is not None:
            return Verdict.TRUE
        if n == 0:
            return Verdict.FALSE
        out = Verdict.FALSE
        xi = match_xi(t)
        if xi is not None:
            out = T.v_or([out, self._xi_top(xi[0], xi[1], n, s, False)])
        if ht is not None:
            xih = match_xi(ht)
            if xih is not None:
                out = T.v_or([out,
                              self._xi_top(xih[0], xih[1], n, s, True)])
            out = T.v_or([out, self.leadsto(ht, mir.top, n - 1, s)])
        return out

    def _xi_top(self, t1, t2, n, s, hwrap):
        """The universal Xi clause: at every state above s, t1
        represents some type there and t2 holds of all its canonical
        members there."""
        out = Verdict.TRUE
        for s2 in self.mir.up(s):
            v = self._xi_top_at(t1, t2, n, s2, hwrap)
            if v is Verdict.FALSE:
                return Verdict.FALSE
            out = T.v_and([out, v])
        return out

    def _xi_top_at(self, t1, t2, n, s2, hwrap):
        v1, tau = self.sim(t1, n, s2)
        if v1 is not Verdict.TRUE:
            return v1
        if tau == EPS:
            return Verdict.TRUE
        if tau == OMEGA:
            body = match_k(t2)
            if body is not None:
                goal = h_applied(body) if hwrap else body
                return self.leadsto(goal, self.mir.top, n - 1, s2)
            return self._omega_forall(t2, n, s2, hwrap)
        dom = self._dom_of(tau)
        out = Verdict.TRUE
        for t3 in dom:
            body = App(t2, t3)
            goal = h_applied(body) if hwrap else body
            v = self.leadsto(goal, self.mir.top, n - 1, s2)
            if v is Verdict.FALSE:
                return Verdict.FALSE
            out = T.v_and([out, v])
        return out

    def _omega_forall(self, t2, n, s2, hwrap):
        body = App(t2, NU)
        goal = h_applied(body) if hwrap else body
        if self.leadsto(goal, self.mir.top, n - 1, s2) is Verdict.TRUE:
            return Verdict.TRUE
        for w in self._witness_pool():
            body = App(t2, w)
            goal = h_applied(body) if hwrap else body
            if self.leadsto(goal, self.mir.top, n - 1, s2) is Verdict.FALSE:
                return Verdict.FALSE
        return Verdict.UNKNOWN

    def _succ_bot(self, t, n, s):
        mir = self.mir
        e = mir.o_elem(t)
        if e is not None:
            return T.v_from_bool(s not in mir.sigma[t.cid.name])
        xi = match_xi(t)
        if xi is None:
            return Verdict.FALSE
        t1, t2 = xi
        vh = self.succ(h_applied(t), mir.top, n - 1, s)
        if vh is Verdict.FALSE:
            return Verdict.FALSE
        out = Verdict.FALSE
        for s2 in self.mir.up(s):
            v = self._xi_bot_at(t1, t2, n, s2)
            if v is Verdict.TRUE:
                out = Verdict.TRUE
                break
            out = T.v_or([out, v])
        return T.v_and([vh, out]) if out is Verdict.TRUE else \
            (Verdict.FALSE if out is Verdict.FALSE else Verdict.UNKNOWN)

    def _xi_bot_at(self, t1, t2, n, s2):
        v1, tau = self.sim(t1, n, s2)
        if v1 is not Verdict.TRUE:
            return Verdict.FALSE if v1 is Verdict.FALSE else Verdict.UNKNOWN
        if tau == EPS:
            return Verdict.FALSE
        if tau == OMEGA:
            body = match_k(t2)
            if body is not None:
                return self.leadsto(body, self.mir.bot, n - 1, s2)
            if self.leadsto(App(t2, NU), self.mir.bot, n - 1, s2) \
                    is Verdict.TRUE:
                return Verdict.TRUE
            for w in self._witness_pool():
                if self.leadsto(App(t2, w), self.mir.bot, n - 1, s2) \
                        is Verdict.TRUE:
                    return Verdict.TRUE
            return Verdict.UNKNOWN
        dom = self._dom_of(tau)
        out = Verdict.FALSE
        for t3 in dom:
            v = self.leadsto(App(t2, t3), self.mir.bot, n - 1, s2)
            if v is Verdict.TRUE:
                return Verdict.TRUE
            out = T.v_or([out, v])
        return out

    def _dom_of(self, tau):
        if tau == TPO:
            return self.mir.domain_consts(O)
        if isinstance(tau, TpBase):
            return self.mir.domain_consts(Base(tau.name))
        raise ValueError("no canonical domain for %r" % (tau,))

    def _witness_pool(self):
        return self.mir.domain_consts(O)

    # -- top level ------------------------------------------------------

    def certify(self, t, s):
        """Three-valued truth of t at state s, at stage saturation."""
        for n in range(self.mir.stage_bound + 1):
            if self.leadsto(t, self.mir.top, n, s) is Verdict.TRUE:
                return Verdict.TRUE
        return self.leadsto(t, self.mir.top, self.mir.stage_bound, s)


# ---------------------------------------------------------------------------
# forcing of translated formulas

def close_instance(mir, sig, w, phi):
    """The closed mirror instance of the translation of phi under the
    mirrored valuation w."""
    t = TR.translate(phi)
    for x in sorted(P.fv(phi)):
        tau = sig.var_type(x)
        if w is None or x not in w:
            raise MirrorError("valuation missing variable %r" % x)
        t = T.subst(t, x, mir.const_of[(tau, w[x])])
    return _map_user_consts(t, mir, sig)


def _map_user_consts(t, mir, sig):
    if isinstance(t, Const) and t.cid.kind == T.K_USER:
        name = t.cid.name
        if name not in sig.consts:
            raise MirrorError("undeclared constant %r" % name)
        tau = sig.consts[name]
        elem = mir.model.interp[name]
        return mir.const_of[(tau, elem)]
    if isinstance(t, App):
        return App(_map_user_consts(t.fn, mir, sig),
                   _map_user_consts(t.arg, mir, sig))
    if isinstance(t, Lam):
        return Lam(_map_user_consts(t.body, mir, sig), t.hint)
    return t


def mirror_forces(mir, sig, s, w, phi, cache=None):
    if cache is None:
        cache = MirrorCache(mir)
    P.typecheck(phi, sig, P.MODE_PRED2)
    t = close_instance(mir, sig, w, phi)
    return cache.certify(t, s)


@dataclass
class EquivReport:
    checked: int = 0
    disagreements: list = field(default_factory=list)
    unknowns: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.disagreements


def forcing_equiv_suite(mir, sig, corpus, cache=None):
    """Compare direct forcing against mirror forcing for every state
    and every valuation of each formula's free variables."""
    if cache is None:
        cache = MirrorCache(mir)
    rep = EquivReport()
    m = mir.model
    for phi in corpus:
        P.typecheck(phi, sig, P.MODE_PRED2)
        for w in KR._valuations(m, sig, P.fv(phi)):
            for s in m.states:
                direct = KR.forces(m, sig, s, w, phi)
                t = close_instance(mir, sig, w, phi)
                mirror = cache.certify(t, s)
                rep.checked += 1
                if mirror is Verdict.UNKNOWN:
                    rep.unknowns.append((P.formula_str(phi), s, dict(w),
                                         mir.stage_bound,
                                         mir.step_budget))
                elif (mirror is Verdict.TRUE) != direct:
                    rep.disagreements.append((P.formula_str(phi), s,
                                              dict(w), direct,
                                              mirror.value))
    return rep


# ---------------------------------------------------------------------------
# formula corpus generation

def formulas_upto(sig, depth, max_count=2000):
    """All PRED2_0 formulas over sig up to the given connective depth,
    with one fixed variable per quantifiable type."""
    varname = {}
    for x in sorted(sig.vars):
        tau = sig.vars[x]
        if (isinstance(tau, Base) or tau == O) and tau not in varname:
            varname[tau] = x
    atoms = _atoms(sig, varname)
    levels = [list(atoms)]
    for d in range(depth):
        prev = [phi for lev in levels for phi in lev]
        new = []
        for a in prev:
            for b in prev:
                new.append(P.Imp(a, b))
        for tau, x in sorted(varname.items(), key=lambda kv: repr(kv[0])):
            for a in prev:
                new.append(P.All(x, tau, a))
        levels.append(new)
        if sum(len(l) for l in levels) > max_count:
            break
    out = []
    seen = set()
    for lev in levels:
        for phi in lev:
            key = P.formula_str(phi)
            if key not in seen:
                seen.add(key)
                out.append(phi)
            if len(out) >= max_count:
                return out
    return out


def _atoms(sig, varname):
    """Fully applied o-typed atoms from constants and the fixed
    variables."""
    pool = {}
    for tau, x in varname.items():
        pool.setdefault(tau, []).append(P.V(x))
    for c, tau in sorted(sig.consts.items()):
        pool.setdefault(tau, []).append(P.C(c))
    changed = True
    while changed:
        changed = False
        for tau in list(pool):
            if isinstance(tau, Arrow) and tau.src in pool:
                for f in list(pool[tau]):
                    for a in list(pool[tau.src]):
                        q = P.Ap(f, a)
                        if q not in pool.setdefault(tau.dst, []):
                            pool[tau.dst].append(q)
                            changed = True
    return pool.get(O, [])


# ---------------------------------------------------------------------------
# property checks over the cache

def upward_closure_violations(cache):
    out = []
    mir = cache.mir
    for (t, rho, n, s) in sorted(cache.true_leadsto, key=repr):
        if rho != mir.top:
            continue
        for s2 in mir.up(s):
            if cache.leadsto(t, rho, n, s2) is Verdict.FALSE:
                out.append((t, n, s, s2))
    return out


def top_bot_violations(cache):
    mir = cache.mir
    tops = {(t, n, s) for (t, rho, n, s) in cache.true_succ
            if rho == mir.top}
    bots = {(t, n, s) for (t, rho, n, s) in cache.true_succ
            if rho == mir.bot}
    return sorted(tops & bots, key=repr)


def h_dichotomy_violations(cache):
    out = []
    mir = cache.mir
    nmax = mir.stage_bound
    for (t, rho, n, s) in sorted(cache.true_leadsto, key=repr):
        if rho != mir.top:
            continue
        t1 = match_h(t)
        if t1 is None:
            continue
        a = cache.leadsto(t1, mir.top, nmax, s)
        b = cache.leadsto(t1, mir.bot, nmax, s)
        if a is Verdict.FALSE and b is Verdict.FALSE:
            out.append((t, n, s))
    return out


def extensionality_check(cache, t1, t2):
    """If t1 nu and t2 nu join for an external constant nu then t1 and
    t2 must join themselves."""
    if cache.joinable(App(t1, NU), App(t2, NU)):
        return cache.joinable(t1, t2)
    return True
