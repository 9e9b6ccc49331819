"""Finite-stage term model over a full finite higher-order model.

Builds canonical-term universes per type, stage-indexed reduction
systems (beta/eta plus oracle rules driven by canonical function
tables), and the mutually recursive relations sim (a term represents a
type), succ (a term is equivalent to a canonical term), and leadsto
(reduce, then succ).  All queries are three-valued and memoized;
True answers are monotone in the stage.
"""

from dataclasses import dataclass, field
import itertools

from . import terms as T
from .terms import (Term, App, Lam, FVar, BVar, Const, ConstId, XI, EL,
                    Verdict, ReductionBudget, BudgetExhausted,
                    match_h, match_k, match_xi, match_f, h_applied)


# ---------------------------------------------------------------------------
# extended types

@dataclass(frozen=True)
class TP:
    pass


@dataclass(frozen=True)
class TpO(TP):
    def __repr__(self):
        return "o"


@dataclass(frozen=True)
class TpBase(TP):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class TpOmega(TP):
    def __repr__(self):
        return "w"


@dataclass(frozen=True)
class TpEps(TP):
    def __repr__(self):
        return "e"


@dataclass(frozen=True)
class TpArrow(TP):
    src: TP
    dst: TP

    def __repr__(self):
        return "(%r>%r)" % (self.src, self.dst)


TPO = TpO()
OMEGA = TpOmega()
EPS = TpEps()


def mk_arrow(t1, t2):
    """Arrow construction with the collapsing conventions:
    eps->tau = omega, tau->eps = eps (tau != eps), tau->omega = omega."""
    if t1 == EPS:
        return OMEGA
    if t2 == EPS:
        return EPS
    if t2 == OMEGA:
        return OMEGA
    return TpArrow(t1, t2)


def rank(tau):
    if isinstance(tau, TpArrow):
        return max(rank(tau.src) + 1, rank(tau.dst))
    return 1


def is_pure(tau):
    """tau contains neither omega nor eps."""
    if isinstance(tau, TpArrow):
        return is_pure(tau.src) and is_pure(tau.dst)
    return isinstance(tau, (TpO, TpBase))


class SizeExplosion(Exception):
    pass


# ---------------------------------------------------------------------------
# canonical universe

TOP = Const(ConstId("top", T.K_CANON))
BOT = Const(ConstId("bot", T.K_CANON))

GENERIC = FVar("%gen")


@dataclass
class Universe:
    base_domains: dict                  # base name -> tuple of element names
    rank_bound: int = 2
    stage_bound: int = 8
    step_budget: int = 200
    extra_witnesses: tuple = ()
    size_cap: int = 4096
    tsets: dict = field(default_factory=dict)     # TP -> tuple of Terms
    tables: dict = field(default_factory=dict)    # const name -> dict
    ctypes: dict = field(default_factory=dict)    # const name -> TP
    _interned: dict = field(default_factory=dict)
    _counter: int = 0

    def __post_init__(self):
        self.ctypes["top"] = TPO
        self.ctypes["bot"] = TPO
        self.tsets[EPS] = ()
        self.tsets[TPO] = (TOP, BOT)
        for b in sorted(self.base_domains):
            tau = TpBase(b)
            elems = []
            for d in self.base_domains[b]:
                name = "c_%s_%s" % (b, d)
                self.ctypes[name] = tau
                elems.append(Const(ConstId(name, T.K_CANON)))
            self.tsets[tau] = tuple(elems)
        for tau in self.all_types(self.rank_bound):
            if tau == OMEGA:
                continue
            try:
                self.get_T(tau)
            except SizeExplosion:
                pass

    def all_types(self, bound):
        """All normalized types of rank <= bound, by increasing rank."""
        atoms = [TPO, OMEGA, EPS] + [TpBase(b)
                                     for b in sorted(self.base_domains)]
        by_rank = {1: list(atoms)}
        out = list(atoms)
        for r in range(2, bound + 1):
            new = []
            for r1 in range(1, r):
                for r2 in range(1, r + 1):
                    for t1 in by_rank.get(r1, ()):
                        for t2 in by_rank.get(r2, ()):
                            t = mk_arrow(t1, t2)
                            if isinstance(t, TpArrow) and rank(t) == r \
                                    and t not in out:
                                out.append(t)
                                new.append(t)
            by_rank[r] = new
        return out

    def get_T(self, tau):
        """The set of canonical terms of type tau, materialized."""
        if tau in self.tsets:
            return self.tsets[tau]
        if tau == OMEGA:
            raise SizeExplosion("T_omega is not enumerable")
        if not isinstance(tau, TpArrow):
            raise SizeExplosion("unknown atomic type %r" % (tau,))
        if tau.src == OMEGA:
            inner = self.get_T(tau.dst)
            out = tuple(Lam(r, "x") for r in inner)
            self.tsets[tau] = out
            return out
        dom = self.get_T(tau.src)
        cod = self.get_T(tau.dst)
        if len(dom) == 0:
            raise SizeExplosion("empty canonical domain for %r" % (tau,))
        if len(cod) ** len(dom) > self.size_cap:
            raise SizeExplosion("function space %r too large" % (tau,))
        out = []
        for values in itertools.product(cod, repeat=len(dom)):
            table = dict(zip(dom, values))
            out.append(self.canon_fn(tau, table))
        self.tsets[tau] = tuple(out)
        return tuple(out)

    def canon_fn(self, tau, table):
        """Intern a canonical function constant with the given table."""
        assert isinstance(tau, TpArrow) and tau.src != OMEGA
        key = (tau, tuple(sorted(table.items(), key=repr)))
        if key in self._interned:
            return self._interned[key]
        name = "f%d" % self._counter
        self._counter += 1
        self.ctypes[name] = tau
        self.tables[name] = dict(table)
        c = Const(ConstId(name, T.K_CANON))
        self._interned[key] = c
        return c

    def table_of(self, rho):
        """The function F(rho) as a dict, for canonical rho of arrow
        type.  For lambda-form canonicals this is a constant function
        represented by (None, value)."""
        if isinstance(rho, Const):
            return self.tables.get(rho.cid.name)
        return None

    def canonical_type(self, t):
        """The canonical type of t, or None if t is not canonical."""
        n = 0
        while isinstance(t, Lam):
            if T.uses_bvar(t.body, 0):
                return None
            t = match_k(t)
            n += 1
        if not (isinstance(t, Const) and t.cid.kind == T.K_CANON):
            return None
        tau = self.ctypes.get(t.cid.name)
        if tau is None:
            return None
        for _ in range(n):
            tau = mk_arrow(OMEGA, tau)
        return tau

    def is_canonical(self, t):
        return self.canonical_type(t) is not None

    def apply_canon(self, rho, t1):
        """F(rho)(t1) where rho is canonical of arrow type."""
        tau = self.canonical_type(rho)
        assert isinstance(tau, TpArrow)
        if isinstance(rho, Lam):
            return match_k(rho)
        return self.tables[rho.cid.name].get(t1)


def universe_from_json(obj):
    return Universe(
        base_domains={k: tuple(v) for k, v in obj["base_domains"].items()},
        rank_bound=obj.get("rank_bound", 2),
        stage_bound=obj.get("stage_bound", 8),
        step_budget=obj.get("step_budget", 200),
        extra_witnesses=tuple(obj.get("extra_witnesses", ())),
    )


# ---------------------------------------------------------------------------
# the stage cache and the mutually recursive relations

class StageCache:
    def __init__(self, uni, witnesses=()):
        self.uni = uni
        self.memo_succ = {}
        self.memo_sim = {}
        self.memo_leadsto = {}
        self.memo_steps = {}
        self.true_succ = set()      # (t, rho, n)
        self.true_sim = set()       # (t, tau, n)
        self.true_leadsto = set()   # (t, rho, n)
        raw = tuple(witnesses) or uni.extra_witnesses
        self.witnesses = tuple(self._parse_witness(w) for w in raw)

    def _parse_witness(self, w):
        if isinstance(w, str):
            from .parser import parse_term
            return parse_term(w, allow_reserved=True)
        return w

    # -- reductions --------------------------------------------------------

    def reduce_step(self, t, n):
        """All one-step reducts of t at stage n: beta/eta plus oracle
        rules c t' -> F(c)(rho1) justified by succ at earlier stages."""
        key = (t, n)
        if key in self.memo_steps:
            return self.memo_steps[key]
        out = list(T.one_step_reducts(t))
        if n >= 1:
            out.extend(self._oracle_steps(t, n, 0))
        out = sorted(set(out), key=repr)
        self.memo_steps[key] = out
        return out

    def _oracle_steps(self, t, n, depth):
        out = []
        if isinstance(t, App):
            c = t.fn
            if isinstance(c, Const) and c.cid.kind == T.K_CANON:
                table = self.uni.tables.get(c.cid.name)
                if table:
                    for rho1 in sorted(table, key=repr):
                        if self.succ(t.arg, rho1, n - 1) is Verdict.TRUE:
                            out.append(table[rho1])
            for r in self._oracle_steps(t.fn, n, depth):
                out.append(App(r, t.arg))
            for r in self._oracle_steps(t.arg, n, depth):
                out.append(App(t.fn, r))
        elif isinstance(t, Lam):
            x = "%o" + str(depth)
            body = T.instantiate(t.body, FVar(x))
            for r in self._oracle_steps(body, n, depth + 1):
                out.append(Lam(T.abstract(r, x), t.hint))
        return out

    # -- leadsto -----------------------------------------------------------

    def leadsto(self, t, rho, n):
        """t reduces (within budget) to a term related to rho by succ."""
        if n < 0:
            return Verdict.FALSE
        key = (t, rho, n)
        got = self.memo_leadsto.get(key)
        if got is not None:
            return got
        self.memo_leadsto[key] = Verdict.UNKNOWN  # cycle guard
        v = self._leadsto(t, rho, n)
        self.memo_leadsto[key] = v
        if v is Verdict.TRUE:
            self.true_leadsto.add(key)
        return v

    def _leadsto(self, t, rho, n):
        budget = self.uni.step_budget
        seen = set()
        frontier = [t]
        unknown = False
        while frontier:
            u = frontier.pop(0)
            if u in seen:
                continue
            if len(seen) >= budget:
                return Verdict.UNKNOWN
            seen.add(u)
            v = self.succ(u, rho, n)
            if v is Verdict.TRUE:
                return Verdict.TRUE
            if v is Verdict.UNKNOWN:
                unknown = True
            frontier.extend(self.reduce_step(u, n))
        return Verdict.UNKNOWN if unknown else Verdict.FALSE

    # -- sim ---------------------------------------------------------------

    def sim(self, t, n):
        """(verdict, tau): TRUE with the unique type t represents,
        FALSE with None, or UNKNOWN with None."""
        if n < 0:
            return (Verdict.FALSE, None)
        key = (t, n)
        got = self.memo_sim.get(key)
        if got is not None:
            return got
        self.memo_sim[key] = (Verdict.UNKNOWN, None)
        v = self._sim(t, n)
        self.memo_sim[key] = v
        if v[0] is Verdict.TRUE:
            self.true_sim.add((t, v[1], n))
        return v

    def _sim(self, t, n):
        results = []
        unknown = False
        # (A)
        if isinstance(t, Const) and t.cid.kind == T.K_BASE:
            results.append(TpBase(t.cid.name))
        # (H)
        if t == T.H_COMB:
            results.append(TPO)
        # (K omega) / (K eps)
        kt = match_k(t)
        if kt is not None:
            v = self.leadsto(kt, TOP, n - 1)
            if v is Verdict.TRUE:
                results.append(OMEGA)
            elif v is Verdict.UNKNOWN:
                unknown = True
            v = self.leadsto(kt, BOT, n - 1)
            if v is Verdict.TRUE:
                results.append(EPS)
            elif v is Verdict.UNKNOWN:
                unknown = True
        # (F) / (F omega)
        for t1, t2 in match_f(t):
            v1, tau1 = self.sim(t1, n - 1)
            if v1 is Verdict.UNKNOWN:
                unknown = True
            elif v1 is Verdict.TRUE:
                if tau1 == EPS:
                    results.append(OMEGA)
                else:
                    v2, tau2 = self.sim(t2, n - 1)
                    if v2 is Verdict.UNKNOWN:
                        unknown = True
                    elif v2 is Verdict.TRUE:
                        results.append(mk_arrow(tau1, tau2))
        if results:
            first = results[0]
            for r in results[1:]:
                if r != first:
                    raise ConsistencyError(
                        "sim derived two types %r and %r for the same term"
                        % (first, r))
            return (Verdict.TRUE, first)
        if unknown:
            return (Verdict.UNKNOWN, None)
        return (Verdict.FALSE, None)

    # -- succ --------------------------------------------------------------

    def succ(self, t, rho, n):
        if n < 0:
            return Verdict.FALSE
        key = (t, rho, n)
        got = self.memo_succ.get(key)
        if got is not None:
            return got
        self.memo_succ[key] = Verdict.UNKNOWN
        v = self._succ(t, rho, n)
        self.memo_succ[key] = v
        if v is Verdict.TRUE:
            self.true_succ.add(key)
        return v

    def _succ(self, t, rho, n):
        # reflexivity
        if t == rho:
            return Verdict.TRUE
        ctau = self.uni.canonical_type(rho)
        if ctau is None:
            raise ValueError("succ target is not canonical: %r" % (rho,))
        if isinstance(ctau, TpArrow):
            return self._succ_function(t, rho, ctau, n)
        if rho == TOP:
            return self._succ_top(t, n)
        if rho == BOT:
            return self._succ_bot(t, n)
        # base-type canonical constants: only reflexivity applies
        return Verdict.FALSE

    def _succ_function(self, t, rho, ctau, n):
        tau1 = ctau.src
        if tau1 == OMEGA:
            target = self.uni.apply_canon(rho, GENERIC)
            v = self.leadsto(App(t, GENERIC), target, n - 1)
            if v is Verdict.TRUE:
                return Verdict.TRUE
            for w in self.witnesses:
                if self.leadsto(App(t, w), target, n - 1) is Verdict.FALSE:
                    return Verdict.FALSE
            return Verdict.UNKNOWN
        try:
            dom = self.uni.get_T(tau1)
        except SizeExplosion:
            return Verdict.UNKNOWN
        out = Verdict.TRUE
        for t1 in dom:
            target = self.uni.apply_canon(rho, t1)
            if target is None:
                return Verdict.UNKNOWN
            v = self.leadsto(App(t, t1), target, n - 1)
            if v is Verdict.FALSE:
                return Verdict.FALSE
            out = T.v_and([out, v])
        return out

    def _succ_top(self, t, n):
        # stage-0 postulates
        if isinstance(t, App) and t.fn == EL:
            u = t.arg
            if isinstance(u, Const) and u.cid.kind == T.K_BASE \
                    and u.cid.name in self.uni.base_domains:
                return Verdict.TRUE
            if u == T.H_COMB:
                return Verdict.TRUE
        if isinstance(t, App) and isinstance(t.fn, Const) \
                and t.fn.cid.kind == T.K_BASE:
            c = t.arg
            if self.uni.canonical_type(c) == TpBase(t.fn.cid.name) \
                    and isinstance(c, Const):
                return Verdict.TRUE
        ht = match_h(t)
        if ht is not None and ht in (TOP, BOT):
            return Verdict.TRUE
        if n == 0:
            return Verdict.FALSE
        out = Verdict.FALSE
        # (Xi_i top)
        xi = match_xi(t)
        if xi is not None:
            t1, t2 = xi
            out = T.v_or([out, self._xi_clause(t1, t2, n, hwrap=False)])
        # (Xi_H top) and (H_i top)
        if ht is not None:
            xih = match_xi(ht)
            if xih is not None:
                t1, t2 = xih
                out = T.v_or([out, self._xi_clause(t1, t2, n, hwrap=True)])
            out = T.v_or([out, self.leadsto(ht, TOP, n - 1)])
        # (F_L top)
        if isinstance(t, App) and t.fn == EL:
            for t1, t2 in match_f(t.arg):
                v1, tau = self.sim(t1, n)
                if v1 is Verdict.UNKNOWN:
                    out = T.v_or([out, Verdict.UNKNOWN])
                elif v1 is Verdict.TRUE:
                    if tau == EPS:
                        out = T.v_or([out, Verdict.TRUE])
                    else:
                        out = T.v_or([out,
                                     self.leadsto(App(EL, t2), TOP, n - 1)])
        return out

    def _xi_clause(self, t1, t2, n, hwrap):
        """(Xi_i top) / (Xi_H top): t1 represents a type tau at this
        stage and t2 t3 (or H (t2 t3)) is certainly true for all
        canonical t3 of type tau."""
        v1, tau = self.sim(t1, n)
        if v1 is Verdict.FALSE:
            return Verdict.FALSE
        if v1 is Verdict.UNKNOWN:
            return Verdict.UNKNOWN
        if tau == EPS:
            return Verdict.TRUE
        if tau == OMEGA:
            body = App(t2, GENERIC)
            goal = h_applied(body) if hwrap else body
            v = self.leadsto(goal, TOP, n - 1)
            if v is Verdict.TRUE:
                return Verdict.TRUE
            for w in self.witnesses:
                body = App(t2, w)
                goal = h_applied(body) if hwrap else body
                if self.leadsto(goal, TOP, n - 1) is Verdict.FALSE:
                    return Verdict.FALSE
            return Verdict.UNKNOWN
        try:
            dom = self.uni.get_T(tau)
        except SizeExplosion:
            return Verdict.UNKNOWN
        out = Verdict.TRUE
        for t3 in dom:
            body = App(t2, t3)
            goal = h_applied(body) if hwrap else body
            v = self.leadsto(goal, TOP, n - 1)
            if v is Verdict.FALSE:
                return Verdict.FALSE
            out = T.v_and([out, v])
        return out

    def _succ_bot(self, t, n):
        if n == 0:
            return Verdict.FALSE
        xi = match_xi(t)
        if xi is None:
            return Verdict.FALSE
        t1, t2 = xi
        vh = self.succ(h_applied(t), TOP, n - 1)
        if vh is Verdict.FALSE:
            return Verdict.FALSE
        v1, tau = self.sim(t1, n)
        if v1 is Verdict.FALSE:
            return Verdict.FALSE
        if v1 is Verdict.UNKNOWN or vh is Verdict.UNKNOWN:
            return Verdict.UNKNOWN
        if tau == EPS:
            return Verdict.FALSE
        if tau == OMEGA:
            if self.leadsto(App(t2, GENERIC), BOT, n - 1) is Verdict.TRUE:
                return Verdict.TRUE
            for w in self.witnesses:
                if self.leadsto(App(t2, w), BOT, n - 1) is Verdict.TRUE:
                    return Verdict.TRUE
            return Verdict.UNKNOWN
        try:
            dom = self.uni.get_T(tau)
        except SizeExplosion:
            return Verdict.UNKNOWN
        out = Verdict.FALSE
        for t3 in dom:
            v = self.leadsto(App(t2, t3), BOT, n - 1)
            if v is Verdict.TRUE:
                return Verdict.TRUE
            out = T.v_or([out, v])
        return out

    # -- top-level queries ---------------------------------------------

    def certify_true(self, t):
        for n in range(self.uni.stage_bound + 1):
            if self.leadsto(t, TOP, n) is Verdict.TRUE:
                return Verdict.TRUE
        return Verdict.UNKNOWN

    def reachable(self, t, n, budget):
        seen = set()
        frontier = [t]
        while frontier and len(seen) < budget:
            u = frontier.pop(0)
            if u in seen:
                continue
            seen.add(u)
            frontier.extend(self.reduce_step(u, n))
        return seen

    def joinable(self, t1, t2, n, budget):
        """Whether t1 and t2 have a common reduct within budget."""
        return bool(self.reachable(t1, n, budget)
                    & self.reachable(t2, n, budget))


class ConsistencyError(Exception):
    pass


# ---------------------------------------------------------------------------
# property suite over the cache

def determinism_violations(cache):
    """leadsto must never relate a term to two distinct canonical terms
    of the same canonical type."""
    best = {}
    out = []
    for (t, rho, n) in cache.true_leadsto:
        tau = cache.uni.canonical_type(rho)
        prev = best.get((t, tau))
        if prev is not None and prev != rho:
            out.append((t, prev, rho, tau))
        best[(t, tau)] = rho
    return out


def sim_uniqueness_violations(cache):
    best = {}
    out = []
    for (t, tau, n) in cache.true_sim:
        prev = best.get(t)
        if prev is not None and prev != tau:
            out.append((t, prev, tau))
        best[t] = tau
    return out


def top_bot_violations(cache):
    tops = {t for (t, rho, n) in cache.true_succ if rho == TOP}
    bots = {t for (t, rho, n) in cache.true_succ if rho == BOT}
    return sorted(tops & bots, key=repr)


def h_dichotomy_violations(cache):
    """If H t certainly reduces to truth, t itself must be certainly
    true at the same stage or certainly false one stage later."""
    out = []
    for (t, rho, n) in sorted(cache.true_leadsto, key=repr):
        if rho != TOP:
            continue
        t1 = match_h(t)
        if t1 is None:
            continue
        a = cache.leadsto(t1, TOP, n)
        b = cache.leadsto(t1, BOT, n + 1)
        if a is Verdict.FALSE and b is Verdict.FALSE:
            out.append((t, n))
    return out


def stage_monotone_violations(cache):
    out = []
    for (t, rho, n) in sorted(cache.true_leadsto, key=repr):
        if n + 1 <= cache.uni.stage_bound and \
                cache.leadsto(t, rho, n + 1) is Verdict.FALSE:
            out.append(("leadsto", t, rho, n))
    for (t, tau, n) in sorted(cache.true_sim, key=repr):
        if n + 1 <= cache.uni.stage_bound:
            v, tau2 = cache.sim(t, n + 1)
            if v is Verdict.FALSE:
                out.append(("sim", t, tau, n))
    return out


def model_condition_violations(cache, sample):
    """The one-state model conditions, checked Unknown-tolerantly on a
    sample of terms.  A violation needs definite verdicts throughout."""
    out = []
    tt = lambda t: cache.certify_true(t)
    uni = cache.uni
    for t in sample:
        # condition 5: X true implies H X true
        if tt(t) is Verdict.TRUE and \
                _definitely_not_true(cache, h_applied(t)):
            out.append(("HX", t))
        xi = match_xi(t)
        if xi is not None and tt(t) is Verdict.TRUE:
            t1, t2 = xi
            # condition 2: Xi X Y true and X Z true imply Y Z true
            for z in _witness_pool(cache):
                if tt(App(t1, z)) is Verdict.TRUE and \
                        _definitely_not_true(cache, App(t2, z)):
                    out.append(("XiE", t, z))
    # conditions 6 and 7
    if _definitely_not_true(cache, App(EL, T.H_COMB)):
        out.append(("LH",))
    for b in sorted(uni.base_domains):
        if _definitely_not_true(cache, App(EL, T.base_pred(b))):
            out.append(("LA", b))
    return out


def _definitely_not_true(cache, t):
    for n in range(cache.uni.stage_bound + 1):
        v = cache.leadsto(t, TOP, n)
        if v is Verdict.TRUE:
            return False
        if v is Verdict.UNKNOWN:
            return False  # tolerate Unknown
    return True


def _witness_pool(cache):
    out = []
    for tau, ts in sorted(cache.uni.tsets.items(), key=repr):
        out.extend(ts)
    return out[:20]
