"""Finite Kripke models for PRED2_0: forcing, validation, countermodels.

A model is a finite poset of states, a constant domain per simple type,
a typed application table, an interpretation of constants, and a map
sigma from elements of the o-domain to upward-closed sets of states.
Atomic formulas are evaluated through sigma; implications and universal
quantifiers are evaluated by their forcing clauses.
"""

from dataclasses import dataclass
import itertools

from . import pred2 as P
from .pred2 import (O, Base, Arrow, type_str, parse_type, typecheck,
                    Signature, TypeErr, V, C, Ap, Imp, All, fv)


class ModelError(Exception):
    pass


@dataclass
class KripkeModel:
    states: tuple              # state names
    le: frozenset              # pairs (s, s') with s <= s'
    domains: dict              # SimpleType -> tuple of element names
    app: dict                  # (Arrow, fn elem, arg elem) -> elem
    interp: dict               # const name -> elem
    sigma: dict                # o-domain elem -> frozenset of states
    imp_op: dict = None        # optional (d1, d2) -> elem, the o-level arrow

    def up(self, s):
        return [s2 for s2 in self.states if (s, s2) in self.le]

    def dom(self, tau):
        if tau not in self.domains:
            raise ModelError("no domain for type %s" % type_str(tau))
        return self.domains[tau]


# ---------------------------------------------------------------------------
# evaluation and forcing

def eval_term(m, sig, u, q):
    """Interpret a connective-free term as a domain element."""
    if isinstance(q, V):
        if q.name not in u:
            raise ModelError("valuation missing variable %r" % q.name)
        return u[q.name]
    if isinstance(q, C):
        if q.name not in m.interp:
            raise ModelError("no interpretation for constant %r" % q.name)
        return m.interp[q.name]
    if isinstance(q, Ap):
        tf = typecheck(q.fn, sig, P.MODE_PREDW)
        f = eval_term(m, sig, u, q.fn)
        a = eval_term(m, sig, u, q.arg)
        key = (tf, f, a)
        if key not in m.app:
            raise ModelError("application table missing %s at %r %r"
                             % (type_str(tf), f, a))
        return m.app[key]
    raise ModelError("cannot evaluate %r as a term" % (q,))


def forces(m, sig, s, u, phi):
    """The forcing relation s, u forces phi; total on finite models."""
    if isinstance(phi, Imp):
        for s2 in m.up(s):
            if forces(m, sig, s2, u, phi.lhs) and \
                    not forces(m, sig, s2, u, phi.rhs):
                return False
        return True
    if isinstance(phi, All):
        dom = m.dom(phi.tau)
        for s2 in m.up(s):
            for d in dom:
                u2 = dict(u)
                u2[phi.var] = d
                sig2 = Signature(sig.base_types, sig.consts, dict(sig.vars))
                sig2.vars[phi.var] = phi.tau
                if not forces(m, sig2, s2, u2, phi.body):
                    return False
        return True
    d = eval_term(m, sig, u, phi)
    if d not in m.sigma:
        raise ModelError("sigma undefined on %r" % d)
    return s in m.sigma[d]


# ---------------------------------------------------------------------------
# validation

@dataclass
class Violation:
    condition: str
    witness: object

    def __str__(self):
        return "%s: %r" % (self.condition, self.witness)


def validate_model(m, sig, alphabet=()):
    """Return a list of violations; empty means the model is valid.

    alphabet: atomic formulas used to reconcile sigma with the forcing
    clauses; if the model declares an o-level implication operation,
    sigma of d1->d2 elements is checked against the implication clause.
    """
    out = []
    sset = set(m.states)
    # partial order
    for s in m.states:
        if (s, s) not in m.le:
            out.append(Violation("reflexivity", s))
    for (a, b) in m.le:
        if a not in sset or b not in sset:
            out.append(Violation("order-on-states", (a, b)))
        if (b, a) in m.le and a != b:
            out.append(Violation("antisymmetry", (a, b)))
    for (a, b) in m.le:
        for (c, d) in m.le:
            if b == c and (a, d) not in m.le:
                out.append(Violation("transitivity", (a, b, d)))
    # domains
    for tau, dom in m.domains.items():
        if len(dom) == 0:
            out.append(Violation("empty-domain", type_str(tau)))
    # app typing
    for (tau, f, a), r in m.app.items():
        if not isinstance(tau, Arrow):
            out.append(Violation("app-key-not-arrow", type_str(tau)))
            continue
        if tau in m.domains and f not in m.domains[tau]:
            out.append(Violation("app-fn-not-in-domain", (type_str(tau), f)))
        if tau.src in m.domains and a not in m.domains[tau.src]:
            out.append(Violation("app-arg-not-in-domain",
                                 (type_str(tau.src), a)))
        if tau.dst in m.domains and r not in m.domains[tau.dst]:
            out.append(Violation("app-result-not-in-domain",
                                 (type_str(tau.dst), r)))
    for tau, dom in m.domains.items():
        if isinstance(tau, Arrow) and tau.src in m.domains:
            for f in dom:
                for a in m.domains[tau.src]:
                    if (tau, f, a) not in m.app:
                        out.append(Violation("app-partial",
                                             (type_str(tau), f, a)))
    # interp typing
    for cname, d in m.interp.items():
        try:
            tau = sig.const_type(cname)
        except TypeErr:
            out.append(Violation("interp-unknown-constant", cname))
            continue
        if tau in m.domains and d not in m.domains[tau]:
            out.append(Violation("interp-not-in-domain", (cname, d)))
    # sigma totality and upward closure
    for d in m.domains.get(O, ()):
        if d not in m.sigma:
            out.append(Violation("sigma-partial", d))
    for d, ss in m.sigma.items():
        for s in ss:
            for s2 in m.up(s):
                if s2 not in ss:
                    out.append(Violation("upward-closure", (d, s, s2)))
    if out:
        return out
    # model condition: forall p.p is nowhere forced
    bot = P.falsum()
    if O in m.domains:
        for s in m.states:
            if forces(m, sig, s, {}, bot):
                out.append(Violation("falsum-forced", s))
    # reconcile sigma with the implication clause on the alphabet
    if m.imp_op:
        atoms = [a for a in alphabet if not isinstance(a, (Imp, All))]
        for a1, a2 in itertools.product(atoms, repeat=2):
            for u in _valuations(m, sig, fv(a1) | fv(a2)):
                d1 = eval_term(m, sig, u, a1)
                d2 = eval_term(m, sig, u, a2)
                if (d1, d2) not in m.imp_op:
                    continue
                d = m.imp_op[(d1, d2)]
                for s in m.states:
                    clause = forces(m, sig, s, u, Imp(a1, a2))
                    if clause != (s in m.sigma.get(d, frozenset())):
                        out.append(Violation(
                            "implication-clause",
                            (P.formula_str(Imp(a1, a2)), s)))
    return out


def _valuations(m, sig, names):
    names = sorted(names)
    doms = []
    for n in names:
        doms.append(m.dom(sig.var_type(n)))
    for combo in itertools.product(*doms):
        yield dict(zip(names, combo))


# ---------------------------------------------------------------------------
# JSON

def model_to_json(m):
    app = {}
    for (tau, f, a), r in m.app.items():
        app.setdefault(type_str(tau), {}).setdefault(f, {})[a] = r
    obj = {
        "states": list(m.states),
        "le": [list(p) for p in sorted(m.le)],
        "domains": {type_str(t): list(d) for t, d in m.domains.items()},
        "app": app,
        "interp": dict(m.interp),
        "sigma": {d: sorted(ss) for d, ss in m.sigma.items()},
    }
    if m.imp_op:
        obj["imp"] = [[d1, d2, r] for (d1, d2), r in sorted(m.imp_op.items())]
    return obj


def model_from_json(obj):
    base_types = set()
    for key in obj["domains"]:
        for tok in key.replace("(", " ").replace(")", " ") \
                      .replace("->", " ").split():
            if tok != "o":
                base_types.add(tok)
    base_types = frozenset(base_types)
    domains = {parse_type(k, base_types): tuple(v)
               for k, v in obj["domains"].items()}
    app = {}
    for k, table in obj.get("app", {}).items():
        tau = parse_type(k, base_types)
        for f, row in table.items():
            for a, r in row.items():
                app[(tau, f, a)] = r
    sigma = {d: frozenset(ss) for d, ss in obj.get("sigma", {}).items()}
    imp_op = None
    if "imp" in obj:
        imp_op = {(d1, d2): r for d1, d2, r in obj["imp"]}
    m = KripkeModel(
        states=tuple(obj["states"]),
        le=frozenset((a, b) for a, b in obj["le"]),
        domains=domains,
        app=app,
        interp=dict(obj.get("interp", {})),
        sigma=sigma,
        imp_op=imp_op,
    )
    return m, base_types


def signature_from_json(obj, base_types):
    consts = {n: parse_type(t, base_types)
              for n, t in obj.get("const_types", {}).items()}
    vars_ = {n: parse_type(t, base_types)
             for n, t in obj.get("var_types", {}).items()}
    return Signature(base_types, consts, vars_)


# ---------------------------------------------------------------------------
# countermodel enumeration

def _posets(n):
    """All partial orders on range(n), deduplicated up to isomorphism."""
    states = list(range(n))
    pairs = [(a, b) for a in states for b in states if a != b]
    seen = set()
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        le = {(s, s) for s in states}
        le.update(p for p, b in zip(pairs, bits) if b)
        ok = True
        for (a, b) in le:
            if (b, a) in le and a != b:
                ok = False
                break
        if ok:
            for (a, b) in list(le):
                for (c, d) in list(le):
                    if b == c and (a, d) not in le:
                        ok = False
                        break
                if not ok:
                    break
        if not ok:
            continue
        canon = min(
            tuple(sorted((perm[a], perm[b]) for a, b in le))
            for perm in [dict(zip(states, p))
                         for p in itertools.permutations(states)])
        if canon in seen:
            continue
        seen.add(canon)
        out.append(frozenset(le))
    return out


def _upsets(states, le):
    out = []
    for bits in itertools.product((0, 1), repeat=len(states)):
        ss = frozenset(s for s, b in zip(states, bits) if b)
        if all((s2 in ss) for s in ss for s2 in states if (s, s2) in le):
            out.append(ss)
    return out


def _needed_types(phis, sig):
    taus = set()

    def walk(phi, bound):
        if isinstance(phi, V):
            taus.add(bound.get(phi.name, sig.vars.get(phi.name)))
        elif isinstance(phi, C):
            taus.add(sig.const_type(phi.name))
        elif isinstance(phi, Ap):
            walk(phi.fn, bound)
            walk(phi.arg, bound)
        elif isinstance(phi, Imp):
            walk(phi.lhs, bound)
            walk(phi.rhs, bound)
        elif isinstance(phi, All):
            taus.add(phi.tau)
            b2 = dict(bound)
            b2[phi.var] = phi.tau
            walk(phi.body, b2)
    for phi in phis:
        walk(phi, {})
    taus.discard(None)
    # close under subtypes
    work = list(taus)
    while work:
        t = work.pop()
        if isinstance(t, Arrow):
            for sub in (t.src, t.dst):
                if sub not in taus:
                    taus.add(sub)
                    work.append(sub)
    taus.add(O)
    return taus


def _rank_arrow(tau):
    if isinstance(tau, Arrow):
        return 1 + max(_rank_arrow(tau.src), _rank_arrow(tau.dst))
    return 0


def enumerate_countermodel(hyps, goal, sig, max_states=3, max_dom=2):
    """Search for a validated model and state forcing hyps but not goal.

    Returns (model, state, valuation) or None if the bounded search
    is exhausted.
    """
    phis = list(hyps) + [goal]
    taus = sorted(_needed_types(phis, sig), key=lambda t: (_rank_arrow(t),
                                                           type_str(t)))
    free = sorted(fv(goal) | P.fv_set(hyps))
    consts = sorted({c.name for phi in phis for c in _consts_of(phi)})
    for n in range(1, max_states + 1):
        states = tuple("s%d" % i for i in range(n))
        for le_idx in _posets(n):
            le = frozenset(("s%d" % a, "s%d" % b) for a, b in le_idx)
            for base_sizes in itertools.product(
                    range(1, max_dom + 1),
                    repeat=len([t for t in taus if isinstance(t, Base)])):
                found = _try_shape(states, le, taus, base_sizes, consts,
                                   free, sig, hyps, goal)
                if found is not None:
                    return found
    return None


def _consts_of(phi):
    if isinstance(phi, C):
        return [phi]
    if isinstance(phi, Ap):
        return _consts_of(phi.fn) + _consts_of(phi.arg)
    if isinstance(phi, Imp):
        return _consts_of(phi.lhs) + _consts_of(phi.rhs)
    if isinstance(phi, All):
        return _consts_of(phi.body)
    return []


def _try_shape(states, le, taus, base_sizes, consts, free, sig, hyps, goal):
    domains = {}
    upsets = _upsets(list(states), le)
    o_elems = tuple("u%d" % i for i in range(len(upsets)))
    sigma = {e: ss for e, ss in zip(o_elems, upsets)}
    app = {}
    bi = 0
    for tau in taus:
        if tau == O:
            domains[O] = o_elems
        elif isinstance(tau, Base):
            domains[tau] = tuple("%s%d" % (tau.name, i)
                                 for i in range(base_sizes[bi]))
            bi += 1
        else:
            src, dst = domains[tau.src], domains[tau.dst]
            fns = list(itertools.product(dst, repeat=len(src)))
            elems = []
            for i, fn in enumerate(fns):
                name = "f_%s_%d" % (type_str(tau).replace(" ", ""), i)
                elems.append(name)
                for a, r in zip(src, fn):
                    app[(tau, name, a)] = r
            domains[tau] = tuple(elems)
    const_doms = [domains[sig.const_type(c)] for c in consts]
    free_doms = [domains[sig.var_type(x)] for x in free]
    for cvals in itertools.product(*const_doms):
        m = KripkeModel(states, le, domains, app,
                        dict(zip(consts, cvals)), sigma)
        for uvals in itertools.product(*free_doms):
            u = dict(zip(free, uvals))
            for s in states:
                if all(forces(m, sig, s, u, h) for h in hyps) and \
                        not forces(m, sig, s, u, goal):
                    return m, s, u
    return None
