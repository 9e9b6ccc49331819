"""Syntax and derivation checking for PREDomega / PRED2_0.

Simple types, typed terms and formulas, and the natural-deduction rules:
the axiom, implication intro/elim, universal intro/elim, plus the classical
double-negation axiom as an optional rule.
"""

from dataclasses import dataclass, field
import itertools


# ---------------------------------------------------------------------------
# simple types

@dataclass(frozen=True)
class SimpleType:
    pass


@dataclass(frozen=True)
class TO(SimpleType):
    def __repr__(self):
        return "o"


@dataclass(frozen=True)
class Base(SimpleType):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Arrow(SimpleType):
    src: SimpleType
    dst: SimpleType

    def __repr__(self):
        return "(%r -> %r)" % (self.src, self.dst)


O = TO()

MODE_PRED2 = "PRED2_0"
MODE_PREDW = "PREDomega"


def is_pred2_type(tau):
    """The PRED2_0 type grammar: o | B | B -> T."""
    if tau == O or isinstance(tau, Base):
        return True
    if isinstance(tau, Arrow):
        return isinstance(tau.src, Base) and is_pred2_type(tau.dst)
    return False


def parse_type(s, base_types):
    """Parse 'b -> b -> o' (right associative); atoms: 'o' or a base name."""
    parts = [p.strip() for p in _split_arrows(s)]
    tau = _parse_type_atom(parts[-1], base_types)
    for p in reversed(parts[:-1]):
        tau = Arrow(_parse_type_atom(p, base_types), tau)
    return tau


def _split_arrows(s):
    # split on top-level '->'
    out, depth, cur = [], 0, ""
    i = 0
    while i < len(s):
        c = s[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        if depth == 0 and s.startswith("->", i):
            out.append(cur)
            cur = ""
            i += 2
            continue
        cur += c
        i += 1
    out.append(cur)
    return out


def _parse_type_atom(s, base_types):
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        return parse_type(s[1:-1], base_types)
    if s == "o":
        return O
    if s in base_types:
        return Base(s)
    raise TypeErr("unknown type %r" % s)


def type_str(tau):
    if tau == O:
        return "o"
    if isinstance(tau, Base):
        return tau.name
    src = type_str(tau.src)
    if isinstance(tau.src, Arrow):
        src = "(%s)" % src
    return "%s -> %s" % (src, type_str(tau.dst))


# ---------------------------------------------------------------------------
# signature

class TypeErr(Exception):
    pass


_fresh_pred2 = itertools.count(1)


@dataclass
class Signature:
    base_types: frozenset
    consts: dict  # name -> SimpleType
    vars: dict    # name -> SimpleType

    def var_type(self, name):
        if name not in self.vars:
            raise TypeErr("variable %r has no declared type" % name)
        return self.vars[name]

    def const_type(self, name):
        if name not in self.consts:
            raise TypeErr("constant %r has no declared type" % name)
        return self.consts[name]

    def fresh_var(self, tau, prefix="v"):
        while True:
            name = "%s_%d" % (prefix, next(_fresh_pred2))
            if name not in self.vars and name not in self.consts:
                self.vars[name] = tau
                return name


# ---------------------------------------------------------------------------
# formulas and terms (one AST; formulas are the pieces of type o)

@dataclass(frozen=True)
class P2:
    pass


@dataclass(frozen=True)
class V(P2):
    name: str


@dataclass(frozen=True)
class C(P2):
    name: str


@dataclass(frozen=True)
class Ap(P2):
    fn: P2
    arg: P2


@dataclass(frozen=True)
class Imp(P2):
    lhs: P2
    rhs: P2


@dataclass(frozen=True)
class All(P2):
    var: str
    tau: SimpleType
    body: P2


def fv(phi):
    if isinstance(phi, V):
        return frozenset((phi.name,))
    if isinstance(phi, Ap):
        return fv(phi.fn) | fv(phi.arg)
    if isinstance(phi, Imp):
        return fv(phi.lhs) | fv(phi.rhs)
    if isinstance(phi, All):
        return fv(phi.body) - frozenset((phi.var,))
    return frozenset()


def fv_set(phis):
    out = frozenset()
    for p in phis:
        out = out | fv(p)
    return out


def rename_bound(phi, old, new):
    """Rename the binder of an All node (helper for alpha operations)."""
    return formula_subst_unsafe(phi, old, V(new))


def formula_subst_unsafe(phi, x, q):
    if isinstance(phi, V):
        return q if phi.name == x else phi
    if isinstance(phi, C):
        return phi
    if isinstance(phi, Ap):
        return Ap(formula_subst_unsafe(phi.fn, x, q),
                  formula_subst_unsafe(phi.arg, x, q))
    if isinstance(phi, Imp):
        return Imp(formula_subst_unsafe(phi.lhs, x, q),
                   formula_subst_unsafe(phi.rhs, x, q))
    if isinstance(phi, All):
        if phi.var == x:
            return phi
        return All(phi.var, phi.tau, formula_subst_unsafe(phi.body, x, q))
    raise TypeError(phi)


def formula_subst(phi, x, q, sig=None):
    """Capture-avoiding substitution phi[x/q]."""
    if isinstance(phi, (V, C)):
        return formula_subst_unsafe(phi, x, q)
    if isinstance(phi, Ap):
        return Ap(formula_subst(phi.fn, x, q, sig),
                  formula_subst(phi.arg, x, q, sig))
    if isinstance(phi, Imp):
        return Imp(formula_subst(phi.lhs, x, q, sig),
                   formula_subst(phi.rhs, x, q, sig))
    if isinstance(phi, All):
        if phi.var == x:
            return phi
        if x not in fv(phi.body):
            return phi
        if phi.var in fv(q):
            if sig is None:
                sig = Signature(frozenset(), {}, {phi.var: phi.tau})
            new = sig.fresh_var(phi.tau, prefix=phi.var.split("_")[0])
            sig.vars[new] = phi.tau
            body = formula_subst_unsafe(phi.body, phi.var, V(new))
            return All(new, phi.tau, formula_subst(body, x, q, sig))
        return All(phi.var, phi.tau, formula_subst(phi.body, x, q, sig))
    raise TypeError(phi)


def alpha_canon(phi, env=None, counter=None):
    """A canonical renaming of bound variables; use for alpha comparison."""
    if env is None:
        env, counter = {}, itertools.count()
    if isinstance(phi, V):
        return V(env.get(phi.name, phi.name))
    if isinstance(phi, C):
        return phi
    if isinstance(phi, Ap):
        return Ap(alpha_canon(phi.fn, env, counter),
                  alpha_canon(phi.arg, env, counter))
    if isinstance(phi, Imp):
        return Imp(alpha_canon(phi.lhs, env, counter),
                   alpha_canon(phi.rhs, env, counter))
    if isinstance(phi, All):
        fresh = "@b%d" % next(counter)
        env2 = dict(env)
        env2[phi.var] = fresh
        return All(fresh, phi.tau, alpha_canon(phi.body, env2, counter))
    raise TypeError(phi)


def alpha_eq_formula(p, q):
    return alpha_canon(p) == alpha_canon(q)


def falsum():
    """bot = forall x_o. x_o"""
    return All("@xo", O, V("@xo"))


def is_falsum(phi):
    return (isinstance(phi, All) and phi.tau == O
            and phi.body == V(phi.var))


def neg(phi):
    return Imp(phi, falsum())


def typecheck(phi, sig, mode=MODE_PRED2, bound=None):
    """Return the type of phi, enforcing the grammar of the chosen mode."""
    if bound is None:
        bound = {}
    if isinstance(phi, V):
        tau = bound.get(phi.name)
        if tau is None:
            tau = sig.var_type(phi.name)
        return tau
    if isinstance(phi, C):
        return sig.const_type(phi.name)
    if isinstance(phi, Ap):
        tf = typecheck(phi.fn, sig, mode, bound)
        ta = typecheck(phi.arg, sig, mode, bound)
        if not isinstance(tf, Arrow):
            raise TypeErr("application head is not a function: %r : %s"
                          % (phi.fn, type_str(tf)))
        if tf.src != ta:
            raise TypeErr("argument type mismatch: expected %s, got %s"
                          % (type_str(tf.src), type_str(ta)))
        if mode == MODE_PRED2 and not isinstance(ta, Base):
            raise TypeErr("PRED2_0 application argument must have base type,"
                          " got %s" % type_str(ta))
        return tf.dst
    if isinstance(phi, Imp):
        tl = typecheck(phi.lhs, sig, mode, bound)
        tr = typecheck(phi.rhs, sig, mode, bound)
        if tl != O or tr != O:
            raise TypeErr("implication of non-formulas")
        return O
    if isinstance(phi, All):
        if mode == MODE_PRED2 and not (isinstance(phi.tau, Base)
                                       or phi.tau == O):
            raise TypeErr("PRED2_0 quantifies only over base types and o")
        b2 = dict(bound)
        b2[phi.var] = phi.tau
        tb = typecheck(phi.body, sig, mode, b2)
        if tb != O:
            raise TypeErr("quantified body is not a formula")
        return O
    raise TypeErr("bad node %r" % (phi,))


def is_formula(phi, sig, mode=MODE_PRED2):
    return typecheck(phi, sig, mode) == O


# ---------------------------------------------------------------------------
# formula text syntax:
#   forall x:tau. phi     phi -> psi (right assoc)    application by juxt.
#   sugar: false, ~phi, phi \/ psi, phi /\ psi  (second-order encodings)

class P2ParseError(Exception):
    pass


def _p2_tokens(s):
    toks = []
    i = 0
    while i < len(s):
        c = s[i]
        if c.isspace():
            i += 1
            continue
        for sym in ("->", "\\/", "/\\", "(", ")", ".", ":", "~"):
            if s.startswith(sym, i):
                toks.append(sym)
                i += len(sym)
                break
        else:
            if c.isalnum() or c in "_@'":
                j = i
                while j < len(s) and (s[j].isalnum() or s[j] in "_@'"):
                    j += 1
                toks.append(s[i:j])
                i = j
            else:
                raise P2ParseError("unexpected char %r" % c)
    return toks


class _P2Parser:
    def __init__(self, toks, sig):
        self.toks = toks
        self.pos = 0
        self.sig = sig

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise P2ParseError("unexpected end")
        self.pos += 1
        return t

    def expect(self, t):
        got = self.next()
        if got != t:
            raise P2ParseError("expected %r, got %r" % (t, got))

    def formula(self):
        if self.peek() == "forall":
            self.next()
            name = self.next()
            self.expect(":")
            tyt = []
            while self.peek() not in (".", None):
                tyt.append(self.next())
            self.expect(".")
            tau = parse_type(" ".join(tyt), self.sig.base_types)
            body = self.formula()
            return All(name, tau, body)
        lhs = self.or_()
        if self.peek() == "->":
            self.next()
            return Imp(lhs, self.formula())
        return lhs

    def or_(self):
        lhs = self.and_()
        if self.peek() == "\\/":
            self.next()
            rhs = self.or_()
            # phi \/ psi := forall p:o. (phi -> p) -> (psi -> p) -> p
            p = "@or"
            return All(p, O, Imp(Imp(lhs, V(p)), Imp(Imp(rhs, V(p)), V(p))))
        return lhs

    def and_(self):
        lhs = self.atomish()
        if self.peek() == "/\\":
            self.next()
            rhs = self.and_()
            # phi /\ psi := forall p:o. (phi -> psi -> p) -> p
            p = "@and"
            return All(p, O, Imp(Imp(lhs, Imp(rhs, V(p))), V(p)))
        return lhs

    def atomish(self):
        if self.peek() == "~":
            self.next()
            return neg(self.atomish())
        return self.application()

    def application(self):
        t = self.atom()
        while self.peek() is not None and (
                self.peek() not in ("->", ")", ".", "\\/", "/\\")):
            if self.peek() in ("forall", "~"):
                break
            t = Ap(t, self.atom())
        return t

    def atom(self):
        p = self.peek()
        if p == "(":
            self.next()
            t = self.formula()
            self.expect(")")
            return t
        tok = self.next()
        if tok == "false":
            return falsum()
        if tok in self.sig.consts:
            return C(tok)
        return V(tok)


def parse_formula(s, sig):
    p = _P2Parser(_p2_tokens(s), sig)
    out = p.formula()
    if p.peek() is not None:
        raise P2ParseError("trailing input %r" % p.peek())
    return out


def formula_str(phi, prec=0):
    if isinstance(phi, V) or isinstance(phi, C):
        return phi.name
    if isinstance(phi, Ap):
        s = "%s %s" % (formula_str(phi.fn, 1), formula_str(phi.arg, 2))
        return "(%s)" % s if prec == 2 else s
    if isinstance(phi, Imp):
        s = "%s -> %s" % (formula_str(phi.lhs, 1), formula_str(phi.rhs, 0))
        return "(%s)" % s if prec >= 1 else s
    if isinstance(phi, All):
        s = "forall %s:%s. %s" % (phi.var, type_str(phi.tau),
                                  formula_str(phi.body, 0))
        return "(%s)" % s if prec >= 1 else s
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# derivations

@dataclass(frozen=True)
class P2Node:
    rule: str                       # Axiom | ImpI | ImpE | ForallI | ForallE | DoubleNeg
    hyps: frozenset                 # of canonical formulas
    concl: P2
    premises: tuple = ()
    params: tuple = ()              # rule-specific


class Pred2RuleError(Exception):
    def __init__(self, node, reason):
        self.node = node
        self.reason = reason
        super().__init__(reason)


def _canon_set(phis):
    return frozenset(alpha_canon(p) for p in phis)


def check_pred2_derivation(d, sig, classical=False, mode=MODE_PRED2):
    """Check every node of the derivation tree against its rule schema."""
    for h in d.hyps:
        if typecheck(h, sig, mode) != O:
            raise Pred2RuleError(d, "hypothesis is not a formula")
    if typecheck(d.concl, sig, mode) != O:
        raise Pred2RuleError(d, "conclusion is not a formula")
    hyps = _canon_set(d.hyps)
    concl = alpha_canon(d.concl)

    if d.rule == "Axiom":
        if concl not in hyps:
            raise Pred2RuleError(d, "axiom conclusion not among hypotheses")
        return True

    if d.rule == "DoubleNeg":
        if not classical:
            raise Pred2RuleError(d, "DoubleNeg requires the classical system")
        if not (isinstance(d.concl, Imp)
                and isinstance(d.concl.lhs, Imp)
                and isinstance(d.concl.lhs.lhs, Imp)
                and is_falsum(d.concl.lhs.rhs)
                and is_falsum(d.concl.lhs.lhs.rhs)
                and alpha_eq_formula(d.concl.lhs.lhs.lhs, d.concl.rhs)):
            raise Pred2RuleError(d, "not a double-negation instance")
        return True

    if d.rule == "ImpI":
        (p,) = d.premises
        if not isinstance(d.concl, Imp):
            raise Pred2RuleError(d, "ImpI conclusion is not an implication")
        if _canon_set(p.hyps) != hyps | {alpha_canon(d.concl.lhs)}:
            raise Pred2RuleError(d, "ImpI premise hypotheses mismatch")
        if alpha_canon(p.concl) != alpha_canon(d.concl.rhs):
            raise Pred2RuleError(d, "ImpI premise conclusion mismatch")
        check_pred2_derivation(p, sig, classical, mode)
        return True

    if d.rule == "ImpE":
        p1, p2 = d.premises
        if _canon_set(p1.hyps) != hyps or _canon_set(p2.hyps) != hyps:
            raise Pred2RuleError(d, "ImpE premise hypotheses mismatch")
        if not isinstance(p1.concl, Imp):
            raise Pred2RuleError(d, "ImpE major premise not an implication")
        if not alpha_eq_formula(p1.concl.lhs, p2.concl):
            raise Pred2RuleError(d, "ImpE minor premise mismatch")
        if not alpha_eq_formula(p1.concl.rhs, d.concl):
            raise Pred2RuleError(d, "ImpE conclusion mismatch")
        check_pred2_derivation(p1, sig, classical, mode)
        check_pred2_derivation(p2, sig, classical, mode)
        return True

    if d.rule == "ForallI":
        (p,) = d.premises
        if not isinstance(d.concl, All):
            raise Pred2RuleError(d, "ForallI conclusion is not universal")
        x, tau = d.concl.var, d.concl.tau
        if _canon_set(p.hyps) != hyps:
            raise Pred2RuleError(d, "ForallI premise hypotheses mismatch")
        if not alpha_eq_formula(p.concl, d.concl.body):
            raise Pred2RuleError(d, "ForallI premise conclusion mismatch")
        if x in fv_set(d.hyps):
            raise Pred2RuleError(
                d, "FreshnessViolation: %s free in hypotheses" % x)
        check_pred2_derivation(p, sig, classical, mode)
        return True

    if d.rule == "ForallE":
        (p,) = d.premises
        (t,) = d.params
        if _canon_set(p.hyps) != hyps:
            raise Pred2RuleError(d, "ForallE premise hypotheses mismatch")
        if not isinstance(p.concl, All):
            raise Pred2RuleError(d, "ForallE premise is not universal")
        tau = typecheck(t, sig, mode)
        if tau != p.concl.tau:
            raise Pred2RuleError(d, "ForallE instantiation type mismatch")
        inst = formula_subst(p.concl.body, p.concl.var, t, sig)
        if not alpha_eq_formula(inst, d.concl):
            raise Pred2RuleError(d, "ForallE conclusion mismatch")
        check_pred2_derivation(p, sig, classical, mode)
        return True

    raise Pred2RuleError(d, "unknown rule %r" % d.rule)


# helpers to build derivations ----------------------------------------------

def ax(hyps, phi):
    return P2Node("Axiom", frozenset(hyps) | {phi}, phi)


def imp_i(d, phi):
    return P2Node("ImpI", frozenset(d.hyps) - {phi} -
                  {h for h in d.hyps if alpha_eq_formula(h, phi)},
                  Imp(phi, d.concl), (d,))


def imp_e(d1, d2):
    assert isinstance(d1.concl, Imp)
    return P2Node("ImpE", d1.hyps | d2.hyps, d1.concl.rhs, (d1, d2))


def forall_i(d, x, tau):
    return P2Node("ForallI", d.hyps, All(x, tau, d.concl), (d,))


def forall_e(d, t, sig):
    assert isinstance(d.concl, All)
    inst = formula_subst(d.concl.body, d.concl.var, t, sig)
    return P2Node("ForallE", d.hyps, inst, (d,), (t,))


# ---------------------------------------------------------------------------
# JSON

def derivation_to_json(d):
    obj = {
        "rule": d.rule,
        "hyps": sorted(formula_str(h) for h in d.hyps),
        "concl": formula_str(d.concl),
        "premises": [derivation_to_json(p) for p in d.premises],
    }
    if d.params:
        obj["params"] = [formula_str(p) for p in d.params]
    return obj


def derivation_from_json(obj, sig):
    return P2Node(
        obj["rule"],
        frozenset(parse_formula(h, sig) for h in obj.get("hyps", [])),
        parse_formula(obj["concl"], sig),
        tuple(derivation_from_json(p, sig)
              for p in obj.get("premises", [])),
        tuple(parse_formula(p, sig) for p in obj.get("params", [])),
    )
