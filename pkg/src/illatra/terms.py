"""Untyped lambda terms over an extensible constant signature.

Terms are stored in a locally nameless representation: bound variables are
de Bruijn indices (BVar), free variables are named (FVar).  Alpha-equivalent
terms are therefore structurally equal; display names for binders are kept
as hints that do not participate in comparison or hashing.
"""

from dataclasses import dataclass, field
from enum import Enum
import itertools
import sys

# structural recursion over deeply nested reducts (e.g. unfoldings of
# fixed-point combinators) needs more headroom than the default limit
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


# ---------------------------------------------------------------------------
# constants

# kinds of primitive constants
K_XI = "xi"            # the restricted quantifier
K_L = "l"              # type-hood
K_BASE = "base"        # A_tau for a base type tau
K_USER = "user"        # object-signature constants
K_CANON = "canon"      # canonical constants of a stage universe
K_EXT = "ext"          # external (generic) constants
K_BOX = "box"          # context boxes


@dataclass(frozen=True)
class ConstId:
    name: str
    kind: str

    def __repr__(self):
        return "ConstId(%r, %r)" % (self.name, self.kind)


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class FVar(Term):
    name: str


@dataclass(frozen=True)
class BVar(Term):
    idx: int


@dataclass(frozen=True)
class Const(Term):
    cid: ConstId


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    body: Term
    hint: str = field(default="x", compare=False)


XI = Const(ConstId("Xi", K_XI))
EL = Const(ConstId("L", K_L))


def base_pred(name):
    """The constant A_tau for base type named `name`."""
    return Const(ConstId(name, K_BASE))


def app(*ts):
    """Left-associated application of one or more terms."""
    t = ts[0]
    for s in ts[1:]:
        t = App(t, s)
    return t


# ---------------------------------------------------------------------------
# basic structural operations

def free_vars(t):
    """The set of free variable names of t."""
    if isinstance(t, FVar):
        return frozenset((t.name,))
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, Lam):
        return free_vars(t.body)
    return frozenset()


def free_vars_of(terms):
    out = frozenset()
    for t in terms:
        out = out | free_vars(t)
    return out


def uses_bvar(t, k=0):
    """True if t refers to the binder k levels up."""
    if isinstance(t, BVar):
        return t.idx == k
    if isinstance(t, App):
        return uses_bvar(t.fn, k) or uses_bvar(t.arg, k)
    if isinstance(t, Lam):
        return uses_bvar(t.body, k + 1)
    return False


def instantiate(t, s, k=0):
    """Replace BVar(k) in t by s, shifting s across binders."""
    if isinstance(t, BVar):
        if t.idx == k:
            return _shift(s, k)
        if t.idx > k:
            return BVar(t.idx - 1)
        return t
    if isinstance(t, App):
        return App(instantiate(t.fn, s, k), instantiate(t.arg, s, k))
    if isinstance(t, Lam):
        return Lam(instantiate(t.body, s, k + 1), t.hint)
    return t


def open_with(t_lam, s):
    """Apply the body of a Lam to s without constructing a redex."""
    return instantiate(t_lam.body, s)


def abstract(t, name, k=0):
    """Replace FVar(name) in t by BVar(k); inverse of instantiate."""
    if isinstance(t, FVar):
        return BVar(k) if t.name == name else t
    if isinstance(t, BVar):
        return BVar(t.idx + 1) if t.idx >= k else t
    if isinstance(t, App):
        return App(abstract(t.fn, name, k), abstract(t.arg, name, k))
    if isinstance(t, Lam):
        return Lam(abstract(t.body, name, k + 1), t.hint)
    return t


def lam(name, body):
    """Bind the free variable `name` in body."""
    return Lam(abstract(body, name), hint=name)


def subst(t, name, s):
    """Capture-avoiding substitution of s for the free variable name in t."""
    if isinstance(t, FVar):
        return s if t.name == name else t
    if isinstance(t, App):
        return App(subst(t.fn, name, s), subst(t.arg, name, s))
    if isinstance(t, Lam):
        return Lam(subst(t.body, name, s), t.hint)
    return t


def subterm_constants(t):
    """All ConstIds occurring in t."""
    if isinstance(t, Const):
        return frozenset((t.cid,))
    if isinstance(t, App):
        return subterm_constants(t.fn) | subterm_constants(t.arg)
    if isinstance(t, Lam):
        return subterm_constants(t.body)
    return frozenset()


def alpha_eq(t1, t2):
    """Alpha equivalence; structural equality in this representation."""
    return t1 == t2


def term_size(t):
    if isinstance(t, App):
        return 1 + term_size(t.fn) + term_size(t.arg)
    if isinstance(t, Lam):
        return 1 + term_size(t.body)
    return 1


_fresh_counter = itertools.count(1)


def fresh_name(prefix="x"):
    """A globally fresh variable name in the reserved namespace."""
    return "%%%s%d" % (prefix, next(_fresh_counter))


def is_reserved_name(name):
    return name.startswith("%")


# ---------------------------------------------------------------------------
# verdicts

class Verdict(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self):
        return self is Verdict.TRUE


TRUE = Verdict.TRUE
FALSE = Verdict.FALSE
UNKNOWN = Verdict.UNKNOWN


def v_and(verdicts):
    """Kleene conjunction over an iterable of Verdicts."""
    out = TRUE
    for v in verdicts:
        if v is FALSE:
            return FALSE
        if v is UNKNOWN:
            out = UNKNOWN
    return out


def v_or(verdicts):
    """Kleene disjunction over an iterable of Verdicts."""
    out = FALSE
    for v in verdicts:
        if v is TRUE:
            return TRUE
        if v is UNKNOWN:
            out = UNKNOWN
    return out


def v_from_bool(b):
    return TRUE if b else FALSE


# ---------------------------------------------------------------------------
# reduction

class BudgetExhausted(Exception):
    """Raised when a reduction does not finish within its step budget."""


@dataclass
class ReductionBudget:
    max_steps: int = 1000

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


def _eta_contract(t):
    """If t = Lam(App(f, BVar 0)) with BVar 0 not free in f, return f."""
    if isinstance(t, Lam) and isinstance(t.body, App):
        b = t.body
        if isinstance(b.arg, BVar) and b.arg.idx == 0 and not uses_bvar(b.fn, 0):
            # drop the binder: decrement loose indices above 0 in b.fn
            return _unshift(b.fn)
    return None


def _unshift(t, k=0):
    """Decrement loose indices > k; only valid if BVar(k) is unused."""
    if isinstance(t, BVar):
        return BVar(t.idx - 1) if t.idx > k else t
    if isinstance(t, App):
        return App(_unshift(t.fn, k), _unshift(t.arg, k))
    if isinstance(t, Lam):
        return Lam(_unshift(t.body, k + 1), t.hint)
    return t


def _step(t):
    """One leftmost-outermost beta/eta step, or None if t is normal."""
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            return instantiate(t.fn.body, t.arg)
        s = _step(t.fn)
        if s is not None:
            return App(s, t.arg)
        s = _step(t.arg)
        if s is not None:
            return App(t.fn, s)
        return None
    if isinstance(t, Lam):
        e = _eta_contract(t)
        if e is not None:
            return e
        s = _step(t.body)
        if s is not None:
            return Lam(s, t.hint)
        return None
    return None


def beta_eta_normalize(t, budget=None):
    """Normalize t by leftmost-outermost beta/eta reduction.

    Raises BudgetExhausted if no normal form is reached within the budget.
    """
    limit = budget.max_steps if budget is not None else 1000
    for _ in range(limit):
        s = _step(t)
        if s is None:
            return t
        t = s
    if _step(t) is None:
        return t
    raise BudgetExhausted()


def is_normal(t):
    return _step(t) is None


def beta_eta_equal(t1, t2, budget=None):
    """Three-valued beta-eta equality under a step budget."""
    if t1 == t2:
        return TRUE
    n1 = n2 = None
    try:
        n1 = beta_eta_normalize(t1, budget)
    except BudgetExhausted:
        pass
    try:
        n2 = beta_eta_normalize(t2, budget)
    except BudgetExhausted:
        pass
    if n1 is not None and n2 is not None:
        return v_from_bool(n1 == n2)
    return UNKNOWN


def one_step_reducts(t):
    """All single-step beta/eta reducts of t (any position)."""
    out = []
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            out.append(instantiate(t.fn.body, t.arg))
        out.extend(App(s, t.arg) for s in one_step_reducts(t.fn))
        out.extend(App(t.fn, s) for s in one_step_reducts(t.arg))
    elif isinstance(t, Lam):
        e = _eta_contract(t)
        if e is not None:
            out.append(e)
        out.extend(Lam(s, t.hint) for s in one_step_reducts(t.body))
    return out


# ---------------------------------------------------------------------------
# contexts

class CaptureViolation(Exception):
    """A fill's free variable would be captured by a binder of the context."""


def box(i=1):
    return Const(ConstId(str(i), K_BOX))


def _fill(t, fills, enclosing, capture):
    if isinstance(t, Const) and t.cid.kind == K_BOX:
        s = fills[int(t.cid.name) - 1]
        bad = free_vars(s) & frozenset(h for h, _ in enclosing)
        if bad and not capture:
            raise CaptureViolation(", ".join(sorted(bad)))
        if capture:
            for h, depth in reversed(enclosing):
                if h in free_vars(s):
                    # bind by hint: innermost binder with this name wins
                    s = abstract(s, h, depth)
                    # abstract with k=depth binds to the binder `depth`
                    # levels up without touching other indices
            # abstract() bumps loose indices; fills are complete terms so
            # only the intended references are introduced
        return s
    if isinstance(t, App):
        return App(_fill(t.fn, fills, enclosing, capture),
                   _fill(t.arg, fills, enclosing, capture))
    if isinstance(t, Lam):
        inner = [(h, d + 1) for h, d in enclosing]
        inner.append((t.hint, 0))
        return Lam(_fill(t.body, fills, inner, capture), t.hint)
    return t


def fill_context(ctx, fills, capture_mode=False):
    """Replace the boxes of ctx by the fills.

    In default mode a CaptureViolation is raised when a free variable of a
    fill has the same name as an enclosing binder hint; in capture mode the
    variable becomes bound by that binder.
    """
    return _fill(ctx, list(fills), [], capture_mode)


# ---------------------------------------------------------------------------
# abbreviation layer (Notation: K t, H t, F t1 t2, imp, bot)

def i_comb():
    return Lam(BVar(0), "x")


def s_comb():
    # \x y z. x z (y z)
    return Lam(Lam(Lam(App(App(BVar(2), BVar(0)), App(BVar(1), BVar(0))),
                       "z"), "y"), "x")


def k_comb():
    return Lam(Lam(BVar(1), "y"), "x")


def h_comb():
    # \x. L (K x) = \x. L (\y. x)
    return Lam(App(EL, Lam(BVar(1), "y")), "x")


def f_comb():
    # \x y f. Xi x (\z. y (f z))
    return Lam(Lam(Lam(
        App(App(XI, BVar(2)), Lam(App(BVar(2), App(BVar(1), BVar(0))), "z")),
        "f"), "y"), "x")


I_TERM = i_comb()
S_TERM = s_comb()
K_TERM = k_comb()
H_COMB = h_comb()
F_COMB = f_comb()


def k_applied(t):
    """K t read as \\x.t with x not free in t."""
    return Lam(t, fresh_hint(t))


def fresh_hint(t):
    # a display hint that does not clash with free variables of t
    for h in ("x", "y", "z", "u", "v", "w"):
        if h not in free_vars(t):
            return h
    return "x0"


def h_applied(t):
    """H t read as L \\x.t."""
    return App(EL, k_applied(t))


def f_applied(t1, t2):
    """F t1 t2 with the lambda-fusion convention.

    F t1 t2 = \\f. Xi t1 (\\x. t2 (f x)) when t2 is not an abstraction,
    and \\f. Xi t1 (\\x. q2[z/(f x)]) when t2 = \\z.q2.
    """
    fx = App(BVar(1), BVar(0))  # f x with f at depth 1, x at depth 0
    if isinstance(t2, Lam):
        # t2 = \z.q2: splice q2 with z replaced by (f x)
        inner = instantiate(t2.body, fx)
    else:
        inner = App(t2, fx)
    return Lam(App(App(XI, _shift(t1, 1)), Lam(inner, "x")), "f")


def _shift(t, n, k=0):
    """Increment loose indices >= k by n (no-op on complete terms)."""
    if isinstance(t, BVar):
        return BVar(t.idx + n) if t.idx >= k else t
    if isinstance(t, App):
        return App(_shift(t.fn, n, k), _shift(t.arg, n, k))
    if isinstance(t, Lam):
        return Lam(_shift(t.body, n, k + 1), t.hint)
    return t


def imp(t1, t2):
    """t1 => t2, i.e. Xi (K t1) (K t2)."""
    return App(App(XI, k_applied(t1)), k_applied(t2))


def bot_term():
    """bot = Xi H I."""
    return App(App(XI, H_COMB), I_TERM)


BOT = bot_term()


def dn_axiom_term():
    """Xi H (\\x. ((x => bot) => bot) => x)."""
    x = fresh_name("dn")
    body = imp(imp(imp(FVar(x), BOT), BOT), FVar(x))
    return App(App(XI, H_COMB), lam(x, body))


# recognizers ---------------------------------------------------------------

def match_k(t):
    """If t = \\x.s with x unused, return s (the K-argument)."""
    if isinstance(t, Lam) and not uses_bvar(t.body, 0):
        return _unshift(t.body)
    return None


def match_h(t):
    """If t = L (\\x.s) with x unused, return s (the H-argument)."""
    if isinstance(t, App) and t.fn == EL:
        return match_k(t.arg)
    return None


def match_xi(t):
    """If t = Xi t1 t2 return (t1, t2)."""
    if (isinstance(t, App) and isinstance(t.fn, App)
            and t.fn.fn == XI):
        return (t.fn.arg, t.arg)
    return None


def match_imp(t):
    """If t = Xi (K t1) (K t2), return (t1, t2)."""
    m = match_xi(t)
    if m is None:
        return None
    a = match_k(m[0])
    b = match_k(m[1])
    if a is not None and b is not None:
        return (a, b)
    return None


def _replace_subterm(t, pat, rep):
    """Replace literal occurrences of pat (with loose indices) by rep."""
    if t == pat:
        return rep
    if isinstance(t, App):
        return App(_replace_subterm(t.fn, pat, rep),
                   _replace_subterm(t.arg, pat, rep))
    if isinstance(t, Lam):
        return Lam(_replace_subterm(t.body, _shift(pat, 1), _shift(rep, 1)),
                   t.hint)
    return t


def _occurs(t, pat):
    if t == pat:
        return True
    if isinstance(t, App):
        return _occurs(t.fn, pat) or _occurs(t.arg, pat)
    if isinstance(t, Lam):
        return _occurs(t.body, _shift(pat, 1))
    return False


def match_f(t):
    """Decompositions of t as F t1 t2 per the notation, up to two readings.

    Returns a list of (t1, t2) pairs.  t must look like
    \\f. Xi t1 (\\x. r); the unfused reading requires r = t2 (f x) with
    f, x not free in t2; the fused reading reconstructs t2 = \\z. r[(f x)/z].
    """
    if not isinstance(t, Lam):
        return []
    b = t.body
    m = match_xi(b)
    if m is None or not isinstance(m[1], Lam):
        return []
    t1s, inner = m
    if uses_bvar(t1s, 0):
        return []
    t1 = _unshift(t1s)
    r = inner.body  # f at depth 1, x at depth 0
    fx = App(BVar(1), BVar(0))
    out = []
    # unfused reading: r = t2' (f x)
    if (isinstance(r, App) and r.arg == fx
            and not uses_bvar(r.fn, 0) and not uses_bvar(r.fn, 1)):
        t2 = _unshift(_unshift(r.fn, 0), 0)
        if not isinstance(t2, Lam):
            out.append((t1, t2))
    # fused reading: t2 = \z. r[(f x)/z]
    if _occurs(r, fx):
        body = _replace_subterm(_shift(r, 1, 0), _shift(fx, 1, 0), BVar(0))
        if not uses_bvar(body, 1) and not uses_bvar(body, 2):
            t2 = Lam(_unshift(_unshift(body, 1), 1), "z")
            out.append((t1, t2))
    return out
