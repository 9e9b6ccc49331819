"""Text syntax for lambda terms.

Grammar:
    term  := '\\' ident+ '.' term | imp
    imp   := app ('=>' term)?           (right associative)
    app   := atom+                       (left associative application)
    atom  := '(' term ')' | ident | 'A@' ident | '#' ident | '$' ident

Reserved identifiers: Xi, L, H, K, S, I, F, bot.  The abbreviations are
expanded at parse time; the kernel never sees them.  Identifiers starting
with '%' belong to a reserved namespace used for generated variables and
are only accepted with allow_reserved=True.
"""

from . import terms as T


RESERVED = {"Xi", "L", "H", "K", "S", "I", "F", "bot"}


class ParseError(Exception):
    pass


def tokenize(s):
    toks = []
    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c.isspace():
            i += 1
            continue
        if c in "\\.()":
            toks.append(c)
            i += 1
            continue
        if s.startswith("=>", i):
            toks.append("=>")
            i += 2
            continue
        if c in "#$%":
            j = i + 1
            while j < n and (s[j].isalnum() or s[j] in "_'"):
                j += 1
            if j == i + 1:
                raise ParseError("empty name after %r" % c)
            toks.append(s[i:j])
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (s[j].isalnum() or s[j] in "_'"):
                j += 1
            word = s[i:j]
            if word == "A" and j < n and s[j] == "@":
                k = j + 1
                while k < n and (s[k].isalnum() or s[k] in "_'"):
                    k += 1
                if k == j + 1:
                    raise ParseError("empty base type name after A@")
                toks.append(s[i:k])
                i = k
            else:
                toks.append(word)
                i = j
            continue
        raise ParseError("unexpected character %r at %d" % (c, i))
    return toks


class _Parser:
    def __init__(self, toks, consts=None, allow_reserved=False):
        self.toks = toks
        self.pos = 0
        self.consts = consts or frozenset()
        self.allow_reserved = allow_reserved

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return t

    def expect(self, tok):
        t = self.next()
        if t != tok:
            raise ParseError("expected %r, got %r" % (tok, t))

    def parse_term(self, env):
        if self.peek() == "\\":
            self.next()
            names = []
            while self.peek() not in (".", None):
                names.append(self._binder_name(self.next()))
            if not names:
                raise ParseError("lambda without binders")
            self.expect(".")
            body = self.parse_term(names[::-1] + env)
            for _ in names:
                body = T.Lam(body, "x")
            # re-attach hints outermost-first
            t = body
            hints = list(names)
            rebuilt = self._rehint(t, hints)
            return rebuilt
        return self.parse_imp(env)

    def _rehint(self, t, hints):
        if not hints:
            return t
        assert isinstance(t, T.Lam)
        return T.Lam(self._rehint(t.body, hints[1:]), hints[0])

    def _binder_name(self, tok):
        if tok in RESERVED or not (tok[0].isalpha() or tok[0] in "_%"):
            raise ParseError("bad binder name %r" % tok)
        if tok.startswith("%") and not self.allow_reserved:
            raise ParseError("reserved-namespace name %r" % tok)
        return tok

    def parse_imp(self, env):
        lhs = self.parse_app(env)
        if self.peek() == "=>":
            self.next()
            rhs = self.parse_term(env)
            return T.imp(self._resolve(lhs), self._resolve(rhs))
        return self._resolve(lhs)

    ATOM_STARTS = ("(", "\\")

    def parse_app(self, env):
        atoms = [self.parse_atom(env)]
        while True:
            p = self.peek()
            if p is None or p in (")", "=>", "."):
                break
            atoms.append(self.parse_atom(env))
        return self._assemble(atoms)

    def parse_atom(self, env):
        p = self.peek()
        if p == "(":
            self.next()
            t = self.parse_term(env)
            self.expect(")")
            return t
        if p == "\\":
            # allow a trailing lambda as the last atom
            return self.parse_term(env)
        tok = self.next()
        if tok in ("K", "H", "F"):
            return tok  # spine-sensitive markers
        if tok == "Xi":
            return T.XI
        if tok == "L":
            return T.EL
        if tok == "S":
            return T.S_TERM
        if tok == "I":
            return T.I_TERM
        if tok == "bot":
            return T.BOT
        if tok.startswith("A@"):
            return T.base_pred(tok[2:])
        if tok.startswith("#"):
            return T.Const(T.ConstId(tok[1:], T.K_CANON))
        if tok.startswith("$"):
            return T.Const(T.ConstId(tok[1:], T.K_EXT))
        if tok.startswith("%"):
            if not self.allow_reserved:
                raise ParseError("reserved-namespace name %r" % tok)
            name = tok
        elif tok[0].isalpha() or tok[0] == "_":
            name = tok
        else:
            raise ParseError("unexpected token %r" % tok)
        if name in env:
            return T.BVar(env.index(name))
        if name in self.consts:
            return T.Const(T.ConstId(name, T.K_USER))
        return T.FVar(name)

    def _resolve(self, a):
        """Turn a lone marker into its combinator form."""
        if a == "K":
            return T.K_TERM
        if a == "H":
            return T.H_COMB
        if a == "F":
            return T.F_COMB
        return a

    def _assemble(self, atoms):
        head = atoms[0]
        rest = atoms[1:]
        if head == "K" and len(rest) >= 1:
            t = T.k_applied(self._resolve(rest[0]))
            rest = rest[1:]
        elif head == "H" and len(rest) >= 1:
            t = T.h_applied(self._resolve(rest[0]))
            rest = rest[1:]
        elif head == "F" and len(rest) >= 2:
            t = T.f_applied(self._resolve(rest[0]), self._resolve(rest[1]))
            rest = rest[2:]
        else:
            t = self._resolve(head)
        for a in rest:
            t = T.App(t, self._resolve(a))
        return t


def parse_term(s, consts=None, allow_reserved=False):
    p = _Parser(tokenize(s), consts=consts, allow_reserved=allow_reserved)
    t = p.parse_term([])
    if p.peek() is not None:
        raise ParseError("trailing input at token %r" % p.peek())
    return t


# ---------------------------------------------------------------------------
# printing

def _pick_name(hint, used):
    base = hint if hint and (hint[0].isalpha() or hint[0] == "_") else "x"
    if base in RESERVED:
        base = base.lower() + "_"
    if base not in used and base not in RESERVED:
        return base
    i = 1
    while True:
        cand = "%s%d" % (base, i)
        if cand not in used and cand not in RESERVED:
            return cand
        i += 1


def print_term(t):
    """Render t; parse_term(print_term(t)) == t (alpha classes)."""
    used = set(T.free_vars(t))
    return _pp(t, [], used, 0)


def _pp(t, env, used, prec):
    # prec 0: term position; 1: function position; 2: argument position
    if isinstance(t, T.BVar):
        return env[t.idx]
    if isinstance(t, T.FVar):
        return t.name
    if isinstance(t, T.Const):
        k = t.cid.kind
        if k == T.K_XI:
            return "Xi"
        if k == T.K_L:
            return "L"
        if k == T.K_BASE:
            return "A@" + t.cid.name
        if k == T.K_CANON:
            return "#" + t.cid.name
        if k == T.K_EXT:
            return "$" + t.cid.name
        if k == T.K_BOX:
            raise ValueError("contexts have no text syntax")
        return t.cid.name
    if isinstance(t, T.App):
        s = "%s %s" % (_pp(t.fn, env, used, 1), _pp(t.arg, env, used, 2))
        return "(%s)" % s if prec == 2 else s
    if isinstance(t, T.Lam):
        name = _pick_name(t.hint, used)
        used.add(name)
        body = _pp(t.body, [name] + env, used, 0)
        used.discard(name)
        s = "\\%s. %s" % (name, body)
        return "(%s)" % s if prec != 0 else s
    raise TypeError(t)
