"""Lexer and recursive-descent parser for ``.ectt`` sources.

Surface grammar:

    decl      ::= 'def' x ':' term '=' term | 'postulate' x ':' term
    term      ::= '\\' x+ '.' term | '<' i+ '>' term
                | 'let' x ':' term '=' term 'in' term | comp | arrow
    arrow     ::= '(' x+ ':' term ')' ('->' | '*') ...  | sigma ('->' term)?
    sigma     ::= spine ('*' sigma)?
    spine     ::= atom (atom | '@' interval | '.1' | '.2')*
    atom      ::= x | 'U' n | '(' term (',' term)? ')' | 'Path' '(' i '.' term ')' atom atom
    comp      ::= 'comp' '^' k '(' i1..ik '.' term ')' '[' system ']' spine
                  ':' ituple '~>' ituple
    system    ::= branch ('|' branch)*  |  (empty)
    branch    ::= cof '->' i1..ik '.' term
    cof       ::= cand ('\\/' cand)* ; cand ::= catom ('/\\' catom)*
    catom     ::= 'tt' | 'ff' | '(' cof ')' | interval '=' interval
    interval  ::= '0' | '1' | i

Comments run from ``--`` to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import syntax as S
from .syntax import (Branch, CAnd, CEq, COr, Comp, Def, Fst, I0, I1, IVar,
                     Interval, Lam, Let, Pair, PApp, PathT, Pi, PLam,
                     Postulate, Sigma, Snd, Term, U, Var, App, BOT, TOP)


class SyntaxError_(Exception):
    def __init__(self, message: str, pos: tuple[int, int]):
        super().__init__(f"{pos[0]}:{pos[1]}: {message}")
        self.message = message
        self.pos = pos


@dataclass
class Token:
    kind: str
    text: str
    pos: tuple[int, int]


_TOKEN_RE = re.compile(r"""
    (?P<comment>--[^\n]*)
  | (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<squig>~>)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<lam>\\)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<number>[0-9]+)
  | (?P<sym>[()\[\]<>.,:=*@|^])
""", re.VERBOSE)

_KEYWORDS = {"def", "postulate", "Path", "comp", "let", "in", "tt", "ff"}


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if not m:
            raise SyntaxError_(f"unexpected character {src[i]!r}", (line, col))
        text = m.group(0)
        kind = m.lastgroup or "sym"
        if kind == "ident" and text in _KEYWORDS:
            kind = text
        if kind not in ("ws", "comment"):
            toks.append(Token(kind, text, (line, col)))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    toks.append(Token("eof", "", (line, col)))
    return toks


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, off: int = 0) -> Token:
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise SyntaxError_(f"expected {want!r}, found {t.text!r}", t.pos)
        return self.next()

    def expect_sym(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise SyntaxError_(f"expected {text!r}, found {t.text!r}", t.pos)
        return self.next()

    def at_sym(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("sym", "arrow", "squig")

    # -- intervals and cofibrations ----------------------------------------

    def parse_interval(self) -> Interval:
        t = self.next()
        if t.kind == "number":
            if t.text == "0":
                return I0
            if t.text == "1":
                return I1
            raise SyntaxError_(f"interval literal must be 0 or 1, found {t.text}", t.pos)
        if t.kind == "ident":
            return IVar(t.text)
        raise SyntaxError_(f"expected interval expression, found {t.text!r}", t.pos)

    def parse_cof(self) -> S.Cof:
        out = self.parse_cof_and()
        while self.peek().kind == "or":
            self.next()
            out = COr(out, self.parse_cof_and())
        return out

    def parse_cof_and(self) -> S.Cof:
        out = self.parse_cof_atom()
        while self.peek().kind == "and":
            self.next()
            out = CAnd(out, self.parse_cof_atom())
        return out

    def parse_cof_atom(self) -> S.Cof:
        t = self.peek()
        if t.kind == "tt":
            self.next()
            return TOP
        if t.kind == "ff":
            self.next()
            return BOT
        if t.text == "(":
            self.next()
            c = self.parse_cof()
            self.expect_sym(")")
            return c
        l = self.parse_interval()
        self.expect_sym("=")
        r = self.parse_interval()
        return CEq(l, r)

    # -- terms ---------------------------------------------------------------

    def parse_term(self) -> Term:
        t = self.peek()
        if t.kind == "lam":
            return self.parse_lambda()
        if t.text == "<":
            return self.parse_plam()
        if t.kind == "let":
            return self.parse_let()
        if t.kind == "comp":
            return self.parse_comp()
        return self.parse_arrow()

    def parse_lambda(self) -> Term:
        pos = self.expect("lam").pos
        names = [self.expect("ident").text]
        while self.peek().kind == "ident":
            names.append(self.next().text)
        self.expect_sym(".")
        body = self.parse_term()
        for x in reversed(names):
            body = Lam(x, body).at(pos)
        return body

    def parse_plam(self) -> Term:
        pos = self.expect_sym("<").pos
        names = [self.expect("ident").text]
        while self.peek().kind == "ident":
            names.append(self.next().text)
        self.expect_sym(">")
        body = self.parse_term()
        for x in reversed(names):
            body = PLam(x, body).at(pos)
        return body

    def parse_let(self) -> Term:
        pos = self.expect("let").pos
        x = self.expect("ident").text
        self.expect_sym(":")
        ann = self.parse_term()
        self.expect_sym("=")
        bound = self.parse_term()
        self.expect("in")
        body = self.parse_term()
        return Let(x, ann, bound, body).at(pos)

    def parse_comp(self) -> Term:
        pos = self.expect("comp").pos
        self.expect_sym("^")
        ktok = self.expect("number")
        k = int(ktok.text)
        if k < 1:
            raise SyntaxError_("comp requires at least one direction (k >= 1)",
                               ktok.pos)
        self.expect_sym("(")
        dirs = [self.expect("ident").text]
        while self.peek().kind == "ident":
            dirs.append(self.next().text)
        if len(dirs) != k:
            raise SyntaxError_(f"comp^{k} binds {k} directions, found {len(dirs)}",
                               ktok.pos)
        self.expect_sym(".")
        line = self.parse_term()
        self.expect_sym(")")
        self.expect_sym("[")
        tube: list[Branch] = []
        if not self.at_sym("]"):
            tube.append(self.parse_branch(k))
            while self.at_sym("|"):
                self.next()
                tube.append(self.parse_branch(k))
        self.expect_sym("]")
        cap = self.parse_spine()
        self.expect_sym(":")
        source = self.parse_ituple(k, ktok.pos)
        self.expect("squig")
        target = self.parse_ituple(k, ktok.pos)
        return Comp(tuple(dirs), line, source, target, tuple(tube), cap).at(pos)

    def parse_branch(self, k: int) -> Branch:
        guard = self.parse_cof()
        self.expect("arrow")
        pos = self.peek().pos
        dirs = [self.expect("ident").text]
        while self.peek().kind == "ident":
            dirs.append(self.next().text)
        if len(dirs) != k:
            raise SyntaxError_(f"tube branch must bind {k} directions, found {len(dirs)}",
                               pos)
        self.expect_sym(".")
        body = self.parse_term()
        return Branch(guard, tuple(dirs), body)

    def parse_ituple(self, k: int, pos) -> tuple[Interval, ...]:
        if self.at_sym("("):
            self.next()
            out = [self.parse_interval()]
            while self.at_sym(","):
                self.next()
                out.append(self.parse_interval())
            self.expect_sym(")")
        else:
            out = [self.parse_interval()]
        if len(out) != k:
            raise SyntaxError_(f"expected {k} interval components, found {len(out)}", pos)
        return tuple(out)

    def _binder_group_ahead(self) -> bool:
        if not self.at_sym("("):
            return False
        j = 1
        while self.peek(j).kind == "ident":
            j += 1
        return j > 1 and self.peek(j).text == ":"

    def parse_arrow(self) -> Term:
        if self._binder_group_ahead():
            pos = self.expect_sym("(").pos
            names = [self.expect("ident").text]
            while self.peek().kind == "ident":
                names.append(self.next().text)
            self.expect_sym(":")
            dom = self.parse_term()
            self.expect_sym(")")
            if self.peek().kind == "arrow":
                self.next()
                body = self.parse_arrow_or_term()
                for x in reversed(names):
                    body = Pi(x, dom, body).at(pos)
                return body
            self.expect_sym("*")
            body = self.parse_sigma()
            for x in reversed(names):
                body = Sigma(x, dom, body).at(pos)
            if self.peek().kind == "arrow":
                self.next()
                return Pi("_", body, self.parse_arrow_or_term()).at(pos)
            return body
        t = self.parse_sigma()
        if self.peek().kind == "arrow":
            pos = self.next().pos
            return Pi("_", t, self.parse_arrow_or_term()).at(pos)
        return t

    def parse_arrow_or_term(self) -> Term:
        # the codomain of an arrow may again be any term form
        return self.parse_term()

    def parse_sigma(self) -> Term:
        if self._binder_group_ahead():
            return self.parse_arrow()
        t = self.parse_spine()
        if self.at_sym("*"):
            pos = self.next().pos
            return Sigma("_", t, self.parse_sigma()).at(pos)
        return t

    def parse_spine(self) -> Term:
        t = self.parse_atom()
        while True:
            nxt = self.peek()
            if nxt.text == "@" and nxt.kind == "sym":
                self.next()
                t = PApp(t, self.parse_interval()).at(nxt.pos)
            elif nxt.text == "." and self.peek(1).kind == "number":
                self.next()
                n = self.next()
                if n.text == "1":
                    t = Fst(t).at(nxt.pos)
                elif n.text == "2":
                    t = Snd(t).at(nxt.pos)
                else:
                    raise SyntaxError_("projection must be .1 or .2", n.pos)
            elif self._starts_atom(nxt):
                t = App(t, self.parse_atom()).at(nxt.pos)
            else:
                return t

    def _starts_atom(self, t: Token) -> bool:
        return (t.kind in ("ident", "Path")
                or (t.kind == "sym" and t.text == "(" and not self._binder_group_ahead()))

    def parse_atom(self) -> Term:
        t = self.peek()
        if t.kind == "ident":
            self.next()
            m = re.fullmatch(r"U([0-9]+)", t.text)
            if m:
                return U(int(m.group(1))).at(t.pos)
            return Var(t.text).at(t.pos)
        if t.kind == "Path":
            self.next()
            self.expect_sym("(")
            i = self.expect("ident").text
            self.expect_sym(".")
            line = self.parse_term()
            self.expect_sym(")")
            left = self.parse_atom()
            right = self.parse_atom()
            return PathT(i, line, left, right).at(t.pos)
        if t.text == "(":
            self.next()
            inner = self.parse_term()
            if self.at_sym(","):
                self.next()
                snd = self.parse_term()
                self.expect_sym(")")
                return Pair(inner, snd).at(t.pos)
            self.expect_sym(")")
            return inner
        raise SyntaxError_(f"expected a term, found {t.text!r}", t.pos)

    # -- declarations --------------------------------------------------------

    def parse_module(self) -> list[S.Decl]:
        decls: list[S.Decl] = []
        while self.peek().kind != "eof":
            t = self.peek()
            if t.kind == "def":
                self.next()
                name = self.expect("ident").text
                self.expect_sym(":")
                ty = self.parse_term()
                self.expect_sym("=")
                body = self.parse_term()
                decls.append(Def(name, ty, body, pos=t.pos))
            elif t.kind == "postulate":
                self.next()
                name = self.expect("ident").text
                self.expect_sym(":")
                ty = self.parse_term()
                decls.append(Postulate(name, ty, pos=t.pos))
            else:
                raise SyntaxError_(
                    f"expected 'def' or 'postulate', found {t.text!r}", t.pos)
        return decls

    def finish(self):
        t = self.peek()
        if t.kind != "eof":
            raise SyntaxError_(f"trailing input {t.text!r}", t.pos)


def parse_term(src: str, known: set[str] | None = None) -> Term:
    """Parse a standalone term.  Binders are scoped by the grammar; free
    identifiers are allowed when ``known`` is None (they resolve against a
    signature later), otherwise they must be members of ``known``."""
    p = Parser(src)
    t = p.parse_term()
    p.finish()
    if known is not None:
        for x in S.free_vars(t) - known:
            raise SyntaxError_(f"unbound identifier {x!r}", t.pos or (1, 1))
    return t


def parse_module(src: str) -> list[S.Decl]:
    return Parser(src).parse_module()


def parse_cof(src: str) -> S.Cof:
    p = Parser(src)
    c = p.parse_cof()
    p.finish()
    return c
