"""Abstract syntax for the kernel language.

Terms, interval expressions and cofibrations are immutable trees.  Bound
variables are plain names; all operations that move terms under binders
(substitution, comparison) rename on the fly, so shadowing in the input is
harmless.  Generated names contain a ``%`` which the lexer rejects, keeping
them disjoint from anything a source file can mention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

Pos = tuple[int, int]  # (line, column), 1-based


# ---------------------------------------------------------------------------
# interval expressions

@dataclass(frozen=True)
class IVar:
    name: str

    def __repr__(self):
        return f"IVar({self.name})"


@dataclass(frozen=True)
class IZero:
    def __repr__(self):
        return "I0"


@dataclass(frozen=True)
class IOne:
    def __repr__(self):
        return "I1"


I0 = IZero()
I1 = IOne()

Interval = IVar | IZero | IOne


def subst_interval(r: Interval, ivars: dict[str, Interval]) -> Interval:
    if isinstance(r, IVar) and r.name in ivars:
        return ivars[r.name]
    return r


def interval_vars(r: Interval) -> set[str]:
    return {r.name} if isinstance(r, IVar) else set()


# ---------------------------------------------------------------------------
# cofibrations

@dataclass(frozen=True)
class CTop:
    pass


@dataclass(frozen=True)
class CBot:
    pass


@dataclass(frozen=True)
class CEq:
    lhs: Interval
    rhs: Interval


@dataclass(frozen=True)
class CAnd:
    lhs: "Cof"
    rhs: "Cof"


@dataclass(frozen=True)
class COr:
    lhs: "Cof"
    rhs: "Cof"


Cof = CTop | CBot | CEq | CAnd | COr

TOP = CTop()
BOT = CBot()


def cof_and(*cs: Cof) -> Cof:
    acc: Cof = TOP
    for c in cs:
        if isinstance(c, CTop):
            continue
        acc = c if isinstance(acc, CTop) else CAnd(acc, c)
    return acc


def cof_or(*cs: Cof) -> Cof:
    acc: Cof = BOT
    for c in cs:
        if isinstance(c, CBot):
            continue
        acc = c if isinstance(acc, CBot) else COr(acc, c)
    return acc


def subst_cof(phi: Cof, ivars: dict[str, Interval]) -> Cof:
    match phi:
        case CTop() | CBot():
            return phi
        case CEq(l, r):
            return CEq(subst_interval(l, ivars), subst_interval(r, ivars))
        case CAnd(l, r):
            return CAnd(subst_cof(l, ivars), subst_cof(r, ivars))
        case COr(l, r):
            return COr(subst_cof(l, ivars), subst_cof(r, ivars))
    raise TypeError(phi)


def cof_vars(phi: Cof) -> set[str]:
    match phi:
        case CTop() | CBot():
            return set()
        case CEq(l, r):
            return interval_vars(l) | interval_vars(r)
        case CAnd(l, r) | COr(l, r):
            return cof_vars(l) | cof_vars(r)
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# terms

@dataclass(eq=False)
class Term:
    pos: Optional[Pos] = field(default=None, init=False, repr=False)

    def at(self, pos: Optional[Pos]) -> "Term":
        self.pos = pos
        return self


@dataclass(eq=False)
class Var(Term):
    name: str


@dataclass(eq=False)
class Pi(Term):
    binder: str
    dom: Term
    cod: Term


@dataclass(eq=False)
class Lam(Term):
    binder: str
    body: Term


@dataclass(eq=False)
class App(Term):
    fn: Term
    arg: Term


@dataclass(eq=False)
class Sigma(Term):
    binder: str
    fst_ty: Term
    snd_ty: Term


@dataclass(eq=False)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(eq=False)
class Fst(Term):
    arg: Term


@dataclass(eq=False)
class Snd(Term):
    arg: Term


@dataclass(eq=False)
class PathT(Term):
    binder: str
    line: Term
    left: Term
    right: Term


@dataclass(eq=False)
class PLam(Term):
    binder: str
    body: Term


@dataclass(eq=False)
class PApp(Term):
    fn: Term
    arg: Interval


@dataclass(eq=False)
class U(Term):
    level: int


@dataclass(eq=False)
class Branch:
    """One tube branch ``guard -> dirs. body``; binds the comp's directions."""
    guard: Cof
    dirs: tuple[str, ...]
    body: Term


@dataclass(eq=False)
class Comp(Term):
    """k-ary composition ``comp^k (dirs. line) [tube] cap : source ~> target``."""
    dirs: tuple[str, ...]
    line: Term
    source: tuple[Interval, ...]
    target: tuple[Interval, ...]
    tube: tuple[Branch, ...]
    cap: Term


@dataclass(eq=False)
class Let(Term):
    binder: str
    ann: Term
    bound: Term
    body: Term


# declarations

@dataclass(eq=False)
class Def:
    name: str
    ty: Term
    body: Term
    pos: Optional[Pos] = None


@dataclass(eq=False)
class Postulate:
    name: str
    ty: Term
    pos: Optional[Pos] = None


Decl = Def | Postulate


# ---------------------------------------------------------------------------
# fresh names

_counter = itertools.count()


def fresh(hint: str = "x") -> str:
    """A name no source file can contain (the lexer rejects '%')."""
    base = hint.split("%")[0] or "x"
    return f"{base}%{next(_counter)}"


# ---------------------------------------------------------------------------
# free variables

def free_vars(t: Term) -> set[str]:
    """Free term variables."""
    match t:
        case Var(x):
            return {x}
        case Pi(x, a, b) | Sigma(x, a, b):
            return free_vars(a) | (free_vars(b) - {x})
        case Lam(x, e):
            return free_vars(e) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Pair(a, b):
            return free_vars(a) | free_vars(b)
        case Fst(a) | Snd(a):
            return free_vars(a)
        case PathT(_, l, a, b):
            return free_vars(l) | free_vars(a) | free_vars(b)
        case PLam(_, e):
            return free_vars(e)
        case PApp(f, _):
            return free_vars(f)
        case U(_):
            return set()
        case Comp(_, line, _, _, tube, cap):
            out = free_vars(line) | free_vars(cap)
            for br in tube:
                out |= free_vars(br.body)
            return out
        case Let(x, ann, bound, body):
            return free_vars(ann) | free_vars(bound) | (free_vars(body) - {x})
    raise TypeError(t)


def free_ivars(t: Term) -> set[str]:
    """Free interval variables."""
    match t:
        case Var(_) | U(_):
            return set()
        case Pi(_, a, b) | Sigma(_, a, b):
            return free_ivars(a) | free_ivars(b)
        case Lam(_, e):
            return free_ivars(e)
        case App(f, a) | Pair(f, a):
            return free_ivars(f) | free_ivars(a)
        case Fst(a) | Snd(a):
            return free_ivars(a)
        case PathT(i, l, a, b):
            return (free_ivars(l) - {i}) | free_ivars(a) | free_ivars(b)
        case PLam(i, e):
            return free_ivars(e) - {i}
        case PApp(f, r):
            return free_ivars(f) | interval_vars(r)
        case Comp(dirs, line, src, tgt, tube, cap):
            out = free_ivars(line) - set(dirs)
            for r in src + tgt:
                out |= interval_vars(r)
            for br in tube:
                out |= cof_vars(br.guard)
                out |= free_ivars(br.body) - set(br.dirs)
            return out | free_ivars(cap)
        case Let(_, ann, bound, body):
            return free_ivars(ann) | free_ivars(bound) | free_ivars(body)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# substitution

def substitute(t: Term,
               terms: dict[str, Term] | None = None,
               ivars: dict[str, Interval] | None = None) -> Term:
    """Simultaneous capture-avoiding substitution of terms and intervals."""
    return _subst(t, dict(terms or {}), dict(ivars or {}))


def _img_fvs(terms: dict[str, Term]) -> set[str]:
    out: set[str] = set()
    for v in terms.values():
        out |= free_vars(v)
    return out


def _img_ivs(terms: dict[str, Term], ivars: dict[str, Interval]) -> set[str]:
    out: set[str] = set()
    for v in terms.values():
        out |= free_ivars(v)
    for r in ivars.values():
        out |= interval_vars(r)
    return out


def _bind_term(x: str, terms: dict[str, Term], ivars: dict[str, Interval]):
    """Refresh a term binder when it would capture or be substituted."""
    terms = {k: v for k, v in terms.items() if k != x}
    if x in _img_fvs(terms):
        x2 = fresh(x)
        terms[x] = Var(x2)
        return x2, terms, ivars
    return x, terms, ivars


def _bind_ivars(xs: tuple[str, ...], terms: dict[str, Term],
                ivars: dict[str, Interval]):
    ivars = {k: v for k, v in ivars.items() if k not in xs}
    clash = _img_ivs(terms, ivars)
    out = []
    for x in xs:
        if x in clash:
            x2 = fresh(x)
            ivars[x] = IVar(x2)
            out.append(x2)
        else:
            out.append(x)
    return tuple(out), terms, ivars


def _subst(t: Term, terms: dict[str, Term], ivars: dict[str, Interval]) -> Term:
    match t:
        case Var(x):
            return terms.get(x, t)
        case Pi(x, a, b):
            a2 = _subst(a, terms, ivars)
            x2, ts, vs = _bind_term(x, terms, ivars)
            return Pi(x2, a2, _subst(b, ts, vs))
        case Sigma(x, a, b):
            a2 = _subst(a, terms, ivars)
            x2, ts, vs = _bind_term(x, terms, ivars)
            return Sigma(x2, a2, _subst(b, ts, vs))
        case Lam(x, e):
            x2, ts, vs = _bind_term(x, terms, ivars)
            return Lam(x2, _subst(e, ts, vs))
        case App(f, a):
            return App(_subst(f, terms, ivars), _subst(a, terms, ivars))
        case Pair(a, b):
            return Pair(_subst(a, terms, ivars), _subst(b, terms, ivars))
        case Fst(a):
            return Fst(_subst(a, terms, ivars))
        case Snd(a):
            return Snd(_subst(a, terms, ivars))
        case PathT(i, l, a, b):
            a2 = _subst(a, terms, ivars)
            b2 = _subst(b, terms, ivars)
            (i2,), ts, vs = _bind_ivars((i,), terms, ivars)
            return PathT(i2, _subst(l, ts, vs), a2, b2)
        case PLam(i, e):
            (i2,), ts, vs = _bind_ivars((i,), terms, ivars)
            return PLam(i2, _subst(e, ts, vs))
        case PApp(f, r):
            return PApp(_subst(f, terms, ivars), subst_interval(r, ivars))
        case U(_):
            return t
        case Comp(dirs, line, src, tgt, tube, cap):
            src2 = tuple(subst_interval(r, ivars) for r in src)
            tgt2 = tuple(subst_interval(r, ivars) for r in tgt)
            dirs2, ts, vs = _bind_ivars(dirs, terms, ivars)
            line2 = _subst(line, ts, vs)
            tube2 = []
            for br in tube:
                g2 = subst_cof(br.guard, ivars)
                bdirs2, bts, bvs = _bind_ivars(br.dirs, terms, ivars)
                tube2.append(Branch(g2, bdirs2, _subst(br.body, bts, bvs)))
            return Comp(dirs2, line2, src2, tgt2, tuple(tube2),
                        _subst(cap, terms, ivars))
        case Let(x, ann, bound, body):
            ann2 = _subst(ann, terms, ivars)
            bound2 = _subst(bound, terms, ivars)
            x2, ts, vs = _bind_term(x, terms, ivars)
            return Let(x2, ann2, bound2, _subst(body, ts, vs))
    raise TypeError(t)


# ---------------------------------------------------------------------------
# alpha equality and a total order on terms

def _ikey(r: Interval, env: dict[str, int]):
    match r:
        case IZero():
            return (0,)
        case IOne():
            return (1,)
        case IVar(x):
            if x in env:
                return (2, env[x])
            return (3, x)
    raise TypeError(r)


def _cofkey(phi: Cof, env: dict[str, int]):
    match phi:
        case CTop():
            return ("ct",)
        case CBot():
            return ("cb",)
        case CEq(l, r):
            a, b = sorted((_ikey(l, env), _ikey(r, env)))
            return ("ce", a, b)
        case CAnd(l, r):
            return ("ca", _cofkey(l, env), _cofkey(r, env))
        case COr(l, r):
            return ("co", _cofkey(l, env), _cofkey(r, env))
    raise TypeError(phi)


def term_key(t: Term, _env: dict[str, int] | None = None, _depth: int = 0):
    """A nested-tuple key: alpha-invariant, totally ordered, hashable.

    Binders are numbered by depth (de Bruijn levels), so alpha-equal terms get
    equal keys; the ordering is the fixed total order used to pick canonical
    representatives of stuck comps.
    """
    env = _env if _env is not None else {}

    def under(names: tuple[str, ...]):
        e2 = dict(env)
        d = _depth
        for n in names:
            e2[n] = d
            d += 1
        return e2, d

    match t:
        case Var(x):
            if x in env:
                return ("b", env[x])
            return ("v", x)
        case Pi(x, a, b):
            e2, d = under((x,))
            return ("pi", term_key(a, env, _depth), term_key(b, e2, d))
        case Sigma(x, a, b):
            e2, d = under((x,))
            return ("sg", term_key(a, env, _depth), term_key(b, e2, d))
        case Lam(x, e):
            e2, d = under((x,))
            return ("lam", term_key(e, e2, d))
        case App(f, a):
            return ("app", term_key(f, env, _depth), term_key(a, env, _depth))
        case Pair(a, b):
            return ("pr", term_key(a, env, _depth), term_key(b, env, _depth))
        case Fst(a):
            return ("p1", term_key(a, env, _depth))
        case Snd(a):
            return ("p2", term_key(a, env, _depth))
        case PathT(i, l, a, b):
            e2, d = under((i,))
            return ("pt", term_key(l, e2, d), term_key(a, env, _depth),
                    term_key(b, env, _depth))
        case PLam(i, e):
            e2, d = under((i,))
            return ("plam", term_key(e, e2, d))
        case PApp(f, r):
            return ("papp", term_key(f, env, _depth), _ikey(r, env))
        case U(n):
            return ("u", n)
        case Comp(dirs, line, src, tgt, tube, cap):
            e2, d = under(dirs)
            parts = [("comp", len(dirs)), term_key(line, e2, d),
                     tuple(_ikey(r, env) for r in src),
                     tuple(_ikey(r, env) for r in tgt)]
            for br in tube:
                be, bd = under(br.dirs)
                parts.append((_cofkey(br.guard, env), term_key(br.body, be, bd)))
            parts.append(term_key(cap, env, _depth))
            return tuple(parts)
        case Let(x, ann, bound, body):
            e2, d = under((x,))
            return ("let", term_key(ann, env, _depth),
                    term_key(bound, env, _depth), term_key(body, e2, d))
    raise TypeError(t)


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Equality up to renaming of bound variables."""
    return term_key(t1) == term_key(t2)


def cof_key(phi: Cof):
    return _cofkey(phi, {})
