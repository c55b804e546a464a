"""Normalization by evaluation.

Values are weak-head normal; binders become Python closures capturing an
``Env``.  Readback is type-directed and eta-long for Pi, Sigma and Path.
Stuck comps are canonicalized on construction: all k! direction permutations
are compared under a fixed total term order and the least one is kept, which
turns the equivariance equations into definitional laws.

Conversion splits the ambient cofibration context into DNF conjuncts, applies
the interval identifications each conjunct forces, renormalizes and compares;
guards of systems are compared by entailment in both directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import cof
from .config import CONFIG
from .syntax import (Branch, CEq, Cof, Comp, Fst, I0, I1, IVar,
                     Interval, Lam, Let, Pair, PApp, PathT, Pi, PLam, Sigma,
                     Snd, Term, U, Var, App, cof_and, fresh, subst_cof,
                     subst_interval, term_key)


class KernelError(Exception):
    """Internal invariant violation (a kernel bug, not a user error)."""


class PermutationBoundExceeded(Exception):
    def __init__(self, k: int, bound: int):
        super().__init__(
            f"stuck comp of dimension {k} exceeds permutation bound {bound}")
        self.k = k
        self.bound = bound


# ---------------------------------------------------------------------------
# values

@dataclass(eq=False)
class VPi:
    dom: "Value"
    cod: Callable[["Value"], "Value"]
    hint: str = "x"


@dataclass(eq=False)
class VSigma:
    dom: "Value"
    cod: Callable[["Value"], "Value"]
    hint: str = "x"


@dataclass(eq=False)
class VPathT:
    line: Callable[[Interval], "Value"]
    left: "Value"
    right: "Value"
    hint: str = "i"


@dataclass(eq=False)
class VLam:
    fn: Callable[["Value"], "Value"]
    hint: str = "x"


@dataclass(eq=False)
class VPair:
    fst: "Value"
    snd: "Value"


@dataclass(eq=False)
class VPLam:
    fn: Callable[[Interval], "Value"]
    hint: str = "i"


@dataclass(eq=False)
class VU:
    level: int


@dataclass(eq=False)
class VNe:
    ne: "Ne"
    ty: Optional["Value"]


Value = VPi | VSigma | VPathT | VLam | VPair | VPLam | VU | VNe


@dataclass(eq=False)
class NVar:
    name: str
    ty: Optional[Value]


@dataclass(eq=False)
class NApp:
    fn: "Ne"
    arg: Value


@dataclass(eq=False)
class NFst:
    arg: "Ne"


@dataclass(eq=False)
class NSnd:
    arg: "Ne"


@dataclass(eq=False)
class NPApp:
    fn: "Ne"
    arg: Interval


@dataclass(eq=False)
class NComp:
    """A stuck comp, stored as its canonical representative modulo Sigma_k."""
    dirs: tuple[str, ...]
    line: Callable[..., Value]
    source: tuple[Interval, ...]
    target: tuple[Interval, ...]
    tube: tuple[tuple[Cof, Callable[..., Value]], ...]
    cap: Value


Ne = NVar | NApp | NFst | NSnd | NPApp | NComp


def neutral_var(name: str, ty: Optional[Value]) -> VNe:
    return VNe(NVar(name, ty), ty)


# ---------------------------------------------------------------------------
# environments and contexts

@dataclass(frozen=True)
class Env:
    terms: dict[str, Value] = field(default_factory=dict)
    ivals: dict[str, Interval] = field(default_factory=dict)
    hyps: tuple[Cof, ...] = ()

    def bind_term(self, x: str, v: Value) -> "Env":
        return Env({**self.terms, x: v}, self.ivals, self.hyps)

    def bind_ivars(self, xs: tuple[str, ...], rs: tuple[Interval, ...]) -> "Env":
        return Env(self.terms, {**self.ivals, **dict(zip(xs, rs))}, self.hyps)

    def with_hyp(self, phi: Cof) -> "Env":
        return Env(self.terms, self.ivals, self.hyps + (phi,))


@dataclass(frozen=True)
class TermBind:
    name: str
    ty: Value


@dataclass(frozen=True)
class IntervalBind:
    name: str


@dataclass(frozen=True)
class CofRestriction:
    cof: Cof


Entry = TermBind | IntervalBind | CofRestriction


@dataclass(frozen=True)
class Context:
    """Telescope of semantic bindings and restrictions."""
    entries: tuple[Entry, ...] = ()

    @property
    def hyps(self) -> tuple[Cof, ...]:
        return tuple(e.cof for e in self.entries if isinstance(e, CofRestriction))

    def ivar_names(self) -> set[str]:
        return {e.name for e in self.entries if isinstance(e, IntervalBind)}

    def bind_term(self, hint: str, ty: Value) -> tuple["Context", VNe]:
        x = fresh(hint)
        v = neutral_var(x, ty)
        return Context(self.entries + (TermBind(x, ty),)), v

    def bind_ivar(self, hint: str) -> tuple["Context", IVar]:
        x = fresh(hint)
        return Context(self.entries + (IntervalBind(x),)), IVar(x)

    def restrict(self, phi: Cof) -> "Context":
        return Context(self.entries + (CofRestriction(phi),))

    def env(self, assign: dict[str, Interval] | None = None) -> Env:
        """The evaluation environment of the telescope.

        With ``assign``, interval variables are sent through the given
        substitution and the types of term variables are reindexed along it.
        """
        assign = assign or {}
        terms: dict[str, Value] = {}
        ivals: dict[str, Interval] = {}
        hyps: list[Cof] = []
        for e in self.entries:
            if isinstance(e, IntervalBind):
                ivals[e.name] = assign.get(e.name, IVar(e.name))
            elif isinstance(e, TermBind):
                ty = e.ty
                if assign:
                    ty = eval_term(Env(dict(terms), dict(ivals), tuple(hyps)),
                                   quote_type(ty))
                terms[e.name] = neutral_var(e.name, ty)
            else:
                hyps.append(subst_cof(e.cof, assign) if assign else e.cof)
        return Env(terms, ivals, tuple(hyps))


# ---------------------------------------------------------------------------
# eliminators

def do_app(f: Value, a: Value) -> Value:
    match f:
        case VLam(fn, _):
            return fn(a)
        case VNe(ne, VPi(dom, cod, _) as ty):
            return VNe(NApp(ne, a), cod(a))
        case VNe(ne, ty):
            return VNe(NApp(ne, a), None)
    raise KernelError(f"cannot apply non-function value {f!r}")


def do_fst(p: Value) -> Value:
    match p:
        case VPair(a, _):
            return a
        case VNe(ne, VSigma(dom, _, _)):
            return VNe(NFst(ne), dom)
        case VNe(ne, _):
            return VNe(NFst(ne), None)
    raise KernelError(f"cannot project from {p!r}")


def do_snd(p: Value) -> Value:
    match p:
        case VPair(_, b):
            return b
        case VNe(ne, VSigma(dom, cod, _)):
            return VNe(NSnd(ne), cod(do_fst(p)))
        case VNe(ne, _):
            return VNe(NSnd(ne), None)
    raise KernelError(f"cannot project from {p!r}")


def do_papp(p: Value, r: Interval) -> Value:
    match p:
        case VPLam(fn, _):
            return fn(r)
        case VNe(ne, VPathT(line, left, right, _)):
            if r == I0:
                return left
            if r == I1:
                return right
            return VNe(NPApp(ne, r), line(r))
        case VNe(ne, _):
            return VNe(NPApp(ne, r), None)
    raise KernelError(f"cannot apply path value {p!r}")


# ---------------------------------------------------------------------------
# evaluation

def eval_interval(env: Env, r: Interval) -> Interval:
    return subst_interval(r, env.ivals)


def eval_cof(env: Env, phi: Cof) -> Cof:
    return subst_cof(phi, env.ivals)


def eval_term(env: Env, t: Term) -> Value:
    match t:
        case Var(x):
            try:
                return env.terms[x]
            except KeyError:
                raise KernelError(f"unbound variable {x!r} during evaluation")
        case U(n):
            return VU(n)
        case Pi(x, a, b):
            return VPi(eval_term(env, a),
                       lambda v: eval_term(env.bind_term(x, v), b), hint=x)
        case Sigma(x, a, b):
            return VSigma(eval_term(env, a),
                          lambda v: eval_term(env.bind_term(x, v), b), hint=x)
        case Lam(x, e):
            return VLam(lambda v: eval_term(env.bind_term(x, v), e), hint=x)
        case App(f, a):
            return do_app(eval_term(env, f), eval_term(env, a))
        case Pair(a, b):
            return VPair(eval_term(env, a), eval_term(env, b))
        case Fst(a):
            return do_fst(eval_term(env, a))
        case Snd(a):
            return do_snd(eval_term(env, a))
        case PathT(i, l, a, b):
            return VPathT(lambda r: eval_term(env.bind_ivars((i,), (r,)), l),
                          eval_term(env, a), eval_term(env, b), hint=i)
        case PLam(i, e):
            return VPLam(lambda r: eval_term(env.bind_ivars((i,), (r,)), e),
                         hint=i)
        case PApp(f, r):
            return do_papp(eval_term(env, f), eval_interval(env, r))
        case Let(x, _, bound, body):
            return eval_term(env.bind_term(x, eval_term(env, bound)), body)
        case Comp(dirs, line, src, tgt, tube, cap):
            from .kan import CompProblem, comp_eval  # deferred: kan imports us

            def line_cl(*ivs, _line=line, _dirs=dirs):
                return eval_term(env.bind_ivars(_dirs, ivs), _line)

            tube_cl = []
            for br in tube:
                def body_cl(*ivs, _b=br):
                    return eval_term(env.bind_ivars(_b.dirs, ivs), _b.body)
                tube_cl.append((eval_cof(env, br.guard), body_cl))
            problem = CompProblem(
                dirs=dirs,
                line=line_cl,
                source=tuple(eval_interval(env, r) for r in src),
                target=tuple(eval_interval(env, r) for r in tgt),
                tube=tuple(tube_cl),
                cap=eval_term(env, cap))
            return comp_eval(problem, env.hyps)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# readback

def quote(ty: Value, v: Value) -> Term:
    """Type-directed, eta-long readback."""
    match ty:
        case VPi(dom, cod, hint):
            x = fresh(hint)
            xv = neutral_var(x, dom)
            return Lam(x, quote(cod(xv), do_app(v, xv)))
        case VSigma(dom, cod, _):
            a = do_fst(v)
            return Pair(quote(dom, a), quote(cod(a), do_snd(v)))
        case VPathT(line, _, _, hint):
            i = fresh(hint)
            iv = IVar(i)
            return PLam(i, quote(line(iv), do_papp(v, iv)))
        case VU(_):
            return quote_type(v)
        case VNe(_, _):
            if isinstance(v, VNe):
                return quote_ne(v.ne)[0]
            raise KernelError(f"non-neutral value {v!r} at neutral type")
        case None:
            pass
    if isinstance(v, VNe):
        return quote_ne(v.ne)[0]
    raise KernelError(f"cannot quote {v!r} at type {ty!r}")


def quote_type(v: Value) -> Term:
    match v:
        case VU(n):
            return U(n)
        case VPi(dom, cod, hint):
            x = fresh(hint)
            return Pi(x, quote_type(dom), quote_type(cod(neutral_var(x, dom))))
        case VSigma(dom, cod, hint):
            x = fresh(hint)
            return Sigma(x, quote_type(dom), quote_type(cod(neutral_var(x, dom))))
        case VPathT(line, left, right, hint):
            i = fresh(hint)
            return PathT(i, quote_type(line(IVar(i))),
                         quote(line(I0), left), quote(line(I1), right))
        case VNe(ne, _):
            return quote_ne(ne)[0]
    raise KernelError(f"value is not a type: {v!r}")


def quote_ne(ne: Ne) -> tuple[Term, Optional[Value]]:
    """Readback of a neutral, synthesizing its type along the spine."""
    match ne:
        case NVar(x, ty):
            return Var(x), ty
        case NApp(fn, arg):
            t, ty = quote_ne(fn)
            if not isinstance(ty, VPi):
                raise KernelError("application head is not a Pi")
            return App(t, quote(ty.dom, arg)), ty.cod(arg)
        case NFst(inner):
            t, ty = quote_ne(inner)
            if not isinstance(ty, VSigma):
                raise KernelError("projection head is not a Sigma")
            return Fst(t), ty.dom
        case NSnd(inner):
            t, ty = quote_ne(inner)
            if not isinstance(ty, VSigma):
                raise KernelError("projection head is not a Sigma")
            return Snd(t), ty.cod(do_fst(VNe(inner, ty)))
        case NPApp(fn, r):
            t, ty = quote_ne(fn)
            if not isinstance(ty, VPathT):
                raise KernelError("path application head is not a Path")
            return PApp(t, r), ty.line(r)
        case NComp() as nc:
            return quote_ncomp(nc), nc.line(*nc.target)
    raise TypeError(ne)


def quote_ncomp(nc: NComp) -> Comp:
    names = tuple(fresh(d) for d in nc.dirs)
    ivs = tuple(IVar(n) for n in names)
    line_t = quote_type(nc.line(*ivs))
    tube_t = []
    for g, u in nc.tube:
        bnames = tuple(fresh(d) for d in nc.dirs)
        bivs = tuple(IVar(n) for n in bnames)
        tube_t.append(Branch(g, bnames, quote(nc.line(*bivs), u(*bivs))))
    cap_t = quote(nc.line(*nc.source), nc.cap)
    return Comp(names, line_t, nc.source, nc.target, tuple(tube_t), cap_t)


# ---------------------------------------------------------------------------
# stuck comps and canonicalization

def _apply_perm(perm: tuple[int, ...], xs: tuple) -> tuple:
    return tuple(xs[p] for p in perm)


def _invert(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def sigma_transform(dirs, line, source, target, tube, cap, perm):
    """The equivariance rewrite: permute the direction binders of the line
    and tube, inversely permute the source and target tuples."""
    inv = _invert(perm)

    def line2(*ivs):
        return line(*_apply_perm(perm, ivs))

    tube2 = tuple(
        (g, (lambda *ivs, _u=u: _u(*_apply_perm(perm, ivs))))
        for g, u in tube)
    return (_apply_perm(perm, dirs), line2, _apply_perm(inv, source),
            _apply_perm(inv, target), tube2, cap)


def canonicalize_stuck_comp(nc: NComp) -> NComp:
    """Lexicographically least representative of the Sigma_k orbit.

    Idempotent; the k! candidates are compared by the total term order on
    their readbacks.
    """
    k = len(nc.dirs)
    if k > CONFIG.k_max:
        raise PermutationBoundExceeded(k, CONFIG.k_max)
    if k == 1:
        return nc
    best = None
    best_key = None
    for perm in itertools.permutations(range(k)):
        cand = NComp(*sigma_transform(nc.dirs, nc.line, nc.source, nc.target,
                                      nc.tube, nc.cap, perm))
        key = term_key(quote_ncomp(cand))
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def make_stuck(dirs, line, source, target, tube, cap, hyps) -> VNe:
    # branches whose guard is inconsistent with the restrictions are pruned,
    # so systems are compared up to logical equivalence of their guards
    live = tuple((g, u) for g, u in tube if cof.satisfiable_with(hyps, g))
    nc = canonicalize_stuck_comp(NComp(dirs, line, source, target, live, cap))
    return VNe(nc, nc.line(*nc.target))


# ---------------------------------------------------------------------------
# conversion

def _assignment(conj) -> dict[str, Interval]:
    """The interval substitution a consistent conjunct forces: every variable
    is sent to its congruence-class representative (0 and 1 win)."""
    uf = cof.closure(conj)
    if uf is None:
        raise KernelError("inconsistent conjunct reached conversion")
    classes: dict = {}
    for key in list(uf.parent):
        classes.setdefault(uf.find(key), []).append(key)
    assign: dict[str, Interval] = {}
    for members in classes.values():
        members.sort()
        rep = members[0]
        rep_iv: Interval
        if rep == (0,):
            rep_iv = I0
        elif rep == (1,):
            rep_iv = I1
        else:
            rep_iv = IVar(rep[1])
        for m in members:
            if m[0] == 2:
                assign[m[1]] = rep_iv
    return assign


def _conj_cofs(conj) -> tuple[Cof, ...]:
    def dec(key) -> Interval:
        if key == (0,):
            return I0
        if key == (1,):
            return I1
        return IVar(key[1])
    return tuple(CEq(dec(a), dec(b)) for a, b in sorted(conj))


def convert(ctx: Context, ty: Value, v1: Value, v2: Value) -> bool:
    """Definitional equality under the context's restrictions."""
    return _convert_quoted(ctx, lambda: (quote_type(ty), quote(ty, v1), quote(ty, v2)))


def convert_types(ctx: Context, ty1: Value, ty2: Value) -> bool:
    return _convert_quoted(ctx, lambda: (None, quote_type(ty1), quote_type(ty2)))


def _convert_quoted(ctx: Context, quoter) -> bool:
    dnf = cof.to_dnf(cof_and(*ctx.hyps))
    if dnf == ():
        return True  # inconsistent restriction: everything converts
    ty_t, t1, t2 = quoter()
    for conj in dnf:
        assign = _assignment(conj)
        env = ctx.env(assign)
        hyps = _conj_cofs(conj)
        if ty_t is None:
            n1 = quote_type(eval_term(env, t1))
            n2 = quote_type(eval_term(env, t2))
        else:
            ty_v = eval_term(env, ty_t)
            n1 = quote(ty_v, eval_term(env, t1))
            n2 = quote(ty_v, eval_term(env, t2))
        if not terms_equal(hyps, n1, n2):
            return False
    return True


# structural comparison modulo cofibration equivalence ----------------------

def _ieq(hyps, ren: dict[str, str], r1: Interval, r2: Interval) -> bool:
    if isinstance(r2, IVar):
        r2 = IVar(ren.get(r2.name, r2.name))
    return cof.interval_eq(hyps, r1, r2)


def _ren_cof(phi: Cof, ren: dict[str, str]) -> Cof:
    return subst_cof(phi, {a: IVar(b) for a, b in ren.items()})


def terms_equal(hyps, t1: Term, t2: Term, ren: dict[str, str] | None = None) -> bool:
    """Alpha comparison; intervals and guards are compared by entailment
    under the hypotheses, and pruned/equivalent systems are identified."""
    ren = ren or {}
    match (t1, t2):
        case (Var(x), Var(y)):
            return x == ren.get(y, y)
        case (U(n), U(m)):
            return n == m
        case (Pi(x, a, b), Pi(y, c, d)) | (Sigma(x, a, b), Sigma(y, c, d)):
            return (type(t1) is type(t2)
                    and terms_equal(hyps, a, c, ren)
                    and terms_equal(hyps, b, d, {**ren, y: x}))
        case (Lam(x, e), Lam(y, f)):
            return terms_equal(hyps, e, f, {**ren, y: x})
        case (App(f, a), App(g, b)):
            return terms_equal(hyps, f, g, ren) and terms_equal(hyps, a, b, ren)
        case (Pair(a, b), Pair(c, d)):
            return terms_equal(hyps, a, c, ren) and terms_equal(hyps, b, d, ren)
        case (Fst(a), Fst(b)) | (Snd(a), Snd(b)):
            return type(t1) is type(t2) and terms_equal(hyps, a, b, ren)
        case (PathT(i, l, a, b), PathT(j, m, c, d)):
            return (terms_equal(hyps, l, m, {**ren, j: i})
                    and terms_equal(hyps, a, c, ren)
                    and terms_equal(hyps, b, d, ren))
        case (PLam(i, e), PLam(j, f)):
            return terms_equal(hyps, e, f, {**ren, j: i})
        case (PApp(f, r), PApp(g, s)):
            return terms_equal(hyps, f, g, ren) and _ieq(hyps, ren, r, s)
        case (Comp() as c1, Comp() as c2):
            return _comps_equal(hyps, c1, c2, ren)
        case (Let(x, a1, b1, e1), Let(y, a2, b2, e2)):
            return (terms_equal(hyps, a1, a2, ren)
                    and terms_equal(hyps, b1, b2, ren)
                    and terms_equal(hyps, e1, e2, {**ren, y: x}))
    return False


def _comps_equal(hyps, c1: Comp, c2: Comp, ren) -> bool:
    if len(c1.dirs) != len(c2.dirs):
        return False
    ren2 = {**ren, **dict(zip(c2.dirs, c1.dirs))}
    if not terms_equal(hyps, c1.line, c2.line, ren2):
        return False
    for r, s in zip(c1.source + c1.target, c2.source + c2.target):
        if not _ieq(hyps, ren, r, s):
            return False
    live1 = [b for b in c1.tube if cof.satisfiable_with(hyps, b.guard)]
    live2 = [b for b in c2.tube
             if cof.satisfiable_with(hyps, _ren_cof(b.guard, ren))]
    if len(live1) != len(live2):
        return False
    for b1, b2 in zip(live1, live2):
        g2 = _ren_cof(b2.guard, ren)
        if not cof.equivalent(hyps, b1.guard, g2):
            return False
        bren = {**ren, **dict(zip(b2.dirs, b1.dirs))}
        if not terms_equal(tuple(hyps) + (b1.guard,), b1.body, b2.body, bren):
            return False
    return terms_equal(hyps, c1.cap, c2.cap, ren)
