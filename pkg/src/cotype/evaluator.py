"""Lazy evaluation of program-terms over hyper-terms.

Head queries are answered by outermost graph reduction: arguments are
suspended thunks, and a thunk is forced only when a pattern needs its
constructor.  Every rewrite costs one unit of fuel; running out surfaces as
``Unknown("fuel")`` instead of divergence.

``finite_eval`` is a separate, plain term-rewriting engine on explicit data
terms.  It shares no code with the graph reducer beyond the equation index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .program import Match, NeedMore, Program, check_wellformed, match_equation
from .terms import (
    OUT_OF_RANGE, Address, Call, Con, ConstructorQuery, FunctionId, HyperTermSource, Known,
    OutOfRange, Term, Unknown, Var, is_data_term,
)


@dataclass(frozen=True)
class EvalConfig:
    fuel: int = 10_000
    max_depth: int = 1024
    memo: bool = True

    def __post_init__(self):
        if self.fuel < 1:
            raise ValueError("fuel must be >= 1")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


@dataclass(frozen=True)
class Yes:
    def __str__(self):
        return "yes"


@dataclass(frozen=True)
class No:
    address: Address
    left: ConstructorQuery
    right: ConstructorQuery

    def __str__(self):
        return f"no at {list(self.address)}: {self.left} vs {self.right}"


Verdict3 = Union[Yes, No, Unknown]


# --------------------------------------------------------- graph reduction

_WHNF, _CALL, _EXT, _IND, _TERM = range(5)


class _Stop(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class _Thunk:
    __slots__ = ("node", "busy")

    def __init__(self, node):
        self.node = node
        self.busy = False


class Session:
    """One evaluation context: program, valuation and a shared thunk graph.

    Not thread-safe; use one session per thread.
    """

    def __init__(self, program: Program, env: Mapping[str, HyperTermSource] | None = None,
                 cfg: EvalConfig | None = None):
        self.program = check_wellformed(program)
        self.env = dict(env or {})
        self.cfg = cfg or EvalConfig()
        self.steps = 0
        self._fuel = self.cfg.fuel
        self._vars: dict[str, _Thunk] = {}
        self._cafs: dict[FunctionId, _Thunk] = {}
        self._demand: dict[FunctionId, list] = {}

    # building
    def thunk(self, t: Term) -> _Thunk:
        return _Thunk(self._node(t, None))

    def _node(self, t: Term, binding):
        if isinstance(t, Var):
            return (_IND, binding[t.name] if binding is not None else self._var(t.name))
        if isinstance(t, Con):
            return (_WHNF, t.constructor, tuple(self._lazy(a, binding) for a in t.args))
        if not t.args and self.cfg.memo:
            caf = self._cafs.get(t.fn)
            if caf is None:
                caf = self._cafs[t.fn] = _Thunk((_CALL, t.fn, ()))
            return (_IND, caf)
        return (_CALL, t.fn, tuple(self._lazy(a, binding) for a in t.args))

    def _lazy(self, t: Term, binding) -> _Thunk:
        # subterms are built one level at a time, when first forced
        if isinstance(t, Var):
            return binding[t.name] if binding is not None else self._var(t.name)
        return _Thunk((_TERM, t, binding))

    def _var(self, name):
        th = self._vars.get(name)
        if th is None:
            if name not in self.env:
                raise KeyError(f"variable {name!r} has no value in the valuation")
            th = self._vars[name] = _Thunk((_EXT, self.env[name]))
        return th

    # forcing
    def _force(self, th: _Thunk):
        node = th.node
        if node[0] == _WHNF:
            return node
        if th.busy:
            raise _Stop("loop")
        th.busy = True
        try:
            while True:
                node = th.node
                kind = node[0]
                if kind == _WHNF:
                    return node
                if kind == _IND:
                    node = self._force(node[1])
                    th.node = node
                    return node
                if kind == _TERM:
                    th.node = self._node(node[1], node[2])
                    continue
                if kind == _EXT:
                    src = node[1]
                    q = src.query(())
                    if isinstance(q, Unknown):
                        raise _Stop(q.reason)
                    if isinstance(q, OutOfRange):
                        raise _Stop("out-of-range")
                    c = q.constructor
                    th.node = (_WHNF, c, tuple(_Thunk((_EXT, src.descend(i))) for i in range(c.arity)))
                    continue
                if self._fuel <= 0:
                    raise _Stop("fuel")
                th.node = self._rewrite(node[1], node[2])
                self._fuel -= 1
                self.steps += 1
        finally:
            th.busy = False

    def _locate(self, th, address):
        for step in address:
            th = self._force(th)[2][step]
        return th

    def _demanded(self, fn):
        """Positions every equation of ``fn`` inspects, shallowest first."""
        got = self._demand.get(fn)
        if got is None:
            sets = [{pos for pos, _ in compiled[0]} for _, compiled in self.program.compiled_for(fn)]
            common = set.intersection(*sets) if sets else set()
            got = self._demand[fn] = sorted(common, key=lambda pos: (len(pos[1]), pos))
        return got

    def _rewrite(self, fn, args):
        observed = {}
        for pos in self._demanded(fn):
            i, addr = pos
            observed[pos] = Known(self._force(self._locate(args[i], addr))[1])
        while True:
            r = match_equation(self.program, fn, observed)
            if isinstance(r, Match):
                binding = {v: self._locate(args[i], addr) for v, (i, addr) in r.binding.items()}
                return self._node(r.equation.rhs, binding)
            if isinstance(r, NeedMore):
                node = self._force(self._locate(args[r.arg], r.address))
                observed[(r.arg, r.address)] = Known(node[1])
                continue
            raise _Stop("stuck")

    # queries
    def eval_at(self, root: _Thunk, address: Address) -> ConstructorQuery:
        if len(address) > self.cfg.max_depth:
            return Unknown("depth")
        self._fuel = self.cfg.fuel
        try:
            th = root
            for step in address:
                kids = self._force(th)[2]
                if step >= len(kids):
                    return OUT_OF_RANGE
                th = kids[step]
            return Known(self._force(th)[1])
        except _Stop as e:
            return Unknown(e.reason)
        except RecursionError:
            return Unknown("depth")


def eval_at(p: Program, env: Mapping[str, HyperTermSource], t: Term, address: Address,
            cfg: EvalConfig | None = None) -> ConstructorQuery:
    s = Session(p, env, cfg)
    return s.eval_at(s.thunk(t), tuple(address))


def eval_head(p: Program, env: Mapping[str, HyperTermSource], t: Term,
              cfg: EvalConfig | None = None) -> ConstructorQuery:
    return eval_at(p, env, t, (), cfg)


class EvalSource(HyperTermSource):
    """The hyper-term denoted by a program-term under a valuation."""

    thread_safe = False

    def __init__(self, p: Program, env, t: Term, cfg: EvalConfig | None = None):
        self.program = check_wellformed(p)
        self.env = dict(env or {})
        self.term = t
        self.cfg = cfg or EvalConfig()
        self._session = Session(self.program, self.env, self.cfg)
        self._root = self._session.thunk(t)
        self._cache: dict[Address, ConstructorQuery] = {}

    def query(self, address):
        address = tuple(address)
        if not self.cfg.memo:
            s = Session(self.program, self.env, self.cfg)
            return s.eval_at(s.thunk(self.term), address)
        q = self._cache.get(address)
        if q is not None:
            return q
        # below an address that already ran out, answer the same way: keeps
        # answers independent of query order and avoids re-burning fuel
        for n in range(len(address)):
            above = self._cache.get(address[:n])
            if isinstance(above, Unknown):
                return above
        q = self._cache[address] = self._session.eval_at(self._root, address)
        return q

    def __repr__(self):
        return f"EvalSource({self.term})"


def as_source(p: Program, env, t: Term, cfg: EvalConfig | None = None) -> EvalSource:
    return EvalSource(p, env, t, cfg)


def locally_equal(p: Program, env, t: Term, q: Term, depth: int,
                  cfg: EvalConfig | None = None) -> Verdict3:
    """Compare two program-terms node by node down to ``depth``."""
    s = Session(p, env, cfg)
    left, right = s.thunk(t), s.thunk(q)
    unknown = None
    level = [()]
    while level:
        nxt = []
        for a in level:
            x, y = s.eval_at(left, a), s.eval_at(right, a)
            if isinstance(x, Unknown) or isinstance(y, Unknown):
                unknown = unknown or (x if isinstance(x, Unknown) else y)
                continue
            if x != y:
                return No(a, x, y)
            if isinstance(x, Known) and len(a) < depth:
                nxt.extend(a + (i,) for i in range(x.constructor.arity))
        level = nxt
    return unknown if unknown is not None else Yes()


# ------------------------------------------------------ finite rewriting

def _bind(pat, t, out) -> bool:
    if isinstance(pat, Var):
        out[pat.name] = t
        return True
    if not isinstance(t, Con) or t.constructor != pat.constructor:
        return False
    return all(_bind(p, a, out) for p, a in zip(pat.args, t.args))


def _subst(t, s):
    if isinstance(t, Var):
        return s[t.name]
    if isinstance(t, Con):
        return Con(t.constructor, tuple(_subst(a, s) for a in t.args))
    return Call(t.fn, tuple(_subst(a, s) for a in t.args))


def _outermost_step(p: Program, t):
    if isinstance(t, Call):
        for eq in p.equations_for(t.fn):
            s = {}
            if all(_bind(pat, a, s) for pat, a in zip(eq.patterns, t.args)):
                return _subst(eq.rhs, s)
    for i, a in enumerate(t.args):
        r = _outermost_step(p, a)
        if r is not None:
            args = t.args[:i] + (r,) + t.args[i + 1:]
            return Con(t.constructor, args) if isinstance(t, Con) else Call(t.fn, args)
    return None


def finite_eval(p: Program, f: FunctionId | str, args, step_bound: int = 10_000):
    """Rewrite ``f(args)`` leftmost-outermost until a data-term appears.

    Returns the data-term, or ``Unknown`` if no redex remains (stuck) or the
    step bound runs out.
    """
    p = check_wellformed(p)
    if isinstance(f, str):
        f = p.functions()[f]
    t = Call(f, tuple(args))
    for _ in range(step_bound):
        if is_data_term(t):
            return t
        t = _outermost_step(p, t)
        if t is None:
            return Unknown("stuck")
    return t if is_data_term(t) else Unknown("fuel")
