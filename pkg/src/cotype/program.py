"""Equational programs: left-linear, pairwise non-unifiable equations."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Union

from .errors import CotypeError
from .terms import (
    Address, Call, Con, ConstructorQuery, FunctionId, HyperTermSource, Known, Term, Unknown, Var,
    Vocabulary, is_base_term, variables,
)


class ProgramError(CotypeError):
    pass


class NonLinearPattern(ProgramError):
    def __init__(self, equation, variable, location=None):
        super().__init__(f"variable {variable!r} repeats in the patterns of {equation}", location)
        self.equation = equation
        self.variable = variable


class UnboundRhsVariable(ProgramError):
    def __init__(self, equation, variable, location=None):
        super().__init__(f"right-hand side variable {variable!r} not bound in {equation}", location)
        self.equation = equation
        self.variable = variable


class IncompatiblePair(ProgramError):
    def __init__(self, eq1, eq2, unifier, location=None):
        shown = ", ".join(f"{k} -> {v}" for k, v in sorted(unifier.items()))
        super().__init__(f"left-hand sides unify: {eq1}  /  {eq2}  via {{{shown}}}", location)
        self.equations = (eq1, eq2)
        self.unifier = unifier


@dataclass(frozen=True)
class ProgramEquation:
    fn: FunctionId
    patterns: tuple[Term, ...]
    rhs: Term
    # source position for diagnostics; not part of identity
    location: tuple[int, int] | None = field(default=None, compare=False)

    def __str__(self):
        lhs = self.fn.name if not self.patterns else f"{self.fn.name}({', '.join(map(str, self.patterns))})"
        return f"{lhs} = {self.rhs}"


@dataclass(frozen=True)
class Program:
    vocabulary: Vocabulary
    equations: tuple[ProgramEquation, ...]
    principal: FunctionId | None = None
    name: str = ""
    certified: bool = False

    @classmethod
    def build(cls, vocabulary: Vocabulary, equations, principal=None, name="") -> "Program":
        """Collect user equations plus the standard ones, deduplicated."""
        seen: dict[ProgramEquation, None] = {}
        for eq in list(equations) + standard_equations(vocabulary):
            seen.setdefault(eq, None)
        if isinstance(principal, str):
            principal = next((e.fn for e in seen if e.fn.name == principal), None)
        if principal is None and equations:
            principal = list(equations)[0].fn
        return cls(vocabulary, tuple(seen), principal, name)

    def functions(self) -> dict[str, FunctionId]:
        return {eq.fn.name: eq.fn for eq in self.equations}

    def equations_for(self, fn: FunctionId) -> tuple[ProgramEquation, ...]:
        index = self.__dict__.get("_index")
        if index is None:
            index = {}
            for eq in self.equations:
                index.setdefault(eq.fn, []).append(eq)
            index = {k: tuple(v) for k, v in index.items()}
            object.__setattr__(self, "_index", index)
        return index.get(fn, ())

    def compiled_for(self, fn: FunctionId) -> tuple:
        """``equations_for`` paired with their flattened patterns."""
        cache = self.__dict__.get("_compiled")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_compiled", cache)
        got = cache.get(fn)
        if got is None:
            got = cache[fn] = tuple((eq, _compile(eq)) for eq in self.equations_for(fn))
        return got

    def user_equations(self) -> tuple[ProgramEquation, ...]:
        std = set(standard_equations(self.vocabulary))
        return tuple(e for e in self.equations if e not in std)


Valuation = Mapping[str, HyperTermSource]


# ------------------------------------------------------------ standard

def destructor_width(vocab: Vocabulary) -> int:
    return max(1, vocab.max_arity)


def destructor(i: int) -> FunctionId:
    """``pi_{i,m}`` for 1-based ``i``."""
    return FunctionId(f"pi_{i}", 1)


def discriminator(vocab: Vocabulary) -> FunctionId:
    return FunctionId("delta", len(vocab) + 1)


def standard_equations(vocab: Vocabulary) -> list[ProgramEquation]:
    m = destructor_width(vocab)
    k = len(vocab)
    out = []
    for c in vocab:
        xs = tuple(Var(f"x{j + 1}") for j in range(c.arity))
        pat = Con(c, xs)
        for i in range(1, m + 1):
            rhs = xs[i - 1] if i <= c.arity else pat
            out.append(ProgramEquation(destructor(i), (pat,), rhs))
    delta = discriminator(vocab)
    branches = tuple(Var(f"b{j + 1}") for j in range(k))
    for i, c in enumerate(vocab):
        pat = Con(c, tuple(Var(f"y{j + 1}") for j in range(c.arity)))
        out.append(ProgramEquation(delta, (pat,) + branches, branches[i]))
    return out


def observe_term(vocab: Vocabulary, address: Address, x: Term) -> Term:
    """The program-term ``delta(Pi(x), c1°, ..., ck°)`` naming the
    constructor of ``x`` at ``address``."""
    t = x
    for step in address:
        t = Call(destructor(step + 1), (t,))
    o = Con(vocab.padding)
    padded = tuple(Con(c, (o,) * c.arity) for c in vocab)
    return Call(discriminator(vocab), (t,) + padded)


# ---------------------------------------------------------- unification

def _walk(t, s):
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def _occurs(name, t, s):
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, s) for a in t.args)


def resolve(t: Term, s: Mapping[str, Term]) -> Term:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t
    return type(t)(t.constructor if isinstance(t, Con) else t.fn,
                   tuple(resolve(a, s) for a in t.args))


def unify(pairs) -> dict[str, Term] | None:
    """Most general unifier of base-term pairs, with occurs check."""
    s: dict[str, Term] = {}
    stack = list(pairs)
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, s), _walk(b, s)
        if isinstance(a, Var) and isinstance(b, Var) and a.name == b.name:
            continue
        if isinstance(a, Var):
            if _occurs(a.name, b, s):
                return None
            s[a.name] = b
        elif isinstance(b, Var):
            if _occurs(b.name, a, s):
                return None
            s[b.name] = a
        elif isinstance(a, Con) and isinstance(b, Con):
            if a.constructor != b.constructor:
                return None
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return {k: resolve(v, s) for k, v in s.items()}


def _rename(t: Term, tag: str) -> Term:
    if isinstance(t, Var):
        return Var(tag + t.name)
    return Con(t.constructor, tuple(_rename(a, tag) for a in t.args))


# --------------------------------------------------------- well-formed

def _check_term(t: Term, vocab: Vocabulary, where):
    if isinstance(t, Var):
        return
    if isinstance(t, Con):
        if t.constructor not in vocab:
            raise ProgramError(f"constructor {t.constructor} not in vocabulary ({where})",
                               where.location)
    elif t.fn.name in vocab:
        raise ProgramError(f"function {t.fn.name!r} clashes with a constructor", where.location)
    for a in t.args:
        _check_term(a, vocab, where)


def check_wellformed(p: Program) -> Program:
    if p.certified:
        return p
    vocab = p.vocabulary
    arities: dict[str, int] = {}
    for eq in p.equations:
        if arities.setdefault(eq.fn.name, eq.fn.arity) != eq.fn.arity:
            raise ProgramError(f"{eq.fn.name} used with arities {arities[eq.fn.name]} and {eq.fn.arity}",
                               eq.location)
        if eq.fn.name in vocab:
            raise ProgramError(f"function {eq.fn.name!r} clashes with a constructor", eq.location)
        seen = set()
        for pat in eq.patterns:
            if not is_base_term(pat):
                raise ProgramError(f"pattern {pat} of {eq} is not a base-term", eq.location)
            _check_term(pat, vocab, eq)
            for v in variables(pat):
                if v in seen:
                    raise NonLinearPattern(eq, v, eq.location)
                seen.add(v)
        _check_term(eq.rhs, vocab, eq)
        for v in variables(eq.rhs):
            if v not in seen:
                raise UnboundRhsVariable(eq, v, eq.location)
    for eq in p.equations:
        _check_calls(eq.rhs, arities, eq)

    groups: dict[FunctionId, list[ProgramEquation]] = {}
    for eq in p.equations:
        groups.setdefault(eq.fn, []).append(eq)
    for eqs in groups.values():
        for i, e1 in enumerate(eqs):
            for e2 in eqs[i + 1:]:
                left = [_rename(t, "1.") for t in e1.patterns]
                right = [_rename(t, "2.") for t in e2.patterns]
                u = unify(list(zip(left, right)))
                if u is not None:
                    raise IncompatiblePair(e1, e2, _untag(u), e2.location)
    return replace(p, certified=True)


def _untag(u: dict[str, Term]) -> dict[str, Term]:
    """Drop the renaming-apart tags when that stays unambiguous."""
    def strip(t):
        if isinstance(t, Var):
            return Var(t.name.split(".", 1)[1])
        return Con(t.constructor, tuple(strip(a) for a in t.args))
    plain = {k.split(".", 1)[1] for k in u}
    if len(plain) < len(u):
        return u
    return {k.split(".", 1)[1]: strip(v) for k, v in u.items()}


def _check_calls(t, arities, eq):
    if isinstance(t, Call):
        if t.fn.name in arities and arities[t.fn.name] != t.fn.arity:
            raise ProgramError(f"{t.fn.name} called with {t.fn.arity} arguments in {eq}", eq.location)
    if not isinstance(t, Var):
        for a in t.args:
            _check_calls(a, arities, eq)


# ------------------------------------------------------------ matching

@dataclass(frozen=True)
class Match:
    equation: ProgramEquation
    # variable -> (argument index, address inside that argument)
    binding: Mapping[str, tuple[int, Address]]


@dataclass(frozen=True)
class NoMatch:
    pass


@dataclass(frozen=True)
class NeedMore:
    arg: int
    address: Address


MatchResult = Union[Match, NoMatch, NeedMore]

Observations = Mapping[tuple[int, Address], ConstructorQuery]


def _compile(eq: ProgramEquation):
    """Flatten the patterns of ``eq`` into constructor checks and variable
    positions, both as (argument, address, payload)."""
    checks, slots = [], []
    stack = [(i, (), pat) for i, pat in reversed(list(enumerate(eq.patterns)))]
    while stack:
        i, addr, pat = stack.pop()
        if isinstance(pat, Var):
            slots.append((pat.name, (i, addr)))
            continue
        checks.append(((i, addr), pat.constructor))
        for j in reversed(range(len(pat.args))):
            stack.append((i, addr + (j,), pat.args[j]))
    return tuple(checks), tuple(slots)


def _try(compiled, observed: Observations):
    """Returns (status, binding or needed position); status in match/fail/need."""
    checks, slots = compiled
    need = None
    for pos, c in checks:
        q = observed.get(pos)
        if q is None or type(q) is Unknown:
            key = (len(pos[1]), pos[0], pos[1])
            if need is None or key < need:
                need = key
            continue
        if type(q) is not Known or (q.constructor is not c and q.constructor != c):
            return "fail", None
    if need is not None:
        return "need", need
    return "match", dict(slots)


def match_equation(p: Program, fn: FunctionId, observed: Observations) -> MatchResult:
    """Select the equation of ``fn`` that fits the observed argument heads.

    ``observed`` maps (argument index, address) to what is known there.
    When some equation is still possible but undetermined, the shallowest
    (then leftmost) unobserved position it depends on is requested.
    """
    need = None
    for eq, compiled in p.compiled_for(fn):
        status, info = _try(compiled, observed)
        if status == "match":
            return Match(eq, info)
        if status == "need" and (need is None or info < need):
            need = info
    if need is None:
        return NoMatch()
    return NeedMore(need[1], need[2])
