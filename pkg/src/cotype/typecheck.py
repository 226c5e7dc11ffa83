"""Type membership in the canonical model.

Inductive types are checked by searching for a finite derivation from the
construction rules.  Coinductive types are checked against the expansion
tree: level ``h`` holds every way of typing a hyper-term by ``h``
breadth-first unfoldings of deconstruction rules, and a term belongs to the
type iff every level has a node consistent with it.  We can only inspect
finitely many levels, so a positive coinductive answer is
``VerifiedToHeight(h)``; refutations are sound.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence, Union

from .datasystem import ConstructorStatement, DataSystem, PolarityError, ValidatedSystem, validate
from .errors import CotypeError
from .evaluator import EvalConfig, No, Verdict3, Yes, as_source
from .program import Program, ProgramEquation
from .terms import (
    Address, Call, Con, Constructor, ConstructorQuery, FunctionId, HyperTermSource, Known, OutOfRange, Unknown,
    Var,
)


@dataclass(frozen=True)
class Budget:
    fuel: int = 10_000
    height: int = 32
    lower_ratio: float = 0.5
    max_frontier: int = 4096

    def lower(self) -> "Budget":
        return replace(self, fuel=max(1, int(self.fuel * self.lower_ratio)))


# ------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class Derivation:
    type: str
    address: Address
    constructor: Constructor
    disjunct: int
    premises: tuple[Union["Derivation", "Evidence"], ...] = ()


@dataclass(frozen=True)
class Evidence:
    """A lower-rank component, justified by its own verdict."""
    type: str
    address: Address
    verdict: "MembershipVerdict"


@dataclass(frozen=True)
class Conflict:
    address: Address
    expected: str
    found: str

    def __str__(self):
        return f"expected {self.expected} at {list(self.address)}, found {self.found}"


@dataclass(frozen=True)
class Derived:
    witness: Derivation
    positive = True

    def __str__(self):
        return "Derived"


@dataclass(frozen=True)
class VerifiedToHeight:
    height: int
    path: tuple[int, ...] = ()
    positive = True

    def __str__(self):
        return f"VerifiedToHeight({self.height})"


@dataclass(frozen=True)
class Refuted:
    height: int | None
    explanation: str
    conflict: Conflict | None = None
    positive = False

    def __str__(self):
        at = "" if self.height is None else f" at height {self.height}"
        return f"Refuted{at}: {self.explanation}"


MembershipVerdict = Union[Derived, VerifiedToHeight, Refuted, Unknown]


def is_positive(v) -> bool:
    return isinstance(v, (Derived, VerifiedToHeight))


class SampleNotOfClaimedInputType(CotypeError):
    pass


# ------------------------------------------------------------ inductive

class _Checker:
    """Shared state of one membership check: query cache, memo and fuel."""

    def __init__(self, vs: ValidatedSystem, src: HyperTermSource, budget: Budget):
        self.vs = vs
        self.src = src
        self.budget = budget
        self.fuel = budget.fuel
        self._queries: dict[Address, ConstructorQuery] = {}
        self._memo: dict[tuple[str, Address], MembershipVerdict] = {}

    def query(self, address):
        q = self._queries.get(address)
        if q is None:
            q = self._queries[address] = self.src.query(address)
        return q

    def spend(self) -> bool:
        self.fuel -= 1
        return self.fuel >= 0

    def lower(self, type_name, address):
        key = (type_name, address)
        v = self._memo.get(key)
        if v is None:
            v = check_type(self.vs, type_name, self.src.at(address), self.budget.lower())
            self._memo[key] = v
        return v

    def component(self, owner, type_name, address):
        if self.vs.same_bundle(owner, type_name):
            return self.inductive(type_name, address)
        v = self.lower(type_name, address)
        return v if not is_positive(v) else Evidence(type_name, address, v)

    def inductive(self, type_name, address) -> MembershipVerdict:
        key = (type_name, address)
        if key in self._memo:
            return self._memo[key]
        v = self._inductive(type_name, address)
        if not (isinstance(v, Unknown) and v.reason == "fuel"):
            self._memo[key] = v
        return v

    def _inductive(self, type_name, address):
        if len(address) > self.budget.height:
            return Unknown("depth")
        if not self.spend():
            return Unknown("fuel")
        q = self.query(address)
        if isinstance(q, Unknown):
            return q
        if isinstance(q, OutOfRange):
            return Refuted(None, f"no node at {list(address)}", Conflict(address, type_name, "nothing"))
        c = q.constructor
        unknown = None
        candidates = [(i, s) for i, s in enumerate(self.vs.disjuncts[type_name]) if s.constructor == c]
        for i, stmt in candidates:
            premises = []
            status = "derived"
            for j, comp in enumerate(stmt.component_types):
                v = self.component(type_name, comp, address + (j,))
                if isinstance(v, Refuted):
                    status = "refuted"
                    break
                if isinstance(v, Unknown):
                    status = "unknown"
                    unknown = unknown or v
                elif isinstance(v, Derived):
                    premises.append(v.witness)
                else:
                    premises.append(v)
            if status == "derived":
                return Derived(Derivation(type_name, address, c, i, tuple(premises)))
        if unknown is not None:
            return unknown
        if not candidates:
            return Refuted(None, f"{type_name} has no rule with head {c.name} at {list(address)}",
                           Conflict(address, type_name, c.name))
        return Refuted(None, f"every {c.name}-rule of {type_name} fails below {list(address)}",
                       Conflict(address, type_name, c.name))


def check_inductive(ds: DataSystem | ValidatedSystem, type_name: str, src: HyperTermSource,
                    budget: Budget | None = None) -> MembershipVerdict:
    vs = validate(ds)
    if vs.is_coinductive(type_name):
        raise PolarityError(f"{type_name} is coinductive")
    return _Checker(vs, src, budget or Budget()).inductive(type_name, ())


# -------------------------------------------------------- expansion tree

@dataclass(frozen=True)
class Leaf:
    type: str
    expandable: bool


@dataclass(frozen=True)
class Inner:
    type: str
    constructor: Constructor
    children: tuple[Union["Inner", Leaf], ...] = ()


@dataclass(frozen=True)
class ExpansionNode:
    """A partial typing: a finite constructor tree with typed leaves."""
    tree: Union[Inner, Leaf]
    height: int = 0
    # expandable leaves in breadth-first order; derived from ``tree``
    pending: tuple[Address, ...] | None = field(default=None, compare=False, repr=False)

    def cells(self) -> Iterator[tuple[Address, Union[Inner, Leaf]]]:
        """All cells in breadth-first, left-to-right order."""
        queue = deque([((), self.tree)])
        while queue:
            addr, cell = queue.popleft()
            yield addr, cell
            if isinstance(cell, Inner):
                queue.extend((addr + (i,), k) for i, k in enumerate(cell.children))

    def expandable(self) -> tuple[Address, ...]:
        if self.pending is None:
            found = tuple(a for a, c in self.cells() if isinstance(c, Leaf) and c.expandable)
            object.__setattr__(self, "pending", found)
        return self.pending

    def designated(self) -> Address | None:
        """The shallowest, then leftmost, leaf still to be expanded."""
        pending = self.expandable()
        return pending[0] if pending else None

    def cell(self, address: Address):
        t = self.tree
        for i in address:
            t = t.children[i]
        return t


def _replace_at(tree, address, new):
    if not address:
        return new
    i = address[0]
    kids = list(tree.children)
    kids[i] = _replace_at(kids[i], address[1:], new)
    return Inner(tree.type, tree.constructor, tuple(kids))


class ChoiceOutOfRange(CotypeError):
    pass


class TDTree:
    """The expansion tree of a coinductive type; node ``path`` lists the
    disjunct chosen at each successive expansion."""

    def __init__(self, ds: DataSystem | ValidatedSystem, root_type: str):
        self.vs = validate(ds)
        if not self.vs.is_coinductive(root_type):
            raise PolarityError(f"{root_type} is inductive")
        self.root_type = root_type
        self.bundle = set(self.vs.bundle_of(root_type).types)

    def root(self) -> ExpansionNode:
        return ExpansionNode(Leaf(self.root_type, True), 0)

    def expand(self, node: ExpansionNode, choice: int) -> ExpansionNode:
        addr = node.designated()
        if addr is None:
            raise ChoiceOutOfRange(f"node at height {node.height} has nothing to expand")
        leaf = node.cell(addr)
        options = self.vs.disjuncts[leaf.type]
        if not 0 <= choice < len(options):
            raise ChoiceOutOfRange(f"{leaf.type} has {len(options)} disjuncts, asked for {choice}")
        stmt = options[choice]
        kids = tuple(Leaf(t, t in self.bundle) for t in stmt.component_types)
        inner = Inner(leaf.type, stmt.constructor, kids)
        # new leaves sit one level below addr, after every leaf already queued
        pending = node.expandable()[1:] + tuple(addr + (j,) for j, k in enumerate(kids) if k.expandable)
        return ExpansionNode(_replace_at(node.tree, addr, inner), node.height + 1, pending)

    def options(self, node: ExpansionNode) -> Sequence[ConstructorStatement]:
        addr = node.designated()
        if addr is None:
            return ()
        return self.vs.disjuncts[node.cell(addr).type]

    def children(self, node: ExpansionNode) -> list[ExpansionNode]:
        return [self.expand(node, i) for i in range(len(self.options(node)))]

    def node(self, path: Sequence[int]) -> ExpansionNode:
        n = self.root()
        for choice in path:
            n = self.expand(n, choice)
        return n


def td_node(ds, type_name: str, path: Sequence[int]) -> ExpansionNode:
    return TDTree(ds, type_name).node(path)


def _check_cell(ck: _Checker, address, cell) -> Verdict3:
    if isinstance(cell, Inner):
        q = ck.query(address)
        if isinstance(q, Unknown):
            return q
        if isinstance(q, Known) and q.constructor == cell.constructor:
            return Yes()
        return No(address, Known(cell.constructor), q)
    if cell.expandable:
        return Yes()
    v = ck.lower(cell.type, address)
    if is_positive(v):
        return Yes()
    if isinstance(v, Refuted):
        return No(address, cell.type, v)  # a lower-rank type, not a constructor
    return v


def consistent(ds, node: ExpansionNode, src: HyperTermSource, budget: Budget | None = None,
               _ck: _Checker | None = None) -> Verdict3:
    """Does ``src`` fit the constructor tree of ``node`` and satisfy each of
    its lower-rank leaves?"""
    ck = _ck or _Checker(validate(ds), src, budget or Budget())
    unknown = None
    for addr, cell in node.cells():
        v = _check_cell(ck, addr, cell)
        if isinstance(v, No):
            return v
        if isinstance(v, Unknown):
            unknown = unknown or v
    return unknown or Yes()


def _conflict(no: No, leaf_type) -> Conflict:
    found = no.right
    if isinstance(found, Known):
        found = found.constructor.name
    elif isinstance(found, Refuted):
        found = f"term outside {leaf_type}"
    expected = no.left.constructor.name if isinstance(no.left, Known) else no.left
    return Conflict(no.address, expected, str(found))


def check_coinductive(ds: DataSystem | ValidatedSystem, type_name: str, src: HyperTermSource,
                      height: int | None = None, budget: Budget | None = None) -> MembershipVerdict:
    budget = budget or Budget()
    height = budget.height if height is None else height
    tree = TDTree(ds, type_name)
    ck = _Checker(tree.vs, src, budget)
    # frontier entries: (node, path, definitely consistent?)
    frontier = [(tree.root(), (), True)]
    first_unknown = None
    for level in range(1, height + 1):
        nxt = []
        last_no = None
        for node, path, sure in frontier:
            addr = node.designated()
            if addr is None:
                nxt.append((node, path, sure))  # fully typed: stands in for every deeper level
                continue
            for choice in range(len(tree.options(node))):
                if not ck.spend():
                    return Unknown("fuel")
                child = tree.expand(node, choice)
                verdict = Yes()
                cell = child.cell(addr)
                for a, c in [(addr, cell)] + [(addr + (j,), k) for j, k in enumerate(cell.children)]:
                    v = _check_cell(ck, a, c)
                    if isinstance(v, No):
                        verdict = v
                        break
                    if isinstance(v, Unknown):
                        verdict = v
                if isinstance(verdict, No):
                    last_no = (verdict, cell)
                    continue
                if isinstance(verdict, Unknown):
                    first_unknown = first_unknown or verdict
                nxt.append((child, path + (choice,), sure and isinstance(verdict, Yes)))
        if not nxt:
            no, cell = last_no
            conflict = _conflict(no, cell.type)
            return Refuted(level, f"no level-{level} typing of {type_name} fits: {conflict}", conflict)
        if len(nxt) > budget.max_frontier:
            return first_unknown or Unknown("frontier")
        frontier = nxt
    for node, path, sure in frontier:
        if sure:
            return VerifiedToHeight(height, path)
    return first_unknown or Unknown("fuel")


def check_type(ds: DataSystem | ValidatedSystem, type_name: str, src: HyperTermSource,
               budget: Budget | None = None) -> MembershipVerdict:
    vs = validate(ds)
    budget = budget or Budget()
    if vs.is_coinductive(type_name):
        return check_coinductive(vs, type_name, src, budget.height, budget)
    return check_inductive(vs, type_name, src, budget)


# ------------------------------------------------------- typed equality

XI = "xi"


def eq_program(vocab) -> tuple[Program, Constructor]:
    """The merging program ``eq`` over ``vocab`` plus a fresh nullary ξ."""
    name = XI
    while name in vocab:
        name += "'"
    xi = Constructor(name, 0)
    vx = vocab.extended(xi)
    eq = FunctionId("eq", 2)
    eqs = []
    for c in vx:
        xs = tuple(Var(f"x{i + 1}") for i in range(c.arity))
        for d in vx:
            ys = tuple(Var(f"y{i + 1}") for i in range(d.arity))
            if c == d:
                rhs = Con(c, tuple(Call(eq, (x, y)) for x, y in zip(xs, ys)))
            else:
                rhs = Con(xi)
            eqs.append(ProgramEquation(eq, (Con(c, xs), Con(d, ys)), rhs))
    return Program.build(vx, eqs, eq, "eq"), xi


def typed_eq(ds, type_name: str, a: HyperTermSource, b: HyperTermSource,
             budget: Budget | None = None, cfg: EvalConfig | None = None) -> MembershipVerdict:
    """``a`` and ``b`` are equal in ``type_name`` iff ``eq(a, b)`` has that type."""
    vs = validate(ds)
    p, _ = eq_program(vs.vocabulary)
    src = as_source(p, {"a": a, "b": b}, Call(p.principal, (Var("a"), Var("b"))), cfg)
    return check_type(vs, type_name, src, budget)


# ------------------------------------------------------- program claims

@dataclass(frozen=True)
class SampleReport:
    index: int
    input_verdict: MembershipVerdict
    output_verdict: MembershipVerdict


def check_program_type(ds, p: Program, fn, from_type: str, to_type: str,
                       samples: Sequence[HyperTermSource], budget: Budget | None = None,
                       cfg: EvalConfig | None = None) -> list[SampleReport]:
    """Per-sample evidence for the claim ``from_type(x) -> to_type(fn(x))``."""
    vs = validate(ds)
    budget = budget or Budget()
    if isinstance(fn, str):
        fn = p.functions()[fn]
    if fn.arity != 1:
        raise CotypeError(f"{fn} is not unary")
    reports = []
    for i, sample in enumerate(samples):
        vin = check_type(vs, from_type, sample, budget)
        if not is_positive(vin):
            raise SampleNotOfClaimedInputType(f"sample {i} is not shown to be in {from_type}: {vin}")
        out = as_source(p, {"v": sample}, Call(fn, (Var("v"),)), cfg)
        reports.append(SampleReport(i, vin, check_type(vs, to_type, out, budget)))
    return reports
