"""Constructor vocabularies, terms, addresses and hyper-term sources.

A hyper-term is a possibly infinite ordered tree of constructors.  We never
hold one in memory; instead a :class:`HyperTermSource` answers
"which constructor sits at this address?" one node at a time.  Addresses are
tuples of 0-based child indices, ``()`` being the root.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

Address = tuple[int, ...]

PADDING_NAME = "o"


@dataclass(frozen=True)
class Constructor:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("constructor name must be nonempty")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


class Vocabulary:
    """An ordered set of constructors with a distinguished nullary one.

    If no nullary constructor is declared, ``o/0`` is appended so that the
    padding terms ``c(o, ..., o)`` always exist.
    """

    def __init__(self, constructors: Sequence[Constructor], padding: str | None = None):
        cons = list(constructors)
        names = [c.name for c in cons]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ValueError(f"duplicate constructor {dup!r}")
        if not any(c.arity == 0 for c in cons):
            if PADDING_NAME in names:
                raise ValueError(f"{PADDING_NAME!r} is reserved for the padding constant")
            cons.append(Constructor(PADDING_NAME, 0))
        self.constructors: tuple[Constructor, ...] = tuple(cons)
        self._by_name = {c.name: c for c in self.constructors}
        if padding is None:
            if PADDING_NAME in self._by_name and self._by_name[PADDING_NAME].arity == 0:
                padding = PADDING_NAME
            else:
                padding = next(c.name for c in self.constructors if c.arity == 0)
        pad = self._by_name.get(padding)
        if pad is None or pad.arity != 0:
            raise ValueError(f"padding constructor {padding!r} must be a declared nullary")
        self.padding: Constructor = pad

    @classmethod
    def of(cls, spec: str) -> "Vocabulary":
        """``Vocabulary.of("0/0 s/1")`` shorthand, mostly for tests."""
        cons = []
        for item in spec.replace(",", " ").split():
            name, arity = item.rsplit("/", 1)
            cons.append(Constructor(name, int(arity)))
        return cls(cons)

    def __getitem__(self, name: str) -> Constructor:
        return self._by_name[name]

    def __contains__(self, name) -> bool:
        if isinstance(name, Constructor):
            return self._by_name.get(name.name) == name
        return name in self._by_name

    def __iter__(self) -> Iterator[Constructor]:
        return iter(self.constructors)

    def __len__(self):
        return len(self.constructors)

    def __eq__(self, other):
        return (isinstance(other, Vocabulary) and self.constructors == other.constructors
                and self.padding == other.padding)

    def __hash__(self):
        return hash((self.constructors, self.padding))

    def __repr__(self):
        return "Vocabulary(" + ", ".join(map(str, self.constructors)) + ")"

    def index(self, c: Constructor | str) -> int:
        name = c if isinstance(c, str) else c.name
        for i, k in enumerate(self.constructors):
            if k.name == name:
                return i
        raise KeyError(name)

    @property
    def max_arity(self) -> int:
        return max(c.arity for c in self.constructors)

    def extended(self, *extra: Constructor) -> "Vocabulary":
        return Vocabulary(self.constructors + tuple(extra), self.padding.name)


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class FunctionId:
    name: str
    arity: int

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Con:
    constructor: Constructor
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.args) != self.constructor.arity:
            raise ValueError(f"{self.constructor} applied to {len(self.args)} arguments")

    def __str__(self):
        if not self.args:
            return self.constructor.name
        return f"{self.constructor.name}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Call:
    fn: FunctionId
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.args) != self.fn.arity:
            raise ValueError(f"{self.fn} applied to {len(self.args)} arguments")

    def __str__(self):
        if not self.args:
            return self.fn.name
        return f"{self.fn.name}({', '.join(map(str, self.args))})"


Term = Union[Var, Con, Call]


def is_data_term(t: Term) -> bool:
    return isinstance(t, Con) and all(is_data_term(a) for a in t.args)


def is_base_term(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    return isinstance(t, Con) and all(is_base_term(a) for a in t.args)


def variables(t: Term) -> list[str]:
    """Variable names in left-to-right order, with repetitions."""
    if isinstance(t, Var):
        return [t.name]
    out: list[str] = []
    for a in t.args:
        out.extend(variables(a))
    return out


def term_height(t: Term) -> int:
    """Height of a finite term; leaves have height 0."""
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_height(a) for a in t.args)


def subterm(t: Term, address: Address) -> Term | None:
    for i in address:
        if isinstance(t, Var) or i >= len(t.args):
            return None
        t = t.args[i]
    return t


def make(vocab: Vocabulary, name: str, *args: Term) -> Con:
    return Con(vocab[name], tuple(args))


# ------------------------------------------------------- observations

@dataclass(frozen=True)
class Known:
    constructor: Constructor

    def __str__(self):
        return self.constructor.name


@dataclass(frozen=True)
class OutOfRange:
    def __str__(self):
        return "out-of-range"


@dataclass(frozen=True)
class Unknown:
    """Budget exhausted (``fuel``/``depth``), evaluation stuck, or a cycle."""
    reason: str = "fuel"

    def __str__(self):
        return f"unknown({self.reason})"


OUT_OF_RANGE = OutOfRange()

ConstructorQuery = Union[Known, OutOfRange, Unknown]


# ------------------------------------------------------------ sources

class HyperTermSource:
    """Address-indexed producer of constructors.

    Subclasses implement :meth:`query`.  Answers must be deterministic and
    prefix-consistent.  ``thread_safe`` is False for sources that memoize
    into unsynchronized tables.
    """

    thread_safe = True

    def query(self, address: Address) -> ConstructorQuery:
        raise NotImplementedError

    def descend(self, i: int) -> "HyperTermSource":
        return SubtermSource(self, (i,))

    def at(self, address: Address) -> "HyperTermSource":
        src = self
        for i in address:
            src = src.descend(i)
        return src


def query_at(src: HyperTermSource, address: Address) -> ConstructorQuery:
    return src.query(tuple(address))


class SubtermSource(HyperTermSource):
    def __init__(self, base: HyperTermSource, offset: Address):
        if isinstance(base, SubtermSource):
            offset = base.offset + offset
            base = base.base
        self.base = base
        self.offset = offset
        self.thread_safe = base.thread_safe

    def query(self, address):
        return self.base.query(self.offset + tuple(address))

    def descend(self, i):
        return SubtermSource(self.base, self.offset + (i,))


class LiteralSource(HyperTermSource):
    """A finite data-term viewed as a hyper-term."""

    def __init__(self, term: Con):
        if not is_data_term(term):
            raise ValueError(f"not a data-term: {term}")
        self.term = term

    def query(self, address):
        t = self.term
        for i in address:
            if i >= len(t.args):
                return OUT_OF_RANGE
            t = t.args[i]
        return Known(t.constructor)

    def descend(self, i):
        if i < len(self.term.args):
            return LiteralSource(self.term.args[i])
        return SubtermSource(self, (i,))

    def __repr__(self):
        return f"LiteralSource({self.term})"


class StreamSource(HyperTermSource):
    """An infinite word over unary constructors: ``symbol(n)`` names the
    constructor at address ``(0,) * n``."""

    def __init__(self, vocab: Vocabulary, symbol: Callable[[int], str], start: int = 0):
        self.vocab = vocab
        self.symbol = symbol
        self.start = start

    def query(self, address):
        if any(address):
            return OUT_OF_RANGE
        c = self.vocab[self.symbol(self.start + len(address))]
        if c.arity != 1:
            raise ValueError(f"stream symbol {c} is not unary")
        return Known(c)

    def descend(self, i):
        if i == 0:
            return StreamSource(self.vocab, self.symbol, self.start + 1)
        return SubtermSource(self, (i,))


def lasso_word(vocab: Vocabulary, stem: Sequence[str], cycle: Sequence[str]) -> StreamSource:
    """The ultimately periodic word ``stem · cycle^ω``."""
    stem, cycle = tuple(stem), tuple(cycle)
    if not cycle:
        raise ValueError("cycle must be nonempty")

    def symbol(n):
        if n < len(stem):
            return stem[n]
        return cycle[(n - len(stem)) % len(cycle)]

    return StreamSource(vocab, symbol)


class FunctionSource(HyperTermSource):
    def __init__(self, fn: Callable[[Address], ConstructorQuery]):
        self.fn = fn

    def query(self, address):
        return self.fn(tuple(address))


class UnknownSource(HyperTermSource):
    """Knows nothing anywhere; stands in for a non-productive computation."""

    def query(self, address):
        return Unknown("fuel")


# ----------------------------------------------------- destructors

def semantic_destruct(src: HyperTermSource, i: int, m: int) -> HyperTermSource:
    """The destructor ``pi_{i,m}`` (1-based ``i``) applied to a hyper-term."""
    if not 1 <= i <= m:
        raise ValueError(f"destructor index {i} outside 1..{m}")
    return _Destructed(src, i - 1)


class _Destructed(HyperTermSource):
    def __init__(self, src, index):
        self.src = src
        self.index = index
        self.thread_safe = src.thread_safe

    def query(self, address):
        root = self.src.query(())
        if isinstance(root, Unknown):
            return root
        if isinstance(root, Known) and self.index < root.constructor.arity:
            return self.src.query((self.index,) + tuple(address))
        return self.src.query(address)


def semantic_discriminate(src: HyperTermSource, vocab: Vocabulary, branches: Sequence):
    """Pick ``branches[k]`` where the root of ``src`` is the k-th constructor."""
    if len(branches) != len(vocab):
        raise ValueError("need one branch per constructor")
    root = src.query(())
    if isinstance(root, Known):
        return branches[vocab.index(root.constructor)]
    if isinstance(root, Unknown):
        return root
    return Unknown("out-of-range")


# -------------------------------------------------------- prefixes

@dataclass(frozen=True)
class Node:
    constructor: Constructor
    children: tuple["FinitePrefix", ...] = ()


@dataclass(frozen=True)
class Unexplored:
    reason: str = "depth"


FinitePrefix = Union[Node, Unexplored]


def prefix(src: HyperTermSource, depth: int, _address: Address = ()) -> FinitePrefix | None:
    """The depth-``depth`` view of ``src``.

    Nodes strictly above ``depth`` are resolved; anything at the frontier or
    beyond an Unknown answer is :class:`Unexplored`.  Returns None only when
    the root itself is out of range.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return Unexplored()
    q = src.query(_address)
    if isinstance(q, Unknown):
        return Unexplored("unknown")
    if isinstance(q, OutOfRange):
        return None
    c = q.constructor
    return Node(c, tuple(prefix(src, depth - 1, _address + (i,)) for i in range(c.arity)))


def truncate(p: FinitePrefix, depth: int) -> FinitePrefix:
    if depth == 0:
        return Unexplored()
    if isinstance(p, Unexplored):
        return p
    return Node(p.constructor, tuple(truncate(k, depth - 1) for k in p.children))


def render_prefix(p: FinitePrefix | None) -> str:
    if p is None:
        return "-"
    if isinstance(p, Unexplored):
        return "…" if p.reason == "depth" else "?"
    if not p.children:
        return p.constructor.name
    return f"{p.constructor.name}({', '.join(render_prefix(k) for k in p.children)})"


def addresses(depth: int, arity: int) -> Iterator[Address]:
    """All addresses with entries < arity and length <= depth, shortest first."""
    level: list[Address] = [()]
    for _ in range(depth + 1):
        yield from level
        level = [a + (i,) for a in level for i in range(arity)]

