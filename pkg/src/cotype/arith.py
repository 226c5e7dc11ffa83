"""Hyper-terms as partial functions from address codes to constructor codes.

Address coding (frozen; see docs/formats.md)::

    pair(x, y)      = (x + y)(x + y + 1) / 2 + y          (Cantor)
    encode(())      = 0
    encode(a0..ak)  = pair(n, pair(B, v))
        n = k + 1                  length
        B = max(a) + 1             so the digit base b = B + 1 >= 2
        v = sum(a_j * b**j)        little-endian digits, exactly n of them

``decode`` accepts only the image of ``encode``: ``v < b**n`` and the
largest digit equals ``B - 1``; everything else raises :class:`DecodeError`.
Constructor codes are 1-based positions in the vocabulary; 0 means "no
constructor".
"""
from __future__ import annotations

from math import isqrt
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import CotypeError
from .terms import (
    Address, Constructor, FinitePrefix, HyperTermSource, Known, Node, Unexplored,
    Unknown, Vocabulary,
)


class DecodeError(CotypeError):
    pass


class InvalidRepresentation(CotypeError):
    def __init__(self, address: Address, message: str = ""):
        super().__init__(message or f"invalid representation at {list(address)}")
        self.address = address


def pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def encode_address(address: Sequence[int]) -> int:
    a = tuple(address)
    if not a:
        return 0
    if min(a) < 0:
        raise ValueError("address entries must be natural numbers")
    big = max(a) + 1
    base = big + 1
    v = 0
    for digit in reversed(a):
        v = v * base + digit
    return pair(len(a), pair(big, v))


def decode_address(code: int) -> Address:
    if code < 0:
        raise DecodeError(f"negative code {code}")
    if code == 0:
        return ()
    n, rest = unpair(code)
    big, v = unpair(rest)
    if n == 0 or big == 0:
        raise DecodeError(f"{code} is not an address code")
    base = big + 1
    if v >= base ** n:
        raise DecodeError(f"{code} is not an address code")
    digits = []
    for _ in range(n):
        v, d = divmod(v, base)
        digits.append(d)
    if max(digits) != big - 1:
        raise DecodeError(f"{code} is not an address code")
    return tuple(digits)


class ConstructorCodeTable:
    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self._code = {c: i + 1 for i, c in enumerate(vocab)}
        self._cons = {i + 1: c for i, c in enumerate(vocab)}

    def code(self, c: Constructor) -> int:
        return self._code[c]

    def constructor(self, code: int) -> Constructor | None:
        return self._cons.get(code)

    def __getitem__(self, name: str) -> int:
        return self._code[self.vocab[name]]


# query result of a representation: a code, None (undefined) or Unknown
Value = Union[int, None, Unknown]


class FuncRepr:
    """A partial numeric function on address codes."""

    def __call__(self, code: int) -> Value:
        raise NotImplementedError

    def at(self, address: Address) -> Value:
        return self(encode_address(address))


class _SourceRepr(FuncRepr):
    def __init__(self, src: HyperTermSource, table: ConstructorCodeTable):
        self.src = src
        self.table = table

    def __call__(self, code):
        try:
            address = decode_address(code)
        except DecodeError:
            return None
        q = self.src.query(address)
        if isinstance(q, Known):
            return self.table.code(q.constructor)
        if isinstance(q, Unknown):
            return q
        return None


class TableRepr(FuncRepr):
    """Finitely many explicit points; keys may be codes or addresses."""

    def __init__(self, points: Mapping):
        self.points = {k if isinstance(k, int) else encode_address(k): v for k, v in points.items()}

    def __call__(self, code):
        return self.points.get(code)


class _Rooted(FuncRepr):
    def __init__(self, code: int, args: Sequence[FuncRepr]):
        self.code = code
        self.args = tuple(args)

    def __call__(self, n):
        try:
            address = decode_address(n)
        except DecodeError:
            return None
        if not address:
            return self.code
        i, rest = address[0], address[1:]
        if i >= len(self.args):
            return None
        return self.args[i](encode_address(rest))


class CallableRepr(FuncRepr):
    def __init__(self, fn: Callable[[int], Value]):
        self.fn = fn

    def __call__(self, code):
        return self.fn(code)


def term_to_funcrepr(src: HyperTermSource, table: ConstructorCodeTable) -> FuncRepr:
    return _SourceRepr(src, table)


def apply_chat(c: Constructor, args: Sequence[FuncRepr], table: ConstructorCodeTable) -> FuncRepr:
    """Root the represented hyper-terms ``args`` under ``c``."""
    if len(args) != c.arity:
        raise ValueError(f"{c} needs {c.arity} arguments, got {len(args)}")
    return _Rooted(table.code(c), args)


def funcrepr_to_prefix(g: FuncRepr, table: ConstructorCodeTable, depth: int,
                       _address: Address = ()) -> FinitePrefix:
    """Rebuild the depth-``depth`` prefix, checking arity-consistency."""
    if depth == 0:
        return Unexplored()
    v = g(encode_address(_address))
    if v is None:
        return Unexplored()
    if isinstance(v, Unknown):
        return Unexplored("unknown")
    c = table.constructor(v)
    if c is None:
        raise InvalidRepresentation(_address, f"unknown constructor code {v} at {list(_address)}")
    width = max(1, table.vocab.max_arity)
    for j in range(c.arity, width):
        w = g(encode_address(_address + (j,)))
        if w is not None and not isinstance(w, Unknown):
            raise InvalidRepresentation(_address + (j,),
                                        f"{c.name} at {list(_address)} has no child {j}")
    return Node(c, tuple(funcrepr_to_prefix(g, table, depth - 1, _address + (i,))
                         for i in range(c.arity)))


def defined_points(g: FuncRepr, table: ConstructorCodeTable, depth: int) -> list[tuple[int, int]]:
    """(address code, constructor code) pairs reachable within ``depth``,
    sorted by address code."""
    out = []
    stack: list[Address] = [()]
    while stack:
        a = stack.pop()
        v = g(encode_address(a))
        if v is None or isinstance(v, Unknown):
            continue
        out.append((encode_address(a), v))
        c = table.constructor(v)
        if c is not None and len(a) < depth:
            stack.extend(a + (i,) for i in range(c.arity))
    return sorted(out)


def dump(points: Iterable[tuple[int, int]]) -> str:
    return "".join(f"{a}\t{c}\n" for a, c in points)


def load(text: str) -> TableRepr:
    pts = {}
    for line in text.splitlines():
        if line.strip():
            a, c = line.split("\t")
            pts[int(a)] = int(c)
    return TableRepr(pts)


__all__ = [
    "ConstructorCodeTable", "DecodeError", "FuncRepr", "InvalidRepresentation", "TableRepr",
    "CallableRepr", "apply_chat", "decode_address", "defined_points", "dump", "encode_address",
    "funcrepr_to_prefix", "load", "pair", "term_to_funcrepr", "unpair",
]
