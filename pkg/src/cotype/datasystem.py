"""Data-systems: ordered bundles of inductive and coinductive type definitions."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import CotypeError
from .terms import Constructor, Vocabulary


class Polarity(Enum):
    INDUCTIVE = "inductive"
    COINDUCTIVE = "coinductive"


class DataSystemError(CotypeError):
    pass


class StratificationViolation(DataSystemError):
    pass


class ArityMismatch(DataSystemError):
    pass


class DuplicateTypeName(DataSystemError):
    pass


class CoinductiveRuleMissing(DataSystemError):
    pass


class UnknownName(DataSystemError):
    pass


class PolarityError(DataSystemError):
    pass


class EmptyTypeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TypeId:
    name: str
    bundle_index: int
    position_in_bundle: int


@dataclass(frozen=True)
class ConstructorStatement:
    """``x = c(y1..yr) & T1(y1) & ... & Tr(yr)``; components are type names."""
    constructor: Constructor
    component_types: tuple[str, ...] = ()

    def __str__(self):
        c = self.constructor
        if not c.arity:
            return c.name
        ys = [f"y{i + 1}" for i in range(c.arity)]
        typing = " & ".join(f"{t}({y})" for t, y in zip(self.component_types, ys))
        return f"{c.name}({', '.join(ys)}) with {typing}"


@dataclass(frozen=True)
class Bundle:
    polarity: Polarity
    types: tuple[str, ...]
    # inductive: (target type, statement) construction rules, in source order
    inductive_rules: tuple[tuple[str, ConstructorStatement], ...] = ()
    # coinductive: one disjunct list per type
    coinductive_rules: Mapping[str, tuple[ConstructorStatement, ...]] = field(default_factory=dict)

    @property
    def inductive(self) -> bool:
        return self.polarity is Polarity.INDUCTIVE


@dataclass(frozen=True)
class DataSystem:
    vocabulary: Vocabulary
    bundles: tuple[Bundle, ...]
    name: str = ""


@dataclass(frozen=True)
class Rank:
    side: str  # "Sigma" or "Pi"
    level: int

    def __post_init__(self):
        if self.side not in ("Sigma", "Pi") or self.level < 1:
            raise ValueError(f"bad rank {self.side}{self.level}")

    def __str__(self):
        return f"{self.side} {self.level}"


def package_inductive(bundle: Bundle) -> dict[str, tuple[ConstructorStatement, ...]]:
    """Group construction rules by target: the disjunct list closing each type."""
    if not bundle.inductive:
        raise PolarityError("package_inductive needs an inductive bundle")
    out: dict[str, list[ConstructorStatement]] = {t: [] for t in bundle.types}
    for target, stmt in bundle.inductive_rules:
        out[target].append(stmt)
    return {t: tuple(v) for t, v in out.items()}


def rank_of_polarities(polarities: Sequence[Polarity]) -> Rank:
    if not polarities:
        raise ValueError("empty data-system has no rank")
    changes = sum(1 for a, b in zip(polarities, polarities[1:]) if a is not b)
    side = "Sigma" if polarities[-1] is Polarity.INDUCTIVE else "Pi"
    return Rank(side, changes + 1)


class ValidatedSystem:
    """A data-system whose stratification, arities and names were checked.

    Keeps per-type disjunct lists (packaged construction rules for inductive
    types, the deconstruction rule for coinductive ones) and ranks.
    """

    def __init__(self, system: DataSystem):
        self.system = system
        self.vocabulary = system.vocabulary
        self.type_ids: dict[str, TypeId] = {}
        self.disjuncts: dict[str, tuple[ConstructorStatement, ...]] = {}
        self.rank = rank_of_polarities([b.polarity for b in system.bundles])
        self._prefix_ranks = [rank_of_polarities([b.polarity for b in system.bundles[: i + 1]])
                              for i in range(len(system.bundles))]

    @property
    def name(self):
        return self.system.name

    @property
    def bundles(self):
        return self.system.bundles

    def type_id(self, name: str) -> TypeId:
        try:
            return self.type_ids[name]
        except KeyError:
            raise UnknownName(f"unknown type {name!r}") from None

    def bundle_of(self, name: str) -> Bundle:
        return self.system.bundles[self.type_id(name).bundle_index]

    def polarity(self, name: str) -> Polarity:
        return self.bundle_of(name).polarity

    def is_coinductive(self, name: str) -> bool:
        return self.polarity(name) is Polarity.COINDUCTIVE

    def same_bundle(self, a: str, b: str) -> bool:
        return self.type_id(a).bundle_index == self.type_id(b).bundle_index

    def rank_of_type(self, name: str) -> int:
        return self._prefix_ranks[self.type_id(name).bundle_index].level

    def __repr__(self):
        return f"ValidatedSystem({self.name or '?'}, {self.rank})"


def validate(ds: DataSystem | ValidatedSystem) -> ValidatedSystem:
    if isinstance(ds, ValidatedSystem):
        return ds
    if not ds.bundles:
        raise DataSystemError("a data-system needs at least one bundle")
    vs = ValidatedSystem(ds)
    vocab = ds.vocabulary
    for bi, bundle in enumerate(ds.bundles):
        if not bundle.types:
            raise DataSystemError(f"bundle {bi} declares no types")
        for pos, t in enumerate(bundle.types):
            if t in vs.type_ids:
                raise DuplicateTypeName(t)
            vs.type_ids[t] = TypeId(t, bi, pos)

    def check_statement(bi, owner, stmt):
        c = stmt.constructor
        if c not in vocab:
            raise UnknownName(f"constructor {c} not in vocabulary (rule for {owner})")
        if len(stmt.component_types) != c.arity:
            raise ArityMismatch(f"{c} takes {c.arity} components, rule for {owner} gives "
                                f"{len(stmt.component_types)}")
        for t in stmt.component_types:
            tid = vs.type_ids.get(t)
            if tid is None:
                raise UnknownName(f"unknown type {t!r} in rule for {owner}")
            if tid.bundle_index > bi:
                raise StratificationViolation(
                    f"rule for {owner} (bundle {bi}) refers to {t} from later bundle {tid.bundle_index}")

    for bi, bundle in enumerate(ds.bundles):
        if bundle.inductive:
            if bundle.coinductive_rules:
                raise PolarityError(f"inductive bundle {bi} has deconstruction rules")
            for target, stmt in bundle.inductive_rules:
                if target not in bundle.types:
                    raise StratificationViolation(
                        f"construction rule targets {target!r}, not a type of bundle {bi}")
                check_statement(bi, target, stmt)
            vs.disjuncts.update(package_inductive(bundle))
        else:
            if bundle.inductive_rules:
                raise PolarityError(f"coinductive bundle {bi} has construction rules")
            for t in bundle.coinductive_rules:
                if t not in bundle.types:
                    raise StratificationViolation(
                        f"deconstruction rule for {t!r}, not a type of bundle {bi}")
            for t in bundle.types:
                rule = bundle.coinductive_rules.get(t)
                if not rule:
                    raise CoinductiveRuleMissing(t)
                for stmt in rule:
                    check_statement(bi, t, stmt)
                vs.disjuncts[t] = tuple(rule)
    _warn_empty_inductive(vs)
    return vs


def _warn_empty_inductive(vs: ValidatedSystem):
    # least fixpoint of "some disjunct has all components inhabited";
    # types of other bundles are assumed inhabited
    for bundle in vs.bundles:
        if not bundle.inductive:
            continue
        inhabited: set[str] = set()
        changed = True
        while changed:
            changed = False
            for t in bundle.types:
                if t in inhabited:
                    continue
                for stmt in vs.disjuncts[t]:
                    if all(c in inhabited or c not in bundle.types for c in stmt.component_types):
                        inhabited.add(t)
                        changed = True
                        break
        for t in bundle.types:
            if t not in inhabited:
                warnings.warn(f"inductive type {t} is empty", EmptyTypeWarning, stacklevel=3)


def classify_rank(ds: DataSystem | ValidatedSystem) -> Rank:
    return validate(ds).rank
