"""Sorted atoms and the permutation action on the structures built from them.

Three disjoint sorts of names exist: locations, functions, continuations.
Everything downstream (stores, frames, machine configurations, labels) is a
finite structure over these atoms, so `support` and `apply_perm` work
generically on tuples, frozensets, and frozen dataclasses and never need
per-type code.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields, is_dataclass, replace
from functools import lru_cache
from typing import Iterable, Union


class Sort(enum.Enum):
    LOC = "l"
    FUN = "f"
    CONT = "k"

    def __lt__(self, other: "Sort") -> bool:
        return self.value < other.value


@dataclass(frozen=True, order=True)
class Name:
    sort: Sort
    index: int

    def __str__(self) -> str:
        return f"{self.sort.value}{self.index}"

    def __repr__(self) -> str:
        return f"Name({self})"


def loc(i: int) -> Name:
    return Name(Sort.LOC, i)


def fun(i: int) -> Name:
    return Name(Sort.FUN, i)


def cont(i: int) -> Name:
    return Name(Sort.CONT, i)


def parse_name(text: str) -> Name:
    """Inverse of str(name): 'l3' -> Name(LOC, 3)."""
    if len(text) >= 2 and text[1:].isdigit():
        for sort in Sort:
            if text[0] == sort.value:
                return Name(sort, int(text[1:]))
    raise ValueError(f"not a name: {text!r}")


NameSet = frozenset  # frozenset[Name]

EMPTY: frozenset = frozenset()


def of_sort(names: Iterable[Name], sort: Sort) -> frozenset:
    return frozenset(n for n in names if n.sort is sort)


def fresh(sort: Sort, used: Iterable[Name]) -> Name:
    """Least-index name of the sort outside `used`.  Deterministic: the same
    inputs always give the same atom, which keeps traces reproducible."""
    taken = {n.index for n in used if n.sort is sort}
    i = 0
    while i in taken:
        i += 1
    return Name(sort, i)


def fresh_many(sort: Sort, used: Iterable[Name], count: int) -> tuple:
    taken = {n.index for n in used if n.sort is sort}
    out = []
    i = 0
    while len(out) < count:
        if i not in taken:
            out.append(Name(sort, i))
        i += 1
    return tuple(out)


class PermutationError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    """Finite sort-preserving bijection on names, identity off its carrier.

    `pairs` holds only the moved names, sorted, so equal permutations are
    equal dataclasses.
    """

    pairs: tuple  # tuple[tuple[Name, Name], ...]

    def __post_init__(self):
        mapping = dict(self.pairs)
        if len(mapping) != len(self.pairs):
            raise PermutationError("duplicate name in permutation domain")
        for a, b in mapping.items():
            if a.sort is not b.sort:
                raise PermutationError(f"sort-changing pair {a} -> {b}")
        if set(mapping.values()) != set(mapping):
            raise PermutationError("not a bijection on its carrier")
        trimmed = tuple(sorted((a, b) for a, b in mapping.items() if a != b))
        object.__setattr__(self, "pairs", trimmed)
        object.__setattr__(self, "_map", dict(trimmed))

    @classmethod
    def identity(cls) -> "Permutation":
        return cls(())

    @classmethod
    def swap(cls, a: Name, b: Name) -> "Permutation":
        if a == b:
            return cls(())
        return cls(((a, b), (b, a)))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Permutation":
        return cls(tuple(mapping.items()))

    @classmethod
    def from_injection(cls, mapping: dict) -> "Permutation":
        """Complete an injective sort-preserving map to a permutation by
        matching up the unbalanced names (range minus domain gets sent back
        to domain minus range, per sort, in sorted order)."""
        if len(set(mapping.values())) != len(mapping):
            raise PermutationError("not injective")
        full = dict(mapping)
        for sort in Sort:
            dom = {n for n in mapping if n.sort is sort}
            rng = {n for n in mapping.values() if n.sort is sort}
            for src, dst in zip(sorted(rng - dom), sorted(dom - rng)):
                full[src] = dst
        return cls(tuple(full.items()))

    @property
    def carrier(self) -> frozenset:
        return frozenset(self._map)

    def apply(self, name: Name) -> Name:
        return self._map.get(name, name)

    def compose(self, other: "Permutation") -> "Permutation":
        """(p.compose(q)).apply(x) == p.apply(q.apply(x))"""
        names = self.carrier | other.carrier
        return Permutation(tuple((n, self.apply(other.apply(n))) for n in names))

    def inverse(self) -> "Permutation":
        return Permutation(tuple((b, a) for a, b in self.pairs))

    def __call__(self, name: Name) -> Name:
        return self.apply(name)


_ATOMIC = (int, str, bool, type(None), bytes, enum.Enum)


def apply_perm(perm: Permutation, x):
    """Apply a permutation structurally: names move, integers and other
    atoms stay, containers and frozen dataclasses are rebuilt."""
    if isinstance(x, Name):
        return perm.apply(x)
    if isinstance(x, _ATOMIC):
        return x
    if isinstance(x, tuple):
        return tuple(apply_perm(perm, y) for y in x)
    if isinstance(x, frozenset):
        return frozenset(apply_perm(perm, y) for y in x)
    if is_dataclass(x):
        return replace(x, **{f.name: apply_perm(perm, getattr(x, f.name)) for f in fields(x)})
    raise TypeError(f"no permutation action on {type(x).__name__}")


@lru_cache(maxsize=None)
def support(x) -> frozenset:
    """All names occurring anywhere in x.  nu(x) in the algebra of the
    operations downstream; cached because validation recomputes it heavily."""
    if isinstance(x, Name):
        return frozenset((x,))
    if isinstance(x, _ATOMIC):
        return EMPTY
    if isinstance(x, (tuple, frozenset)):
        out = set()
        for y in x:
            out |= support(y)
        return frozenset(out)
    if is_dataclass(x):
        out = set()
        for f in fields(x):
            out |= support(getattr(x, f.name))
        return frozenset(out)
    raise TypeError(f"no support for {type(x).__name__}")


def support_all(*xs) -> frozenset:
    out = set()
    for x in xs:
        out |= support(x)
    return frozenset(out)
