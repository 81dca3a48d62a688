"""Two-component stores: location cells and suspended continuations.

The location part maps location names to integers, locations, or function
names; a location cell never holds a continuation name.  The continuation
part maps continuation names to a (frame stack, continuation) pair saved at
a boundary crossing.  Both parts are immutable; every operation returns a
new store.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .nominal import EMPTY, Name, Sort, support


class StoreError(ValueError):
    pass


@dataclass(frozen=True)
class FrozenMap:
    """Immutable mapping with canonical (key-sorted) item order, so equal
    maps are equal dataclasses and hash consistently."""

    items: tuple = ()

    def __post_init__(self):
        canon = tuple(sorted(self.items, key=lambda kv: kv[0]))
        index = dict(canon)
        if len(index) != len(canon):
            raise StoreError("duplicate key")
        object.__setattr__(self, "items", canon)
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, mapping) -> "FrozenMap":
        return cls(tuple(mapping.items()))

    def get(self, key, default=None):
        return self._index.get(key, default)

    def __getitem__(self, key):
        return self._index[key]

    def __contains__(self, key) -> bool:
        return key in self._index

    def __iter__(self):
        return iter(self._index)

    def __len__(self) -> int:
        return len(self.items)

    def keys(self) -> frozenset:
        return frozenset(self._index)

    def set(self, key, value) -> "FrozenMap":
        return FrozenMap(tuple((k, v) for k, v in self.items if k != key) + ((key, value),))

    def filter_keys(self, pred) -> "FrozenMap":
        return FrozenMap(tuple((k, v) for k, v in self.items if pred(k)))

    def updated_by(self, patch: "FrozenMap") -> "FrozenMap":
        kept = tuple((k, v) for k, v in self.items if k not in patch)
        return FrozenMap(kept + patch.items)


def _check_loc_value(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return
    if isinstance(v, Name) and v.sort in (Sort.LOC, Sort.FUN):
        return
    raise StoreError(f"location cell cannot hold {v!r}")


@dataclass(frozen=True)
class Store:
    locs: FrozenMap = FrozenMap()
    conts: FrozenMap = FrozenMap()

    def __post_init__(self):
        for k, v in self.locs.items:
            if not (isinstance(k, Name) and k.sort is Sort.LOC):
                raise StoreError(f"location part keyed by {k!r}")
            _check_loc_value(v)
        for k, v in self.conts.items:
            if not (isinstance(k, Name) and k.sort is Sort.CONT):
                raise StoreError(f"continuation part keyed by {k!r}")
            if not (isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], tuple)
                    and isinstance(v[1], Name) and v[1].sort is Sort.CONT):
                raise StoreError(f"continuation cell must hold (frames, k): {v!r}")

    @classmethod
    def of(cls, locs=None, conts=None) -> "Store":
        return cls(FrozenMap.of(locs or {}), FrozenMap.of(conts or {}))

    def domain(self) -> frozenset:
        return self.locs.keys() | self.conts.keys()

    def loc(self, a: Name):
        return self.locs.get(a)

    def cont(self, k: Name):
        return self.conts.get(k)

    def has(self, n: Name) -> bool:
        return n in self.locs or n in self.conts

    def set_loc(self, a: Name, v) -> "Store":
        return Store(self.locs.set(a, v), self.conts)

    def set_cont(self, k: Name, frames: tuple, tail: Name) -> "Store":
        return Store(self.locs, self.conts.set(k, (frames, tail)))

    def loc_only(self) -> "Store":
        """Just the location bindings; what the disclosure closure may read."""
        return Store(self.locs, FrozenMap())

    def is_patch(self) -> bool:
        return len(self.conts) == 0


def restrict(s: Store, names, keep: bool = True) -> Store:
    """s|X when keep, s\\X when not: filter both components by key."""
    names = frozenset(names)
    if keep:
        return Store(s.locs.filter_keys(lambda k: k in names),
                     s.conts.filter_keys(lambda k: k in names))
    return Store(s.locs.filter_keys(lambda k: k not in names),
                 s.conts.filter_keys(lambda k: k not in names))


def update(s: Store, patch: Store) -> Store:
    """s[patch]: patch wins where domains overlap, s is kept elsewhere."""
    return Store(s.locs.updated_by(patch.locs), s.conts.updated_by(patch.conts))


def extends(s: Store, s2: Store) -> bool:
    """Domain inclusion: every cell of s is (re)bound by s2."""
    return s.locs.keys() <= s2.locs.keys() and s.conts.keys() <= s2.conts.keys()


def sub_store(s: Store, s2: Store) -> bool:
    """Binding inclusion: s2 agrees with s on all of s's cells."""
    return (all(s2.locs.get(k, _MISSING) == v for k, v in s.locs.items)
            and all(s2.conts.get(k, _MISSING) == v for k, v in s.conts.items))


_MISSING = object()


@lru_cache(maxsize=None)
def closure(s: Store, names: frozenset) -> frozenset:
    """Least superset of `names` closed under reading the store: a bound name
    in the set pulls in every name of its cell's content (for continuation
    cells the saved frames and the tail continuation)."""
    out = set(names)
    todo = list(names)
    while todo:
        n = todo.pop()
        v = s.locs.get(n) if n.sort is Sort.LOC else s.conts.get(n)
        if v is None:
            continue
        for m in support(v):
            if m not in out:
                out.add(m)
                todo.append(m)
    return frozenset(out)


def disclosure(s: Store, names: frozenset) -> frozenset:
    """Closure used by the boundary rules: reachability through location
    cells only.  A known continuation name does not reveal the names inside
    the frames suspended under it."""
    return closure(s.loc_only(), frozenset(names))


def union_stores(s1: Store, s2: Store) -> Store:
    """Union of stores that must agree where they overlap."""
    out_locs = dict(s1.locs.items)
    for k, v in s2.locs.items:
        if out_locs.get(k, _MISSING) not in (_MISSING, v):
            raise StoreError(f"stores disagree at {k}: {out_locs[k]!r} vs {v!r}")
        out_locs[k] = v
    out_conts = dict(s1.conts.items)
    for k, v in s2.conts.items:
        if out_conts.get(k, _MISSING) not in (_MISSING, v):
            raise StoreError(f"stores disagree at {k}")
        out_conts[k] = v
    return Store(FrozenMap.of(out_locs), FrozenMap.of(out_conts))
