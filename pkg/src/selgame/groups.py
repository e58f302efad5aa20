"""Finite-support direct sums of countable discrete groups.

A group here is ``{f in prod_{i < kappa} G_i : support(f) finite}``.  The
cardinal ``kappa`` is only a label; every computation touches the finitely
many coordinates listed in a :class:`Window`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

INTEGERS = "integers"
CYCLIC = "cyclic"
TABLE = "table"

PRODUCT = "product"
BOX = "box"
TRACKS = (PRODUCT, BOX)


class MalformedElementError(ValueError):
    """A component value lies outside its group."""


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


@dataclass(frozen=True)
class ComponentGroup:
    """One coordinate group: the integers, Z/m, or an explicit Cayley table.

    Table groups list their elements in ``elements`` and give products as
    ``table[i][j] = elements[i] * elements[j]`` (labels, not positions).
    """

    kind: str
    m: int | None = None
    elements: tuple = ()
    table: tuple = ()
    _index: Mapping = field(default=None, compare=False, hash=False, repr=False)
    _identity: Any = field(default=None, compare=False, hash=False, repr=False)
    _order: tuple = field(default=(), compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind == INTEGERS:
            ident = 0
        elif self.kind == CYCLIC:
            if not _is_int(self.m) or self.m < 1:
                raise ValueError(f"cyclic group needs a positive modulus, got {self.m!r}")
            ident = 0
        elif self.kind == TABLE:
            elems = tuple(self.elements)
            table = tuple(tuple(row) for row in self.table)
            object.__setattr__(self, "elements", elems)
            object.__setattr__(self, "table", table)
            index = {e: k for k, e in enumerate(elems)}
            if len(index) != len(elems) or not elems:
                raise ValueError("table group needs distinct, nonempty elements")
            if len(table) != len(elems) or any(len(row) != len(elems) for row in table):
                raise ValueError("operation table must be square over the elements")
            if any(v not in index for row in table for v in row):
                raise ValueError("operation table is not closed")
            object.__setattr__(self, "_index", index)
            ident = _find_identity(elems, table, index)
            if ident is None:
                raise ValueError("operation table has no identity")
        else:
            raise ValueError(f"unknown component kind {self.kind!r}")
        object.__setattr__(self, "_identity", ident)
        if self.kind == TABLE:
            rest = tuple(e for e in self.elements if e != ident)
            object.__setattr__(self, "_order", (ident,) + rest)
            bad = self.axiom_violations()
            if bad:
                raise ValueError(f"operation table is not a group: {bad[0]}")
        elif self.kind == CYCLIC:
            object.__setattr__(self, "_order", tuple(range(self.m)))

    # construction helpers
    @classmethod
    def integers(cls) -> "ComponentGroup":
        return cls(INTEGERS)

    @classmethod
    def cyclic(cls, m: int) -> "ComponentGroup":
        return cls(CYCLIC, m=m)

    @classmethod
    def from_table(cls, elements, table) -> "ComponentGroup":
        return cls(TABLE, elements=tuple(elements), table=tuple(map(tuple, table)))

    @property
    def identity(self):
        return self._identity

    @property
    def order(self) -> int | None:
        """Number of elements, or None for the integers."""
        if self.kind == INTEGERS:
            return None
        return len(self._order)

    @property
    def finite(self) -> bool:
        return self.kind != INTEGERS

    def contains(self, v) -> bool:
        if self.kind == INTEGERS:
            return _is_int(v)
        if self.kind == CYCLIC:
            return _is_int(v) and 0 <= v < self.m
        try:
            return v in self._index
        except TypeError:
            return False

    def check(self, v):
        if not self.contains(v):
            raise MalformedElementError(f"{v!r} is not an element of {self.describe()}")
        return v

    def op(self, a, b):
        if self.kind == INTEGERS:
            return a + b
        if self.kind == CYCLIC:
            return (a + b) % self.m
        return self.table[self._index[a]][self._index[b]]

    def inv(self, a):
        if self.kind == INTEGERS:
            return -a
        if self.kind == CYCLIC:
            return (-a) % self.m
        row = self.table[self._index[a]]
        for k, v in enumerate(row):
            if v == self._identity:
                return self.elements[k]
        raise AssertionError("table group without inverse")

    # enumeration: rank 0 is always the identity
    def rank(self, v) -> int:
        self.check(v)
        if self.kind == INTEGERS:
            return 2 * v - 1 if v > 0 else -2 * v
        if self.kind == CYCLIC:
            return v
        return self._order.index(v)

    def unrank(self, r: int):
        if r < 0:
            raise ValueError("rank must be non-negative")
        if self.kind == INTEGERS:
            return (r + 1) // 2 if r % 2 else -(r // 2)
        if r >= len(self._order):
            raise IndexError(f"rank {r} beyond finite group of order {len(self._order)}")
        return self._order[r]

    def values(self) -> Iterator:
        """All values in enumerator order (infinite for the integers)."""
        r = 0
        while True:
            if self.order is not None and r >= self.order:
                return
            yield self.unrank(r)
            r += 1

    def filtration(self, n: int) -> tuple:
        """The compact piece ``C(n)``: ``{-n..n}`` for Z, everything otherwise."""
        if n < 0:
            raise ValueError("rank must be non-negative")
        if self.kind == INTEGERS:
            return tuple(self.unrank(r) for r in range(2 * n + 1))
        return self._order

    def in_filtration(self, v, n: int) -> bool:
        if self.kind == INTEGERS:
            return abs(v) <= n
        return True

    def axiom_violations(self, limit: int = 1) -> list[str]:
        """Exhaustive group-axiom check; only meaningful for finite kinds."""
        if self.kind == INTEGERS:
            return []
        vals = self._order
        e = self._identity
        out = []
        for a in vals:
            if self.op(a, e) != a or self.op(e, a) != a:
                out.append(f"identity law fails at {a!r}")
            if not any(self.op(a, b) == e and self.op(b, a) == e for b in vals):
                out.append(f"{a!r} has no two-sided inverse")
            for b in vals:
                ab = self.op(a, b)
                for c in vals:
                    if self.op(ab, c) != self.op(a, self.op(b, c)):
                        out.append(f"associativity fails at ({a!r}, {b!r}, {c!r})")
                        if len(out) >= limit:
                            return out
            if len(out) >= limit:
                return out
        return out

    def describe(self) -> str:
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == CYCLIC:
            return f"Z/{self.m}"
        return f"Table[{len(self.elements)}]"

    def to_dict(self) -> dict:
        if self.kind == INTEGERS:
            return {"kind": INTEGERS}
        if self.kind == CYCLIC:
            return {"kind": CYCLIC, "m": self.m}
        return {"kind": TABLE, "elements": list(self.elements), "table": [list(r) for r in self.table]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ComponentGroup":
        kind = d.get("kind")
        if kind == INTEGERS:
            return cls.integers()
        if kind == CYCLIC:
            return cls.cyclic(d.get("m"))
        if kind == TABLE:
            return cls.from_table(d["elements"], d["table"])
        raise ValueError(f"unknown component kind {kind!r}")


def _find_identity(elems, table, index):
    for k, e in enumerate(elems):
        if all(table[k][j] == elems[j] and table[j][k] == elems[j] for j in range(len(elems))):
            return e
    return None


def symmetric_group_3() -> ComponentGroup:
    """S3 as a Cayley table over permutation tuples written as strings."""
    import itertools

    perms = list(itertools.permutations(range(3)))
    label = {p: "".join(map(str, p)) for p in perms}

    def compose(p, q):  # (p*q)(i) = p(q(i))
        return tuple(p[q[i]] for i in range(3))

    elements = [label[p] for p in perms]
    table = [[label[compose(p, q)] for q in perms] for p in perms]
    return ComponentGroup.from_table(elements, table)


class Element:
    """A finite-support function from indices to component values.

    Entries are kept in canonical form: sorted by index, identity values never
    stored.  Canonical form is the caller's job via :meth:`GroupSpec.element`
    or the group operations; direct construction trusts its input.
    """

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, items: Iterable[tuple[int, Any]] = ()):
        self._items = tuple(sorted(items, key=lambda kv: kv[0]))
        self._dict = dict(self._items)
        self._hash = None

    @classmethod
    def _sorted(cls, items: list) -> "Element":
        # items already sorted by index with no identity values
        e = cls.__new__(cls)
        e._items = tuple(items)
        e._dict = dict(e._items)
        e._hash = None
        return e

    @property
    def items(self) -> tuple:
        return self._items

    def get(self, i, default=None):
        return self._dict.get(i, default)

    def __contains__(self, i) -> bool:
        return i in self._dict

    def support(self) -> frozenset:
        return frozenset(self._dict)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Element) and self._items == other._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}↦{v!r}" for i, v in self._items)
        return "{" + inner + "}"

    def key(self) -> str:
        return repr(self._items)

    def to_json(self) -> list:
        return [[i, v] for i, v in self._items]

    @classmethod
    def from_json(cls, data) -> "Element":
        return cls((int(i), v) for i, v in data)


IDENTITY = Element()


def _check_index(i) -> int:
    if not _is_int(i) or i < 0:
        raise MalformedElementError(f"index {i!r} is not an ordinal below omega")
    return i


@dataclass(frozen=True)
class GroupSpec:
    """The direct sum over ``kappa`` with per-index component groups.

    ``pattern`` repeats periodically over the indices (a single entry means
    one component group everywhere); ``overrides`` pins individual indices.
    """

    kappa: Any = "omega1"
    pattern: tuple = (ComponentGroup.integers(),)
    overrides: tuple = ()
    track: str = PRODUCT
    _lookup: Mapping = field(default=None, compare=False, hash=False, repr=False)
    _single: Any = field(default=None, init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.pattern:
            raise ValueError("need at least one component group")
        if self.track not in TRACKS:
            raise ValueError(f"unknown track {self.track!r}")
        object.__setattr__(self, "pattern", tuple(self.pattern))
        object.__setattr__(self, "overrides", tuple(sorted(dict(self.overrides).items())))
        object.__setattr__(self, "_lookup", dict(self.overrides))
        # fast path for the common one-component, no-override spec
        single = self.pattern[0] if len(self.pattern) == 1 and not self.overrides else None
        object.__setattr__(self, "_single", single)

    @classmethod
    def uniform(cls, component: ComponentGroup, kappa="omega1", track=PRODUCT) -> "GroupSpec":
        return cls(kappa=kappa, pattern=(component,), track=track)

    def component(self, i: int) -> ComponentGroup:
        if self._single is not None:
            return self._single
        g = self._lookup.get(i)
        if g is None:
            g = self.pattern[i % len(self.pattern)]
        return g

    def components_finite(self) -> bool:
        return all(g.finite for g in self.pattern) and all(g.finite for _, g in self.overrides)

    def identity_value(self, i: int):
        return self.component(i).identity

    def element(self, entries) -> Element:
        """Build a canonical element, validating every value."""
        if isinstance(entries, Element):
            entries = entries.items
        elif isinstance(entries, Mapping):
            entries = entries.items()
        out = []
        seen = set()
        for i, v in entries:
            i = _check_index(i)
            if i in seen:
                raise MalformedElementError(f"index {i} given twice")
            seen.add(i)
            g = self.component(i)
            g.check(v)
            if v != g.identity:
                out.append((i, v))
        return Element(out)

    def validate(self, a: Element) -> Element:
        for i, v in a.items:
            _check_index(i)
            g = self.component(i)
            g.check(v)
            if v == g.identity:
                raise MalformedElementError(f"identity value stored at index {i}")
        return a

    def to_dict(self) -> dict:
        d: dict = {"kappa": self.kappa, "track": self.track}
        if len(self.pattern) == 1:
            d["component"] = self.pattern[0].to_dict()
        else:
            d["pattern"] = [g.to_dict() for g in self.pattern]
        if self.overrides:
            d["overrides"] = {str(i): g.to_dict() for i, g in self.overrides}
        return d

    @classmethod
    def from_dict(cls, d: Mapping, track: str | None = None) -> "GroupSpec":
        if "component" in d:
            pattern = (ComponentGroup.from_dict(d["component"]),)
        elif "pattern" in d:
            pattern = tuple(ComponentGroup.from_dict(c) for c in d["pattern"])
        else:
            pattern = (ComponentGroup.integers(),)
        overrides = tuple((int(k), ComponentGroup.from_dict(v)) for k, v in d.get("overrides", {}).items())
        return cls(
            kappa=d.get("kappa", "omega1"),
            pattern=pattern,
            overrides=overrides,
            track=track or d.get("track", PRODUCT),
        )


def op(a: Element, b: Element, spec: GroupSpec) -> Element:
    """Pointwise product ``a * b``."""
    da, db = a._dict, b._dict
    out = []
    for i in sorted(da.keys() | db.keys()):
        g = spec.component(i)
        if i in da and i in db:
            v = g.op(g.check(da[i]), g.check(db[i]))
        else:
            v = g.check(da[i] if i in da else db[i])
        if v != g.identity:
            out.append((i, v))
    return Element._sorted(out)


def inv(a: Element, spec: GroupSpec) -> Element:
    out = []
    for i, v in a.items:
        g = spec.component(i)
        out.append((i, g.inv(g.check(v))))
    return Element._sorted(out)


def support(a: Element) -> frozenset:
    return a.support()


def restrict(a: Element, C) -> Element:
    C = C if isinstance(C, (set, frozenset)) else set(C)
    return Element((i, v) for i, v in a.items if i in C)


def value(a: Element, i: int, spec: GroupSpec):
    return a.get(i, spec.identity_value(i))


@dataclass(frozen=True)
class Window:
    """The finite, explicitly listed set of active coordinates."""

    indices: tuple = ()

    def __post_init__(self):
        idx = tuple(sorted(set(_check_index(i) for i in self.indices)))
        object.__setattr__(self, "indices", idx)

    @classmethod
    def first(cls, n: int) -> "Window":
        return cls(tuple(range(n)))

    def __contains__(self, i) -> bool:
        return i in self._set

    @property
    def _set(self) -> frozenset:
        return frozenset(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def covers(self, indices) -> bool:
        return set(indices) <= self._set

    def extend(self, k: int) -> "Window":
        """Add ``k`` fresh indices drawn in order above the current maximum."""
        start = (self.indices[-1] + 1) if self.indices else 0
        return Window(self.indices + tuple(range(start, start + k)))

    def union(self, indices) -> "Window":
        return Window(self.indices + tuple(indices))

    def to_json(self) -> list:
        return list(self.indices)


# Finite powers as disjoint unions: copy j of index i lives at i * k + j.


def disjoint_union(*specs: GroupSpec) -> GroupSpec:
    """Direct sum of the given groups, interleaving their index sets."""
    if not specs:
        raise ValueError("need at least one group")
    if len({s.track for s in specs}) != 1:
        raise ValueError("cannot mix topology tracks")
    k = len(specs)
    period = math.lcm(*(len(s.pattern) for s in specs))
    pattern = tuple(specs[j].pattern[i % len(specs[j].pattern)] for i in range(period) for j in range(k))
    overrides = tuple((i * k + j, g) for j, s in enumerate(specs) for i, g in s.overrides)
    return GroupSpec(kappa=specs[0].kappa, pattern=pattern, overrides=overrides, track=specs[0].track)


def power(spec: GroupSpec, k: int) -> GroupSpec:
    return disjoint_union(*([spec] * k))


def embed(a: Element, j: int, k: int) -> Element:
    """Place ``a`` into copy ``j`` of a ``k``-fold disjoint union."""
    return Element((i * k + j, v) for i, v in a.items)


def combine(parts, k: int | None = None) -> Element:
    parts = list(parts)
    k = k or len(parts)
    items = []
    for j, a in enumerate(parts):
        items.extend(embed(a, j, k).items)
    return Element(items)


def split(a: Element, k: int) -> list[Element]:
    out: list[list] = [[] for _ in range(k)]
    for i, v in a.items:
        out[i % k].append((i // k, v))
    return [Element(p) for p in out]


def window_elements(W: Window, spec: GroupSpec, max_rank: int) -> Iterator[Element]:
    """Every element supported in ``W`` whose values all have rank <= ``max_rank``."""
    import itertools

    choices = []
    for i in W:
        g = spec.component(i)
        top = max_rank if g.order is None else min(max_rank, g.order - 1)
        choices.append([g.unrank(r) for r in range(top + 1)])
    for vals in itertools.product(*choices):
        yield spec.element(zip(W.indices, vals))
