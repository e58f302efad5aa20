"""Basic open sets, subgroup neighborhoods U_B, cosets and covers.

Covers are never listed.  A :class:`CoverOracle` is a choice function
``x -> member containing x`` plus, optionally, a finite set of indices that
bounds every member's constraints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

from .groups import Element, GroupSpec, IDENTITY, Window, value


class ResourceError(RuntimeError):
    """An enumeration grew past its configured cap."""


class ContractError(ValueError):
    """A caller broke an operation's precondition."""


class CoverError(ValueError):
    """A cover oracle returned a set that misses the queried point."""

    def __init__(self, point, member, label=""):
        super().__init__(f"cover {label or '?'} returned {member} which misses {point}")
        self.point = point
        self.member = member
        self.label = label


DEFAULT_PIECE_CAP = 200_000


def _sorted_values(vals) -> list:
    try:
        return sorted(vals)
    except TypeError:
        return sorted(vals, key=repr)


@dataclass(frozen=True)
class NbdSubgroup:
    """``U_B``: the elements that are the identity on every index of ``B``.

    ``countable`` marks the box track, where a finite ``B`` stands in for a
    countable index set cut down to the window.
    """

    B: frozenset = frozenset()
    countable: bool = False

    def __post_init__(self):
        object.__setattr__(self, "B", frozenset(self.B))

    def contains(self, x: Element) -> bool:
        return self.B.isdisjoint(x.support())

    def __contains__(self, x: Element) -> bool:
        return self.contains(x)

    def refines(self, other: "NbdSubgroup") -> bool:
        """True when this subgroup sits inside ``other``."""
        return other.B <= self.B

    def to_json(self) -> dict:
        return {"indices": sorted(self.B), "countable": self.countable}

    @classmethod
    def from_json(cls, d) -> "NbdSubgroup":
        return cls(frozenset(d["indices"]), bool(d.get("countable", False)))


@dataclass(frozen=True)
class BasicOpen:
    """Finitely many coordinates, each restricted to a finite nonempty value set."""

    constraints: tuple = ()

    def __post_init__(self):
        cons = self.constraints
        if isinstance(cons, Mapping):
            cons = cons.items()
        norm = tuple(sorted(((int(i), frozenset(vs)) for i, vs in cons), key=lambda c: c[0]))
        for i, vs in norm:
            if not vs:
                raise ValueError(f"empty value set at index {i}")
        if len({i for i, _ in norm}) != len(norm):
            raise ValueError("index constrained twice")
        object.__setattr__(self, "constraints", norm)

    @property
    def indices(self) -> frozenset:
        return frozenset(i for i, _ in self.constraints)

    def allowed(self, i):
        for j, vs in self.constraints:
            if j == i:
                return vs
        return None

    def as_dict(self) -> dict:
        return dict(self.constraints)

    def contains(self, f: Element, spec: GroupSpec) -> bool:
        return all(value(f, i, spec) in vs for i, vs in self.constraints)

    def is_whole(self) -> bool:
        return not self.constraints

    def to_json(self) -> dict:
        return {
            "indices": [i for i, _ in self.constraints],
            "values": [_sorted_values(vs) for _, vs in self.constraints],
        }

    @classmethod
    def from_json(cls, d) -> "BasicOpen":
        return cls(tuple(zip(d["indices"], (frozenset(v) for v in d["values"]))))

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}∈{set(_sorted_values(vs))}" for i, vs in self.constraints)
        return "Open{" + inner + "}"


WHOLE = BasicOpen()


def member(f: Element, O: BasicOpen, spec: GroupSpec) -> bool:
    return O.contains(f, spec)


def coset(x: Element, B: Iterable[int], spec: GroupSpec) -> BasicOpen:
    """``x * U_B`` written as a basic open: pin ``x``'s values on ``B``."""
    return BasicOpen(tuple((i, frozenset([value(x, i, spec)])) for i in set(B)))


def coset_rep(O: BasicOpen, spec: GroupSpec) -> Element | None:
    """The rep supported in the pinned indices, or None when ``O`` is not a coset."""
    entries = []
    for i, vs in O.constraints:
        if len(vs) != 1:
            return None
        (v,) = vs
        entries.append((i, v))
    return spec.element(entries)


def coset_equal(x: Element, y: Element, B: Iterable[int]) -> bool:
    B = frozenset(B)
    return all(x.get(i) == y.get(i) for i in B)


def open_subset(A: BasicOpen, O: BasicOpen, spec: GroupSpec) -> bool:
    """Decide ``A ⊆ O`` for nonempty basic opens."""
    a = A.as_dict()
    for i, vs in O.constraints:
        if i in a:
            if not a[i] <= vs:
                return False
        else:
            g = spec.component(i)
            if g.order is None or len(vs) < g.order:
                return False
    return True


def intersect(A: BasicOpen, O: BasicOpen) -> BasicOpen | None:
    out = A.as_dict()
    for i, vs in O.constraints:
        out[i] = out[i] & vs if i in out else vs
        if not out[i]:
            return None
    return BasicOpen(tuple(out.items()))


def translate_inside(x: Element, N: NbdSubgroup, O: BasicOpen, spec: GroupSpec) -> bool:
    """``x * N ⊆ O``.  Because ``N`` is a subgroup this is also ``x*N*N ⊆ O``."""
    return open_subset(coset(x, N.B, spec), O, spec)


# compact pieces


def in_piece(x: Element, n: int, spec: GroupSpec) -> bool:
    """Membership in the compact piece: at most ``n`` coordinates, values in ``C(n)``."""
    return len(x) <= n and all(spec.component(i).in_filtration(v, n) for i, v in x.items)


def iter_compact_piece(n: int, W: Window, spec: GroupSpec, cap: int | None = None) -> Iterator[Element]:
    """Window-supported piece elements ordered by (support size, indices, value ranks)."""
    if n < 0:
        raise ValueError("piece rank must be non-negative")
    count = 0
    idx = tuple(W)
    for s in range(0, min(n, len(idx)) + 1):
        for chosen in itertools.combinations(idx, s):
            pools = []
            for i in chosen:
                g = spec.component(i)
                pools.append([v for v in g.filtration(n) if v != g.identity])
            for vals in itertools.product(*pools):
                count += 1
                if cap is not None and count > cap:
                    raise ResourceError(f"compact piece {n} over {len(idx)} indices exceeds cap {cap}")
                yield Element(zip(chosen, vals))


def compact_piece(n: int, W: Window, spec: GroupSpec, cap: int | None = DEFAULT_PIECE_CAP) -> list[Element]:
    return list(iter_compact_piece(n, W, spec, cap))


def piece_size(n: int, W: Window, spec: GroupSpec) -> int:
    sizes = [len(spec.component(i).filtration(n)) - 1 for i in W]
    # elementary symmetric sums of the per-index nonidentity counts, up to degree n
    e = [1] + [0] * len(sizes)
    for c in sizes:
        for k in range(len(sizes), 0, -1):
            e[k] += e[k - 1] * c
    return sum(e[: n + 1])


# coset representatives of U_B


def enumerate_cosets(B: Iterable[int], spec: GroupSpec) -> Iterator[Element]:
    """Canonical reps of the cosets of ``U_B``: every element supported in ``B``.

    Order is by height (largest value rank), then support size, then indices,
    then ranks.  It depends on ``B`` only, so a larger ``B`` enumerates a
    superset.  Infinite as soon as one component in ``B`` is the integers.
    """
    idx = tuple(sorted(set(B)))
    comps = [spec.component(i) for i in idx]
    tops = [None if g.order is None else g.order - 1 for g in comps]
    yield IDENTITY
    if not idx:
        return
    bounded = all(t is not None for t in tops)
    limit = max(t for t in tops) if bounded else None
    h = 1
    while limit is None or h <= limit:
        for s in range(1, len(idx) + 1):
            for pos in itertools.combinations(range(len(idx)), s):
                ranges = []
                for p in pos:
                    top = h if tops[p] is None else min(h, tops[p])
                    ranges.append(range(1, top + 1))
                for ranks in itertools.product(*ranges):
                    if max(ranks) != h:
                        continue
                    yield Element((idx[p], comps[p].unrank(r)) for p, r in zip(pos, ranks))
        h += 1


def height_key(x: Element, spec: GroupSpec) -> tuple:
    """Sort key reproducing the order of :func:`enumerate_cosets`."""
    ranks = tuple(spec.component(i).rank(v) for i, v in x.items)
    return (max(ranks, default=0), len(ranks), tuple(i for i, _ in x.items), ranks)


def coset_count(B: Iterable[int], spec: GroupSpec) -> int | None:
    total = 1
    for i in set(B):
        g = spec.component(i)
        if g.order is None:
            return None
        total *= g.order
    return total


def is_coset_rep(x: Element, B: Iterable[int]) -> bool:
    return x.support() <= frozenset(B)


# covers


@dataclass(frozen=True)
class CoverOracle:
    """An open cover given by a choice of member for each point."""

    choose: Callable[[Element], BasicOpen] = field(compare=False)
    bound: frozenset | None = None
    label: str = "custom"
    params: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.bound is not None:
            object.__setattr__(self, "bound", frozenset(self.bound))

    def __call__(self, x: Element) -> BasicOpen:
        return self.choose(x)

    def descriptor(self) -> dict:
        d = {"label": self.label}
        d.update(self.params)
        if self.bound is not None:
            d["bound"] = sorted(self.bound)
        return d


def lebesgue_compact(
    cover: CoverOracle,
    n: int,
    W: Window,
    spec: GroupSpec,
    cap: int | None = DEFAULT_PIECE_CAP,
    countable: bool = False,
) -> NbdSubgroup:
    """One identity neighborhood ``N`` with ``x*N ⊆ cover(x)`` on the whole piece.

    The window piece is finite, so the translates ``x * U_{B(x)}`` over it
    are their own finite subcover and ``N`` is their intersection.  Stops
    early once the declared bound is reached, which cannot change the result.
    """
    B: set = set()
    bound = cover.bound
    for x in iter_compact_piece(n, W, spec, cap):
        O = cover.choose(x)
        if not O.contains(x, spec):
            raise CoverError(x, O, cover.label)
        B |= O.indices
        if bound is not None and B >= bound:
            break
    return NbdSubgroup(frozenset(B), countable)


def lebesgue_pgroup(cover: CoverOracle, countable: bool = True) -> NbdSubgroup:
    """``U_{B*}`` for a cover whose members are all constrained inside ``B*``."""
    if cover.bound is None:
        raise ContractError(f"cover {cover.label} declares no uniform bound")
    return NbdSubgroup(cover.bound, countable)
