"""Move types for the three games and their transcript encodings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .groups import Element, GroupSpec, Window
from .topology import BasicOpen, NbdSubgroup, coset_count, enumerate_cosets

WINDOW_B = "window"


@dataclass(frozen=True)
class NbdCover:
    """ONE's move ``O(U_B)``.

    ``B == "window"`` asks for the whole current window, allowed only on
    the box track where it stands for a countable index set.
    """

    B: object

    def resolve(self, window: Window) -> frozenset:
        if self.B == WINDOW_B:
            return frozenset(window)
        return frozenset(self.B)

    def subgroup(self, window: Window, countable: bool = False) -> NbdSubgroup:
        return NbdSubgroup(self.resolve(window), countable or self.B == WINDOW_B)

    def to_json(self, window: Window) -> dict:
        d = {"B": sorted(self.resolve(window))}
        if self.B == WINDOW_B:
            d["countable"] = True
        return d


@dataclass(frozen=True)
class CoverPick:
    """TWO's move against a cover oracle: the queried point and its member."""

    point: Element
    member: BasicOpen

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "open": self.member.to_json()}

    @classmethod
    def from_json(cls, d) -> "CoverPick":
        return cls(Element.from_json(d["point"]), BasicOpen.from_json(d["open"]))


class CountableSet:
    """A countable set offered lazily: restartable iteration plus membership."""

    finite: bool = True

    def __iter__(self) -> Iterator[Element]:
        raise NotImplementedError

    def __contains__(self, x: Element) -> bool:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def first(self) -> Element | None:
        return next(iter(self), None)


class RepSet(CountableSet):
    """The canonical coset reps of ``U_B``: every element supported in ``B``."""

    def __init__(self, B, spec: GroupSpec):
        self.B = frozenset(B)
        self.spec = spec
        self.size = coset_count(self.B, spec)
        self.finite = self.size is not None

    def __iter__(self):
        return enumerate_cosets(self.B, self.spec)

    def __contains__(self, x) -> bool:
        if not x.support() <= self.B:
            return False
        try:
            self.spec.validate(x)
        except ValueError:
            return False
        return True

    def to_json(self) -> dict:
        return {"kind": "reps", "B": sorted(self.B)}


class FiniteSet(CountableSet):
    def __init__(self, items):
        self.items = tuple(items)
        self._set = frozenset(self.items)
        self.size = len(self._set)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, x) -> bool:
        return x in self._set

    def to_json(self) -> dict:
        return {"kind": "finite", "items": [x.to_json() for x in self.items]}


def build_set(d: Mapping, spec: GroupSpec) -> CountableSet:
    kind = d.get("kind")
    if kind == "reps":
        return RepSet(d["B"], spec)
    if kind == "finite":
        return FiniteSet(spec.element(Element.from_json(x)) for x in d["items"])
    raise ValueError(f"unknown countable set kind {kind!r}")


PREFIX_CHECK = 512


def contained_in(a: CountableSet, b: CountableSet) -> bool:
    """``a ⊆ b``; exact for the built-in kinds, a prefix check otherwise."""
    if isinstance(a, RepSet) and isinstance(b, RepSet):
        return a.B <= b.B
    if isinstance(a, FiniteSet):
        return all(x in b for x in a.items)
    if isinstance(a, RepSet) and isinstance(b, FiniteSet):
        return a.finite and a.size <= b.size and all(x in b for x in a)
    return all(x in b for x in itertools.islice(a, PREFIX_CHECK))
